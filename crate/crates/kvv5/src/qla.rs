//! Exact rational linear algebra.
//!
//! Every quantity downstream (intersection numbers, pullback coefficients,
//! discrepancies, Euler characteristics) is a rational number that must be
//! reproduced exactly, so this module works over arbitrary-precision
//! rationals throughout. No floating point appears anywhere.
//!
//! The three workhorses are [`solve_linear`] (dense Gaussian elimination),
//! [`is_negative_definite`] (leading-principal-minor signs), and
//! [`floor_rationals`] (component-wise floor, used for rounding divisors).
//! Matrices here are small — Picard ranks stay well under 20 — so dense
//! textbook algorithms are the right tool.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational scalar. Always kept in lowest terms with a
/// positive denominator (guaranteed by the underlying representation).
pub type Rational = num_rational::BigRational;

/// Shorthand for `n/d` as a [`Rational`]. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand for an integer as a [`Rational`].
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Canonical text form: `"n"` for integers, `"n/d"` otherwise, with any
/// minus sign on the numerator.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses the canonical text form accepted by scenario files: an optional
/// sign, an integer numerator, and an optional `/denominator`.
pub fn parse_rational(s: &str) -> Result<Rational, QlaError> {
    let bad = || QlaError::ParseRational { text: s.to_string() };
    let (numer, denom) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = numer.parse().map_err(|_| bad())?;
    let d: BigInt = denom.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

#[derive(Debug, thiserror::Error, PartialEq, Eq, Clone)]
pub enum QlaError {
    /// Elimination could not find a nonzero pivot in some column: the system
    /// is singular (or inconsistent) and callers must treat this as a
    /// structural failure, not a value.
    #[error("singular system: no unique solution")]
    SingularSystem,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("cannot parse rational from {text:?} (expected \"n\" or \"n/d\")")]
    ParseRational { text: String },
}

/// Dense vector of rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QVector(pub Vec<Rational>);

impl QVector {
    pub fn zeros(n: usize) -> Self {
        QVector(vec![Rational::zero(); n])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        QVector(v.iter().map(|&n| rat_int(n)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    /// Euclidean dot product (no signature); lattice pairings go through
    /// `QMatrix::bilinear` instead.
    pub fn dot(&self, other: &QVector) -> Result<Rational, QlaError> {
        if self.len() != other.len() {
            return Err(QlaError::DimensionMismatch { left: self.len(), right: other.len() });
        }
        Ok(self.iter().zip(other.iter()).map(|(a, b)| a * b).sum())
    }
}

impl std::ops::Index<usize> for QVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

/// Dense row-major matrix of rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl QMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self, QlaError> {
        if entries.len() != rows * cols {
            return Err(QlaError::DimensionMismatch { left: rows * cols, right: entries.len() });
        }
        Ok(QMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, QlaError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(QlaError::DimensionMismatch { left: c, right: 0 });
        }
        Ok(QMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() })
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        QMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&n| rat_int(n)).collect()).collect())
            .expect("ragged integer rows")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Rational {
        &mut self.entries[r * self.cols + c]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.at(i, j) == self.at(j, i)))
    }

    /// Leading principal `k x k` block.
    pub fn leading_block(&self, k: usize) -> QMatrix {
        let mut b = QMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                *b.at_mut(i, j) = self.at(i, j).clone();
            }
        }
        b
    }

    pub fn mul_vec(&self, v: &QVector) -> Result<QVector, QlaError> {
        if self.cols != v.len() {
            return Err(QlaError::DimensionMismatch { left: self.cols, right: v.len() });
        }
        let mut out = QVector::zeros(self.rows);
        for i in 0..self.rows {
            out.0[i] = (0..self.cols).map(|j| self.at(i, j) * &v[j]).sum();
        }
        Ok(out)
    }

    /// Symmetric pairing `a^T M b`.
    pub fn bilinear(&self, a: &QVector, b: &QVector) -> Result<Rational, QlaError> {
        a.dot(&self.mul_vec(b)?)
    }
}

/// Solves `m x = rhs` for square `m` by Gaussian elimination with exact
/// pivoting: at each column the first row with a nonzero entry is chosen, so
/// the elimination path (and therefore the byte-level output of everything
/// downstream) is deterministic. Returns [`QlaError::SingularSystem`] when no
/// pivot exists.
pub fn solve_linear(m: &QMatrix, rhs: &QVector) -> Result<QVector, QlaError> {
    if !m.is_square() {
        return Err(QlaError::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    if rhs.len() != n {
        return Err(QlaError::DimensionMismatch { left: n, right: rhs.len() });
    }
    // Augmented system, eliminated in place.
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rational> = (0..n).map(|j| m.at(i, j).clone()).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();

    for col in 0..n {
        let pivot_row = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(QlaError::SingularSystem)?;
        a.swap(col, pivot_row);
        let pivot = a[col][col].clone();
        for r in (col + 1)..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &pivot;
            for c in col..=n {
                let delta = &factor * &a[col][c];
                a[r][c] = &a[r][c] - &delta;
            }
        }
    }

    // Back-substitution.
    let mut x = vec![Rational::zero(); n];
    for col in (0..n).rev() {
        let mut acc = a[col][n].clone();
        for c in (col + 1)..n {
            acc -= &a[col][c] * &x[c];
        }
        x[col] = acc / &a[col][col];
    }
    Ok(QVector(x))
}

/// Determinant by fraction-free-ish Gaussian elimination (exact rationals, so
/// ordinary elimination is already exact; row swaps flip the sign).
pub fn determinant(m: &QMatrix) -> Result<Rational, QlaError> {
    if !m.is_square() {
        return Err(QlaError::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| m.at(i, j).clone()).collect())
        .collect();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot_row) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Ok(Rational::zero());
        };
        if pivot_row != col {
            a.swap(col, pivot_row);
            det = -det;
        }
        let pivot = a[col][col].clone();
        det *= &pivot;
        for r in (col + 1)..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &pivot;
            for c in col..n {
                let delta = &factor * &a[col][c];
                a[r][c] = &a[r][c] - &delta;
            }
        }
    }
    Ok(det)
}

/// Tests negative definiteness of a symmetric matrix by the leading principal
/// minor criterion: the k-th minor must have sign (-1)^k for every k. A zero
/// minor already rules out definiteness, so the scan can stop early.
///
/// This is the gate that certifies a set of curves is contractible to a
/// normal point; callers treat a `false` as "refuse to contract", never as a
/// soft warning.
pub fn is_negative_definite(m: &QMatrix) -> Result<bool, QlaError> {
    if !m.is_square() {
        return Err(QlaError::NotSquare { rows: m.rows, cols: m.cols });
    }
    if !m.is_symmetric() {
        return Err(QlaError::NotSymmetric);
    }
    let n = m.rows;
    // One elimination pass without row swaps: if it completes, the k-th
    // leading minor is the product of the first k pivots; a zero pivot at
    // step k means that minor vanishes, which already refutes definiteness.
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| m.at(i, j).clone()).collect())
        .collect();
    let mut minor = Rational::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            return Ok(false);
        }
        let pivot = a[k][k].clone();
        minor *= &pivot;
        let expect_negative = k % 2 == 0; // sign (-1)^(k+1) for the (k+1)-st minor
        if expect_negative != minor.is_negative() {
            return Ok(false);
        }
        for r in (k + 1)..n {
            if a[r][k].is_zero() {
                continue;
            }
            let factor = &a[r][k] / &pivot;
            for c in k..n {
                let delta = &factor * &a[k][c];
                a[r][c] = &a[r][c] - &delta;
            }
        }
    }
    Ok(true)
}

/// Component-wise floor. `-2/5` rounds to `-1`, not `0`: divisor rounding
/// must round *down* on every coefficient for the vanishing argument to be
/// valid, which is exactly `BigRational::floor`.
pub fn floor_rationals(v: &QVector) -> QVector {
    QVector(v.iter().map(Rational::floor).collect())
}
