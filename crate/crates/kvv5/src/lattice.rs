//! Picard-lattice bookkeeping for iterated blow-ups of the plane.
//!
//! A [`SurfaceModel`] is a free Z-module with the fixed orthogonal basis
//! `H, e_1, ..., e_n` (hyperplane class followed by one total-transform class
//! per blow-up), intersection form `diag(1, -1, ..., -1)`, a canonical class,
//! and a set of named tracked curves. Surfaces are immutable: [`blow_up`]
//! returns a new model with the basis extended by one, the canonical class
//! shifted by the new basis class, and every tracked curve replaced by its
//! strict transform (`class - m * e_new` when the curve passes through the
//! center with multiplicity `m`).
//!
//! Tracked-curve classes always refer to *strict* transforms; the basis
//! vectors are the *total* transforms. The two agree only until the curve or
//! exceptional locus is blown up again, which is exactly the distinction the
//! center-multiplicity records exist to maintain.
//!
//! [`blow_up`]: SurfaceModel::blow_up

use std::collections::BTreeMap;

use crate::qla::{self, QMatrix, QVector, Rational};
use num_traits::{One, Signed, Zero};

#[derive(Debug, thiserror::Error, PartialEq, Eq, Clone)]
pub enum LatticeError {
    #[error("unknown curve {0:?}")]
    UnknownCurve(String),
    #[error("curve name {0:?} is already taken")]
    DuplicateCurve(String),
    #[error("class has {got} coordinates, lattice has rank {rank}")]
    DimensionMismatch { rank: usize, got: usize },
    #[error("curve {0:?} is not prime; only prime curves can be used here")]
    NonPrimeTerm(String),
    #[error("coefficient of {0:?} is not an integer")]
    NonIntegralCoefficient(String),
}

/// Element of the Picard lattice (rational coefficients allowed, since
/// pullbacks and boundaries live in the Q-extension).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassVector(pub QVector);

impl ClassVector {
    pub fn zero(rank: usize) -> Self {
        ClassVector(QVector::zeros(rank))
    }

    /// The i-th basis class.
    pub fn basis(rank: usize, i: usize) -> Self {
        let mut v = QVector::zeros(rank);
        v.0[i] = Rational::one();
        ClassVector(v)
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        ClassVector(QVector::from_ints(coords))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coord(&self, i: usize) -> &Rational {
        &self.0[i]
    }

    pub fn coords(&self) -> &QVector {
        &self.0
    }

    pub fn add(&self, other: &ClassVector) -> ClassVector {
        assert_eq!(self.len(), other.len(), "class rank mismatch");
        ClassVector(QVector(
            self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &ClassVector) -> ClassVector {
        assert_eq!(self.len(), other.len(), "class rank mismatch");
        ClassVector(QVector(
            self.0.iter().zip(other.0.iter()).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn scale(&self, c: &Rational) -> ClassVector {
        ClassVector(QVector(self.0.iter().map(|a| a * c).collect()))
    }

    pub fn neg(&self) -> ClassVector {
        ClassVector(QVector(self.0.iter().map(|a| -a).collect()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rational::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(Rational::is_integer)
    }

    /// Appends a zero coordinate (used when the ambient lattice grows).
    fn extended(&self) -> ClassVector {
        let mut v = self.0.clone();
        v.0.push(Rational::zero());
        ClassVector(v)
    }
}

/// A named curve class carried through the blow-up history. `prime` marks
/// classes of actual irreducible curves (eligible as blow-up centers and for
/// contraction) as opposed to formal combinations tracked for convenience.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackedCurve {
    pub name: String,
    pub class: ClassVector,
    pub prime: bool,
}

/// One blow-up: a fresh basis name plus, for every existing tracked curve
/// passing through the center, its multiplicity there. Curves not listed are
/// taken to miss the center (multiplicity 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowUpRecord {
    pub name: String,
    pub centers: BTreeMap<String, u32>,
}

impl BlowUpRecord {
    pub fn new(name: &str, centers: &[(&str, u32)]) -> Self {
        BlowUpRecord {
            name: name.to_string(),
            centers: centers.iter().map(|&(n, m)| (n.to_string(), m)).collect(),
        }
    }
}

/// Formal Q-divisor supported on tracked curves. Zero coefficients are never
/// stored, so equality is support-plus-coefficients equality.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Divisor {
    terms: BTreeMap<String, Rational>,
}

impl Divisor {
    pub fn new() -> Self {
        Divisor::default()
    }

    pub fn from_terms<'a>(terms: impl IntoIterator<Item = (&'a str, Rational)>) -> Self {
        let mut d = Divisor::new();
        for (name, c) in terms {
            d.add_term(name, c);
        }
        d
    }

    pub fn from_int_terms<'a>(terms: impl IntoIterator<Item = (&'a str, i64)>) -> Self {
        Divisor::from_terms(terms.into_iter().map(|(n, c)| (n, qla::rat_int(c))))
    }

    /// Adds `c` times the named curve, dropping the term if it cancels.
    pub fn add_term(&mut self, name: &str, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(name.to_string()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(name);
        }
    }

    pub fn coefficient(&self, name: &str) -> Rational {
        self.terms.get(name).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Rational)> {
        self.terms.iter().map(|(n, c)| (n.as_str(), c))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.terms.keys().map(String::as_str)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (n, c) in other.iter() {
            out.add_term(n, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (n, c) in other.iter() {
            out.add_term(n, -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Divisor {
        if c.is_zero() {
            return Divisor::new();
        }
        Divisor {
            terms: self.terms.iter().map(|(n, v)| (n.clone(), v * c)).collect(),
        }
    }

    pub fn neg(&self) -> Divisor {
        self.scale(&-Rational::one())
    }
}

impl std::fmt::Display for Divisor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (name, c)) in self.terms.iter().enumerate() {
            let c_str = qla::format_rational(c);
            if i == 0 {
                if c.is_one() {
                    write!(f, "{name}")?;
                } else {
                    write!(f, "{c_str}*{name}")?;
                }
            } else if c.is_positive() {
                if c.is_one() {
                    write!(f, " + {name}")?;
                } else {
                    write!(f, " + {c_str}*{name}")?;
                }
            } else {
                let abs = qla::format_rational(&-c.clone());
                if (-c.clone()).is_one() {
                    write!(f, " - {name}")?;
                } else {
                    write!(f, " - {abs}*{name}")?;
                }
            }
        }
        Ok(())
    }
}

/// Smooth rational surface presented as an iterated blow-up of the plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceModel {
    basis_names: Vec<String>,
    canonical: ClassVector,
    curves: Vec<TrackedCurve>,
    index: BTreeMap<String, usize>,
    history: Vec<BlowUpRecord>,
}

impl SurfaceModel {
    /// The projective plane: rank-one lattice spanned by the line class `H`,
    /// canonical class `-3H`, no curves tracked yet.
    pub fn projective_plane() -> Self {
        SurfaceModel {
            basis_names: vec!["H".to_string()],
            canonical: ClassVector::from_ints(&[-3]),
            curves: Vec::new(),
            index: BTreeMap::new(),
            history: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis_names.len()
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis_names
    }

    pub fn history(&self) -> &[BlowUpRecord] {
        &self.history
    }

    pub fn canonical_class(&self) -> &ClassVector {
        &self.canonical
    }

    pub fn k_squared(&self) -> Rational {
        self.intersect(&self.canonical, &self.canonical)
            .expect("canonical class always has full rank")
    }

    /// The diagonal intersection form `diag(1, -1, ..., -1)`.
    pub fn gram(&self) -> QMatrix {
        let n = self.rank();
        let mut g = QMatrix::zeros(n, n);
        for i in 0..n {
            *g.at_mut(i, i) = if i == 0 { Rational::one() } else { -Rational::one() };
        }
        g
    }

    fn check_rank(&self, c: &ClassVector) -> Result<(), LatticeError> {
        if c.len() != self.rank() {
            return Err(LatticeError::DimensionMismatch { rank: self.rank(), got: c.len() });
        }
        Ok(())
    }

    /// Intersection number of two classes under the diagonal form.
    pub fn intersect(&self, a: &ClassVector, b: &ClassVector) -> Result<Rational, LatticeError> {
        self.check_rank(a)?;
        self.check_rank(b)?;
        let mut acc = a.coord(0) * b.coord(0);
        for i in 1..self.rank() {
            acc -= a.coord(i) * b.coord(i);
        }
        Ok(acc)
    }

    /// Arithmetic genus `1 + (c^2 + K.c)/2` of a class.
    pub fn arithmetic_genus(&self, c: &ClassVector) -> Result<Rational, LatticeError> {
        let c2 = self.intersect(c, c)?;
        let kc = self.intersect(&self.canonical, c)?;
        Ok(Rational::one() + (c2 + kc) / qla::rat_int(2))
    }

    pub fn has_curve(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn curve(&self, name: &str) -> Result<&TrackedCurve, LatticeError> {
        self.index
            .get(name)
            .map(|&i| &self.curves[i])
            .ok_or_else(|| LatticeError::UnknownCurve(name.to_string()))
    }

    /// Tracked curves in registration order (deterministic across runs).
    pub fn curves(&self) -> impl Iterator<Item = &TrackedCurve> {
        self.curves.iter()
    }

    pub fn curve_names(&self) -> impl Iterator<Item = &str> {
        self.curves.iter().map(|c| c.name.as_str())
    }

    /// Registers a named class. Names share a namespace with basis names to
    /// keep scenario files unambiguous.
    pub fn register_curve(
        &mut self,
        name: &str,
        class: ClassVector,
        prime: bool,
    ) -> Result<(), LatticeError> {
        self.check_rank(&class)?;
        if self.has_curve(name) || self.basis_names.iter().any(|b| b == name) {
            return Err(LatticeError::DuplicateCurve(name.to_string()));
        }
        self.index.insert(name.to_string(), self.curves.len());
        self.curves.push(TrackedCurve { name: name.to_string(), class, prime });
        Ok(())
    }

    /// Convenience: a plane curve of the given degree (class `d*H` extended
    /// by zeros if blow-ups already happened, for curves missing all centers).
    pub fn register_plane_curve(&mut self, name: &str, degree: u32) -> Result<(), LatticeError> {
        let mut v = QVector::zeros(self.rank());
        v.0[0] = qla::rat_int(degree as i64);
        self.register_curve(name, ClassVector(v), true)
    }

    /// Blows up one point. The record's `name` becomes both the new basis
    /// label (total transform of the exceptional curve) and a new tracked
    /// prime curve (its strict transform, which starts out equal). Every
    /// center multiplicity `m` converts the ambient class of that curve to
    /// the class of its strict transform.
    pub fn blow_up(&self, record: &BlowUpRecord) -> Result<SurfaceModel, LatticeError> {
        if self.has_curve(&record.name) || self.basis_names.iter().any(|b| b == &record.name) {
            return Err(LatticeError::DuplicateCurve(record.name.clone()));
        }
        for name in record.centers.keys() {
            let curve = self.curve(name)?;
            if !curve.prime {
                return Err(LatticeError::NonPrimeTerm(name.clone()));
            }
        }

        let mut next = self.clone();
        next.basis_names.push(record.name.clone());
        let new_rank = next.basis_names.len();
        let e = ClassVector::basis(new_rank, new_rank - 1);

        next.canonical = next.canonical.extended().add(&e);
        for curve in next.curves.iter_mut() {
            let m = record.centers.get(&curve.name).copied().unwrap_or(0);
            curve.class = curve.class.extended();
            if m > 0 {
                curve.class = curve.class.sub(&e.scale(&qla::rat_int(m as i64)));
            }
        }
        next.index.insert(record.name.clone(), next.curves.len());
        next.curves.push(TrackedCurve { name: record.name.clone(), class: e, prime: true });
        next.history.push(record.clone());
        Ok(next)
    }

    /// Class of a formal divisor (must reference tracked curves only).
    pub fn divisor_class(&self, d: &Divisor) -> Result<ClassVector, LatticeError> {
        let mut acc = ClassVector::zero(self.rank());
        for (name, c) in d.iter() {
            let curve = self.curve(name)?;
            acc = acc.add(&curve.class.scale(c));
        }
        Ok(acc)
    }

    /// Coefficient-wise round-down of a divisor. Operates on the formal sum,
    /// not the class: `floor(-2/5 A + 1/5 B) = -A`, whatever the classes are.
    pub fn floor_divisor(&self, d: &Divisor) -> Result<Divisor, LatticeError> {
        let mut out = Divisor::new();
        for (name, c) in d.iter() {
            self.curve(name)?;
            out.add_term(name, c.floor());
        }
        Ok(out)
    }

    /// Intersection number of two formal divisors.
    pub fn intersect_divisors(&self, a: &Divisor, b: &Divisor) -> Result<Rational, LatticeError> {
        let ca = self.divisor_class(a)?;
        let cb = self.divisor_class(b)?;
        self.intersect(&ca, &cb)
    }
}
