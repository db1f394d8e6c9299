//! Birational contractions to normal (possibly singular) surfaces.
//!
//! A [`ContractionModel`] records a morphism that collapses a chosen set of
//! prime curves to points. The curves are only accepted when their mutual
//! intersection matrix is negative definite — that is the classical
//! contractibility criterion, and every later solve relies on it, so
//! [`plan_contraction`] refuses anything else outright.
//!
//! The target surface never gets coordinates of its own. All of its
//! intersection theory is pulled back upstairs: the pullback of a divisor is
//! its strict transform plus the unique exceptional correction that is
//! orthogonal to every contracted curve (solved exactly on the negative
//! definite Gram block), and intersection numbers downstairs are computed as
//! intersection numbers of pullbacks. Discrepancies come from the same solve
//! applied to the canonical class, and the contracted configuration is
//! classified into the standard chain types so the report can say what kind
//! of singular points the target acquires.

use std::collections::BTreeMap;

use crate::lattice::{ClassVector, Divisor, LatticeError, SurfaceModel};
use crate::qla::{self, solve_linear, QMatrix, QVector, Rational};
use num_traits::{One, Signed, Zero};

#[derive(Debug, thiserror::Error, PartialEq, Eq, Clone)]
pub enum ContractionError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("contracted curves do not span a negative-definite lattice; not contractible to a normal surface")]
    NotContractible,
    #[error("curve {0:?} is not prime and cannot be contracted")]
    NonPrimeCurve(String),
    #[error("curve {0:?} listed twice in the contraction")]
    DuplicateCurve(String),
    #[error("divisor term {0:?} is a contracted curve; pass the strict transform only")]
    ContractedTerm(String),
    #[error("target has Picard rank {target_rank}, but this check needs rank one")]
    RankNotOne { target_rank: usize },
    /// A solve that is guaranteed solvable by negative definiteness failed
    /// anyway. This is a bug in the engine, never a property of the input.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl From<qla::QlaError> for ContractionError {
    fn from(e: qla::QlaError) -> Self {
        ContractionError::Internal(format!("exact solve failed on a definite system: {e}"))
    }
}

/// Sign of an exact rational, for ampleness-style verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(q: &Rational) -> Sign {
        if q.is_zero() {
            Sign::Zero
        } else if q.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Negative => "negative",
            Sign::Zero => "zero",
            Sign::Positive => "positive",
        }
    }
}

/// What a connected contracted configuration collapses to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SingularityKind {
    /// Single (-1)-curve: the contraction is a smooth blow-down.
    SmoothPoint,
    /// Chain of n rational (-2)-curves: the rational double point A_n.
    An(usize),
    /// Single rational curve of self-intersection -n (n >= 3): the cone
    /// singularity written "(n)".
    SingleCurve(u64),
    /// Anything this engine does not recognize; reported, never guessed.
    Unclassified,
}

impl std::fmt::Display for SingularityKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SingularityKind::SmoothPoint => write!(f, "smooth"),
            SingularityKind::An(n) => write!(f, "A{n}"),
            SingularityKind::SingleCurve(n) => write!(f, "({n})"),
            SingularityKind::Unclassified => write!(f, "unclassified"),
        }
    }
}

/// One connected component of the contracted locus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentReport {
    /// Curves in reporting order: path order for chains (starting from the
    /// endpoint appearing first in the contraction list), contraction order
    /// otherwise.
    pub curves: Vec<String>,
    pub kind: SingularityKind,
    /// Gram matrix in the order of `curves`.
    pub gram: QMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularityReport {
    /// Components ordered by first appearance in the contraction list.
    pub components: Vec<ComponentReport>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscrepancyReport {
    /// Discrepancy of each contracted curve, in contraction order.
    pub values: Vec<(String, Rational)>,
    /// True iff every discrepancy is strictly greater than -1.
    pub klt: bool,
}

/// Pullback of a divisor from the target: strict transform plus exceptional
/// correction, chosen orthogonal to every contracted curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PullbackResult {
    pub strict: Divisor,
    /// Correction coefficients in contraction order (zeros included, so the
    /// full table is always visible).
    pub exceptional: Vec<(String, Rational)>,
    /// Class of strict + correction.
    pub class: ClassVector,
}

impl PullbackResult {
    /// The pullback as a formal divisor (strict part plus corrections).
    pub fn as_divisor(&self) -> Divisor {
        let mut d = self.strict.clone();
        for (name, c) in &self.exceptional {
            d.add_term(name, c.clone());
        }
        d
    }

    pub fn exceptional_coefficient(&self, name: &str) -> Option<&Rational> {
        self.exceptional.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }
}

/// Per-curve intersection table against the contracted locus, used both for
/// relative nef checks and for the raw gate tables in reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NefReport {
    /// `(curve, class . curve)` in contraction order.
    pub entries: Vec<(String, Rational)>,
    pub all_nonnegative: bool,
}

impl NefReport {
    pub fn entry(&self, name: &str) -> Option<&Rational> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmpleCheck {
    pub divisor: String,
    pub witness: String,
    pub value: Rational,
    pub sign: Sign,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionModel {
    source: SurfaceModel,
    contracted: Vec<String>,
    position: BTreeMap<String, usize>,
    gram_sub: QMatrix,
    /// Connected components as indices into `contracted`, each sorted,
    /// ordered by smallest index.
    components: Vec<Vec<usize>>,
}

/// Validates a set of curves for contraction and precomputes the Gram block
/// and its connected components.
pub fn plan_contraction(
    source: &SurfaceModel,
    curves: &[&str],
) -> Result<ContractionModel, ContractionError> {
    let mut position = BTreeMap::new();
    let mut classes = Vec::with_capacity(curves.len());
    for (i, &name) in curves.iter().enumerate() {
        let curve = source.curve(name)?;
        if !curve.prime {
            return Err(ContractionError::NonPrimeCurve(name.to_string()));
        }
        if position.insert(name.to_string(), i).is_some() {
            return Err(ContractionError::DuplicateCurve(name.to_string()));
        }
        classes.push(curve.class.clone());
    }

    let n = curves.len();
    let mut gram_sub = QMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = source.intersect(&classes[i], &classes[j])?;
            *gram_sub.at_mut(i, j) = v.clone();
            *gram_sub.at_mut(j, i) = v;
        }
    }
    if !qla::is_negative_definite(&gram_sub)? {
        return Err(ContractionError::NotContractible);
    }

    // Connected components of the dual graph (edges where curves meet).
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        let mut comp = Vec::new();
        seen[start] = true;
        while let Some(i) = stack.pop() {
            comp.push(i);
            for j in 0..n {
                if !seen[j] && i != j && !gram_sub.at(i, j).is_zero() {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components.sort_by_key(|c| c[0]);

    Ok(ContractionModel {
        source: source.clone(),
        contracted: curves.iter().map(|s| s.to_string()).collect(),
        position,
        gram_sub,
        components,
    })
}

impl ContractionModel {
    pub fn source(&self) -> &SurfaceModel {
        &self.source
    }

    pub fn contracted(&self) -> &[String] {
        &self.contracted
    }

    pub fn is_contracted(&self, name: &str) -> bool {
        self.position.contains_key(name)
    }

    pub fn gram_submatrix(&self) -> &QMatrix {
        &self.gram_sub
    }

    /// Picard rank of the target surface.
    pub fn target_rank(&self) -> usize {
        self.source.rank() - self.contracted.len()
    }

    /// Names of each connected contracted component, in contraction order.
    pub fn component_names(&self) -> Vec<Vec<String>> {
        self.components
            .iter()
            .map(|c| c.iter().map(|&i| self.contracted[i].clone()).collect())
            .collect()
    }

    fn contracted_class(&self, i: usize) -> &ClassVector {
        &self.source.curve(&self.contracted[i]).expect("validated at plan time").class
    }

    /// Intersection of a class against every contracted curve, as a vector in
    /// contraction order.
    fn pairings(&self, class: &ClassVector) -> Result<QVector, ContractionError> {
        let mut v = QVector::zeros(self.contracted.len());
        for i in 0..self.contracted.len() {
            v.0[i] = self.source.intersect(class, self.contracted_class(i))?;
        }
        Ok(v)
    }

    /// Core solve: the unique exceptional correction making `class + sum c_i
    /// E_i` orthogonal to every contracted curve. Solvable because the Gram
    /// block is negative definite; a failure here is an engine bug.
    pub fn pullback_class(
        &self,
        class: &ClassVector,
    ) -> Result<(ClassVector, Vec<(String, Rational)>), ContractionError> {
        let rhs = QVector(self.pairings(class)?.iter().map(|v| -v.clone()).collect());
        let coeffs = solve_linear(&self.gram_sub, &rhs)?;
        let mut total = class.clone();
        for (i, c) in coeffs.iter().enumerate() {
            total = total.add(&self.contracted_class(i).scale(c));
        }
        // The defining property, checked unconditionally: the result must be
        // orthogonal to the entire contracted locus.
        for i in 0..self.contracted.len() {
            if !self.source.intersect(&total, self.contracted_class(i))?.is_zero() {
                return Err(ContractionError::Internal(
                    "pullback correction is not orthogonal to the contracted locus".into(),
                ));
            }
        }
        let named = self
            .contracted
            .iter()
            .zip(coeffs.iter())
            .map(|(n, c)| (n.clone(), c.clone()))
            .collect();
        Ok((total, named))
    }

    fn require_strict(&self, d: &Divisor) -> Result<(), ContractionError> {
        for name in d.names() {
            self.source.curve(name)?;
            if self.is_contracted(name) {
                return Err(ContractionError::ContractedTerm(name.to_string()));
            }
        }
        Ok(())
    }

    /// Pullback of a divisor on the target, given by its strict transform
    /// upstairs. Terms on contracted curves are rejected: those coefficients
    /// are exactly what the solve computes, so accepting them would let
    /// callers contradict the defining orthogonality.
    pub fn pullback(&self, strict: &Divisor) -> Result<PullbackResult, ContractionError> {
        self.require_strict(strict)?;
        let class = self.source.divisor_class(strict)?;
        let (total, exceptional) = self.pullback_class(&class)?;
        Ok(PullbackResult { strict: strict.clone(), exceptional, class: total })
    }

    /// Class of the pullback of the target's canonical divisor.
    pub fn canonical_pullback_class(&self) -> Result<ClassVector, ContractionError> {
        let (class, _) = self.pullback_class(self.source.canonical_class())?;
        Ok(class)
    }

    /// Discrepancy of each contracted curve: the coefficients `a_i` with
    /// `K_source = (pullback of K_target) + sum a_i E_i`. These are minus the
    /// correction coefficients of the canonical pullback.
    pub fn discrepancies(&self) -> Result<DiscrepancyReport, ContractionError> {
        let (_, correction) = self.pullback_class(self.source.canonical_class())?;
        let values: Vec<(String, Rational)> =
            correction.into_iter().map(|(n, c)| (n, -c)).collect();
        let klt = values.iter().all(|(_, a)| a > &-Rational::one());
        Ok(DiscrepancyReport { values, klt })
    }

    /// Classifies each connected contracted component into the chain types
    /// this engine knows: smooth blow-down, A_n, single negative curve (n).
    pub fn classify_singularities(&self) -> Result<SingularityReport, ContractionError> {
        let mut components = Vec::new();
        for comp in &self.components {
            components.push(self.classify_component(comp)?);
        }
        Ok(SingularityReport { components })
    }

    fn classify_component(&self, comp: &[usize]) -> Result<ComponentReport, ContractionError> {
        let genus_zero = |i: usize| -> Result<bool, ContractionError> {
            Ok(self.source.arithmetic_genus(self.contracted_class(i))?.is_zero())
        };
        let self_int = |i: usize| self.gram_sub.at(i, i).clone();

        let order: Vec<usize>;
        let kind: SingularityKind;

        if comp.len() == 1 {
            let i = comp[0];
            order = vec![i];
            let s = self_int(i);
            kind = if !genus_zero(i)? || !s.is_integer() {
                SingularityKind::Unclassified
            } else if s == qla::rat_int(-1) {
                SingularityKind::SmoothPoint
            } else if s == qla::rat_int(-2) {
                SingularityKind::An(1)
            } else {
                // Negative definiteness already forces s <= -1; anything at
                // -3 or below is the cone type (n).
                let n = (-s.to_integer())
                    .try_into()
                    .map_err(|_| ContractionError::Internal("self-intersection overflow".into()))?;
                SingularityKind::SingleCurve(n)
            };
        } else {
            // Multi-curve component: candidate A_n chain. Require genus-0
            // (-2)-curves meeting pairwise in at most one point, with the
            // dual graph a simple path; everything else is unclassified.
            let mut ok = true;
            for &i in comp {
                ok &= genus_zero(i)? && self_int(i) == qla::rat_int(-2);
            }
            let mut degrees: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for &i in comp {
                degrees.insert(i, Vec::new());
            }
            for (a, &i) in comp.iter().enumerate() {
                for &j in comp.iter().skip(a + 1) {
                    let v = self.gram_sub.at(i, j);
                    if v.is_zero() {
                        continue;
                    }
                    if *v != Rational::one() {
                        ok = false;
                    }
                    degrees.get_mut(&i).unwrap().push(j);
                    degrees.get_mut(&j).unwrap().push(i);
                }
            }
            let endpoints: Vec<usize> = comp
                .iter()
                .copied()
                .filter(|i| degrees[i].len() == 1)
                .collect();
            ok &= degrees.values().all(|d| d.len() <= 2) && endpoints.len() == 2;

            if ok {
                // Walk the path from the endpoint listed first.
                let start = *endpoints.iter().min().unwrap();
                let mut walk = vec![start];
                let mut prev = None;
                let mut here = start;
                while walk.len() < comp.len() {
                    let next = degrees[&here]
                        .iter()
                        .copied()
                        .find(|&j| Some(j) != prev)
                        .ok_or_else(|| {
                            ContractionError::Internal("path walk fell off the chain".into())
                        })?;
                    walk.push(next);
                    prev = Some(here);
                    here = next;
                }
                order = walk;
                kind = SingularityKind::An(comp.len());
            } else {
                order = comp.to_vec();
                kind = SingularityKind::Unclassified;
            }
        }

        let k = order.len();
        let mut gram = QMatrix::zeros(k, k);
        for (a, &i) in order.iter().enumerate() {
            for (b, &j) in order.iter().enumerate() {
                *gram.at_mut(a, b) = self.gram_sub.at(i, j).clone();
            }
        }
        Ok(ComponentReport {
            curves: order.iter().map(|&i| self.contracted[i].clone()).collect(),
            kind,
            gram,
        })
    }

    /// Intersection number, on the target, of the images of two divisors
    /// given by their strict transforms. Computed as the intersection of the
    /// two pullbacks; by orthogonality this equals pullback-against-strict,
    /// which is the projection formula this module's tests pin down.
    pub fn descend_intersection(
        &self,
        a: &Divisor,
        b: &Divisor,
    ) -> Result<Rational, ContractionError> {
        let pa = self.pullback(a)?;
        let pb = self.pullback(b)?;
        Ok(self.source.intersect(&pa.class, &pb.class)?)
    }

    /// Intersection of the target's canonical divisor with the image of a
    /// strict divisor.
    pub fn canonical_descend_intersection(
        &self,
        b: &Divisor,
    ) -> Result<Rational, ContractionError> {
        let k = self.canonical_pullback_class()?;
        let pb = self.pullback(b)?;
        Ok(self.source.intersect(&k, &pb.class)?)
    }

    /// Intersection table of a class against every contracted curve. The
    /// class may (and for gate divisors does) have support on the contracted
    /// locus itself.
    pub fn relative_nef_report_class(&self, class: &ClassVector) -> Result<NefReport, ContractionError> {
        let pairings = self.pairings(class)?;
        let entries: Vec<(String, Rational)> = self
            .contracted
            .iter()
            .zip(pairings.iter())
            .map(|(n, v)| (n.clone(), v.clone()))
            .collect();
        let all_nonnegative = entries.iter().all(|(_, v)| !v.is_negative());
        Ok(NefReport { entries, all_nonnegative })
    }

    /// Divisor-level variant of [`relative_nef_report_class`].
    ///
    /// [`relative_nef_report_class`]: ContractionModel::relative_nef_report_class
    pub fn relative_nef_report(&self, d: &Divisor) -> Result<NefReport, ContractionError> {
        let class = self.source.divisor_class(d)?;
        self.relative_nef_report_class(&class)
    }

    /// On a rank-one target, a divisor is ample iff it pairs positively with
    /// any single curve image; `witness` names the (non-contracted) test
    /// curve. Returns the exact pairing and its sign.
    pub fn ample_check_rank_one(
        &self,
        divisor: &Divisor,
        divisor_name: &str,
        witness: &str,
    ) -> Result<AmpleCheck, ContractionError> {
        if self.target_rank() != 1 {
            return Err(ContractionError::RankNotOne { target_rank: self.target_rank() });
        }
        let witness_curve = self.source.curve(witness)?;
        if !witness_curve.prime {
            return Err(ContractionError::NonPrimeCurve(witness.to_string()));
        }
        if self.is_contracted(witness) {
            return Err(ContractionError::ContractedTerm(witness.to_string()));
        }
        let value =
            self.descend_intersection(divisor, &Divisor::from_int_terms([(witness, 1)]))?;
        Ok(AmpleCheck {
            divisor: divisor_name.to_string(),
            witness: witness.to_string(),
            value: value.clone(),
            sign: Sign::of(&value),
        })
    }

    /// Sign of the target's canonical class against a witness curve (rank-one
    /// target). Negative means the target is a del Pezzo-type surface.
    pub fn canonical_ample_check(&self, witness: &str) -> Result<AmpleCheck, ContractionError> {
        if self.target_rank() != 1 {
            return Err(ContractionError::RankNotOne { target_rank: self.target_rank() });
        }
        let witness_curve = self.source.curve(witness)?;
        if !witness_curve.prime {
            return Err(ContractionError::NonPrimeCurve(witness.to_string()));
        }
        if self.is_contracted(witness) {
            return Err(ContractionError::ContractedTerm(witness.to_string()));
        }
        let k = self.canonical_pullback_class()?;
        let pw = self.pullback(&Divisor::from_int_terms([(witness, 1)]))?;
        let value = self.source.intersect(&k, &pw.class)?;
        Ok(AmpleCheck {
            divisor: "K".to_string(),
            witness: witness.to_string(),
            value: value.clone(),
            sign: Sign::of(&value),
        })
    }

    /// Convenience search: for each contracted curve `C`, the smallest
    /// coefficient `q = k/d` (denominators up to `max_denominator`, `0 < q <
    /// 1`) such that `class - q*C` pairs nonnegatively with every contracted
    /// curve. Useful for finding a boundary that repairs a single negative
    /// entry in a gate table.
    pub fn search_relative_boundaries(
        &self,
        class: &ClassVector,
        max_denominator: u32,
    ) -> Result<Vec<(String, Rational)>, ContractionError> {
        let mut out = Vec::new();
        for name in &self.contracted {
            let curve_class = &self.source.curve(name)?.class;
            let mut candidates: Vec<Rational> = Vec::new();
            for d in 1..=max_denominator {
                for k in 1..d {
                    candidates.push(qla::rat(k as i64, d as i64));
                }
            }
            candidates.sort();
            candidates.dedup();
            for q in candidates {
                let shifted = class.sub(&curve_class.scale(&q));
                if self.relative_nef_report_class(&shifted)?.all_nonnegative {
                    out.push((name.clone(), q));
                    break;
                }
            }
        }
        Ok(out)
    }
}
