//! Pencils of plane cubics over small finite fields.
//!
//! The entry point is [`build_standard_pencil`]: from the four points
//! a = [-1:1:1], b = [-1:-1:1], c = [1:-1:1], d = [1:1:1] it draws the six
//! connecting lines and forms the two cubic generators — one the product of
//! the lines `ad`, `ac`, `bc`, the other (up to sign) the product of `ab`,
//! `bd`, `cd`. Members C_t = C_0 + t·C_∞ are scanned for singular points by
//! exhaustive enumeration of P² over a chosen extension, each singularity is
//! classified (node / cusp / worse), and the base locus of the pencil is
//! computed with local intersection multiplicities via Macaulay-style linear
//! algebra. In characteristic 5 the scan locates the pencil's distinguished
//! cuspidal member at t = 2; its cusp is the point whose three-step
//! resolution the lattice half of this crate tracks.

pub mod cubic;
pub mod gf;

use std::fmt;

use thiserror::Error;

pub use cubic::{
    classify_singularity, line_through, singularity_analysis, CubicForm, LinearForm,
    PlanePoint, SingularityClass, TangentData,
};
pub use gf::{Gf, GfElement};

use cubic::{local_expansion, LocalPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PencilError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1, got {0}")]
    BadExtensionDegree(usize),
    #[error("no irreducible modulus of degree {m} over F_{p} (search exhausted)")]
    NoIrreducibleModulus { p: u64, m: usize },
    #[error("characteristic {0} collapses the four generating points")]
    BadCharacteristic(u64),
    #[error("the two points coincide; no unique line through them")]
    CoincidentPoints,
    #[error("all three homogeneous coordinates are zero")]
    ZeroPoint,
    #[error("the zero form does not define a curve")]
    ZeroForm,
    #[error("the point does not lie on the curve")]
    PointNotOnCurve,
    #[error("pencil generators are proportional; they define the same cubic")]
    ProportionalGenerators,
    #[error("local multiplicity at {point} did not stabilize below degree {bound}")]
    MultiplicityBoundExceeded { point: String, bound: u32 },
    #[error("base locus incomplete: multiplicities sum to {found} of 9 within degree-3 extensions")]
    BaseLocusUnresolved { found: u64 },
}

/// A pencil of plane cubics C_t = C_0 + t·C_∞ over a prime field, together
/// with the generating points and lines when it was built from them.
#[derive(Debug, Clone)]
pub struct PencilSpec {
    field: Gf,
    points: Vec<(String, PlanePoint)>,
    lines: Vec<(String, LinearForm)>,
    c0: CubicForm,
    cinf: CubicForm,
}

impl PencilSpec {
    /// Wraps two cubic generators. They must both be nonzero and must not be
    /// proportional (proportional generators define a single curve, not a
    /// pencil).
    pub fn new(
        field: Gf,
        points: Vec<(String, PlanePoint)>,
        lines: Vec<(String, LinearForm)>,
        c0: CubicForm,
        cinf: CubicForm,
    ) -> Result<PencilSpec, PencilError> {
        if c0.is_zero(&field) || cinf.is_zero(&field) {
            return Err(PencilError::ZeroForm);
        }
        if c0.proportional_to(&field, &cinf) {
            return Err(PencilError::ProportionalGenerators);
        }
        Ok(PencilSpec { field, points, lines, c0, cinf })
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn points(&self) -> &[(String, PlanePoint)] {
        &self.points
    }

    pub fn lines(&self) -> &[(String, LinearForm)] {
        &self.lines
    }

    pub fn c0(&self) -> &CubicForm {
        &self.c0
    }

    pub fn cinf(&self) -> &CubicForm {
        &self.cinf
    }
}

/// Parameter of a pencil member: an element of the prime field, or ∞ for
/// the second generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TParam {
    Finite(u64),
    Infinity,
}

impl fmt::Display for TParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TParam::Finite(t) => write!(f, "{t}"),
            TParam::Infinity => f.write_str("inf"),
        }
    }
}

/// The cubic form of the member C_t.
pub fn member_form(spec: &PencilSpec, t: TParam) -> CubicForm {
    let gf = &spec.field;
    match t {
        TParam::Infinity => spec.cinf.clone(),
        TParam::Finite(t) => {
            let scale = gf.from_int(t as i64);
            spec.c0.add(gf, &spec.cinf.scale(gf, &scale))
        }
    }
}

/// Builds the four-point pencil over F_p. Requires p ≥ 3: in characteristic
/// 2 the four points are not distinct.
pub fn build_standard_pencil(p: u64) -> Result<PencilSpec, PencilError> {
    let gf = Gf::prime_field(p)?;
    if p == 2 {
        return Err(PencilError::BadCharacteristic(p));
    }
    let a = PlanePoint::from_ints(&gf, [-1, 1, 1])?;
    let b = PlanePoint::from_ints(&gf, [-1, -1, 1])?;
    let c = PlanePoint::from_ints(&gf, [1, -1, 1])?;
    let d = PlanePoint::from_ints(&gf, [1, 1, 1])?;
    let pairs = [
        ("ab", &a, &b),
        ("ac", &a, &c),
        ("ad", &a, &d),
        ("bc", &b, &c),
        ("bd", &b, &d),
        ("cd", &c, &d),
    ];
    let mut lines = Vec::new();
    for (name, p1, p2) in pairs {
        lines.push((name.to_string(), line_through(&gf, p1, p2)?));
    }
    let line = |name: &str| &lines.iter().find(|(n, _)| n == name).expect("line present").1;
    let c0 = CubicForm::product_of_lines(&gf, [line("ad"), line("ac"), line("bc")]);
    // The generators are determined by their zero sets only up to scalars.
    // We fix the scaling of the t = ∞ generator with a sign flip: under this
    // convention the cuspidal member of the characteristic-5 pencil sits at
    // parameter t = 2, which is the label the rest of the crate uses for it.
    let cinf =
        CubicForm::product_of_lines(&gf, [line("ab"), line("bd"), line("cd")]).neg(&gf);
    let points = vec![
        ("a".to_string(), a),
        ("b".to_string(), b),
        ("c".to_string(), c),
        ("d".to_string(), d),
    ];
    PencilSpec::new(gf, points, lines, c0, cinf)
}

/// All points of P²(F_q) in a fixed order: the affine chart z = 1 (x outer,
/// y inner, elements in encoding order), then the chart y = 1, z = 0, then
/// the single point [1:0:0]. Total q² + q + 1.
pub fn plane_points(gf: &Gf) -> Vec<PlanePoint> {
    let mut points = Vec::with_capacity((gf.order() * gf.order() + gf.order() + 1) as usize);
    for x in gf.elements() {
        for y in gf.elements() {
            points.push(
                PlanePoint::new(gf, [x.clone(), y, gf.one()]).expect("chart point is nonzero"),
            );
        }
    }
    for x in gf.elements() {
        points.push(
            PlanePoint::new(gf, [x, gf.one(), gf.zero()]).expect("chart point is nonzero"),
        );
    }
    points.push(
        PlanePoint::new(gf, [gf.one(), gf.zero(), gf.zero()]).expect("chart point is nonzero"),
    );
    points
}

/// A singular point found by enumeration, with its classification and the
/// tangent structure of the double-point locus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularPointInfo {
    pub point: PlanePoint,
    pub class: SingularityClass,
    pub tangent: TangentData,
}

/// Result of a singular-point search over F_{p^m}.
#[derive(Debug, Clone)]
pub struct SingularScan {
    /// The extension degree m that was actually enumerated.
    pub ext_degree: usize,
    /// The field F_{p^m} the points live in.
    pub field: Gf,
    pub points: Vec<SingularPointInfo>,
}

/// Finds all singular points of the cubic over F_{p^m} by exhaustive
/// enumeration: a point is singular when f and all three partial
/// derivatives vanish there. Checking f itself alongside the partials keeps
/// the test correct in characteristic 3, where the Euler relation
/// 3f = x·f_x + y·f_y + z·f_z says nothing.
pub fn singular_points(
    prime_field: &Gf,
    f: &CubicForm,
    ext_degree: usize,
) -> Result<SingularScan, PencilError> {
    if f.is_zero(prime_field) {
        return Err(PencilError::ZeroForm);
    }
    let gf = Gf::extension(prime_field.p(), ext_degree)?;
    let lifted = f.lift_to(prime_field, &gf);
    let mut found = Vec::new();
    for point in plane_points(&gf) {
        let on_curve = gf.is_zero(&lifted.eval(&gf, &point));
        if !on_curve {
            continue;
        }
        let singular = (0..3).all(|var| gf.is_zero(&lifted.partial_eval(&gf, var, &point)));
        if !singular {
            continue;
        }
        let (class, tangent) = singularity_analysis(&gf, &lifted, &point)?;
        found.push(SingularPointInfo { point, class, tangent });
    }
    Ok(SingularScan { ext_degree, field: gf, points: found })
}

/// One row of a pencil scan: the member parameter and its singular points.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub t: TParam,
    pub singular: Vec<SingularPointInfo>,
}

/// Scan of every member C_t, t ∈ F_p ∪ {∞}, over a fixed extension.
#[derive(Debug, Clone)]
pub struct ScanReport {
    pub prime: u64,
    pub ext_degree: usize,
    pub field: Gf,
    pub rows: Vec<ScanRow>,
}

/// Scans all p + 1 members of the pencil for singular points over F_{p^m}.
/// Rows are ordered t = 0, 1, ..., p−1, ∞.
pub fn scan_pencil(spec: &PencilSpec, ext_degree: usize) -> Result<ScanReport, PencilError> {
    let p = spec.field.p();
    let mut rows = Vec::with_capacity(p as usize + 1);
    let params = (0..p).map(TParam::Finite).chain([TParam::Infinity]);
    let mut field = None;
    for t in params {
        let f = member_form(spec, t);
        let scan = singular_points(&spec.field, &f, ext_degree)?;
        field = Some(scan.field);
        rows.push(ScanRow { t, singular: scan.points });
    }
    Ok(ScanReport {
        prime: p,
        ext_degree,
        field: field.expect("at least one member scanned"),
        rows,
    })
}

/// A base point of the pencil with its local intersection multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasePoint {
    /// Canonical display of the point over its field of definition.
    pub label: String,
    pub point: PlanePoint,
    /// Degree m of the smallest extension F_{p^m} containing the point.
    pub field_degree: usize,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseLocus {
    pub points: Vec<BasePoint>,
    /// Sum of the multiplicities; 9 when the locus is fully resolved.
    pub total: u64,
}

pub const DEFAULT_MULTIPLICITY_BOUND: u32 = 10;

/// Computes the base locus of the pencil: the common zeros of the two
/// generators over F_{p^m} for m = 1, 2, 3, each with the local intersection
/// multiplicity dim k[u,v]/(f, g) at the point. By Bézout the multiplicities
/// of a genuine pencil of cubics sum to 9; enumeration stops as soon as that
/// budget is reached.
pub fn base_locus(spec: &PencilSpec) -> Result<BaseLocus, PencilError> {
    base_locus_with_bound(spec, DEFAULT_MULTIPLICITY_BOUND)
}

pub fn base_locus_with_bound(
    spec: &PencilSpec,
    bound: u32,
) -> Result<BaseLocus, PencilError> {
    let p = spec.field.p();
    let mut points = Vec::new();
    let mut total = 0u64;
    for m in 1..=3usize {
        let gf = Gf::extension(p, m)?;
        let f = spec.c0.lift_to(&spec.field, &gf);
        let g = spec.cinf.lift_to(&spec.field, &gf);
        for point in plane_points(&gf) {
            // Points of a proper subfield were counted at a lower level.
            // For m ≤ 3 the only proper subfield of F_{p^m} is F_p itself.
            if m > 1 && point.in_prime_field(&gf) {
                continue;
            }
            if !gf.is_zero(&f.eval(&gf, &point)) || !gf.is_zero(&g.eval(&gf, &point)) {
                continue;
            }
            let f_local = local_expansion(&gf, &f, &point).poly;
            let g_local = local_expansion(&gf, &g, &point).poly;
            let label = point.display(&gf);
            let multiplicity =
                macaulay_multiplicity(&gf, &f_local, &g_local, bound, &label)?;
            total += multiplicity;
            points.push(BasePoint { label, point, field_degree: m, multiplicity });
        }
        if total == 9 {
            return Ok(BaseLocus { points, total });
        }
    }
    Err(PencilError::BaseLocusUnresolved { found: total })
}

/// Local intersection multiplicity of two curve germs at the origin:
/// dim_k k[u,v]_(u,v) / (f, g), computed as the stabilizing value of
/// d_N = dim k[u,v]/((f, g) + m^N). Each d_N is a corank of a Macaulay
/// matrix whose rows are the monomial shifts of f and g truncated below
/// degree N; stabilization d_N = d_{N+1} certifies the answer by Nakayama.
pub(crate) fn macaulay_multiplicity(
    gf: &Gf,
    f: &LocalPoly,
    g: &LocalPoly,
    bound: u32,
    point_label: &str,
) -> Result<u64, PencilError> {
    let mut prev: Option<u64> = None;
    for n in 1..=bound {
        let d = truncated_quotient_dim(gf, f, g, n);
        if prev == Some(d) {
            return Ok(d);
        }
        prev = Some(d);
    }
    Err(PencilError::MultiplicityBoundExceeded {
        point: point_label.to_string(),
        bound,
    })
}

/// Monomials u^a v^b with a + b < n, in a fixed order.
fn monomials_below(n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for d in 0..n {
        for a in (0..=d).rev() {
            out.push((a, d - a));
        }
    }
    out
}

/// dim k[u,v] / ((f, g) + m^n).
fn truncated_quotient_dim(gf: &Gf, f: &LocalPoly, g: &LocalPoly, n: u32) -> u64 {
    let monomials = monomials_below(n);
    let col: std::collections::BTreeMap<(u32, u32), usize> =
        monomials.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut rows = Vec::new();
    for poly in [f, g] {
        for d in 0..n {
            for a in (0..=d).rev() {
                let shifted = poly.shifted(a, d - a);
                let mut row = vec![gf.zero(); monomials.len()];
                let mut nonzero = false;
                for ((x, y), c) in &shifted.terms {
                    if x + y < n {
                        row[col[&(*x, *y)]] = c.clone();
                        nonzero = true;
                    }
                }
                if nonzero {
                    rows.push(row);
                }
            }
        }
    }
    monomials.len() as u64 - matrix_rank(gf, rows)
}

/// Row rank over the field by Gaussian elimination.
fn matrix_rank(gf: &Gf, mut rows: Vec<Vec<GfElement>>) -> u64 {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut rank = 0usize;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !gf.is_zero(&rows[r][c])) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = gf.inv(&rows[rank][c]).expect("pivot is nonzero");
        for j in c..cols {
            rows[rank][j] = gf.mul(&rows[rank][j], &inv);
        }
        for r in 0..rows.len() {
            if r == rank || gf.is_zero(&rows[r][c]) {
                continue;
            }
            let factor = rows[r][c].clone();
            for j in c..cols {
                let sub = gf.mul(&factor, &rows[rank][j]);
                rows[r][j] = gf.sub(&rows[r][j], &sub);
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank as u64
}
