//! Report assembly: one canonical JSON tree per scenario run.
//!
//! Every subcommand reads from the tree built here. Maps are `serde_json`
//! objects, which this crate configures as sorted maps, so serializing the
//! same scenario twice produces byte-identical output. All rational numbers
//! are rendered through [`format_rational`] ("3", "-1/15"); counts stay JSON
//! numbers; everything else is a string or a bool.
//!
//! Audit mode replays the scenario's `expectations` against the finished
//! tree: each entry names a dotted path, and the stored value must equal the
//! computed value exactly — no tolerance, no coercion.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::contraction::{ContractionError, ContractionModel, SingularityReport};
use crate::lattice::{ClassVector, Divisor, LatticeError, SurfaceModel};
use crate::pencil::{self, PencilError, TangentData};
use crate::qla::{self, format_rational, QlaError, Rational};
use crate::riemann_roch::{
    intersection_audit, run_witness_pipeline, RrError, WitnessReport, WitnessTask,
};
use crate::scenario::{BuiltScenario, Expectation, Scenario, ScenarioError};

/// Anything that can go wrong between a scenario file and a finished tree.
///
/// The distinction matters for exit codes: a [`ReportError::Scenario`] means
/// the input was bad, while every other variant means a validated scenario
/// made the engine fail — an internal invariant violation.
#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("stage audit failed: {0}")]
    Rr(#[from] RrError),
    #[error("contraction engine failed: {0}")]
    Contraction(#[from] ContractionError),
    #[error("lattice engine failed: {0}")]
    Lattice(#[from] LatticeError),
    #[error("pencil engine failed: {0}")]
    Pencil(#[from] PencilError),
    #[error("linear algebra failed: {0}")]
    Qla(#[from] QlaError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportMode {
    /// Emit every computed section.
    Report,
    /// Emit every computed section plus an `audit` section that replays the
    /// scenario's expectations against the tree.
    Audit,
}

impl ReportMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportMode::Report => "report",
            ReportMode::Audit => "audit",
        }
    }
}

/// One expectation replayed against the tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditRow {
    pub path: String,
    pub cite: Option<String>,
    pub expected: Value,
    /// `None` when the path does not resolve.
    pub computed: Option<Value>,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditSummary {
    pub rows: Vec<AuditRow>,
    pub mismatches: usize,
    pub all_matched: bool,
}

/// A finished run: the canonical tree, plus the audit summary when one ran.
#[derive(Debug, Clone)]
pub struct Report {
    pub tree: Value,
    pub audit: Option<AuditSummary>,
}

impl Report {
    /// Canonical JSON rendering: pretty-printed, sorted keys, trailing
    /// newline. Byte-identical across reruns of the same scenario.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.tree).expect("tree serializes");
        s.push('\n');
        s
    }

    /// Indented plain-text rendering of the same tree.
    pub fn to_text(&self) -> String {
        render_text(&self.tree)
    }
}

/// Runs the whole engine on a scenario and freezes the results.
pub fn build_report(scenario: &Scenario, mode: ReportMode) -> Result<Report, ReportError> {
    let built = scenario.build()?;
    let mut root = Map::new();
    root.insert("schema".into(), json!("kvv5-report/1"));
    root.insert("scenario".into(), json!(scenario.name));
    root.insert("mode".into(), json!(mode.as_str()));
    // Every value outside the audit section is engine-computed; the audit
    // rows are the only place expected (quoted) values appear, and each row
    // labels them as such.
    root.insert("provenance".into(), json!("computed"));
    root.insert("lattice".into(), lattice_section(&built)?);

    if let Some(model) = &built.contraction {
        root.insert("contraction".into(), contraction_section(model)?);
        root.insert("pullbacks".into(), pullbacks_section(model)?);
    }
    if !built.divisors.is_empty() {
        root.insert("divisors".into(), divisors_section(&built)?);
    }
    if let (Some(model), Some(w)) = (&built.contraction, &built.witness) {
        let ample_divisor = built
            .divisors
            .get(&w.ample_divisor)
            .expect("witness divisor was validated at build time");
        let task = WitnessTask {
            contraction: model,
            ample_divisor,
            ample_name: &w.ample_divisor,
            witness_curve: &w.witness_curve,
            relative_boundary: &built.relative_boundary,
        };
        let wr = run_witness_pipeline(&task)?;
        root.insert("witness".into(), witness_section(&wr));
    }
    if let Some(p) = &built.pencil {
        root.insert("pencil".into(), pencil_section(p.prime, p.ext_degree)?);
    }

    let audit = match mode {
        ReportMode::Report => None,
        ReportMode::Audit => {
            let summary = run_audit(&Value::Object(root.clone()), &scenario.expectations);
            root.insert("audit".into(), audit_json(&summary));
            Some(summary)
        }
    };

    Ok(Report { tree: Value::Object(root), audit })
}

/// Runs only the pencil: same envelope as [`build_report`], one section.
/// `ext_degree` overrides the scenario's declared extension degree.
pub fn build_pencil_report(
    scenario: &Scenario,
    ext_degree: Option<usize>,
) -> Result<Report, ReportError> {
    let built = scenario.build()?;
    let Some(entry) = &built.pencil else {
        return Err(ScenarioError::Schema {
            message: "scenario declares no pencil".to_string(),
        }
        .into());
    };
    let degree = ext_degree.unwrap_or(entry.ext_degree);
    if degree == 0 {
        return Err(ScenarioError::Schema {
            message: "pencil extension degree must be at least 1".to_string(),
        }
        .into());
    }
    let mut root = Map::new();
    root.insert("schema".into(), json!("kvv5-report/1"));
    root.insert("scenario".into(), json!(scenario.name));
    root.insert("mode".into(), json!("pencil"));
    root.insert("provenance".into(), json!("computed"));
    root.insert("pencil".into(), pencil_section(entry.prime, degree)?);
    Ok(Report { tree: Value::Object(root), audit: None })
}

/// Runs only the lattice bookkeeping: stage-by-stage intersection tables.
pub fn build_lattice_report(scenario: &Scenario) -> Result<Report, ReportError> {
    let built = scenario.build()?;
    let mut root = Map::new();
    root.insert("schema".into(), json!("kvv5-report/1"));
    root.insert("scenario".into(), json!(scenario.name));
    root.insert("mode".into(), json!("dump-lattice"));
    root.insert("provenance".into(), json!("computed"));
    root.insert("lattice".into(), lattice_section(&built)?);
    Ok(Report { tree: Value::Object(root), audit: None })
}

/// Resolves a dotted path against the tree. Object segments are map keys;
/// array segments must parse as indices.
pub fn lookup_path<'a>(tree: &'a Value, path: &str) -> Option<&'a Value> {
    let mut cur = tree;
    for seg in path.split('.') {
        cur = match cur {
            Value::Object(m) => m.get(seg)?,
            Value::Array(a) => a.get(seg.parse::<usize>().ok()?)?,
            _ => return None,
        };
    }
    Some(cur)
}

/// Replays expectations against a finished tree.
pub fn run_audit(tree: &Value, expectations: &[Expectation]) -> AuditSummary {
    let mut rows = Vec::new();
    for e in expectations {
        let computed = lookup_path(tree, &e.path).cloned();
        let matched = computed.as_ref() == Some(&e.expect);
        rows.push(AuditRow {
            path: e.path.clone(),
            cite: e.cite.clone(),
            expected: e.expect.clone(),
            computed,
            matched,
        });
    }
    let mismatches = rows.iter().filter(|r| !r.matched).count();
    AuditSummary { all_matched: mismatches == 0, mismatches, rows }
}

fn audit_json(summary: &AuditSummary) -> Value {
    let rows: Vec<Value> = summary
        .rows
        .iter()
        .map(|r| {
            json!({
                "path": r.path,
                "cite": r.cite,
                "expected": r.expected,
                "computed": r.computed.clone().unwrap_or(Value::Null),
                "matched": r.matched,
            })
        })
        .collect();
    json!({
        "rows": rows,
        "mismatches": summary.mismatches,
        "all_matched": summary.all_matched,
    })
}

fn rat(v: &Rational) -> Value {
    Value::String(format_rational(v))
}

fn pair_map<'a, I>(pairs: I) -> Value
where
    I: IntoIterator<Item = (&'a String, &'a Rational)>,
{
    let m: BTreeMap<&str, Value> = pairs.into_iter().map(|(n, v)| (n.as_str(), rat(v))).collect();
    json!(m)
}

fn divisor_map(d: &Divisor) -> Value {
    let m: BTreeMap<&str, Value> = d.iter().map(|(n, c)| (n, rat(c))).collect();
    json!(m)
}

fn class_coords(c: &ClassVector) -> Value {
    let v: Vec<Value> = c.coords().iter().map(rat).collect();
    json!(v)
}

fn lattice_section(built: &BuiltScenario) -> Result<Value, ReportError> {
    let audits = intersection_audit(&built.stages)?;
    let mut stages = Map::new();
    for (index, audit) in audits.iter().enumerate() {
        let surface: &SurfaceModel = &built.stages[index].surface;

        // The audit lists pairs in registration order; key the nested map
        // lexicographically so paths do not depend on registration order.
        let mut intersections: BTreeMap<&str, BTreeMap<&str, Value>> = BTreeMap::new();
        for (n1, n2, v) in &audit.table {
            let (lo, hi) = if n1 <= n2 { (n1, n2) } else { (n2, n1) };
            intersections.entry(lo).or_default().insert(hi, rat(v));
        }

        let curves: BTreeMap<&str, Value> =
            audit.curves.iter().map(|(n, c)| (n.as_str(), class_coords(c))).collect();
        let canonical: BTreeMap<&str, Value> =
            audit.canonical_row.iter().map(|(n, v)| (n.as_str(), rat(v))).collect();
        let genera: BTreeMap<&str, Value> =
            audit.genera.iter().map(|(n, v)| (n.as_str(), rat(v))).collect();

        stages.insert(
            audit.label.clone(),
            json!({
                "index": index,
                "rank": audit.rank,
                "basis": surface.basis_names(),
                "k_squared": rat(&audit.k_squared),
                "curves": curves,
                "intersections": intersections,
                "canonical": canonical,
                "genera": genera,
            }),
        );
    }
    Ok(json!({ "stages": stages }))
}

fn singularity_json(report: &SingularityReport) -> (Vec<Value>, Vec<String>) {
    let mut components = Vec::new();
    let mut kinds = Vec::new();
    for c in &report.components {
        let gram: Vec<Vec<Value>> = (0..c.gram.rows())
            .map(|i| (0..c.gram.cols()).map(|j| rat(c.gram.at(i, j))).collect())
            .collect();
        components.push(json!({
            "curves": c.curves,
            "kind": c.kind.to_string(),
            "gram": gram,
        }));
        kinds.push(c.kind.to_string());
    }
    (components, kinds)
}

fn contraction_section(model: &ContractionModel) -> Result<Value, ReportError> {
    let negative_definite = qla::is_negative_definite(model.gram_submatrix())?;
    let (components, kinds) = singularity_json(&model.classify_singularities()?);
    let discrepancies = model.discrepancies()?;

    let mut canonical_intersections = BTreeMap::new();
    for curve in model.source().curve_names() {
        if model.is_contracted(curve) {
            continue;
        }
        let d = Divisor::from_terms([(curve, Rational::from_integer(1.into()))]);
        let v = model.canonical_descend_intersection(&d)?;
        canonical_intersections.insert(curve.to_string(), rat(&v));
    }

    Ok(json!({
        "contracted": model.contracted(),
        "target_rank": model.target_rank(),
        "negative_definite": negative_definite,
        "components": components,
        "kinds": kinds,
        "discrepancies": pair_map(discrepancies.values.iter().map(|(n, v)| (n, v))),
        "klt": discrepancies.klt,
        "canonical_intersections": canonical_intersections,
    }))
}

fn pullbacks_section(model: &ContractionModel) -> Result<Value, ReportError> {
    let mut out = Map::new();
    let names: Vec<String> =
        model.source().curve_names().map(|n| n.to_string()).collect();
    for curve in names {
        if model.is_contracted(&curve) {
            continue;
        }
        let d = Divisor::from_terms([(curve.as_str(), Rational::from_integer(1.into()))]);
        let p = model.pullback(&d)?;
        out.insert(
            curve,
            json!({
                "strict": divisor_map(&p.strict),
                "exceptional": pair_map(p.exceptional.iter().map(|(n, v)| (n, v))),
                "class": class_coords(&p.class),
            }),
        );
    }
    Ok(Value::Object(out))
}

fn divisors_section(built: &BuiltScenario) -> Result<Value, ReportError> {
    let surface = &built.surface;
    let mut out = Map::new();
    for (name, div) in &built.divisors {
        let class = surface.divisor_class(div)?;
        let mut entry = Map::new();
        entry.insert("terms".into(), divisor_map(div));
        entry.insert("class".into(), class_coords(&class));
        if let Some(model) = &built.contraction {
            let p = model.pullback(div)?;
            entry.insert(
                "pullback_exceptional".into(),
                pair_map(p.exceptional.iter().map(|(n, v)| (n, v))),
            );
            entry.insert(
                "descended_self_intersection".into(),
                rat(&model.descend_intersection(div, div)?),
            );
            entry.insert(
                "descended_canonical_pairing".into(),
                rat(&model.canonical_descend_intersection(div)?),
            );
        }
        out.insert(name.clone(), Value::Object(entry));
    }
    Ok(Value::Object(out))
}

fn witness_section(wr: &WitnessReport) -> Value {
    let narrative: Vec<Value> = wr
        .narrative
        .iter()
        .map(|s| {
            json!({
                "id": s.id,
                "statement": s.statement,
                "computed": s.computed,
                "reference": s.reference,
            })
        })
        .collect();
    json!({
        "ample": {
            "divisor": wr.ample.divisor,
            "witness": wr.ample.witness,
            "value": rat(&wr.ample.value),
            "sign": wr.ample.sign.as_str(),
        },
        "anti_ample_value": rat(&(-wr.ample.value.clone())),
        "pullback": {
            "strict": divisor_map(&wr.pullback_b.strict),
            "exceptional": pair_map(wr.pullback_b.exceptional.iter().map(|(n, v)| (n, v))),
        },
        "floor": divisor_map(&wr.floor),
        "floor_class": class_coords(&wr.floor_class),
        "floor_pairings": pair_map(wr.floor_pairings.iter().map(|(n, v)| (n, v))),
        "raw_table": pair_map(wr.raw_table.entries.iter().map(|(n, v)| (n, v))),
        "boundary": pair_map(wr.boundary.iter().map(|(n, v)| (n, v))),
        "boundary_ok": wr.boundary_ok,
        "gate_table": pair_map(wr.gate_table.entries.iter().map(|(n, v)| (n, v))),
        "leray_passed": wr.leray_passed,
        "floor_self_intersection": rat(&wr.floor_self_intersection),
        "canonical_dot_floor": rat(&wr.canonical_dot_floor),
        "chi": rat(&wr.chi),
        "verdict": wr.verdict.as_str(),
        "narrative": narrative,
    })
}

fn tangent_json(gf: &pencil::Gf, tangent: &TangentData) -> Value {
    let (kind, lines) = match tangent {
        TangentData::SplitPair(l1, l2) => ("split", vec![l1.display(gf), l2.display(gf)]),
        TangentData::ConjugatePair => ("conjugate", Vec::new()),
        TangentData::RepeatedLine(l) => ("repeated", vec![l.display(gf)]),
        TangentData::NotDouble => ("none", Vec::new()),
    };
    json!({ "kind": kind, "lines": lines })
}

fn pencil_section(prime: u64, ext_degree: usize) -> Result<Value, ReportError> {
    let spec = pencil::build_standard_pencil(prime)?;
    let base_field = spec.field();
    let scan = pencil::scan_pencil(&spec, ext_degree)?;
    let locus = pencil::base_locus(&spec)?;

    let points: BTreeMap<&str, Value> = spec
        .points()
        .iter()
        .map(|(n, p)| (n.as_str(), json!(p.display(base_field))))
        .collect();
    let lines: BTreeMap<&str, Value> = spec
        .lines()
        .iter()
        .map(|(n, l)| (n.as_str(), json!(l.display(base_field))))
        .collect();

    let mut rows = Map::new();
    for row in &scan.rows {
        let singular: Vec<Value> = row
            .singular
            .iter()
            .map(|s| {
                json!({
                    "point": s.point.display(&scan.field),
                    "class": s.class.as_str(),
                    "tangents": tangent_json(&scan.field, &s.tangent),
                })
            })
            .collect();
        rows.insert(row.t.to_string(), json!(singular));
    }

    let base_locus: Vec<Value> = locus
        .points
        .iter()
        .map(|b| {
            json!({
                "point": b.label,
                "field_degree": b.field_degree,
                "multiplicity": b.multiplicity,
            })
        })
        .collect();

    Ok(json!({
        "prime": prime,
        "ext_degree": ext_degree,
        "field_order": scan.field.order(),
        "modulus": scan.field.modulus_string(),
        "points": points,
        "lines": lines,
        "generators": {
            "t0": spec.c0().display(base_field),
            "tinf": spec.cinf().display(base_field),
        },
        "scan": rows,
        "base_locus": base_locus,
        "base_locus_total": locus.total,
    }))
}

/// Plain-text tree rendering: `key: value` lines, two-space indents, arrays
/// as `- item`. A pure function of the tree, so just as deterministic as the
/// JSON form.
pub fn render_text(tree: &Value) -> String {
    fn scalar(v: &Value) -> String {
        match v {
            Value::Null => "~".to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Number(n) => n.to_string(),
            Value::String(s) => s.clone(),
            Value::Array(_) | Value::Object(_) => unreachable!("composite passed to scalar"),
        }
    }
    fn is_scalar(v: &Value) -> bool {
        !matches!(v, Value::Array(_) | Value::Object(_))
    }
    fn is_empty(v: &Value) -> bool {
        match v {
            Value::Array(a) => a.is_empty(),
            Value::Object(m) => m.is_empty(),
            _ => false,
        }
    }
    fn walk(out: &mut String, v: &Value, indent: usize) {
        let pad = "  ".repeat(indent);
        match v {
            Value::Object(m) => {
                for (k, val) in m {
                    if is_scalar(val) {
                        let _ = writeln!(out, "{pad}{k}: {}", scalar(val));
                    } else if is_empty(val) {
                        let empty = if matches!(val, Value::Array(_)) { "[]" } else { "{}" };
                        let _ = writeln!(out, "{pad}{k}: {empty}");
                    } else {
                        let _ = writeln!(out, "{pad}{k}:");
                        walk(out, val, indent + 1);
                    }
                }
            }
            Value::Array(a) => {
                for val in a {
                    if is_scalar(val) {
                        let _ = writeln!(out, "{pad}- {}", scalar(val));
                    } else if is_empty(val) {
                        let empty = if matches!(val, Value::Array(_)) { "[]" } else { "{}" };
                        let _ = writeln!(out, "{pad}- {empty}");
                    } else {
                        let _ = writeln!(out, "{pad}-");
                        walk(out, val, indent + 1);
                    }
                }
            }
            other => {
                let _ = writeln!(out, "{pad}{}", scalar(other));
            }
        }
    }
    let mut out = String::new();
    walk(&mut out, tree, 0);
    out
}
