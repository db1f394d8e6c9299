//! Scenario files: a declarative JSON description of a surface build, a
//! contraction, divisors, a witness task, and an optional pencil, plus
//! golden expectations for audit mode.
//!
//! A scenario is built in two steps. [`parse_scenario`] handles syntax and
//! shape (unknown keys are rejected), and [`Scenario::build`] resolves every
//! reference — center curves must exist when a blow-up consumes them,
//! divisors may only mention tracked curves, the relative boundary must live
//! on contracted curves with coefficients in [0, 1) — returning the
//! assembled lattice stages and contraction model. [`load_scenario`] runs
//! both so a loaded scenario is known-good.
//!
//! The reference scenario shipped with the crate (see [`EMBEDDED_SCENARIO`])
//! encodes the characteristic-5 construction end to end: eleven blow-ups of
//! the plane, the eleven-curve contraction to a rank-one del Pezzo surface,
//! the ample witness divisor, and the cubic pencil.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contraction::{plan_contraction, ContractionError, ContractionModel};
use crate::lattice::{BlowUpRecord, Divisor, SurfaceModel};
use crate::qla::{self, Rational};
use crate::riemann_roch::StageSnapshot;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario file {path}: {message}")]
    Io { path: String, message: String },
    #[error("scenario parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("scenario schema error: {message}")]
    Schema { message: String },
    #[error(transparent)]
    Contraction(#[from] ContractionError),
}

/// Label of the implicit initial stage (the plane itself, before any
/// blow-up record applies).
pub const INITIAL_STAGE: &str = "P2";

fn schema(message: impl Into<String>) -> ScenarioError {
    ScenarioError::Schema { message: message.into() }
}

/// A curve on the initial plane, registered by its degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseCurve {
    pub name: String,
    pub degree: u32,
}

/// One blow-up: the exceptional curve's name and the multiplicity of each
/// existing curve at the blown-up point. An optional stage label snapshots
/// the surface right after this record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowUpEntry {
    pub name: String,
    #[serde(default)]
    pub centers: BTreeMap<String, u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
}

/// The witness task: which named divisor is nominated ample on the target,
/// and which curve's image certifies the sign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessEntry {
    pub ample_divisor: String,
    pub witness_curve: String,
}

/// Pencil parameters: the prime, and the extension degree for singular-point
/// scans (defaults to 2).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PencilEntry {
    pub prime: u64,
    #[serde(default = "default_ext_degree")]
    pub ext_degree: usize,
}

fn default_ext_degree() -> usize {
    2
}

/// A golden value for audit mode: a dotted path into the report tree, the
/// expected JSON value at that path, and an optional citation tag naming
/// the quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub path: String,
    pub expect: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cite: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub base_curves: Vec<BaseCurve>,
    #[serde(default)]
    pub blow_ups: Vec<BlowUpEntry>,
    #[serde(default)]
    pub contraction: Vec<String>,
    /// Named formal sums over curve names, coefficients as "n/d" strings.
    #[serde(default)]
    pub divisors: BTreeMap<String, BTreeMap<String, String>>,
    /// Formal sum on contracted curves with coefficients in [0, 1).
    #[serde(default)]
    pub relative_boundary: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pencil: Option<PencilEntry>,
    #[serde(default)]
    pub expectations: Vec<Expectation>,
}

/// Everything a scenario resolves to once its references are checked.
#[derive(Debug, Clone)]
pub struct BuiltScenario {
    /// The initial plane plus one snapshot per labeled blow-up record.
    pub stages: Vec<StageSnapshot>,
    /// The surface after all blow-up records.
    pub surface: SurfaceModel,
    /// Present when the scenario lists contracted curves.
    pub contraction: Option<ContractionModel>,
    pub divisors: BTreeMap<String, Divisor>,
    pub relative_boundary: Divisor,
    pub witness: Option<WitnessEntry>,
    pub pencil: Option<PencilEntry>,
}

/// Parses scenario text. Syntax errors (malformed JSON) and shape errors
/// (unknown keys, wrong types) are distinguished; both carry positions.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    serde_json::from_str(text).map_err(|e| match e.classify() {
        serde_json::error::Category::Data => schema(e.to_string()),
        _ => ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        },
    })
}

/// Reads, parses, and fully validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let scenario = parse_scenario(&text)?;
    scenario.build()?;
    Ok(scenario)
}

fn parse_coefficient(context: &str, name: &str, text: &str) -> Result<Rational, ScenarioError> {
    qla::parse_rational(text)
        .map_err(|_| schema(format!("{context}: coefficient of {name:?} is not a rational: {text:?}")))
}

impl Scenario {
    /// Resolves every reference and assembles the lattice model, stages,
    /// contraction, and divisors.
    pub fn build(&self) -> Result<BuiltScenario, ScenarioError> {
        let mut surface = SurfaceModel::projective_plane();
        for curve in &self.base_curves {
            if curve.degree == 0 {
                return Err(schema(format!(
                    "base curve {:?} has degree 0; tracked plane curves must have positive degree",
                    curve.name
                )));
            }
            surface
                .register_plane_curve(&curve.name, curve.degree)
                .map_err(|e| schema(format!("base curve {:?}: {e}", curve.name)))?;
        }

        let mut stages = vec![StageSnapshot {
            label: INITIAL_STAGE.to_string(),
            surface: surface.clone(),
        }];
        for entry in &self.blow_ups {
            let centers: Vec<(&str, u32)> =
                entry.centers.iter().map(|(n, m)| (n.as_str(), *m)).collect();
            let record = BlowUpRecord::new(&entry.name, &centers);
            surface = surface
                .blow_up(&record)
                .map_err(|e| schema(format!("blow-up {:?}: {e}", entry.name)))?;
            if let Some(label) = &entry.stage {
                if label == INITIAL_STAGE {
                    return Err(schema(format!(
                        "stage label {INITIAL_STAGE:?} is reserved for the initial plane"
                    )));
                }
                if stages.iter().any(|s| &s.label == label) {
                    return Err(schema(format!("duplicate stage label {label:?}")));
                }
                stages.push(StageSnapshot { label: label.clone(), surface: surface.clone() });
            }
        }

        let contraction = if self.contraction.is_empty() {
            None
        } else {
            let names: Vec<&str> = self.contraction.iter().map(String::as_str).collect();
            Some(plan_contraction(&surface, &names)?)
        };

        let mut divisors = BTreeMap::new();
        for (div_name, terms) in &self.divisors {
            let mut divisor = Divisor::new();
            for (curve, coeff) in terms {
                if !surface.has_curve(curve) {
                    return Err(schema(format!(
                        "divisor {div_name:?} references unknown curve {curve:?}"
                    )));
                }
                let c = parse_coefficient(&format!("divisor {div_name:?}"), curve, coeff)?;
                divisor.add_term(curve, c);
            }
            divisors.insert(div_name.clone(), divisor);
        }

        let mut relative_boundary = Divisor::new();
        for (curve, coeff) in &self.relative_boundary {
            let c = parse_coefficient("relative boundary", curve, coeff)?;
            let model = contraction.as_ref().ok_or_else(|| {
                schema("relative boundary given, but no contraction is declared")
            })?;
            if !model.is_contracted(curve) {
                return Err(schema(format!(
                    "relative boundary curve {curve:?} is not contracted"
                )));
            }
            if c < Rational::from_integer(0.into()) || c >= Rational::from_integer(1.into()) {
                return Err(schema(format!(
                    "relative boundary coefficient of {curve:?} must lie in [0, 1), got {}",
                    qla::format_rational(&c)
                )));
            }
            relative_boundary.add_term(curve, c);
        }

        if let Some(witness) = &self.witness {
            let Some(model) = &contraction else {
                return Err(schema("witness task given, but no contraction is declared"));
            };
            // The amplitude check downstairs is a single signed pairing, which
            // only decides amplitude when the target has Picard rank one.
            if model.target_rank() != 1 {
                return Err(schema(format!(
                    "witness task needs a rank-one contraction target, got rank {}",
                    model.target_rank()
                )));
            }
            if !divisors.contains_key(&witness.ample_divisor) {
                return Err(schema(format!(
                    "witness names undeclared divisor {:?}",
                    witness.ample_divisor
                )));
            }
            if !surface.has_curve(&witness.witness_curve) {
                return Err(schema(format!(
                    "witness curve {:?} is not a tracked curve",
                    witness.witness_curve
                )));
            }
        }

        if let Some(pencil) = &self.pencil {
            if pencil.ext_degree == 0 {
                return Err(schema("pencil extension degree must be at least 1"));
            }
            // Surfaces the prime/characteristic problems now rather than at
            // report time.
            crate::pencil::build_standard_pencil(pencil.prime)
                .map_err(|e| schema(format!("pencil: {e}")))?;
        }

        for expectation in &self.expectations {
            if expectation.path.is_empty() {
                return Err(schema("expectation with empty path"));
            }
        }

        Ok(BuiltScenario {
            stages,
            surface,
            contraction,
            divisors,
            relative_boundary,
            witness: self.witness.clone(),
            pencil: self.pencil.clone(),
        })
    }
}

/// The reference scenario shipped with the crate: the full
/// characteristic-5 construction with golden expectations.
pub const EMBEDDED_SCENARIO: &str = include_str!("../scenarios/char5_del_pezzo.json");

/// Parses the embedded reference scenario. The embedded text is part of the
/// crate, so failure here is a build defect, not an input error.
pub fn embedded_scenario() -> Scenario {
    parse_scenario(EMBEDDED_SCENARIO).expect("embedded scenario parses")
}
