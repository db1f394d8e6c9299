//! Subcommand implementations shared by the binary and the integration
//! tests. Each command returns a [`CommandResult`]: the rendered output, any
//! stderr diagnostics, and the process exit code.
//!
//! Exit codes, everywhere:
//!   0  success
//!   1  audit ran and at least one expectation did not match
//!   2  the scenario (or another input) was unusable
//!   3  a validated scenario made the engine fail — an internal invariant
//!      violation, never a user error

use std::path::Path;

use crate::report::{
    build_lattice_report, build_pencil_report, build_report, Report, ReportError, ReportMode,
};
use crate::scenario::{embedded_scenario, load_scenario, Scenario, ScenarioError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    /// Rendered report; empty when the command failed before producing one.
    pub output: String,
    /// Human-readable stderr lines.
    pub diagnostics: Vec<String>,
}

impl CommandResult {
    fn success(output: String) -> CommandResult {
        CommandResult { exit_code: 0, output, diagnostics: Vec::new() }
    }

    fn failure(exit_code: i32, message: String) -> CommandResult {
        CommandResult { exit_code, output: String::new(), diagnostics: vec![message] }
    }
}

/// Loads the named scenario file, or the embedded reference scenario when no
/// path is given.
pub fn load_scenario_arg(path: Option<&Path>) -> Result<Scenario, ScenarioError> {
    match path {
        Some(p) => load_scenario(p),
        None => Ok(embedded_scenario()),
    }
}

fn exit_code_for(err: &ReportError) -> i32 {
    match err {
        ReportError::Scenario(_) => 2,
        _ => 3,
    }
}

fn render(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Text => report.to_text(),
    }
}

fn finish(result: Result<Report, ReportError>, format: OutputFormat) -> CommandResult {
    match result {
        Ok(report) => {
            let output = render(&report, format);
            match &report.audit {
                Some(summary) if !summary.all_matched => CommandResult {
                    exit_code: 1,
                    output,
                    diagnostics: vec![format!(
                        "audit: {} of {} expectations did not match",
                        summary.mismatches,
                        summary.rows.len()
                    )],
                },
                _ => CommandResult::success(output),
            }
        }
        Err(e) => CommandResult::failure(exit_code_for(&e), format!("error: {e}")),
    }
}

/// Full engine run. In audit mode the report gains an `audit` section and a
/// mismatch flips the exit code to 1.
pub fn cmd_verify(scenario: &Scenario, mode: ReportMode, format: OutputFormat) -> CommandResult {
    finish(build_report(scenario, mode), format)
}

/// Shorthand for `verify --mode audit`.
pub fn cmd_audit(scenario: &Scenario, format: OutputFormat) -> CommandResult {
    cmd_verify(scenario, ReportMode::Audit, format)
}

/// Pencil scan only. `ext_degree` overrides the scenario's extension degree.
pub fn cmd_pencil(
    scenario: &Scenario,
    ext_degree: Option<usize>,
    format: OutputFormat,
) -> CommandResult {
    finish(build_pencil_report(scenario, ext_degree), format)
}

/// Stage-by-stage lattice tables only.
pub fn cmd_dump_lattice(scenario: &Scenario, format: OutputFormat) -> CommandResult {
    finish(build_lattice_report(scenario), format)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::lookup_path;

    #[test]
    fn verify_report_mode_succeeds_on_the_embedded_scenario() {
        let scenario = embedded_scenario();
        let r = cmd_verify(&scenario, ReportMode::Report, OutputFormat::Json);
        assert_eq!(r.exit_code, 0);
        assert!(r.diagnostics.is_empty());
        let tree: serde_json::Value = serde_json::from_str(&r.output).unwrap();
        assert_eq!(lookup_path(&tree, "mode").unwrap(), "report");
    }

    #[test]
    fn audit_mismatch_exits_one_and_names_the_count() {
        let mut scenario = embedded_scenario();
        // Flip the sign of the expected chi: the engine computes -1.
        for e in &mut scenario.expectations {
            if e.path == "witness.chi" {
                e.expect = serde_json::json!("1");
            }
        }
        let r = cmd_audit(&scenario, OutputFormat::Json);
        assert_eq!(r.exit_code, 1);
        assert!(!r.output.is_empty(), "the mismatching report is still printed");
        assert_eq!(r.diagnostics.len(), 1);
        assert!(r.diagnostics[0].contains("1 of"), "{:?}", r.diagnostics);
    }

    #[test]
    fn pencil_command_respects_the_degree_override() {
        let scenario = embedded_scenario();
        let r = cmd_pencil(&scenario, Some(1), OutputFormat::Json);
        assert_eq!(r.exit_code, 0);
        let tree: serde_json::Value = serde_json::from_str(&r.output).unwrap();
        assert_eq!(lookup_path(&tree, "pencil.ext_degree").unwrap(), 1);
        assert_eq!(lookup_path(&tree, "pencil.modulus").unwrap(), "w");
        let bad = cmd_pencil(&scenario, Some(0), OutputFormat::Json);
        assert_eq!(bad.exit_code, 2);
    }

    #[test]
    fn dump_lattice_contains_only_the_lattice_section() {
        let scenario = embedded_scenario();
        let r = cmd_dump_lattice(&scenario, OutputFormat::Json);
        assert_eq!(r.exit_code, 0);
        let tree: serde_json::Value = serde_json::from_str(&r.output).unwrap();
        assert!(lookup_path(&tree, "lattice.stages.V").is_some());
        assert!(lookup_path(&tree, "witness").is_none());
        assert!(lookup_path(&tree, "pencil").is_none());
    }

    #[test]
    fn missing_scenario_file_maps_to_exit_two() {
        let err = load_scenario_arg(Some(Path::new("/nonexistent/scenario.json"))).unwrap_err();
        assert!(matches!(err, ScenarioError::Io { .. }));
    }

    #[test]
    fn text_format_renders_the_same_tree() {
        let scenario = embedded_scenario();
        let r = cmd_dump_lattice(&scenario, OutputFormat::Text);
        assert_eq!(r.exit_code, 0);
        assert!(r.output.starts_with("lattice:"));
        assert!(r.output.contains("k_squared: -2"));
    }
}
