//! Command-line front end. All real work happens in `kvv5::commands`; this
//! file only parses arguments, routes stdout/--out, and sets the exit code.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kvv5::commands::{self, CommandResult, OutputFormat};
use kvv5::report::ReportMode;

#[derive(Parser)]
#[command(
    name = "kvv5",
    version,
    about = "Exact-arithmetic checker for a characteristic-5 counterexample to \
             Kawamata-Viehweg vanishing on a klt del Pezzo surface"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the full engine and print the report.
    Verify {
        #[command(flatten)]
        common: Common,
        /// `report` prints everything; `audit` additionally replays the
        /// scenario's expectations and exits 1 on any mismatch.
        #[arg(long, value_enum, default_value_t = ModeArg::Report)]
        mode: ModeArg,
    },
    /// Shorthand for `verify --mode audit`.
    Audit {
        #[command(flatten)]
        common: Common,
    },
    /// Scan the scenario's cubic pencil for singular members.
    Pencil {
        #[command(flatten)]
        common: Common,
        /// Scan over F_{p^m} with this m instead of the scenario's.
        #[arg(long)]
        ext_degree: Option<usize>,
    },
    /// Print the stage-by-stage intersection tables and nothing else.
    DumpLattice {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario file; defaults to the embedded reference scenario.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Report,
    Audit,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> OutputFormat {
        match f {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Text => OutputFormat::Text,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, result) = dispatch(cli.command);

    for line in &result.diagnostics {
        eprintln!("{line}");
    }
    if !result.output.is_empty() {
        match &common.out {
            None => print!("{}", result.output),
            Some(path) => {
                if let Err(e) = std::fs::write(path, &result.output) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
        }
    }
    ExitCode::from(u8::try_from(result.exit_code).unwrap_or(3))
}

fn dispatch(cmd: Cmd) -> (Common, CommandResult) {
    let common = match &cmd {
        Cmd::Verify { common, .. }
        | Cmd::Audit { common }
        | Cmd::Pencil { common, .. }
        | Cmd::DumpLattice { common } => Common {
            scenario: common.scenario.clone(),
            out: common.out.clone(),
            format: common.format,
        },
    };
    let scenario = match commands::load_scenario_arg(common.scenario.as_deref()) {
        Ok(s) => s,
        Err(e) => {
            return (
                common,
                CommandResult {
                    exit_code: 2,
                    output: String::new(),
                    diagnostics: vec![format!("error: {e}")],
                },
            );
        }
    };
    let format: OutputFormat = common.format.into();
    let result = match cmd {
        Cmd::Verify { mode, .. } => {
            let mode = match mode {
                ModeArg::Report => ReportMode::Report,
                ModeArg::Audit => ReportMode::Audit,
            };
            commands::cmd_verify(&scenario, mode, format)
        }
        Cmd::Audit { .. } => commands::cmd_audit(&scenario, format),
        Cmd::Pencil { ext_degree, .. } => commands::cmd_pencil(&scenario, ext_degree, format),
        Cmd::DumpLattice { .. } => commands::cmd_dump_lattice(&scenario, format),
    };
    (common, result)
}
