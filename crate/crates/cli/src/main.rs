use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use specframe_cli::report::Command as Mode;
use specframe_cli::{parse_scenario, run, shipped_scenario, Report, Scenario, SHIPPED_SCENARIOS};

/// Decide whether (f(T) e_n) is a frame or a Riesz basis of l2, and check
/// the verdict against finite-section frame-bound estimates.
#[derive(Parser)]
#[command(name = "specframe", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline: verdict, bound sweep, probes, cross-validation.
    Check(RunArgs),
    /// Only probe sigma_ap(T*) = sigma(T*) on a grid.
    Probe(RunArgs),
    /// Only sweep the frame-bound estimates.
    Bounds(RunArgs),
    /// List the shipped scenarios, or print one of them.
    Examples {
        /// Scenario to print.
        name: Option<String>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file, or `example:<name>` for a shipped scenario.
    #[arg(long)]
    scenario: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the bound sweep as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Override the zero-test tolerance band.
    #[arg(long)]
    tol: Option<f64>,
    /// Drop N_list entries above this size.
    #[arg(long)]
    max_n: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn load(args: &RunArgs) -> Result<Scenario, String> {
    let text = match args.scenario.strip_prefix("example:") {
        Some(name) => shipped_scenario(name)
            .ok_or_else(|| format!("no shipped scenario named `{name}`; see `specframe examples`"))?
            .to_string(),
        None => fs::read_to_string(&args.scenario).map_err(|e| format!("cannot read {}: {e}", args.scenario))?,
    };
    parse_scenario(&text)
        .and_then(|s| s.with_overrides(args.tol, args.max_n))
        .map_err(|e| e.to_string())
}

fn execute(mode: Mode, args: RunArgs) -> ExitCode {
    let scenario = match load(&args) {
        Ok(s) => s,
        Err(e) => {
            eprint!("{e}");
            if !e.ends_with('\n') {
                eprintln!();
            }
            return ExitCode::from(1);
        }
    };
    let report: Report = run(&scenario, mode);
    match args.format {
        Format::Json => print!("{}", report.to_json()),
        Format::Text => print!("{}", report.to_text(scenario.outputs.verbosity)),
    }

    let mut code = report.exit_code();
    let mut write = |path: &PathBuf, text: String| {
        if let Err(e) = fs::write(path, text) {
            eprintln!("cannot write {}: {e}", path.display());
            code = 1;
        }
    };
    if let Some(path) = &scenario.outputs.report {
        write(path, report.to_json());
    }
    if let Some(path) = args.csv.as_ref().or(scenario.outputs.csv.as_ref()) {
        match report.to_csv() {
            Some(csv) => write(path, csv),
            None => {
                eprintln!("no bound sweep to write to {}", path.display());
                code = 1;
            }
        }
    }
    ExitCode::from(code as u8)
}

fn examples(name: Option<String>) -> ExitCode {
    match name {
        None => {
            for (name, doc) in SHIPPED_SCENARIOS {
                let description = parse_scenario(doc).ok().and_then(|s| s.description).unwrap_or_default();
                println!("{name:<18} {description}");
            }
            ExitCode::SUCCESS
        }
        Some(name) => match shipped_scenario(&name) {
            Some(doc) => {
                print!("{doc}");
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("no shipped scenario named `{name}`");
                ExitCode::from(1)
            }
        },
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Check(a) => execute(Mode::Check, a),
        Command::Probe(a) => execute(Mode::Probe, a),
        Command::Bounds(a) => execute(Mode::Bounds, a),
        Command::Examples { name } => examples(name),
    }
}
