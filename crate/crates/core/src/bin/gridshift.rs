use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gridshift::par::Execution;
use gridshift::run::{self, Mode, ReportFormat, SweepSpec};

#[derive(Parser)]
#[command(
    name = "gridshift",
    version,
    about = "Carbon-aware load shifting on a three-bus network"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Both objectives and dispatch prices over shifts in [0, L].
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Also write the per-shift dispatch (generation, flows, prices).
        #[arg(long)]
        dispatch_out: Option<PathBuf>,
    },
    /// Alignment verdicts over a grid of F01 x F12 line capacities.
    Heatmap {
        #[command(flatten)]
        common: Common,
        /// F01 range as `lo:hi` (default `l1 + F12_lo : 3`).
        #[arg(long, value_parser = parse_range)]
        f01_range: Option<(f64, f64)>,
        /// F12 range as `lo:hi` (default `0:1`).
        #[arg(long, value_parser = parse_range)]
        f12_range: Option<(f64, f64)>,
        /// Boundary-curve CSV (default `<out stem>_boundary.csv`).
        #[arg(long)]
        boundary_out: Option<PathBuf>,
    },
    /// Optimal shifts of both agents and the alignment verdict.
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Cross-check closed-form objectives against the dispatch LP.
    Verify {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario file (`key = value` lines).
    #[arg(long)]
    scenario: PathBuf,
    /// Grid points per axis (default 200; 50 for heatmap).
    #[arg(long)]
    resolution: Option<usize>,
    /// Output file (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

fn parse_range(text: &str) -> Result<(f64, f64), String> {
    let (a, b) = text.split_once(':').ok_or("expected `lo:hi`")?;
    let lo: f64 = a
        .trim()
        .parse()
        .map_err(|e| format!("bad lower bound `{a}`: {e}"))?;
    let hi: f64 = b
        .trim()
        .parse()
        .map_err(|e| format!("bad upper bound `{b}`: {e}"))?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(format!("range {lo}:{hi} must be finite with lo <= hi"));
    }
    Ok((lo, hi))
}

fn spec_from(common: Common, mode: Mode) -> SweepSpec {
    let mut spec = SweepSpec::new(common.scenario, mode);
    spec.resolution = common.resolution;
    spec.out = common.out;
    if common.sequential {
        spec.execution = Execution::Sequential;
    }
    spec
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let spec = match cli.command {
        Command::Sweep {
            common,
            dispatch_out,
        } => {
            let mut spec = spec_from(common, Mode::Sweep);
            spec.dispatch_out = dispatch_out;
            spec
        }
        Command::Heatmap {
            common,
            f01_range,
            f12_range,
            boundary_out,
        } => {
            let mut spec = spec_from(common, Mode::Heatmap);
            spec.f01_range = f01_range;
            spec.f12_range = f12_range;
            spec.boundary_out = boundary_out;
            spec
        }
        Command::Classify { common, format } => {
            let mut spec = spec_from(common, Mode::Classify);
            spec.format = match format {
                Format::Text => ReportFormat::Text,
                Format::Csv => ReportFormat::Csv,
            };
            spec
        }
        Command::Verify { common } => spec_from(common, Mode::Verify),
    };

    let out = run::run(&spec);
    print!("{}", out.stdout);
    let _ = std::io::stdout().flush();
    if !out.stderr.is_empty() {
        eprint!("error: {}", out.stderr);
    }
    ExitCode::from(out.status.code())
}
