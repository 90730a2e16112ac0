//! Command-line runs: load a scenario, execute one mode, write its outputs.

use std::fs;
use std::path::{Path, PathBuf};

use crate::closed_form::classify_alignment;
use crate::error::{ClosedFormError, ScenarioError, SweepError};
use crate::par::Execution;
use crate::scenario::ThreeBusScenario;
use crate::sweep::{self, HeatmapGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sweep,
    Heatmap,
    Classify,
    Verify,
}

impl Mode {
    pub fn default_resolution(&self) -> usize {
        match self {
            Mode::Heatmap => HeatmapGrid::DEFAULT_RESOLUTION,
            _ => 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Text,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub scenario: PathBuf,
    pub mode: Mode,
    pub resolution: Option<usize>,
    /// Main output; stdout when absent.
    pub out: Option<PathBuf>,
    pub f01_range: Option<(f64, f64)>,
    pub f12_range: Option<(f64, f64)>,
    /// Heatmap boundary CSV. Defaults to `<out stem>_boundary.csv` next to `out`.
    pub boundary_out: Option<PathBuf>,
    /// Per-shift dispatch CSV for sweeps.
    pub dispatch_out: Option<PathBuf>,
    pub format: ReportFormat,
    pub execution: Execution,
}

impl SweepSpec {
    pub fn new(scenario: impl Into<PathBuf>, mode: Mode) -> Self {
        Self {
            scenario: scenario.into(),
            mode,
            resolution: None,
            out: None,
            f01_range: None,
            f12_range: None,
            boundary_out: None,
            dispatch_out: None,
            format: ReportFormat::Text,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    InvalidScenario = 1,
    InputError = 2,
    VerificationFailed = 3,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    /// Main output when no `out` path was given.
    pub stdout: String,
    pub stderr: String,
    pub status: ExitStatus,
}

struct Failure(ExitStatus, String);

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Invalid(_) => Failure(ExitStatus::InvalidScenario, e.to_string()),
            _ => Failure(ExitStatus::InputError, e.to_string()),
        }
    }
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Invalid(_) | SweepError::ClosedForm(_) => {
                Failure(ExitStatus::InvalidScenario, e.to_string())
            }
            SweepError::Dispatch(_) => Failure(ExitStatus::VerificationFailed, e.to_string()),
        }
    }
}

impl From<ClosedFormError> for Failure {
    fn from(e: ClosedFormError) -> Self {
        Failure(ExitStatus::InvalidScenario, e.to_string())
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| {
        Failure(
            ExitStatus::InputError,
            format!("cannot write {}: {e}", path.display()),
        )
    })
}

fn boundary_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}_boundary.csv"))
}

/// Executes one run. Never panics on bad input; the status carries the outcome.
pub fn run(spec: &SweepSpec) -> RunOutput {
    let mut stdout = String::new();
    let mut stderr = String::new();
    let status = match execute(spec, &mut stdout, &mut stderr) {
        Ok(status) => status,
        Err(Failure(status, message)) => {
            stderr.push_str(&message);
            stderr.push('\n');
            status
        }
    };
    RunOutput {
        stdout,
        stderr,
        status,
    }
}

fn execute(
    spec: &SweepSpec,
    stdout: &mut String,
    stderr: &mut String,
) -> Result<ExitStatus, Failure> {
    let s = ThreeBusScenario::load(&spec.scenario).map_err(|e| match e {
        ScenarioError::Parse { .. } => Failure(
            ExitStatus::InputError,
            format!("{}: {e}", spec.scenario.display()),
        ),
        other => other.into(),
    })?;
    let n = spec.resolution.unwrap_or(spec.mode.default_resolution());
    if n < 2 {
        return Err(Failure(
            ExitStatus::InputError,
            format!("resolution must be at least 2, got {n}"),
        ));
    }
    let emit = |text: String, stdout: &mut String| match &spec.out {
        Some(p) => write_file(p, &text),
        None => {
            stdout.push_str(&text);
            Ok(())
        }
    };

    match spec.mode {
        Mode::Sweep => {
            let rows = sweep::sweep(&s, n, spec.execution)?;
            if let Some(p) = &spec.dispatch_out {
                write_file(p, &sweep::dispatch_csv(&rows))?;
            }
            emit(sweep::sweep_csv(&rows), stdout)?;
            Ok(ExitStatus::Success)
        }
        Mode::Heatmap => {
            let grid = HeatmapGrid::with_ranges(&s, spec.f01_range, spec.f12_range, n);
            let map = sweep::heatmap(&s, grid, spec.execution);
            let boundary = spec
                .boundary_out
                .clone()
                .or_else(|| spec.out.as_deref().map(boundary_path));
            if let Some(p) = boundary {
                write_file(&p, &map.boundary_csv())?;
            }
            emit(map.cells_csv(), stdout)?;
            Ok(ExitStatus::Success)
        }
        Mode::Classify => {
            let report = classify_alignment(&s)?;
            let text = match spec.format {
                ReportFormat::Text => format!("{report}\n"),
                ReportFormat::Csv => format!(
                    "{}\n{}\n",
                    crate::closed_form::AlignmentReport::CSV_HEADER,
                    report.csv_row()
                ),
            };
            emit(text, stdout)?;
            Ok(ExitStatus::Success)
        }
        Mode::Verify => {
            let report = sweep::verify(&s, n, spec.execution)?;
            emit(format!("{report}\n"), stdout)?;
            if report.passed() {
                Ok(ExitStatus::Success)
            } else {
                stderr.push_str("verification failed\n");
                Ok(ExitStatus::VerificationFailed)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_path_sits_beside_output() {
        assert_eq!(
            boundary_path(Path::new("out/map.csv")),
            PathBuf::from("out/map_boundary.csv")
        );
        assert_eq!(
            boundary_path(Path::new("map")),
            PathBuf::from("map_boundary.csv")
        );
    }

    #[test]
    fn missing_scenario_is_input_error() {
        let out = run(&SweepSpec::new("/nonexistent/x.scn", Mode::Verify));
        assert_eq!(out.status, ExitStatus::InputError);
        assert!(!out.stderr.is_empty());
    }
}
