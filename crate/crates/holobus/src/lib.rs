//! Experiment runner for `holobus-core`.
//!
//! Reads a JSON experiment spec, expands its parameter grids, runs every
//! point on a bounded worker pool and writes CSV tables plus a plain-text
//! report. Output depends only on the spec and its seed.

pub mod output;
pub mod runner;
pub mod spec;

use std::path::{Path, PathBuf};
use std::time::Duration;

use holobus_core::Error as CoreError;

use crate::output::OutputError;
use crate::runner::RunError;
use crate::spec::{Diagnostic, ExperimentSpec, Plan, Severity, SpecError};

/// Process exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// I/O or other failure outside the spec.
    Failure,
    SpecError,
    ResourceCap,
    /// A step-halving check or the flux simplification check failed.
    Accuracy,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Failure => 1,
            Status::SpecError => 2,
            Status::ResourceCap => 3,
            Status::Accuracy => 4,
        }
    }

    /// Spec errors outrank resource caps.
    pub fn of_diagnostics(diags: &[Diagnostic]) -> Status {
        if diags.is_empty() {
            Status::Ok
        } else if diags.iter().any(|d| d.severity == Severity::Spec) {
            Status::SpecError
        } else {
            Status::ResourceCap
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("invalid spec:\n{}", render(.0))]
    Invalid(Vec<Diagnostic>),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("cannot create {}: {source}", path.display())]
    CreateDir { path: PathBuf, source: std::io::Error },
}

fn render(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n")
}

impl CliError {
    pub fn status(&self) -> Status {
        match self {
            CliError::Spec(SpecError::Parse { .. }) => Status::SpecError,
            CliError::Invalid(d) => Status::of_diagnostics(d),
            CliError::Run(RunError::Core(CoreError::ResourceCap { .. })) => Status::ResourceCap,
            _ => Status::Failure,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub status: Status,
    pub files: Vec<PathBuf>,
    pub rows: usize,
    pub failed_rows: usize,
    pub wall_time: Duration,
}

/// Output directory: `--out`, else the spec's `output` relative to the spec
/// file, else the current directory.
pub fn output_dir(spec: &ExperimentSpec, spec_path: &Path, out: Option<&Path>) -> PathBuf {
    match (out, &spec.output) {
        (Some(dir), _) => dir.to_path_buf(),
        (None, Some(dir)) => spec_path
            .parent()
            .map(|p| p.join(dir))
            .unwrap_or_else(|| dir.clone()),
        (None, None) => PathBuf::from("."),
    }
}

pub fn run_spec_file(spec_path: &Path, out: Option<&Path>, workers: usize) -> Result<RunSummary, CliError> {
    let spec = ExperimentSpec::load(spec_path)?;
    let plan = spec.plan().map_err(CliError::Invalid)?;
    let dir = output_dir(&spec, spec_path, out);
    std::fs::create_dir_all(&dir).map_err(|source| CliError::CreateDir {
        path: dir.clone(),
        source,
    })?;
    let stem = spec.stem(spec_path);
    let report_path = dir.join(format!("{stem}_report.txt"));

    match plan {
        Plan::Sweep(plan) => {
            let outcome = runner::run_sweep(&plan, workers)?;
            let csv_path = dir.join(format!("{stem}.csv"));
            output::write_sweep_csv(&csv_path, &plan, &outcome)?;
            output::write_text(&report_path, &output::sweep_report(&plan, &outcome))?;
            let mut files = vec![csv_path, report_path];
            if spec.gap_trace {
                let gap_path = dir.join(format!("{stem}_gap.csv"));
                output::write_gap_csv(&gap_path, &plan, &outcome)?;
                files.push(gap_path);
            }
            let errors: Vec<&CoreError> = outcome.points.iter().filter_map(|p| p.result.as_ref().err()).collect();
            let status = if errors.iter().any(|e| matches!(e, CoreError::ResourceCap { .. })) {
                Status::ResourceCap
            } else if errors.iter().any(|e| matches!(e, CoreError::Accuracy { .. })) {
                Status::Accuracy
            } else {
                Status::Ok
            };
            Ok(RunSummary {
                status,
                files,
                rows: outcome.points.len(),
                failed_rows: errors.len(),
                wall_time: outcome.wall_time,
            })
        }
        Plan::Flux(plan) => {
            let start = std::time::Instant::now();
            let outcome = runner::run_flux(&plan)?;
            output::write_text(&report_path, &output::flux_report(&outcome))?;
            let mut files = vec![report_path];
            if let Some(profile) = &outcome.profile {
                let profile_path = dir.join(format!("{stem}_profile.csv"));
                output::write_profile_csv(&profile_path, profile)?;
                files.push(profile_path);
            }
            let holds = outcome.report.holds(outcome.tolerance);
            Ok(RunSummary {
                status: if holds { Status::Ok } else { Status::Accuracy },
                files,
                rows: outcome.report.points,
                failed_rows: outcome.report.errors.len(),
                wall_time: start.elapsed(),
            })
        }
    }
}
