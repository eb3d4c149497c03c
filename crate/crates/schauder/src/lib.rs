//! Batch runner for `schauder-core`: scenario files in, report files out.

pub mod presets;
pub mod report;
pub mod runner;
pub mod scenario;

use std::path::{Path, PathBuf};

pub use report::Artifact;
pub use runner::{RunError, RunOutput};
pub use scenario::{ConfigError, Scenario};

/// Overrides the output directory of every run.
pub const OUT_DIR_ENV: &str = "SCHAUDER_OUT_DIR";

/// Exit status: every check passed (or had an unmet premise).
pub const EXIT_PASS: u8 = 0;
/// Exit status: at least one check failed.
pub const EXIT_FAIL: u8 = 1;
/// Exit status: configuration error.
pub const EXIT_CONFIG: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("writing reports to {dir}: {source}")]
    Write {
        dir: PathBuf,
        source: std::io::Error,
    },
}

impl Error {
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) | Error::Run(_) => EXIT_CONFIG,
            Error::Write { .. } => EXIT_FAIL,
        }
    }
}

/// Result of [`run_file`].
#[derive(Debug)]
pub struct Outcome {
    pub dir: PathBuf,
    pub files: Vec<Artifact>,
    pub summary: String,
    pub failed: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.failed {
            EXIT_FAIL
        } else {
            EXIT_PASS
        }
    }
}

/// `explicit`, else the environment override, else the file's `output.dir`,
/// else `schauder-out/<name>`.
pub fn output_dir(s: &Scenario, explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(p);
    }
    s.output
        .dir
        .clone()
        .unwrap_or_else(|| Path::new("schauder-out").join(&s.name))
}

/// Runs a scenario without touching the file system.
pub fn run_scenario(s: &Scenario) -> Result<(Vec<Artifact>, String, bool), RunError> {
    let out = runner::run(s)?;
    let failed = out.failed();
    let (files, text) = report::assemble(&s.name, &out.checks, out.artifacts, &s.output);
    Ok((files, text, failed))
}

/// Loads, runs and writes the reports of one scenario file.
pub fn run_file(path: &Path, out_dir: Option<&Path>) -> Result<Outcome, Error> {
    let s = scenario::load(path)?;
    let (files, summary, failed) = run_scenario(&s)?;
    let dir = output_dir(&s, out_dir);
    report::write_all(&dir, &files).map_err(|source| Error::Write {
        dir: dir.clone(),
        source,
    })?;
    Ok(Outcome {
        dir,
        files,
        summary,
        failed,
    })
}
