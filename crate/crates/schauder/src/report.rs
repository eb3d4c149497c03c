//! Report files: JSON check arrays, CSV summaries and grids, delay traces.

use std::fmt::Write as _;
use std::path::Path;

use schauder_core::delay_ode::StripTrace;
use schauder_core::iteration::{FixedPointSolution, TraceGrid};
use schauder_core::{BoundCheck, CheckStatus, Element};
use serde::Serialize;

use crate::scenario::OutputSection;

/// A named file produced by a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

pub fn json_artifact<T: Serialize + ?Sized>(name: String, value: &T) -> Artifact {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report values serialize");
    bytes.push(b'\n');
    Artifact { name, bytes }
}

fn csv_artifact<R: Serialize>(name: String, rows: impl IntoIterator<Item = R>) -> Artifact {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory csv write");
    }
    Artifact {
        name,
        bytes: w.into_inner().expect("in-memory csv flush"),
    }
}

/// Solver thresholds without the domain samples.
#[derive(Serialize)]
pub struct FixedPointRecord<'a> {
    pub epsilon: f64,
    pub m_bar: usize,
    pub n_bar: usize,
    pub n_contraction: usize,
    pub m_constant: f64,
    pub norm_bound: f64,
    pub domain_size: usize,
    pub z_approx: &'a Element,
    pub certificate: &'a BoundCheck,
}

impl<'a> From<&'a FixedPointSolution> for FixedPointRecord<'a> {
    fn from(s: &'a FixedPointSolution) -> Self {
        let p = &s.params;
        Self {
            epsilon: p.epsilon,
            m_bar: p.m_bar,
            n_bar: p.n_bar,
            n_contraction: p.n_contraction,
            m_constant: p.m_constant,
            norm_bound: p.norm_bound,
            domain_size: p.domain_samples.len(),
            z_approx: &s.z_approx,
            certificate: &s.certificate,
        }
    }
}

#[derive(Serialize)]
struct GridRow {
    n: usize,
    m: usize,
    d_trunc_pair: f64,
    d_full: f64,
    d_trunc_vs_full: f64,
    d_trunc_vs_full_y: f64,
    d_step: f64,
}

pub fn grid_artifacts(index: usize, grid: &TraceGrid, output: &OutputSection) -> Vec<Artifact> {
    let mut out = Vec::new();
    if output.csv {
        out.push(csv_artifact(
            format!("grid_{index}.csv"),
            grid.cells().map(|e| GridRow {
                n: e.n,
                m: e.m,
                d_trunc_pair: e.d_trunc_pair,
                d_full: e.d_full,
                d_trunc_vs_full: e.d_trunc_vs_full,
                d_trunc_vs_full_y: e.d_trunc_vs_full_y,
                d_step: e.d_step,
            }),
        ));
    }
    if output.json {
        out.push(json_artifact(format!("grid_{index}.json"), grid));
    }
    out
}

#[derive(Serialize)]
struct TraceRow {
    t: f64,
    y: f64,
    truncation_m1: f64,
    residual: f64,
}

pub fn delay_trace_csv(trace: &StripTrace) -> Artifact {
    csv_artifact(
        "delay_trace.csv".into(),
        (0..trace.values.len()).map(|k| TraceRow {
            t: trace.times[k],
            y: trace.values[k],
            truncation_m1: trace.truncation_m1[k],
            residual: trace.residual(k),
        }),
    )
}

#[derive(Serialize)]
struct StripRow {
    n: usize,
    strip_sup: f64,
}

pub fn delay_strips_csv(trace: &StripTrace) -> Artifact {
    csv_artifact(
        "delay_strips.csv".into(),
        trace
            .strip_sups
            .iter()
            .enumerate()
            .map(|(n, &strip_sup)| StripRow { n, strip_sup }),
    )
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    name: &'a str,
    status: &'static str,
    lhs: f64,
    rhs: f64,
    slack: f64,
    pass: bool,
}

fn status_word(s: CheckStatus) -> &'static str {
    match s {
        CheckStatus::Pass => "pass",
        CheckStatus::Fail => "fail",
        CheckStatus::HypothesisUnmet => "hypothesis_unmet",
    }
}

pub fn summary_csv(checks: &[BoundCheck]) -> Artifact {
    csv_artifact(
        "summary.csv".into(),
        checks.iter().map(|c| SummaryRow {
            name: &c.name,
            status: status_word(c.status),
            lhs: c.lhs,
            rhs: c.rhs,
            slack: c.slack,
            pass: c.pass,
        }),
    )
}

/// Human-readable summary, one line per check.
pub fn summary_text(scenario: &str, checks: &[BoundCheck]) -> String {
    let mut out = format!("scenario {scenario}\n");
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in checks {
        let word = match c.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::HypothesisUnmet => "SKIP",
        };
        let _ = write!(
            out,
            "{word} {:<width$}  lhs={:.6e} rhs={:.6e} slack={:.3e}",
            c.name, c.lhs, c.rhs, c.slack
        );
        if let Some(n) = c.context.n {
            let _ = write!(out, " n={n}");
        }
        if let Some(m) = c.context.m {
            let _ = write!(out, " m={m}");
        }
        for note in &c.notes {
            let _ = write!(out, " [{note}]");
        }
        out.push('\n');
    }
    let count = |s: CheckStatus| checks.iter().filter(|c| c.status == s).count();
    let _ = writeln!(
        out,
        "{} passed, {} failed, {} hypothesis unmet",
        count(CheckStatus::Pass),
        count(CheckStatus::Fail),
        count(CheckStatus::HypothesisUnmet)
    );
    out
}

/// Report files for a finished run.
pub fn assemble(
    scenario: &str,
    checks: &[BoundCheck],
    mut artifacts: Vec<Artifact>,
    output: &OutputSection,
) -> (Vec<Artifact>, String) {
    let text = summary_text(scenario, checks);
    let mut files = Vec::new();
    if output.json {
        files.push(json_artifact("report.json".into(), checks));
    }
    if output.csv {
        files.push(summary_csv(checks));
    }
    files.push(Artifact {
        name: "summary.txt".into(),
        bytes: text.clone().into_bytes(),
    });
    artifacts.retain(|a| {
        (output.csv || !a.name.ends_with(".csv")) && (output.json || !a.name.ends_with(".json"))
    });
    files.extend(artifacts);
    (files, text)
}

pub fn write_all(dir: &Path, files: &[Artifact]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for f in files {
        std::fs::write(dir.join(&f.name), &f.bytes)?;
    }
    Ok(())
}
