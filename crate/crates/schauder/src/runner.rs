//! Executes a resolved scenario's suite.

use schauder_core::bounds::{
    check_constants, check_prop21, check_prop23, check_thm22_i, check_thm22_ii, check_thm22_iii,
    check_thm31_ii, check_thm31_iii, check_thm32_bound_grid, check_thm32_ratios,
    check_thm32_subset, CheckHorizon,
};
use schauder_core::delay_ode::{
    check_strip_contraction, check_truncation_m1, integrate, StripTrace,
};
use schauder_core::iteration::{run_grid, solve_fixed_point, Domain, ProbeHorizon};
use schauder_core::operators::estimate_contraction_constant;
use schauder_core::sampling::ElementSampler;
use schauder_core::{BoundCheck, Element, Error, EXACT_TOL};

use crate::report::{self, Artifact};
use crate::scenario::{SampleSpec, Scenario, SuiteEntry};

/// Failure that aborts the run with exit status 2.
#[derive(Debug, thiserror::Error)]
#[error("suite[{index}] ({check}): {source}")]
pub struct RunError {
    pub index: usize,
    pub check: String,
    pub source: Error,
}

/// Everything a run produced, in suite order.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub checks: Vec<BoundCheck>,
    pub artifacts: Vec<Artifact>,
}

impl RunOutput {
    pub fn failed(&self) -> bool {
        self.checks.iter().any(BoundCheck::is_failure)
    }
}

/// Errors that describe a bad configuration rather than a failed bound.
fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::ClassMismatch(_)
            | Error::InvalidBasis(_)
            | Error::InvalidOperator(_)
            | Error::InvalidParameter { .. }
            | Error::InvalidScenario(_)
            | Error::UnsupportedComposition(_)
            | Error::DivergentTail { .. }
            | Error::OutOfRange { .. }
    )
}

fn label(entry: &SuiteEntry) -> String {
    let dbg = format!("{entry:?}");
    let head = dbg.split([' ', '{']).next().unwrap_or_default();
    // CamelCase variant to the snake_case tag used in files
    let mut out = String::new();
    for (i, ch) in head.chars().enumerate() {
        if ch.is_ascii_uppercase() {
            if i > 0 {
                out.push('_');
            }
            out.push(ch.to_ascii_lowercase());
        } else {
            out.push(ch);
        }
    }
    out
}

fn sample(spec: &SampleSpec, s: &Scenario) -> Vec<Element> {
    let mut sampler = ElementSampler::new(spec.seed, spec.dim.max(1)).with_tails(spec.tails);
    (0..spec.count)
        .map(|_| sampler.sample_in_ball(spec.radius, &s.basis, s.metric))
        .collect()
}

struct Runner<'a> {
    s: &'a Scenario,
    out: RunOutput,
    trace: Option<StripTrace>,
}

impl Runner<'_> {
    fn delay_trace(&mut self) -> schauder_core::Result<&StripTrace> {
        if self.trace.is_none() {
            let d = self.s.delay.as_ref().expect("validated at parse time");
            let trace = integrate(d)?;
            self.out.artifacts.push(report::delay_trace_csv(&trace));
            self.out.artifacts.push(report::delay_strips_csv(&trace));
            self.trace = Some(trace);
        }
        Ok(self.trace.as_ref().expect("just set"))
    }

    fn entry(
        &mut self,
        index: usize,
        entry: &SuiteEntry,
    ) -> schauder_core::Result<Vec<BoundCheck>> {
        let s = self.s;
        let (b, mt) = (&s.basis, s.metric);
        let op = || s.operator.as_ref().expect("validated at parse time");
        let el = |name: &str| s.element(name);
        let checks = match entry {
            SuiteEntry::Grid { x, y, n, m } => {
                let grid = run_grid(op(), el(x), el(y), &n.values(), &m.values(), b, mt)?;
                self.out
                    .artifacts
                    .extend(report::grid_artifacts(index, &grid, &s.output));
                vec![]
            }
            SuiteEntry::Constants { x, y, m } => {
                let zero = Element::zero();
                let y = y.as_deref().map_or(&zero, |n| el(n));
                m.values()
                    .into_iter()
                    .map(|m| check_constants(el(x), y, m, b, mt))
                    .collect()
            }
            SuiteEntry::Prop21 { x, n, m } => vec![check_prop21(op(), el(x), *n, *m)?],
            SuiteEntry::Thm22I { x, k, n, m_max } => {
                let ms: Vec<usize> = (1..=*m_max).collect();
                vec![check_thm22_i(op(), el(x), *k, *n, &ms, b)?]
            }
            SuiteEntry::Thm22Ii {
                x,
                k,
                epsilon,
                n_max,
                m_max,
            } => {
                let h = CheckHorizon {
                    n_max: *n_max,
                    m_max: *m_max,
                };
                vec![check_thm22_ii(op(), el(x), *k, *epsilon, b, mt, h)?]
            }
            SuiteEntry::Thm22Iii { x, k, n_max, m_max } => {
                let h = CheckHorizon {
                    n_max: *n_max,
                    m_max: *m_max,
                };
                vec![check_thm22_iii(op(), el(x), *k, b, mt, h)?]
            }
            SuiteEntry::SolveFixedPoint { x, epsilon, domain } => {
                let d = Domain::from_samples(sample(domain, s), b, mt);
                let sol =
                    solve_fixed_point(op(), el(x), *epsilon, &d, b, mt, ProbeHorizon::default())?;
                self.out.artifacts.push(report::json_artifact(
                    format!("fixed_point_{index}.json"),
                    &report::FixedPointRecord::from(&sol),
                ));
                vec![sol.certificate.clone()]
            }
            SuiteEntry::Thm31Ii {
                epsilon,
                domain,
                n_max,
                m_max,
            } => {
                let h = CheckHorizon {
                    n_max: *n_max,
                    m_max: *m_max,
                };
                check_thm31_ii(op(), &sample(domain, s), *epsilon, b, mt, h)?
            }
            SuiteEntry::Thm31Iii {
                epsilon,
                domain,
                window,
            } => vec![check_thm31_iii(
                op(),
                &sample(domain, s),
                *epsilon,
                b,
                mt,
                *window,
            )?],
            SuiteEntry::Thm32Bound { x, y, n_max, m } => {
                let cells = check_thm32_bound_grid(op(), el(x), el(y), *n_max, &m.values(), b, mt)?;
                vec![summarise_cells(cells)]
            }
            SuiteEntry::Thm32Ratios { x, y, horizon } => {
                check_thm32_ratios(op(), el(x), el(y), b, mt, *horizon)?
            }
            SuiteEntry::Thm32Subset {
                elements,
                tag,
                m,
                horizon,
            } => {
                let subset: Vec<Element> = elements.iter().map(|n| el(n).clone()).collect();
                let tag = tag.clone().unwrap_or_else(|| elements.join("+"));
                let (c, k) = check_thm32_subset(op(), &subset, &tag, *m, b, mt, *horizon)?;
                self.out.artifacts.push(report::json_artifact(
                    format!("subset_constants_{index}.json"),
                    &k,
                ));
                vec![c]
            }
            SuiteEntry::Prop23 { m } => vec![check_prop23(op(), *m, b, mt)?],
            SuiteEntry::Contraction { samples, seed } => {
                let est = estimate_contraction_constant(op(), *samples, *seed, b, mt)?;
                let bound = op().lipschitz_bound();
                vec![
                    BoundCheck::new("contraction.estimate", est, bound, EXACT_TOL)
                        .with_value("samples", *samples as f64)
                        .with_value("seed", *seed as f64),
                ]
            }
            SuiteEntry::DelayStrips { threshold } => {
                let d = s.delay.as_ref().expect("validated at parse time");
                let t = self.delay_trace()?;
                vec![check_strip_contraction(t, d, *threshold)]
            }
            SuiteEntry::DelayTruncation { threshold } => {
                let d = s.delay.as_ref().expect("validated at parse time");
                let t = self.delay_trace()?;
                vec![check_truncation_m1(t, d, *threshold)]
            }
        };
        Ok(checks)
    }
}

/// Collapses a per-cell bound grid into its worst-slack cell.
fn summarise_cells(cells: Vec<BoundCheck>) -> BoundCheck {
    let count = cells.len();
    let failing = cells.iter().filter(|c| c.is_failure()).count();
    let worst = cells
        .into_iter()
        .min_by(|a, b| a.slack.total_cmp(&b.slack))
        .expect("nonempty grid");
    worst
        .with_value("cells", count as f64)
        .with_value("failing_cells", failing as f64)
}

/// Runs every suite entry in order.
pub fn run(s: &Scenario) -> Result<RunOutput, RunError> {
    let mut r = Runner {
        s,
        out: RunOutput::default(),
        trace: None,
    };
    for (index, entry) in s.suite.iter().enumerate() {
        let check = label(entry);
        let produced =
            match r.entry(index, entry) {
                Ok(c) => c,
                Err(source) if is_config_error(&source) => {
                    return Err(RunError {
                        index,
                        check,
                        source,
                    })
                }
                Err(e) => vec![BoundCheck::new(check.clone(), f64::NAN, 0.0, 0.0)
                    .require(false, e.to_string())],
            };
        for c in produced {
            r.out.checks.push(c.with_value("suite_index", index as f64));
        }
    }
    Ok(r.out)
}
