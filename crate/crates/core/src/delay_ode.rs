//! Scalar linear equation with a time-varying point delay,
//! `y'(t) = a y(t) + a₀(t) y(t - λ(t))`, and its strip suprema.
//!
//! Stepping is the exponential integrator
//! `y_{k+1} = e^{a dt} y_k + dt/2 (e^{a dt} a₀(t_k) y(t_k - λ(t_k)) + a₀(t_{k+1}) y(t_{k+1} - λ(t_{k+1})))`
//! with delayed values read from the stored grid by linear interpolation.
//! When `λ(t_{k+1}) < dt` the delayed point lies inside the current step;
//! the step is then linear in `y_{k+1}` and is solved exactly.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::check::BoundCheck;
use crate::math::{abs, ceil, exp, floor, round, sin};
use crate::{Error, Result, EXACT_TOL};

/// Tolerance on `T_s / dt` being an integer.
const DIVISIBILITY_TOL: f64 = 1e-12;

/// Named scalar function of time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ScalarRule {
    /// `0`.
    Zero,
    /// `value`.
    Constant {
        /// Value.
        value: f64,
    },
    /// `intercept + slope t`.
    Linear {
        /// Value at `t = 0`.
        intercept: f64,
        /// Slope.
        slope: f64,
    },
    /// `scale / (1 + t)` for `t ≥ 0`, `scale` for `t < 0`.
    Reciprocal {
        /// Value at `t = 0`.
        scale: f64,
    },
    /// `offset + amplitude sin(frequency t)`.
    Sine {
        /// Mean.
        #[serde(default)]
        offset: f64,
        /// Amplitude.
        amplitude: f64,
        /// Angular frequency.
        frequency: f64,
    },
    /// `high` on the first half of each period, `low` on the second.
    SquareWave {
        /// Value on the second half.
        low: f64,
        /// Value on the first half.
        high: f64,
        /// Period.
        period: f64,
    },
}

impl ScalarRule {
    /// Evaluates the rule at `t`.
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            ScalarRule::Zero => 0.0,
            ScalarRule::Constant { value } => value,
            ScalarRule::Linear { intercept, slope } => intercept + slope * t,
            ScalarRule::Reciprocal { scale } => {
                if t >= 0.0 {
                    scale / (1.0 + t)
                } else {
                    scale
                }
            }
            ScalarRule::Sine {
                offset,
                amplitude,
                frequency,
            } => offset + amplitude * sin(frequency * t),
            ScalarRule::SquareWave { low, high, period } => {
                let phase = t / period - floor(t / period);
                if phase < 0.5 {
                    high
                } else {
                    low
                }
            }
        }
    }
}

/// Inputs of one integration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelayScenario {
    /// Drift, negative.
    pub a: f64,
    /// Delayed-term coefficient.
    pub a0: ScalarRule,
    /// Delay, with values in `(0, h]`.
    pub lambda_fn: ScalarRule,
    /// Delay bound.
    pub h: f64,
    /// Sampling period `T_s > h`.
    #[serde(alias = "t_s")]
    pub sample_period: f64,
    /// Initial function on `[-h, 0]`.
    pub phi: ScalarRule,
    /// Integrator step.
    pub dt: f64,
    /// Final time.
    pub horizon: f64,
}

fn invalid(msg: impl Into<alloc::string::String>) -> Error {
    Error::InvalidScenario(msg.into())
}

impl DelayScenario {
    /// Scenario with the given step, everything else unchanged.
    pub fn with_dt(&self, dt: f64) -> Self {
        Self { dt, ..self.clone() }
    }

    /// Number of steps to the horizon.
    pub fn steps(&self) -> usize {
        ceil(self.horizon / self.dt - 1e-9) as usize
    }

    /// Steps per sampling period.
    pub fn steps_per_strip(&self) -> usize {
        round(self.sample_period / self.dt) as usize
    }

    fn history_steps(&self) -> usize {
        ceil(self.h / self.dt - 1e-9) as usize
    }

    /// Checks the scenario invariants on the integration grid.
    pub fn validate(&self) -> Result<()> {
        let finite = [self.a, self.h, self.sample_period, self.dt, self.horizon]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::NonFinite {
                what: "delay scenario",
            });
        }
        if self.a >= 0.0 {
            return Err(invalid(format!("drift a = {} must be negative", self.a)));
        }
        if self.h <= 0.0 || self.horizon <= 0.0 || self.dt <= 0.0 {
            return Err(invalid("h, dt and horizon must be positive"));
        }
        if self.sample_period <= self.h {
            return Err(invalid(format!(
                "sampling period {} must exceed the delay bound {}",
                self.sample_period, self.h
            )));
        }
        if self.dt > self.h {
            return Err(invalid(format!(
                "dt = {} exceeds the delay bound {} (undersampled delay)",
                self.dt, self.h
            )));
        }
        let p = self.steps_per_strip();
        if p == 0 || abs(p as f64 * self.dt - self.sample_period) > DIVISIBILITY_TOL {
            return Err(invalid(format!(
                "dt = {} does not divide the sampling period {}",
                self.dt, self.sample_period
            )));
        }
        let mut sup_a0 = 0.0f64;
        for k in 0..=self.steps() {
            let t = k as f64 * self.dt;
            let a0 = self.a0.eval(t);
            let lam = self.lambda_fn.eval(t);
            if !a0.is_finite() || !lam.is_finite() {
                return Err(Error::NonFinite {
                    what: "a0 or lambda",
                });
            }
            sup_a0 = sup_a0.max(abs(a0));
            if lam <= 0.0 || lam > self.h {
                return Err(invalid(format!(
                    "lambda({t}) = {lam} outside (0, {}]",
                    self.h
                )));
            }
        }
        if sup_a0 >= abs(self.a) {
            return Err(invalid(format!(
                "sup |a0| = {sup_a0} must be below |a| = {}",
                abs(self.a)
            )));
        }
        for j in 0..=self.history_steps() {
            if !self.phi.eval(-(j as f64) * self.dt).is_finite() {
                return Err(Error::NonFinite { what: "phi" });
            }
        }
        Ok(())
    }
}

/// Solution on the step grid with its per-period suprema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripTrace {
    /// `t_k = k dt`, `k = 0..=N`.
    pub times: Vec<f64>,
    /// `y(t_k)`.
    pub values: Vec<f64>,
    /// `e^{a t_k} φ(0)`.
    pub truncation_m1: Vec<f64>,
    /// `sup_σ |y(n T_s + σ)|` over each complete period.
    pub strip_sups: Vec<f64>,
    /// Grid points per period.
    pub steps_per_strip: usize,
    /// Drift the trace was computed with.
    pub a: f64,
    /// `φ(0)`.
    pub phi0: f64,
}

impl StripTrace {
    /// `y(t_k) - e^{a t_k} φ(0)`.
    pub fn residual(&self, k: usize) -> f64 {
        self.values[k] - self.truncation_m1[k]
    }

    /// `y` at the last grid point.
    pub fn terminal(&self) -> f64 {
        *self.values.last().expect("trace has at least one point")
    }
}

/// Grid values on `[-h_steps dt, N dt]`, read by linear interpolation.
struct History {
    dt: f64,
    offset: usize,
    values: Vec<f64>,
}

impl History {
    fn at(&self, t: f64) -> f64 {
        let pos = t / self.dt + self.offset as f64;
        let lo = (floor(pos) as usize).min(self.values.len() - 1);
        let theta = pos - lo as f64;
        if theta <= 0.0 || lo + 1 >= self.values.len() {
            return self.values[lo];
        }
        (1.0 - theta) * self.values[lo] + theta * self.values[lo + 1]
    }
}

/// Integrates the scenario to its horizon.
pub fn integrate(s: &DelayScenario) -> Result<StripTrace> {
    s.validate()?;
    let dt = s.dt;
    let n = s.steps();
    let offset = s.history_steps();
    let mut hist = History {
        dt,
        offset,
        values: Vec::with_capacity(offset + n + 1),
    };
    for j in (0..=offset).rev() {
        hist.values.push(s.phi.eval(-(j as f64) * dt));
    }
    let decay = exp(s.a * dt);
    let half = 0.5 * dt;
    for k in 0..n {
        let t0 = k as f64 * dt;
        let t1 = (k + 1) as f64 * dt;
        let y0 = hist.values[offset + k];
        let left = decay * s.a0.eval(t0) * hist.at(t0 - s.lambda_fn.eval(t0));
        let c = half * s.a0.eval(t1);
        let d1 = t1 - s.lambda_fn.eval(t1);
        let y1 = if d1 > t0 {
            // delayed point inside the step: y(d1) = (1-θ) y0 + θ y1
            let theta = (d1 - t0) / dt;
            (decay * y0 + half * left + c * (1.0 - theta) * y0) / (1.0 - c * theta)
        } else {
            decay * y0 + half * left + c * hist.at(d1)
        };
        if !y1.is_finite() {
            return Err(Error::NonFinite {
                what: "delay solution",
            });
        }
        hist.values.push(y1);
    }

    let values = hist.values.split_off(offset);
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * dt).collect();
    let phi0 = s.phi.eval(0.0);
    let truncation_m1 = times.iter().map(|&t| exp(s.a * t) * phi0).collect();
    let p = s.steps_per_strip();
    let strip_sups = values
        .chunks_exact(p)
        .map(|c| c.iter().fold(0.0f64, |m, v| m.max(abs(*v))))
        .collect();
    Ok(StripTrace {
        times,
        values,
        truncation_m1,
        strip_sups,
        steps_per_strip: p,
        a: s.a,
        phi0,
    })
}

/// `sup |y|` over strip `n` (0-based).
pub fn strip_sup(trace: &StripTrace, n: usize) -> Result<f64> {
    trace.strip_sups.get(n).copied().ok_or(Error::OutOfRange {
        index: n,
        len: trace.strip_sups.len(),
    })
}

/// Strict strip decay from strip 1 on, with the empirical ratio
/// `ρ = max strip(n+1)/strip(n)` and the terminal value below `threshold`.
pub fn check_strip_contraction(
    trace: &StripTrace,
    s: &DelayScenario,
    threshold: f64,
) -> BoundCheck {
    let sups = &trace.strip_sups;
    let n0 = 1usize;
    let mut rho = 0.0f64;
    let mut strict = true;
    for n in n0..sups.len().saturating_sub(1) {
        if sups[n] == 0.0 {
            strict &= sups[n + 1] == 0.0;
            continue;
        }
        rho = rho.max(sups[n + 1] / sups[n]);
        strict &= sups[n + 1] < sups[n];
    }
    let vacuous = sups.iter().all(|v| *v == 0.0);
    let terminal = abs(trace.terminal());
    BoundCheck::new("delay.strip_contraction", terminal, threshold, 0.0)
        .at_n(n0)
        .with_value("rho", rho)
        .with_value("strips", sups.len() as f64)
        .with_value("dt", s.dt)
        .with_value("horizon", s.horizon)
        .require(vacuous || strict, "strip suprema not strictly decreasing")
        .require(rho < 1.0, format!("empirical ratio {rho} >= 1"))
}

/// Exactness of the stored `e^{a t} φ(0)` series and the residual
/// `y - e^{a t} φ(0)` at the horizon below `threshold`.
pub fn check_truncation_m1(trace: &StripTrace, s: &DelayScenario, threshold: f64) -> BoundCheck {
    let phi0 = s.phi.eval(0.0);
    let exact_err = trace
        .times
        .iter()
        .zip(&trace.truncation_m1)
        .map(|(&t, &v)| abs(v - exp(s.a * t) * phi0))
        .fold(0.0f64, f64::max);
    let last = trace.values.len() - 1;
    let residual = abs(trace.residual(last));
    BoundCheck::new("delay.truncation_m1", residual, threshold, 0.0)
        .at_m(1)
        .with_value("truncation_max_error", exact_err)
        .with_value("horizon", s.horizon)
        .require(
            exact_err <= EXACT_TOL,
            format!("truncation series off by {exact_err}"),
        )
}
