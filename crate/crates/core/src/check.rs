//! Verified-inequality records emitted by every numeric check.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Default tolerance on `slack = rhs - lhs`.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Outcome of a check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    /// Inequality holds within tolerance.
    Pass,
    /// Inequality violated, or a side condition failed.
    Fail,
    /// A premise of the statement does not hold for this instance, so there
    /// is nothing to verify.
    HypothesisUnmet,
}

/// Parameters the check was evaluated at.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckContext {
    /// Iteration count (or threshold such as `n̄`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Truncation order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Shift `k`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Target accuracy.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Additional measured values (thresholds, horizons, ratios).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, f64>,
}

/// One checked inequality `lhs ≤ rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    /// Statement tag, e.g. `thm32.bound`.
    pub name: String,
    /// Measured left side.
    pub lhs: f64,
    /// Bound.
    pub rhs: f64,
    /// `rhs - lhs`.
    pub slack: f64,
    /// `status == Pass`.
    pub pass: bool,
    /// Detailed outcome.
    pub status: CheckStatus,
    /// Tolerance applied to the slack.
    pub tolerance: f64,
    /// Evaluation point.
    pub context: CheckContext,
    /// How an ambiguous statement was read, when applicable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interpretation: Option<String>,
    /// Diagnostics for side conditions that failed.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl BoundCheck {
    /// Passes iff `rhs - lhs >= -tolerance`.
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let slack = rhs - lhs;
        let ok = slack >= -tolerance && lhs.is_finite() && rhs.is_finite();
        Self {
            name: name.into(),
            lhs,
            rhs,
            slack,
            pass: ok,
            status: if ok {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            tolerance,
            context: CheckContext::default(),
            interpretation: None,
            notes: Vec::new(),
        }
    }

    /// Record for an instance whose premise is false.
    pub fn hypothesis_unmet(name: impl Into<String>, reason: impl Into<String>) -> Self {
        let mut c = Self::new(name, 0.0, 0.0, 0.0);
        c.pass = false;
        c.status = CheckStatus::HypothesisUnmet;
        c.notes.push(reason.into());
        c
    }

    /// Adds a side condition; a false condition turns the check into a
    /// failure and records `note`.
    pub fn require(mut self, condition: bool, note: impl Into<String>) -> Self {
        if !condition && self.status != CheckStatus::HypothesisUnmet {
            self.pass = false;
            self.status = CheckStatus::Fail;
            self.notes.push(note.into());
        }
        self
    }

    /// Sets `n`.
    pub fn at_n(mut self, n: usize) -> Self {
        self.context.n = Some(n);
        self
    }

    /// Sets `m`.
    pub fn at_m(mut self, m: usize) -> Self {
        self.context.m = Some(m);
        self
    }

    /// Sets `k`.
    pub fn at_k(mut self, k: usize) -> Self {
        self.context.k = Some(k);
        self
    }

    /// Sets `ε`.
    pub fn at_epsilon(mut self, eps: f64) -> Self {
        self.context.epsilon = Some(eps);
        self
    }

    /// Records a named measured value.
    pub fn with_value(mut self, key: &str, value: f64) -> Self {
        self.context.values.insert(key.into(), value);
        self
    }

    /// Records the reading used for an ambiguous statement.
    pub fn interpreted(mut self, reading: &str) -> Self {
        self.interpretation = Some(reading.into());
        self
    }

    /// `true` unless the check failed outright.
    pub fn is_failure(&self) -> bool {
        self.status == CheckStatus::Fail
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_and_tolerance() {
        assert!(BoundCheck::new("a", 1.0, 1.0 - 5e-10, DEFAULT_TOL).pass);
        assert!(!BoundCheck::new("a", 1.0, 1.0 - 2e-9, DEFAULT_TOL).pass);
        assert!(!BoundCheck::new("a", f64::NAN, 1.0, DEFAULT_TOL).pass);
        let c = BoundCheck::new("a", 0.0, 1.0, 0.0).require(false, "side");
        assert_eq!(c.status, CheckStatus::Fail);
        assert_eq!(c.notes.len(), 1);
    }

    #[test]
    fn unmet_is_not_failure() {
        let c = BoundCheck::hypothesis_unmet("p", "premise");
        assert!(!c.is_failure());
        assert!(!c.pass);
    }
}
