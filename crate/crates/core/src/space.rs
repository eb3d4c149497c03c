//! Coefficient-sequence model of a separable space with a Schauder basis.
//!
//! An [`Element`] is `x = Σ xᵢeᵢ` with a stored prefix `x₁..x_L` and a
//! [`Tail`] describing every coefficient past `L` as a finite sum of
//! geometric sequences `Σⱼ aⱼ rⱼⁱ` (indices are absolute and 1-based). The
//! tail is closed under the linear operations and the diagonal actions used
//! by [`crate::operators`], which keeps every norm exact.

use alloc::borrow::Cow;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::math::{abs, powi, sqrt};
use crate::sampling::ElementSampler;
use crate::{Error, Result};

/// One geometric sequence `i ↦ amplitude · ratioⁱ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricTerm {
    /// Multiplier of `ratioⁱ`.
    pub amplitude: f64,
    /// Common ratio, `|ratio| < 1`.
    pub ratio: f64,
}

/// Wire form of a [`Tail`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailSpec {
    /// All coefficients past the prefix vanish.
    Zero,
    /// `xᵢ = amplitude · ratioⁱ` past the prefix.
    Geometric {
        /// Multiplier of `ratioⁱ`.
        amplitude: f64,
        /// Common ratio.
        ratio: f64,
    },
    /// Sum of several geometric sequences (arises from `x - y`).
    GeometricSum {
        /// The summands.
        terms: Vec<GeometricTerm>,
    },
}

/// Coefficients past the stored prefix, as a normalised sum of geometric
/// sequences. The empty sum is the zero tail.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "TailSpec", into = "TailSpec")]
pub struct Tail {
    terms: Vec<GeometricTerm>,
}

impl Tail {
    /// The zero tail.
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// `amplitude · ratioⁱ`.
    pub fn geometric(amplitude: f64, ratio: f64) -> Result<Self> {
        Self::from_terms(vec![GeometricTerm { amplitude, ratio }])
    }

    /// Builds a tail from arbitrary terms, merging equal ratios and dropping
    /// terms that vanish identically.
    pub fn from_terms(terms: Vec<GeometricTerm>) -> Result<Self> {
        for t in &terms {
            if !t.amplitude.is_finite() || !t.ratio.is_finite() {
                return Err(Error::NonFinite { what: "tail" });
            }
            if abs(t.ratio) >= 1.0 {
                return Err(Error::DivergentTail { ratio: t.ratio });
            }
        }
        Ok(Self::normalized(terms))
    }

    fn normalized(mut terms: Vec<GeometricTerm>) -> Self {
        terms.retain(|t| t.amplitude != 0.0 && t.ratio != 0.0);
        terms.sort_by(|a, b| a.ratio.total_cmp(&b.ratio));
        let mut merged: Vec<GeometricTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.ratio.total_cmp(&t.ratio) == Ordering::Equal => {
                    last.amplitude += t.amplitude;
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.amplitude != 0.0);
        Self { terms: merged }
    }

    /// `true` for the zero tail.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The geometric summands.
    pub fn terms(&self) -> &[GeometricTerm] {
        &self.terms
    }

    /// Coefficient at absolute index `i`.
    pub fn value(&self, i: usize) -> f64 {
        self.terms
            .iter()
            .map(|t| t.amplitude * powi(t.ratio, i as u64))
            .sum()
    }

    /// Largest `|ratio|` among the terms (0 for the zero tail).
    pub fn max_abs_ratio(&self) -> f64 {
        self.terms.iter().map(|t| abs(t.ratio)).fold(0.0, f64::max)
    }

    pub(crate) fn scaled(&self, alpha: f64) -> Self {
        Self::normalized(
            self.terms
                .iter()
                .map(|t| GeometricTerm {
                    amplitude: alpha * t.amplitude,
                    ratio: t.ratio,
                })
                .collect(),
        )
    }

    pub(crate) fn lincomb(alpha: f64, a: &Tail, beta: f64, b: &Tail) -> Self {
        let terms = a
            .terms
            .iter()
            .map(|t| GeometricTerm {
                amplitude: alpha * t.amplitude,
                ratio: t.ratio,
            })
            .chain(b.terms.iter().map(|t| GeometricTerm {
                amplitude: beta * t.amplitude,
                ratio: t.ratio,
            }))
            .collect();
        Self::normalized(terms)
    }

    /// Termwise product with the sequence `factor · ρⁱ`, `|ρ| ≤ 1`.
    pub(crate) fn times_geometric(&self, factor: f64, rho: f64) -> Self {
        Self::normalized(
            self.terms
                .iter()
                .map(|t| GeometricTerm {
                    amplitude: t.amplitude * factor,
                    ratio: t.ratio * rho,
                })
                .collect(),
        )
    }

    /// `Σ_{i>start} (tail value at i)²` in closed form.
    fn sum_sq_from(&self, start: usize) -> f64 {
        let mut acc = 0.0;
        for a in &self.terms {
            for b in &self.terms {
                let q = a.ratio * b.ratio;
                acc += a.amplitude * b.amplitude * powi(q, start as u64 + 1) / (1.0 - q);
            }
        }
        acc.max(0.0)
    }

    /// `Σ_{i>start} |tail value at i|`.
    ///
    /// Closed form for a single term, otherwise summed until the remaining
    /// mass is below double precision of the running total.
    fn abs_sum_from(&self, start: usize) -> f64 {
        match self.terms.as_slice() {
            [] => 0.0,
            [t] => {
                let r = abs(t.ratio);
                abs(t.amplitude) * powi(r, start as u64 + 1) / (1.0 - r)
            }
            _ => {
                let mut acc = 0.0;
                let mut i = start + 1;
                loop {
                    acc += abs(self.value(i));
                    let remainder: f64 = self
                        .terms
                        .iter()
                        .map(|t| {
                            let r = abs(t.ratio);
                            abs(t.amplitude) * powi(r, i as u64 + 1) / (1.0 - r)
                        })
                        .sum();
                    if remainder <= 1e-17 * acc || remainder < f64::MIN_POSITIVE {
                        break;
                    }
                    i += 1;
                }
                acc
            }
        }
    }
}

impl TryFrom<TailSpec> for Tail {
    type Error = Error;

    fn try_from(spec: TailSpec) -> Result<Self> {
        match spec {
            TailSpec::Zero => Ok(Self::zero()),
            TailSpec::Geometric { amplitude, ratio } => Self::geometric(amplitude, ratio),
            TailSpec::GeometricSum { terms } => Self::from_terms(terms),
        }
    }
}

impl From<Tail> for TailSpec {
    fn from(tail: Tail) -> Self {
        match tail.terms.as_slice() {
            [] => TailSpec::Zero,
            [t] => TailSpec::Geometric {
                amplitude: t.amplitude,
                ratio: t.ratio,
            },
            _ => TailSpec::GeometricSum { terms: tail.terms },
        }
    }
}

#[derive(Deserialize)]
struct ElementRecord {
    coeffs: Vec<f64>,
    #[serde(default)]
    tail: Tail,
}

/// A point `x = Σ xᵢeᵢ` of the space.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "ElementRecord")]
pub struct Element {
    coeffs: Vec<f64>,
    tail: Tail,
}

impl TryFrom<ElementRecord> for Element {
    type Error = Error;

    fn try_from(r: ElementRecord) -> Result<Self> {
        Element::new(r.coeffs, r.tail)
    }
}

impl Element {
    /// Prefix `x₁..x_L` followed by `tail`.
    pub fn new(coeffs: Vec<f64>, tail: Tail) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { what: "coeffs" });
        }
        Ok(Self { coeffs, tail })
    }

    /// Finitely supported element with the given prefix.
    pub fn finite(coeffs: Vec<f64>) -> Result<Self> {
        Self::new(coeffs, Tail::zero())
    }

    /// The origin.
    pub fn zero() -> Self {
        Self::default()
    }

    /// Basis coordinate `eᵢ` (1-based). `unit(0)` is the origin.
    pub fn unit(i: usize) -> Self {
        if i == 0 {
            return Self::zero();
        }
        let mut coeffs = vec![0.0; i];
        coeffs[i - 1] = 1.0;
        Self {
            coeffs,
            tail: Tail::zero(),
        }
    }

    /// `prefix` followed by `amplitude · ratioⁱ`.
    pub fn geometric(prefix: Vec<f64>, amplitude: f64, ratio: f64) -> Result<Self> {
        Self::new(prefix, Tail::geometric(amplitude, ratio)?)
    }

    /// Stored prefix.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Tail past the prefix.
    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// Length `L` of the stored prefix.
    pub fn prefix_len(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient `xᵢ` (1-based); `coeff(0)` is 0.
    pub fn coeff(&self, i: usize) -> f64 {
        match i {
            0 => 0.0,
            i if i <= self.coeffs.len() => self.coeffs[i - 1],
            i => self.tail.value(i),
        }
    }

    /// Index of the last nonzero coefficient, or `None` when the tail is
    /// nonzero (infinite support).
    pub fn support_len(&self) -> Option<usize> {
        if !self.tail.is_zero() {
            return None;
        }
        Some(
            self.coeffs
                .iter()
                .rposition(|&c| c != 0.0)
                .map_or(0, |p| p + 1),
        )
    }

    /// `xᵢeᵢ` as an element.
    pub fn coordinate_part(&self, i: usize) -> Self {
        Self::unit(i).scale(self.coeff(i))
    }

    /// `αx + βy`.
    pub fn lincomb(alpha: f64, x: &Element, beta: f64, y: &Element) -> Element {
        let len = x.prefix_len().max(y.prefix_len());
        let coeffs = (1..=len)
            .map(|i| alpha * x.coeff(i) + beta * y.coeff(i))
            .collect();
        Element {
            coeffs,
            tail: Tail::lincomb(alpha, &x.tail, beta, &y.tail),
        }
    }

    /// `x + y`.
    pub fn add(&self, other: &Element) -> Element {
        Self::lincomb(1.0, self, 1.0, other)
    }

    /// `x - y`.
    pub fn sub(&self, other: &Element) -> Element {
        Self::lincomb(1.0, self, -1.0, other)
    }

    /// `αx`.
    pub fn scale(&self, alpha: f64) -> Element {
        Element {
            coeffs: self.coeffs.iter().map(|c| alpha * c).collect(),
            tail: self.tail.scaled(alpha),
        }
    }
}

/// Weight rules of a coordinate-weighted basis `eᵢ = wᵢ · uᵢ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightedRecord")]
pub struct WeightedBasis {
    weights: Vec<f64>,
    tail: WeightTail,
}

/// Weights past the explicit list: `wᵢ = amplitude · ratioⁱ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightTail {
    /// Positive multiplier.
    pub amplitude: f64,
    /// Ratio in `(0, 1]`; `1` gives constant weights.
    pub ratio: f64,
}

impl Default for WeightTail {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            ratio: 1.0,
        }
    }
}

#[derive(Deserialize)]
struct WeightedRecord {
    weights: Vec<f64>,
    #[serde(default)]
    tail: WeightTail,
}

impl TryFrom<WeightedRecord> for WeightedBasis {
    type Error = Error;

    fn try_from(r: WeightedRecord) -> Result<Self> {
        WeightedBasis::new(r.weights, r.tail)
    }
}

impl WeightedBasis {
    /// Validates positivity and boundedness of the weights.
    pub fn new(weights: Vec<f64>, tail: WeightTail) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::InvalidBasis(
                "weights must be positive and finite".into(),
            ));
        }
        if !tail.amplitude.is_finite() || tail.amplitude <= 0.0 {
            return Err(Error::InvalidBasis(
                "weight tail amplitude must be positive".into(),
            ));
        }
        if !(tail.ratio > 0.0 && tail.ratio <= 1.0) {
            return Err(Error::InvalidBasis(
                "weight tail ratio must lie in (0, 1]".into(),
            ));
        }
        Ok(Self { weights, tail })
    }

    /// `wᵢ` (1-based).
    pub fn weight(&self, i: usize) -> f64 {
        if i <= self.weights.len() {
            self.weights[i - 1]
        } else {
            self.tail.amplitude * powi(self.tail.ratio, i as u64)
        }
    }
}

/// A coordinate Schauder basis.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisSpec {
    /// `eᵢ` is the i-th unit vector.
    #[default]
    Canonical,
    /// `eᵢ = wᵢ` times the i-th unit vector.
    Weighted(WeightedBasis),
}

impl BasisSpec {
    /// Weighted basis from an explicit list and a tail rule.
    pub fn weighted(weights: Vec<f64>, tail: WeightTail) -> Result<Self> {
        WeightedBasis::new(weights, tail).map(Self::Weighted)
    }

    /// `‖eᵢ‖`.
    pub fn basis_norm(&self, i: usize) -> f64 {
        match self {
            BasisSpec::Canonical => 1.0,
            BasisSpec::Weighted(w) => w.weight(i),
        }
    }

    /// Basis constant `C = sup_m ‖P_m‖`.
    ///
    /// Both basis kinds are orthogonal, so every `P_m` is an orthogonal
    /// projection and `C = 1`.
    pub fn basis_constant(&self) -> f64 {
        1.0
    }

    /// The ambient coordinates `(wᵢxᵢ)` of `x`.
    pub fn ambient<'a>(&self, x: &'a Element) -> Cow<'a, Element> {
        match self {
            BasisSpec::Canonical => Cow::Borrowed(x),
            BasisSpec::Weighted(w) => {
                let len = x.prefix_len().max(w.weights.len());
                let coeffs = (1..=len).map(|i| w.weight(i) * x.coeff(i)).collect();
                Cow::Owned(Element {
                    coeffs,
                    tail: x.tail.times_geometric(w.tail.amplitude, w.tail.ratio),
                })
            }
        }
    }
}

/// Norm used to induce the metric `d(x, y) = ‖x - y‖`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    /// `ℓ²` norm of the ambient coordinates.
    #[default]
    L2,
    /// `sup_m |Σ_{i≤m} xᵢeᵢ|` with `|·|` the ambient `ℓ²` magnitude.
    SupPartialSum,
}

/// `[x]_m = P_m x = Σ_{i≤m} xᵢeᵢ`. `P₀ = 0`.
pub fn project(x: &Element, m: usize) -> Element {
    let coeffs = if m <= x.prefix_len() {
        x.coeffs[..m].to_vec()
    } else if x.tail.is_zero() {
        x.coeffs.clone()
    } else {
        let mut c = x.coeffs.clone();
        c.extend((x.prefix_len() + 1..=m).map(|i| x.tail.value(i)));
        c
    };
    Element {
        coeffs,
        tail: Tail::zero(),
    }
}

/// Norm of `x - P_start x` in ambient coordinates `u`.
fn residual_norm(u: &Element, start: usize, metric: MetricKind) -> f64 {
    let len = u.prefix_len();
    match metric {
        MetricKind::L2 => {
            let prefix: f64 = u.coeffs.iter().skip(start).map(|c| c * c).sum();
            sqrt(prefix + u.tail.sum_sq_from(start.max(len)))
        }
        MetricKind::SupPartialSum => {
            // Partial sums past the prefix only add nonnegative terms, so
            // the supremum over them is attained in the limit.
            let mut running = 0.0;
            let mut sup = 0.0f64;
            for c in u.coeffs.iter().skip(start) {
                running += c * c;
                sup = sup.max(running);
            }
            let limit = running + u.tail.sum_sq_from(start.max(len));
            sqrt(sup.max(limit))
        }
    }
}

/// `‖x‖` under `basis` and `metric`.
pub fn norm(x: &Element, basis: &BasisSpec, metric: MetricKind) -> f64 {
    residual_norm(&basis.ambient(x), 0, metric)
}

/// `d(x, y) = ‖x - y‖`.
pub fn distance(x: &Element, y: &Element, basis: &BasisSpec, metric: MetricKind) -> f64 {
    norm(&x.sub(y), basis, metric)
}

/// `‖x - [x]_m‖`.
pub fn tail_norm(x: &Element, m: usize, basis: &BasisSpec, metric: MetricKind) -> f64 {
    residual_norm(&basis.ambient(x), m, metric)
}

/// `‖[x]_m‖` for each `m` in the ascending list `ms`.
///
/// Partial sums with a coordinate basis are orthogonal, so both metric kinds
/// reduce to running `ℓ²` sums of the ambient coordinates.
pub fn projection_norms(x: &Element, ms: &[usize], basis: &BasisSpec) -> Vec<f64> {
    let u = basis.ambient(x);
    let mut out = Vec::with_capacity(ms.len());
    let mut acc = 0.0;
    let mut i = 0usize;
    for &m in ms {
        while i < m {
            i += 1;
            let c = u.coeff(i);
            acc += c * c;
        }
        out.push(sqrt(acc));
    }
    out
}

/// `Σ_{i>m} |xᵢ| ‖eᵢ‖`.
pub fn abs_tail_sum(x: &Element, m: usize, basis: &BasisSpec) -> f64 {
    let u = basis.ambient(x);
    let prefix: f64 = u.coeffs.iter().skip(m).map(|c| abs(*c)).sum();
    prefix + u.tail.abs_sum_from(m.max(u.prefix_len()))
}

/// Empirical `max ‖P_m x‖ / ‖x‖` over seeded samples and `m ≤ max_m`.
///
/// Half the samples are finitely supported so projections that fix the
/// sample are exercised; the estimate is therefore `≥ 1` up to rounding.
pub fn basis_constant_estimate(
    basis: &BasisSpec,
    sample_count: usize,
    max_m: usize,
    seed: u64,
) -> f64 {
    let dim = max_m.clamp(1, 8);
    let mut sampler = ElementSampler::new(seed, dim).with_tails(true);
    let mut best = 0.0f64;
    for _ in 0..sample_count.max(1) {
        let x = sampler.sample();
        let nx = norm(&x, basis, MetricKind::L2);
        if nx == 0.0 {
            continue;
        }
        for m in 1..=max_m.max(1) {
            let ratio = norm(&project(&x, m), basis, MetricKind::L2) / nx;
            best = best.max(ratio);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn halves() -> Element {
        // xᵢ = 2^{-(i-1)} = 2 · 0.5ⁱ
        Element::geometric(vec![], 2.0, 0.5).unwrap()
    }

    #[test]
    fn project_expands_geometric_tail() {
        let p = project(&halves(), 2);
        assert_eq!(p.coeffs(), &[1.0, 0.5]);
        assert!(p.tail().is_zero());
        assert_eq!(project(&halves(), 0), Element::zero());
        let f = Element::finite(vec![1.0, 2.0]).unwrap();
        assert_eq!(project(&f, 5), f);
        assert_eq!(project(&project(&halves(), 3), 3), project(&halves(), 3));
    }

    #[test]
    fn norm_of_geometric_sequence() {
        let n = norm(&halves(), &BasisSpec::Canonical, MetricKind::L2);
        assert!((n - (4.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((n - 1.154_700_538_379_251_5).abs() < 1e-12);
        let s = norm(&halves(), &BasisSpec::Canonical, MetricKind::SupPartialSum);
        assert!((n - s).abs() < 1e-12);
        assert_eq!(
            norm(&Element::zero(), &BasisSpec::Canonical, MetricKind::L2),
            0.0
        );
    }

    #[test]
    fn distances() {
        let b = BasisSpec::Canonical;
        let x = Element::finite(vec![1.0, 0.5]).unwrap();
        let y = Element::finite(vec![0.0, 0.5]).unwrap();
        assert_eq!(distance(&x, &y, &b, MetricKind::L2), 1.0);
        assert_eq!(distance(&x, &x, &b, MetricKind::L2), 0.0);
        assert_eq!(
            distance(&Element::unit(1), &Element::zero(), &b, MetricKind::L2),
            1.0
        );
    }

    #[test]
    fn tail_norm_closed_form() {
        let b = BasisSpec::Canonical;
        let t = tail_norm(&halves(), 2, &b, MetricKind::L2);
        assert!((t - (1.0f64 / 12.0).sqrt()).abs() < 1e-12);
        let f = Element::finite(vec![1.0, 2.0, 0.0]).unwrap();
        assert_eq!(tail_norm(&f, 2, &b, MetricKind::L2), 0.0);
        let n = norm(&halves(), &b, MetricKind::L2);
        assert_eq!(tail_norm(&halves(), 0, &b, MetricKind::L2), n);
    }

    #[test]
    fn tail_norm_ratio_tends_to_tail_ratio() {
        let x = Element::geometric(vec![3.0, -1.0], 0.7, -0.6).unwrap();
        let b = BasisSpec::Canonical;
        let r = tail_norm(&x, 41, &b, MetricKind::L2) / tail_norm(&x, 40, &b, MetricKind::L2);
        assert!((r - 0.6).abs() < 1e-9);
    }

    #[test]
    fn subtracting_equal_tails_cancels() {
        let d = halves().sub(&halves());
        assert!(d.tail().is_zero());
        assert_eq!(norm(&d, &BasisSpec::Canonical, MetricKind::L2), 0.0);
    }

    #[test]
    fn divergent_tail_rejected() {
        assert!(matches!(
            Tail::geometric(1.0, 1.0),
            Err(Error::DivergentTail { .. })
        ));
        assert!(Element::finite(vec![f64::NAN]).is_err());
    }

    #[test]
    fn weighted_basis_norm() {
        let b = BasisSpec::weighted(
            vec![2.0],
            WeightTail {
                amplitude: 1.0,
                ratio: 0.5,
            },
        )
        .unwrap();
        // x = e₁ + e₂ → ambient (2, 0.25)
        let x = Element::finite(vec![1.0, 1.0]).unwrap();
        let n = norm(&x, &b, MetricKind::L2);
        assert!((n - (4.0f64 + 0.0625).sqrt()).abs() < 1e-12);
        assert!(BasisSpec::weighted(vec![0.0], WeightTail::default()).is_err());
        assert!(BasisSpec::weighted(
            vec![],
            WeightTail {
                amplitude: 1.0,
                ratio: 1.5
            }
        )
        .is_err());
    }

    #[test]
    fn unit_weights_reduce_to_canonical() {
        let b = BasisSpec::weighted(vec![1.0, 1.0], WeightTail::default()).unwrap();
        let c = basis_constant_estimate(&b, 200, 6, 3);
        assert!((c - 1.0).abs() < 1e-12);
        let x = Element::geometric(vec![0.3], -1.0, 0.4).unwrap();
        let a = norm(&x, &b, MetricKind::L2);
        let e = norm(&x, &BasisSpec::Canonical, MetricKind::L2);
        assert!((a - e).abs() < 1e-15);
    }

    #[test]
    fn canonical_basis_is_monotone() {
        let c = basis_constant_estimate(&BasisSpec::Canonical, 300, 10, 11);
        assert!((c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn abs_tail_sum_single_and_multi_term() {
        let b = BasisSpec::Canonical;
        // Σ_{i>2} 2·0.5ⁱ = 0.5
        assert!((abs_tail_sum(&halves(), 2, &b) - 0.5).abs() < 1e-15);
        let t = Tail::from_terms(vec![
            GeometricTerm {
                amplitude: 1.0,
                ratio: 0.5,
            },
            GeometricTerm {
                amplitude: -1.0,
                ratio: 0.25,
            },
        ])
        .unwrap();
        let x = Element::new(vec![], t).unwrap();
        // terms 0.5ⁱ - 0.25ⁱ are positive: sum = 1 - 1/3
        assert!((abs_tail_sum(&x, 0, &b) - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn support_len() {
        assert_eq!(
            Element::finite(vec![1.0, 0.0, 2.0, 0.0])
                .unwrap()
                .support_len(),
            Some(3)
        );
        assert_eq!(Element::zero().support_len(), Some(0));
        assert_eq!(halves().support_len(), None);
    }
}
