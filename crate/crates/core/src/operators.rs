//! Self-maps `T : X → X` acting on coefficient sequences.
//!
//! Each [`OperatorSpec`] pairs concrete data ([`OperatorKind`]) with a
//! declared [`ContractionClass`]; the constructor checks the declaration
//! against the data so downstream code can trust the class.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::math::{abs, powi, sin, tanh};
use crate::sampling::ElementSampler;
use crate::space::{distance, BasisSpec, Element, MetricKind, Tail};
use crate::{Error, Result, EXACT_TOL};

/// Highest power probed when validating an asymptotically nonexpansive
/// declaration.
const POWER_PROBE: u32 = 64;

/// Multipliers `kᵢ` past the explicit list.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultiplierTail {
    /// `kᵢ = value`.
    Constant {
        /// The common multiplier.
        value: f64,
    },
    /// `kᵢ = amplitude · ratioⁱ` with `|ratio| ≤ 1`.
    Geometric {
        /// Multiplier of `ratioⁱ`.
        amplitude: f64,
        /// Common ratio.
        ratio: f64,
    },
}

impl MultiplierTail {
    fn at(&self, i: usize) -> f64 {
        match *self {
            MultiplierTail::Constant { value } => value,
            MultiplierTail::Geometric { amplitude, ratio } => amplitude * powi(ratio, i as u64),
        }
    }

    /// `sup_{i > after} |kᵢ|`.
    fn sup_abs(&self, after: usize) -> f64 {
        match *self {
            MultiplierTail::Constant { value } => abs(value),
            MultiplierTail::Geometric { amplitude, ratio } => {
                abs(amplitude) * powi(abs(ratio), after as u64 + 1)
            }
        }
    }
}

/// Scalar profile `φ` of a componentwise map `t ↦ K φ(t)`.
///
/// Every profile is 1-Lipschitz with `φ(0) = 0`, so the componentwise map is
/// `K`-Lipschitz in `ℓ²` and fixes the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarMap {
    /// `tanh t`.
    Tanh,
    /// `sin t`.
    Sine,
    /// `t / (1 + |t|)`.
    SoftSign,
}

impl ScalarMap {
    /// `φ(t)`.
    pub fn eval(self, t: f64) -> f64 {
        match self {
            ScalarMap::Tanh => tanh(t),
            ScalarMap::Sine => sin(t),
            ScalarMap::SoftSign => t / (1.0 + abs(t)),
        }
    }
}

/// Concrete operator data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorKind {
    /// `(Tx)ᵢ = kᵢ xᵢ`.
    Diagonal {
        /// Explicit `k₁..k_L`.
        multipliers: Vec<f64>,
        /// Rule for `i > L`.
        tail: MultiplierTail,
    },
    /// `Tx = A x_{1..m₀} ⊕ γ x_{>m₀} + b`.
    AffineFiniteRank {
        /// `m₀ × m₀` leading block.
        matrix: Matrix,
        /// Scalar action past the block.
        gamma: f64,
        /// Finitely supported offset `b`.
        #[serde(default)]
        offset: Element,
    },
    /// `(Tx)ᵢ = K φ(xᵢ)`.
    ComponentwiseNonlinear {
        /// Profile `φ`.
        map: ScalarMap,
        /// Lipschitz constant `K`.
        constant: f64,
    },
}

/// Rule `Lₙ = 1 + excess · decayⁿ` for iterate Lipschitz constants.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct LipschitzSchedule {
    /// `L₀ - 1`.
    #[serde(default)]
    pub excess: f64,
    /// Geometric decay of the excess, in `[0, 1)`.
    #[serde(default)]
    pub decay: f64,
}

impl LipschitzSchedule {
    /// `Lₙ`.
    pub fn at(&self, n: u32) -> f64 {
        1.0 + self.excess * powi(self.decay, n as u64)
    }
}

fn default_p_bar() -> usize {
    3
}

/// Declared contraction behaviour of an operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContractionClass {
    /// `d(Tx, Ty) ≤ K d(x, y)`, `K ∈ [0, 1)`.
    Contractive {
        /// Contraction constant.
        k: f64,
    },
    /// `d(Tx, Ty) ≤ d(x, y)`.
    Nonexpansive,
    /// `d(Tⁿx, Tⁿy) ≤ K^{n-pₙ} d(T^{pₙ}x, T^{pₙ}y)` with `pₙ = min(n, p̄)`.
    AsymptoticallyContractive {
        /// Eventual contraction constant.
        k: f64,
        /// Bound `p̄` on the delay sequence.
        #[serde(default = "default_p_bar")]
        p_bar: usize,
    },
    /// `Lip(Tⁿ) ≤ Lₙ → 1`.
    AsymptoticallyNonexpansive {
        /// The `Lₙ` rule.
        #[serde(default)]
        schedule: LipschitzSchedule,
    },
}

impl ContractionClass {
    /// `K` for the two contracting classes.
    pub fn contraction_constant(&self) -> Option<f64> {
        match *self {
            ContractionClass::Contractive { k } => Some(k),
            ContractionClass::AsymptoticallyContractive { k, .. } => Some(k),
            _ => None,
        }
    }

    /// `pₙ` (0 for plain contractions).
    pub fn p(&self, n: usize) -> usize {
        match *self {
            ContractionClass::AsymptoticallyContractive { p_bar, .. } => n.min(p_bar),
            _ => 0,
        }
    }

    /// `p̄` (0 for plain contractions).
    pub fn p_bar(&self) -> usize {
        match *self {
            ContractionClass::AsymptoticallyContractive { p_bar, .. } => p_bar,
            _ => 0,
        }
    }

    /// Short tag used in diagnostics.
    pub fn label(&self) -> &'static str {
        match self {
            ContractionClass::Contractive { .. } => "contractive",
            ContractionClass::Nonexpansive => "nonexpansive",
            ContractionClass::AsymptoticallyContractive { .. } => "asymptotically_contractive",
            ContractionClass::AsymptoticallyNonexpansive { .. } => "asymptotically_nonexpansive",
        }
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorRecord {
    #[serde(flatten)]
    kind: OperatorKind,
    class: ContractionClass,
}

/// An operator with a validated contraction class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorRecord", into = "OperatorRecord")]
pub struct OperatorSpec {
    kind: OperatorKind,
    class: ContractionClass,
}

impl TryFrom<OperatorRecord> for OperatorSpec {
    type Error = Error;

    fn try_from(r: OperatorRecord) -> Result<Self> {
        OperatorSpec::new(r.kind, r.class)
    }
}

impl From<OperatorSpec> for OperatorRecord {
    fn from(op: OperatorSpec) -> Self {
        OperatorRecord {
            kind: op.kind,
            class: op.class,
        }
    }
}

/// A fixed point together with how it was obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointResult {
    /// The fixed point.
    pub z: Element,
    /// Closed form (as opposed to iterated).
    pub exact: bool,
}

impl OperatorSpec {
    /// Validates the data and checks `class` against it.
    pub fn new(kind: OperatorKind, class: ContractionClass) -> Result<Self> {
        validate_kind(&kind)?;
        validate_class(&kind, &class)?;
        Ok(Self { kind, class })
    }

    /// `kᵢ = value` for every `i`, declared contractive when `|value| < 1`
    /// and nonexpansive when `|value| = 1`.
    pub fn constant_diagonal(value: f64) -> Result<Self> {
        let kind = OperatorKind::Diagonal {
            multipliers: Vec::new(),
            tail: MultiplierTail::Constant { value },
        };
        let class = if abs(value) < 1.0 {
            ContractionClass::Contractive { k: abs(value) }
        } else {
            ContractionClass::Nonexpansive
        };
        Self::new(kind, class)
    }

    /// Diagonal operator with the tightest contraction class its
    /// multipliers admit.
    pub fn diagonal(multipliers: Vec<f64>, tail: MultiplierTail) -> Result<Self> {
        let kind = OperatorKind::Diagonal { multipliers, tail };
        validate_kind(&kind)?;
        let sup = lipschitz(&kind);
        let class = if sup < 1.0 {
            ContractionClass::Contractive { k: sup }
        } else {
            ContractionClass::Nonexpansive
        };
        Self::new(kind, class)
    }

    /// Affine map declared contractive with `K = max(‖A‖₂, |γ|)`.
    pub fn affine(matrix: Matrix, gamma: f64, offset: Element) -> Result<Self> {
        let kind = OperatorKind::AffineFiniteRank {
            matrix,
            gamma,
            offset,
        };
        validate_kind(&kind)?;
        let k = lipschitz(&kind);
        Self::new(kind, ContractionClass::Contractive { k })
    }

    /// Operator data.
    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    /// Declared class.
    pub fn class(&self) -> &ContractionClass {
        &self.class
    }

    /// `sup Lip(T)` in canonical `ℓ²`.
    pub fn lipschitz_bound(&self) -> f64 {
        lipschitz(&self.kind)
    }

    /// Whether `T` is linear.
    pub fn is_linear(&self) -> bool {
        match &self.kind {
            OperatorKind::Diagonal { .. } => true,
            OperatorKind::AffineFiniteRank { offset, .. } => offset.support_len() == Some(0),
            OperatorKind::ComponentwiseNonlinear { .. } => false,
        }
    }

    /// Whether `T` maps `X_m` into itself.
    pub fn preserves_truncation_space(&self, m: usize) -> bool {
        match &self.kind {
            OperatorKind::Diagonal { .. } | OperatorKind::ComponentwiseNonlinear { .. } => true,
            OperatorKind::AffineFiniteRank { matrix, offset, .. } => {
                let offset_inside = offset.support_len().is_some_and(|s| s <= m);
                let m0 = matrix.rows();
                let block_inside =
                    m >= m0 || (m..m0).all(|i| (0..m).all(|j| matrix[(i, j)] == 0.0));
                offset_inside && block_inside
            }
        }
    }
}

fn validate_kind(kind: &OperatorKind) -> Result<()> {
    match kind {
        OperatorKind::Diagonal { multipliers, tail } => {
            if multipliers.iter().any(|k| !k.is_finite()) {
                return Err(Error::NonFinite {
                    what: "multipliers",
                });
            }
            match *tail {
                MultiplierTail::Constant { value } if !value.is_finite() => Err(Error::NonFinite {
                    what: "multiplier tail",
                }),
                MultiplierTail::Geometric { amplitude, ratio }
                    if !amplitude.is_finite() || ratio.is_nan() || abs(ratio) > 1.0 =>
                {
                    Err(Error::InvalidOperator(
                        "geometric multiplier tail needs finite amplitude and |ratio| <= 1".into(),
                    ))
                }
                _ => Ok(()),
            }
        }
        OperatorKind::AffineFiniteRank {
            matrix,
            gamma,
            offset,
        } => {
            if matrix.rows() != matrix.cols() {
                return Err(Error::InvalidOperator(
                    "leading block must be square".into(),
                ));
            }
            if !gamma.is_finite() {
                return Err(Error::NonFinite { what: "gamma" });
            }
            if offset.support_len().is_none() {
                return Err(Error::InvalidOperator(
                    "offset must be finitely supported".into(),
                ));
            }
            Ok(())
        }
        OperatorKind::ComponentwiseNonlinear { constant, .. } => {
            if !constant.is_finite() || *constant < 0.0 {
                return Err(Error::InvalidOperator(
                    "componentwise constant must be finite and nonnegative".into(),
                ));
            }
            Ok(())
        }
    }
}

fn lipschitz(kind: &OperatorKind) -> f64 {
    match kind {
        OperatorKind::Diagonal { multipliers, tail } => multipliers
            .iter()
            .map(|k| abs(*k))
            .fold(tail.sup_abs(multipliers.len()), f64::max),
        OperatorKind::AffineFiniteRank { matrix, gamma, .. } => {
            matrix.spectral_norm().max(abs(*gamma))
        }
        OperatorKind::ComponentwiseNonlinear { constant, .. } => *constant,
    }
}

/// Upper bound on `Lip(Tⁿ)`.
fn power_lipschitz(kind: &OperatorKind, n: u32) -> f64 {
    match kind {
        OperatorKind::AffineFiniteRank { matrix, gamma, .. } => matrix
            .pow(n)
            .spectral_norm()
            .max(powi(abs(*gamma), n as u64)),
        other => powi(lipschitz(other), n as u64),
    }
}

/// Lipschitz constant of `T` restricted to the (invariant) range of
/// `T^{p̄}`.
fn eventual_lipschitz(kind: &OperatorKind, p_bar: usize) -> f64 {
    match kind {
        OperatorKind::AffineFiniteRank { matrix, gamma, .. } => {
            let q = matrix.pow(p_bar as u32).range_basis(1e-12);
            let block = if q.cols() == 0 {
                0.0
            } else {
                matrix.matmul(&q).spectral_norm()
            };
            block.max(abs(*gamma))
        }
        other => lipschitz(other),
    }
}

fn validate_class(kind: &OperatorKind, class: &ContractionClass) -> Result<()> {
    let mismatch = |msg: alloc::string::String| Err(Error::ClassMismatch(msg));
    match *class {
        ContractionClass::Contractive { k } => {
            if !(0.0..1.0).contains(&k) {
                return mismatch(format!("contraction constant {k} outside [0, 1)"));
            }
            let lip = lipschitz(kind);
            if lip > k + EXACT_TOL {
                return mismatch(format!("declared K = {k} but Lipschitz bound is {lip}"));
            }
        }
        ContractionClass::Nonexpansive => {
            let lip = lipschitz(kind);
            if lip > 1.0 + EXACT_TOL {
                return mismatch(format!(
                    "declared nonexpansive but Lipschitz bound is {lip}"
                ));
            }
        }
        ContractionClass::AsymptoticallyContractive { k, p_bar } => {
            if !(0.0..1.0).contains(&k) {
                return mismatch(format!("contraction constant {k} outside [0, 1)"));
            }
            let lip = eventual_lipschitz(kind, p_bar);
            if lip > k + EXACT_TOL {
                return mismatch(format!(
                    "declared eventual K = {k} but T restricted to range(T^{p_bar}) has Lipschitz bound {lip}"
                ));
            }
        }
        ContractionClass::AsymptoticallyNonexpansive { schedule } => {
            if schedule.excess.is_nan()
                || schedule.excess < 0.0
                || !(0.0..1.0).contains(&schedule.decay)
            {
                return mismatch("schedule needs excess >= 0 and decay in [0, 1)".into());
            }
            for n in 1..=POWER_PROBE {
                let lip = power_lipschitz(kind, n);
                if lip > schedule.at(n) + EXACT_TOL {
                    return mismatch(format!(
                        "Lip(T^{n}) = {lip} exceeds L_{n} = {}",
                        schedule.at(n)
                    ));
                }
            }
        }
    }
    Ok(())
}

/// `Tx`, exact on the tail representation.
pub fn apply(op: &OperatorSpec, x: &Element) -> Result<Element> {
    match &op.kind {
        OperatorKind::Diagonal { multipliers, tail } => {
            let len = x.prefix_len().max(multipliers.len());
            let k = |i: usize| {
                if i <= multipliers.len() {
                    multipliers[i - 1]
                } else {
                    tail.at(i)
                }
            };
            let coeffs = (1..=len).map(|i| k(i) * x.coeff(i)).collect();
            let image_tail = match *tail {
                MultiplierTail::Constant { value } => x.tail().scaled(value),
                MultiplierTail::Geometric { amplitude, ratio } => {
                    x.tail().times_geometric(amplitude, ratio)
                }
            };
            Element::new(coeffs, image_tail)
        }
        OperatorKind::AffineFiniteRank {
            matrix,
            gamma,
            offset,
        } => {
            let m0 = matrix.rows();
            let len = m0.max(x.prefix_len()).max(offset.prefix_len());
            let block_in: Vec<f64> = (1..=m0).map(|i| x.coeff(i)).collect();
            let block = matrix.matvec(&block_in);
            let coeffs = (1..=len)
                .map(|i| {
                    let linear = if i <= m0 {
                        block[i - 1]
                    } else {
                        gamma * x.coeff(i)
                    };
                    linear + offset.coeff(i)
                })
                .collect();
            Element::new(coeffs, x.tail().scaled(*gamma))
        }
        OperatorKind::ComponentwiseNonlinear { map, constant } => {
            if !x.tail().is_zero() {
                return Err(Error::UnsupportedComposition(
                    "componentwise nonlinear map of a geometric tail has no closed form".into(),
                ));
            }
            let coeffs = x.coeffs().iter().map(|&t| constant * map.eval(t)).collect();
            Element::new(coeffs, Tail::zero())
        }
    }
}

/// `Tⁿx`.
pub fn iterate(op: &OperatorSpec, x: &Element, n: usize) -> Result<Element> {
    let mut cur = x.clone();
    for _ in 0..n {
        cur = apply(op, &cur)?;
    }
    Ok(cur)
}

/// `x, Tx, …, Tⁿx`.
pub fn orbit(op: &OperatorSpec, x: &Element, n: usize) -> Result<Vec<Element>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(x.clone());
    for i in 0..n {
        let next = apply(op, &out[i])?;
        out.push(next);
    }
    Ok(out)
}

/// Closed-form fixed point of a contracting operator.
pub fn exact_fixed_point(op: &OperatorSpec) -> Result<FixedPointResult> {
    if op.class.contraction_constant().is_none() {
        return Err(Error::ClassMismatch(format!(
            "fixed point is not unique for a {} operator",
            op.class.label()
        )));
    }
    let z = match &op.kind {
        // linear diagonal, and profiles with φ(0) = 0, fix the origin
        OperatorKind::Diagonal { .. } | OperatorKind::ComponentwiseNonlinear { .. } => {
            Element::zero()
        }
        OperatorKind::AffineFiniteRank {
            matrix,
            gamma,
            offset,
        } => {
            let m0 = matrix.rows();
            let mut system = Matrix::identity(m0);
            for i in 0..m0 {
                for j in 0..m0 {
                    system[(i, j)] -= matrix[(i, j)];
                }
            }
            let rhs: Vec<f64> = (1..=m0).map(|i| offset.coeff(i)).collect();
            let mut coeffs = system.solve(&rhs)?;
            if offset.prefix_len() > m0 {
                if abs(1.0 - gamma) < f64::EPSILON {
                    return Err(Error::Singular);
                }
                coeffs.extend(
                    (m0 + 1..=offset.prefix_len()).map(|i| offset.coeff(i) / (1.0 - gamma)),
                );
            }
            Element::finite(coeffs)?
        }
    };
    Ok(FixedPointResult { z, exact: true })
}

fn active_dim(op: &OperatorSpec) -> usize {
    match &op.kind {
        OperatorKind::Diagonal { multipliers, .. } => multipliers.len() + 2,
        OperatorKind::AffineFiniteRank { matrix, offset, .. } => {
            matrix.rows().max(offset.prefix_len()) + 2
        }
        OperatorKind::ComponentwiseNonlinear { .. } => 6,
    }
}

/// Empirical `max d(Tx, Ty) / d(x, y)` over seeded sample pairs.
///
/// Every fourth pair differs along a single coordinate, cycling through the
/// leading coordinates, and every eighth pair is shrunk towards the origin
/// where smooth componentwise profiles attain their Lipschitz constant.
pub fn estimate_contraction_constant(
    op: &OperatorSpec,
    sample_count: usize,
    seed: u64,
    basis: &BasisSpec,
    metric: MetricKind,
) -> Result<f64> {
    if sample_count < 2 {
        return Err(Error::InvalidParameter {
            name: "sample_count",
            reason: "need at least two samples".into(),
        });
    }
    let dim = active_dim(op);
    let tails = !matches!(op.kind, OperatorKind::ComponentwiseNonlinear { .. });
    let mut sampler = ElementSampler::new(seed, dim).with_tails(tails);
    let mut best = 0.0f64;
    for s in 0..sample_count {
        let mut y = sampler.sample();
        let x = if s % 4 == 0 {
            let j = (s / 4) % dim + 1;
            let t = sampler.uniform(-1.0, 1.0);
            y.add(&Element::unit(j).scale(if t == 0.0 { 0.5 } else { t }))
        } else {
            sampler.sample()
        };
        let (x, y) = if s % 8 == 0 {
            y = y.scale(1e-4);
            (x.scale(1e-4), y)
        } else {
            (x, y)
        };
        let d = distance(&x, &y, basis, metric);
        if d == 0.0 {
            continue;
        }
        let dt = distance(&apply(op, &x)?, &apply(op, &y)?, basis, metric);
        best = best.max(dt / d);
    }
    Ok(best)
}

/// Whether `T(xᵢeᵢ) = (Tx)ᵢeᵢ` for every `i ≤ m`.
pub fn commutes_with_truncation(op: &OperatorSpec, x: &Element, m: usize) -> Result<bool> {
    let tx = apply(op, x)?;
    for i in 1..=m {
        let lhs = apply(op, &x.coordinate_part(i))?;
        let rhs = tx.coordinate_part(i);
        if distance(&lhs, &rhs, &BasisSpec::Canonical, MetricKind::L2) > EXACT_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn half() -> OperatorSpec {
        OperatorSpec::constant_diagonal(0.5).unwrap()
    }

    fn affine_1d() -> OperatorSpec {
        OperatorSpec::affine(Matrix::diag(&[0.5]), 0.0, Element::unit(1)).unwrap()
    }

    #[test]
    fn apply_examples() {
        assert_eq!(
            apply(&half(), &Element::unit(1)).unwrap(),
            Element::unit(1).scale(0.5)
        );
        assert_eq!(
            apply(&affine_1d(), &Element::zero()).unwrap(),
            Element::unit(1)
        );
        let x = Element::geometric(vec![], 2.0, 0.5).unwrap();
        let tx = apply(&half(), &x).unwrap();
        assert_eq!(tx, Element::geometric(vec![], 1.0, 0.5).unwrap());
    }

    #[test]
    fn iterate_examples() {
        let x = Element::unit(1);
        assert_eq!(iterate(&half(), &x, 0).unwrap(), x);
        assert_eq!(iterate(&half(), &x, 3).unwrap(), x.scale(0.125));
        let z = iterate(&affine_1d(), &Element::zero(), 3).unwrap();
        assert!((z.coeff(1) - 1.75).abs() < 1e-15);
        let a = iterate(&affine_1d(), &iterate(&affine_1d(), &x, 2).unwrap(), 3).unwrap();
        assert_eq!(a, iterate(&affine_1d(), &x, 5).unwrap());
    }

    #[test]
    fn fixed_point_examples() {
        assert_eq!(exact_fixed_point(&half()).unwrap().z, Element::zero());
        let fp = exact_fixed_point(&affine_1d()).unwrap();
        assert!(fp.exact);
        assert!((fp.z.coeff(1) - 2.0).abs() < 1e-15);
        let op = OperatorSpec::affine(
            Matrix::diag(&[0.5, 0.25]),
            0.0,
            Element::finite(vec![1.0, 0.75]).unwrap(),
        )
        .unwrap();
        let z = exact_fixed_point(&op).unwrap().z;
        assert!((z.coeff(1) - 2.0).abs() < 1e-15 && (z.coeff(2) - 1.0).abs() < 1e-15);
        assert_eq!(z.coeff(3), 0.0);
        // offset beyond the block is divided by 1 - γ
        let op = OperatorSpec::affine(
            Matrix::diag(&[0.5]),
            0.5,
            Element::finite(vec![1.0, 0.0, 1.0]).unwrap(),
        )
        .unwrap();
        let z = exact_fixed_point(&op).unwrap().z;
        let r = distance(
            &apply(&op, &z).unwrap(),
            &z,
            &BasisSpec::Canonical,
            MetricKind::L2,
        );
        assert!(r < 1e-14);
        assert!((z.coeff(3) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn nonexpansive_has_no_unique_fixed_point() {
        let id = OperatorSpec::constant_diagonal(1.0).unwrap();
        assert!(matches!(
            exact_fixed_point(&id),
            Err(Error::ClassMismatch(_))
        ));
    }

    #[test]
    fn class_validation() {
        let kind = OperatorKind::Diagonal {
            multipliers: vec![0.9],
            tail: MultiplierTail::Constant { value: 0.5 },
        };
        assert!(OperatorSpec::new(kind.clone(), ContractionClass::Contractive { k: 0.5 }).is_err());
        assert!(OperatorSpec::new(kind.clone(), ContractionClass::Contractive { k: 0.9 }).is_ok());
        assert!(OperatorSpec::new(kind, ContractionClass::Contractive { k: 1.0 }).is_err());
        let big = OperatorKind::Diagonal {
            multipliers: vec![],
            tail: MultiplierTail::Constant { value: 1.01 },
        };
        assert!(OperatorSpec::new(big, ContractionClass::Nonexpansive).is_err());
    }

    #[test]
    fn nilpotent_block_is_asymptotically_contractive() {
        // ‖A‖ = 2 but A² = 0: not a contraction, eventually contracting.
        let a = Matrix::from_rows(vec![vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        let kind = OperatorKind::AffineFiniteRank {
            matrix: a,
            gamma: 0.3,
            offset: Element::unit(1),
        };
        assert!(OperatorSpec::new(kind.clone(), ContractionClass::Contractive { k: 0.9 }).is_err());
        let op = OperatorSpec::new(
            kind,
            ContractionClass::AsymptoticallyContractive { k: 0.3, p_bar: 1 },
        )
        .unwrap();
        let z = exact_fixed_point(&op).unwrap().z;
        let r = distance(
            &apply(&op, &z).unwrap(),
            &z,
            &BasisSpec::Canonical,
            MetricKind::L2,
        );
        assert!(r < 1e-14);
    }

    #[test]
    fn asymptotically_nonexpansive_schedule() {
        let a = Matrix::from_rows(vec![vec![1.0, 0.5], vec![0.0, 0.0]]).unwrap();
        let kind = OperatorKind::AffineFiniteRank {
            matrix: a,
            gamma: 1.0,
            offset: Element::zero(),
        };
        // A is idempotent with ‖A‖ = √1.25, so no schedule with Lₙ → 1 fits
        assert!(OperatorSpec::new(kind.clone(), ContractionClass::Nonexpansive).is_err());
        let tight = LipschitzSchedule {
            excess: 0.12,
            decay: 0.99,
        };
        assert!(OperatorSpec::new(
            kind,
            ContractionClass::AsymptoticallyNonexpansive { schedule: tight }
        )
        .is_err());
        let ok = OperatorSpec::new(
            OperatorKind::Diagonal {
                multipliers: vec![-1.0, 0.3],
                tail: MultiplierTail::Constant { value: 1.0 },
            },
            ContractionClass::AsymptoticallyNonexpansive {
                schedule: LipschitzSchedule::default(),
            },
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn contraction_estimates() {
        let b = BasisSpec::Canonical;
        let k = estimate_contraction_constant(&half(), 1000, 7, &b, MetricKind::L2).unwrap();
        assert!((0.5 - 1e-6..=0.5 + 1e-9).contains(&k), "{k}");
        let id = OperatorSpec::constant_diagonal(1.0).unwrap();
        let k = estimate_contraction_constant(&id, 200, 7, &b, MetricKind::L2).unwrap();
        assert!((k - 1.0).abs() < 1e-9);
        let zero = OperatorSpec::constant_diagonal(0.0).unwrap();
        let k = estimate_contraction_constant(&zero, 200, 7, &b, MetricKind::L2).unwrap();
        assert_eq!(k, 0.0);
        let nl = OperatorSpec::new(
            OperatorKind::ComponentwiseNonlinear {
                map: ScalarMap::Tanh,
                constant: 0.7,
            },
            ContractionClass::Contractive { k: 0.7 },
        )
        .unwrap();
        let k = estimate_contraction_constant(&nl, 400, 3, &b, MetricKind::L2).unwrap();
        assert!(k <= 0.7 + 1e-9 && k > 0.69);
        assert!(estimate_contraction_constant(&half(), 1, 0, &b, MetricKind::L2).is_err());
    }

    #[test]
    fn truncation_commutation() {
        let x = Element::geometric(vec![0.3, -2.0], 1.0, 0.6).unwrap();
        assert!(commutes_with_truncation(&half(), &x, 6).unwrap());
        let zero = OperatorSpec::constant_diagonal(0.0).unwrap();
        assert!(commutes_with_truncation(&zero, &x, 6).unwrap());
        assert!(!commutes_with_truncation(&affine_1d(), &Element::unit(2), 2).unwrap());
    }

    #[test]
    fn nonlinear_rejects_geometric_tail() {
        let nl = OperatorSpec::new(
            OperatorKind::ComponentwiseNonlinear {
                map: ScalarMap::Sine,
                constant: 0.5,
            },
            ContractionClass::Contractive { k: 0.5 },
        )
        .unwrap();
        let x = Element::geometric(vec![], 1.0, 0.5).unwrap();
        assert!(matches!(
            apply(&nl, &x),
            Err(Error::UnsupportedComposition(_))
        ));
    }

    #[test]
    fn subspace_preservation() {
        let op = OperatorSpec::affine(
            Matrix::diag(&[0.5, 0.25]),
            0.0,
            Element::finite(vec![1.0, 0.0, 2.0]).unwrap(),
        )
        .unwrap();
        assert!(!op.preserves_truncation_space(2));
        assert!(op.preserves_truncation_space(3));
        let coupled = OperatorSpec::affine(
            Matrix::from_rows(vec![vec![0.1, 0.0], vec![0.3, 0.1]]).unwrap(),
            0.0,
            Element::unit(1),
        )
        .unwrap();
        assert!(!coupled.preserves_truncation_space(1));
    }
}
