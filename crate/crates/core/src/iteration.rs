//! Truncated Picard iteration and the adaptive fixed-point solver.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::check::BoundCheck;
use crate::math::{ceil, ln, powi};
use crate::operators::{apply, exact_fixed_point, iterate, orbit, OperatorSpec};
use crate::space::{distance, norm, project, tail_norm, BasisSpec, Element, MetricKind};
use crate::{Error, Result};

/// `[Tⁿx]_m`: iterate, then truncate.
pub fn truncated_iterate_post(
    op: &OperatorSpec,
    x: &Element,
    n: usize,
    m: usize,
) -> Result<Element> {
    Ok(project(&iterate(op, x, n)?, m))
}

/// `Tⁿ[x]_m`: truncate, then iterate.
pub fn truncated_iterate_pre(
    op: &OperatorSpec,
    x: &Element,
    n: usize,
    m: usize,
) -> Result<Element> {
    iterate(op, &project(x, m), n)
}

/// Distances recorded for one `(n, m)` cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridEntry {
    /// Iteration count.
    pub n: usize,
    /// Truncation order.
    pub m: usize,
    /// `d([Tⁿx]_m, [Tⁿy]_m)`.
    pub d_trunc_pair: f64,
    /// `d(Tⁿx, Tⁿy)`.
    pub d_full: f64,
    /// `d([Tⁿx]_m, Tⁿx)`.
    pub d_trunc_vs_full: f64,
    /// `d([Tⁿy]_m, Tⁿy)`.
    pub d_trunc_vs_full_y: f64,
    /// `d([Tⁿx]_m, [T^{n+1}x]_m)`.
    pub d_step: f64,
}

/// Distances over an `(n, m)` grid; `entries[i][j]` is `(n_values[i],
/// m_values[j])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceGrid {
    /// Iteration counts, ascending.
    pub n_values: Vec<usize>,
    /// Truncation orders, ascending.
    pub m_values: Vec<usize>,
    /// Row-major cells.
    pub entries: Vec<Vec<GridEntry>>,
}

impl TraceGrid {
    /// Cell at `(n_values[i], m_values[j])`.
    pub fn cell(&self, i: usize, j: usize) -> &GridEntry {
        &self.entries[i][j]
    }

    /// All cells, row by row.
    pub fn cells(&self) -> impl Iterator<Item = &GridEntry> {
        self.entries.iter().flatten()
    }
}

fn ascending_nonempty(name: &'static str, v: &[usize]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::InvalidParameter {
            name,
            reason: "must be nonempty".into(),
        });
    }
    if v.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter {
            name,
            reason: "must be sorted ascending".into(),
        });
    }
    Ok(())
}

/// Tabulates the four distances for every `(n, m)`.
pub fn run_grid(
    op: &OperatorSpec,
    x: &Element,
    y: &Element,
    n_values: &[usize],
    m_values: &[usize],
    basis: &BasisSpec,
    metric: MetricKind,
) -> Result<TraceGrid> {
    ascending_nonempty("n_values", n_values)?;
    ascending_nonempty("m_values", m_values)?;
    let n_top = *n_values.last().unwrap_or(&0);
    let xs = orbit(op, x, n_top + 1)?;
    let ys = orbit(op, y, n_top)?;
    let entries = n_values
        .iter()
        .map(|&n| {
            let d_full = distance(&xs[n], &ys[n], basis, metric);
            m_values
                .iter()
                .map(|&m| {
                    let px = project(&xs[n], m);
                    let py = project(&ys[n], m);
                    let px_next = project(&xs[n + 1], m);
                    GridEntry {
                        n,
                        m,
                        d_trunc_pair: distance(&px, &py, basis, metric),
                        d_full,
                        d_trunc_vs_full: tail_norm(&xs[n], m, basis, metric),
                        d_trunc_vs_full_y: tail_norm(&ys[n], m, basis, metric),
                        d_step: distance(&px, &px_next, basis, metric),
                    }
                })
                .collect()
        })
        .collect();
    Ok(TraceGrid {
        n_values: n_values.to_vec(),
        m_values: m_values.to_vec(),
        entries,
    })
}

/// Limits on the `(n, m)` search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeHorizon {
    /// Largest iteration count probed.
    pub n_max: usize,
    /// Largest truncation order probed.
    pub m_max: usize,
}

impl Default for ProbeHorizon {
    fn default() -> Self {
        Self {
            n_max: 200,
            m_max: 4096,
        }
    }
}

/// A bounded domain `D`, represented by samples and a declared norm bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    /// Sample points of `D`.
    pub samples: Vec<Element>,
    /// Declared `sup_{x∈D} ‖x‖`.
    pub norm_bound: f64,
}

impl Domain {
    /// Samples with an explicit bound; checked when used.
    pub fn new(samples: Vec<Element>, norm_bound: f64) -> Self {
        Self {
            samples,
            norm_bound,
        }
    }

    /// Uses the largest sample norm as the bound.
    pub fn from_samples(samples: Vec<Element>, basis: &BasisSpec, metric: MetricKind) -> Self {
        let norm_bound = samples
            .iter()
            .map(|s| norm(s, basis, metric))
            .fold(0.0, f64::max);
        Self {
            samples,
            norm_bound,
        }
    }

    fn check(&self, basis: &BasisSpec, metric: MetricKind) -> Result<()> {
        for s in &self.samples {
            let n = norm(s, basis, metric);
            if n > self.norm_bound * (1.0 + 1e-12) + 1e-15 {
                return Err(Error::InvalidParameter {
                    name: "domain",
                    reason: format!("sample norm {n} exceeds declared bound {}", self.norm_bound),
                });
            }
        }
        Ok(())
    }
}

/// Thresholds selected by [`solve_fixed_point`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveParams {
    /// Target `ε`.
    pub epsilon: f64,
    /// Truncation threshold `m̄`.
    pub m_bar: usize,
    /// Iteration threshold `n̄ ≥ m̄`.
    pub n_bar: usize,
    /// Contraction-term threshold before raising it to `m̄`.
    pub n_contraction: usize,
    /// Constant `M` bounding the contracted distances.
    pub m_constant: f64,
    /// Declared norm bound of `D`.
    pub norm_bound: f64,
    /// Sample points of `D`.
    pub domain_samples: Vec<Element>,
}

/// Result of [`solve_fixed_point`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointSolution {
    /// `[T^{n̄}x₀]_{m̄}`.
    pub z_approx: Element,
    /// Selected thresholds.
    pub params: AdaptiveParams,
    /// `4ε` neighbourhood certificate.
    pub certificate: BoundCheck,
}

/// Contraction data `(K, p̄)` or a class-mismatch error.
pub(crate) fn contracting(op: &OperatorSpec) -> Result<(f64, usize)> {
    match op.class().contraction_constant() {
        Some(k) => Ok((k, op.class().p_bar())),
        None => Err(Error::ClassMismatch(format!(
            "needs a contractive or asymptotically contractive operator, got {}",
            op.class().label()
        ))),
    }
}

/// Smallest `n ≥ max(p̄, 1)` with `K^{n-p̄} M ≤ budget`.
pub(crate) fn contraction_threshold(k: f64, p_bar: usize, m_const: f64, budget: f64) -> usize {
    let floor = p_bar.max(1);
    if m_const <= budget {
        return floor;
    }
    if k == 0.0 {
        return floor.max(p_bar + 1);
    }
    let guess = ceil(ln(budget / m_const) / ln(k)).max(0.0) as usize;
    let mut n = (p_bar + guess.saturating_sub(1)).max(floor);
    while powi(k, (n - p_bar) as u64) * m_const > budget {
        n += 1;
    }
    n
}

/// Smallest `m ∈ [1, m_max]` with `f(m) ≤ budget` for nonincreasing `f`.
pub(crate) fn first_m_below(m_max: usize, budget: f64, f: impl Fn(usize) -> f64) -> Option<usize> {
    if f(m_max) > budget {
        return None;
    }
    let (mut lo, mut hi) = (1usize, m_max);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if f(mid) <= budget {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(lo)
}

/// Picks `(n̄, m̄)` for the target `ε` and returns `[T^{n̄}x₀]_{m̄}`.
///
/// The budget is split in thirds. `n̄` makes the contraction term
/// `K^{n-p̄} M ≤ ε/3`, where `M` is the larger of the sampled pair distances
/// `max_{j≤p̄} d(Tʲx, Tʲy)` and the a-priori fixed-point distance
/// `d(T^{p̄}x, T^{p̄+1}x) / (1 - K)`. `m̄` makes every sampled tail
/// `‖Tⁿx - [Tⁿx]_m‖ ≤ ε/3` for `n ≤ n̄`. `x₀` is treated as a point of `D`.
pub fn solve_fixed_point(
    op: &OperatorSpec,
    x0: &Element,
    epsilon: f64,
    domain: &Domain,
    basis: &BasisSpec,
    metric: MetricKind,
    horizon: ProbeHorizon,
) -> Result<FixedPointSolution> {
    let (k, p_bar) = contracting(op)?;
    if epsilon.is_nan() || epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: "must be positive and finite".into(),
        });
    }
    domain.check(basis, metric)?;
    let budget = epsilon / 3.0;

    let mut points: Vec<&Element> = domain.samples.iter().collect();
    points.push(x0);
    let heads: Vec<Vec<Element>> = points
        .iter()
        .map(|p| orbit(op, p, p_bar + 1))
        .collect::<Result<_>>()?;

    let mut m_pair = 0.0f64;
    for (i, a) in heads.iter().enumerate() {
        for b in &heads[i + 1..] {
            for j in 0..=p_bar {
                m_pair = m_pair.max(distance(&a[j], &b[j], basis, metric));
            }
        }
    }
    let m_fix = heads
        .iter()
        .map(|h| distance(&h[p_bar], &h[p_bar + 1], basis, metric) / (1.0 - k))
        .fold(0.0, f64::max);
    let m_constant = m_pair.max(m_fix);

    let n_contraction = contraction_threshold(k, p_bar, m_constant, budget);
    if n_contraction > horizon.n_max {
        return Err(Error::HorizonExhausted(format!(
            "contraction term needs n = {n_contraction} > n_max = {}",
            horizon.n_max
        )));
    }

    let orbits: Vec<Vec<Element>> = points
        .iter()
        .map(|p| orbit(op, p, n_contraction))
        .collect::<Result<_>>()?;
    let worst_tail = |m: usize| {
        orbits
            .iter()
            .flatten()
            .map(|e| tail_norm(e, m, basis, metric))
            .fold(0.0, f64::max)
    };
    let m_bar = first_m_below(horizon.m_max, budget, worst_tail).ok_or_else(|| {
        Error::HorizonExhausted(format!(
            "tails above ε/3 = {budget} at m_max = {}",
            horizon.m_max
        ))
    })?;
    let n_bar = n_contraction.max(m_bar);
    if n_bar > horizon.n_max {
        return Err(Error::HorizonExhausted(format!(
            "n_bar = {n_bar} > n_max = {}",
            horizon.n_max
        )));
    }

    let z_approx = truncated_iterate_post(op, x0, n_bar, m_bar)?;
    let radius = 4.0 * epsilon;
    let certificate = match exact_fixed_point(op) {
        Ok(fp) => BoundCheck::new(
            "thm31.iii.certificate",
            distance(&z_approx, &fp.z, basis, metric),
            radius,
            0.0,
        ),
        Err(_) => {
            // Cauchy form: later truncated iterates stay within 4ε
            let cur = iterate(op, x0, n_bar)?;
            let mut next = cur;
            let mut worst = 0.0f64;
            for _ in 0..32 {
                next = apply(op, &next)?;
                worst = worst.max(distance(&z_approx, &project(&next, m_bar), basis, metric));
            }
            BoundCheck::new("thm31.iii.certificate", worst, radius, 0.0)
                .interpreted("Cauchy criterion over 32 further truncated iterates")
        }
    }
    .at_n(n_bar)
    .at_m(m_bar)
    .at_epsilon(epsilon)
    .with_value("norm_bound", domain.norm_bound)
    .with_value("m_constant", m_constant);

    Ok(FixedPointSolution {
        z_approx,
        params: AdaptiveParams {
            epsilon,
            m_bar,
            n_bar,
            n_contraction,
            m_constant,
            norm_bound: domain.norm_bound,
            domain_samples: domain.samples.clone(),
        },
        certificate,
    })
}
