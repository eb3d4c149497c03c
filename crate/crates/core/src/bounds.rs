//! Explicit constants and numeric checks of the truncation inequalities.
//!
//! Limit statements are checked through finite-horizon surrogates: the
//! supremum over the final quarter of the probe range stands in for a
//! `limsup`, and a terminal value stands in for a limit. Every emitted
//! [`BoundCheck`] records the horizon it was evaluated on.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::check::{BoundCheck, DEFAULT_TOL};
use crate::iteration::{contracting, solve_fixed_point, Domain, ProbeHorizon};
use crate::math::{abs, powi};
use crate::operators::{
    apply, commutes_with_truncation, exact_fixed_point, iterate, orbit, OperatorSpec,
};
use crate::space::{
    abs_tail_sum, distance, norm, project, projection_norms, tail_norm, BasisSpec, Element,
    MetricKind,
};
use crate::{Error, Result, EXACT_TOL};

/// Threshold a terminal value must fall below to count as a vanished limit.
pub const LIMIT_TOL: f64 = 1e-8;

/// Required agreement between a restricted and the global fixed point.
pub const FIXED_POINT_TOL: f64 = 1e-10;

const THM22_I_READING: &str =
    "m-th coefficient of T^{n+k}x - T^n x scaled by ||e_m||, evaluated at the largest probed m";
const THM22_III_READING: &str =
    "step distance d([T^{n+k}x]_m, [T^n x]_m) at the top of the probe horizon";

/// `(n, m)` range searched by the grid checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckHorizon {
    /// Largest `n`.
    pub n_max: usize,
    /// Largest `m`.
    pub m_max: usize,
}

impl Default for CheckHorizon {
    fn default() -> Self {
        Self {
            n_max: 60,
            m_max: 64,
        }
    }
}

impl CheckHorizon {
    /// First index of the final quarter of `1..=top`.
    fn quarter_start(top: usize) -> usize {
        (top - top / 4).max(1)
    }

    /// Largest threshold that still leaves a final quarter to inspect.
    fn admissible(&self) -> usize {
        Self::quarter_start(self.n_max.min(self.m_max))
    }
}

/// `C(x, m)`, `C₁(x, m)` and `g(x, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    /// Minimal `C` with `‖[x]_m‖ ≤ C ‖x‖`.
    pub c_xm: f64,
    /// Minimal `C₁` with `‖x - [x]_m‖ ≤ C₁ (1 + C) ‖x‖`.
    pub c1_xm: f64,
    /// `Σ_{i>m} (|xᵢ| + |yᵢ|) ‖eᵢ‖`.
    pub g_xm: f64,
    /// Truncation order.
    pub m: usize,
}

/// Minimal feasible constants for `x` (and `g` for the pair `x, y`).
///
/// The origin gets `C = C₁ = 0`.
pub fn constants(
    x: &Element,
    y: &Element,
    m: usize,
    basis: &BasisSpec,
    metric: MetricKind,
) -> ConstantsReport {
    let nx = norm(x, basis, metric);
    let g_xm = abs_tail_sum(x, m, basis) + abs_tail_sum(y, m, basis);
    if nx == 0.0 {
        return ConstantsReport {
            c_xm: 0.0,
            c1_xm: 0.0,
            g_xm,
            m,
        };
    }
    let c_xm = norm(&project(x, m), basis, metric) / nx;
    let c1_xm = tail_norm(x, m, basis, metric) / ((1.0 + c_xm) * nx);
    ConstantsReport {
        c_xm,
        c1_xm,
        g_xm,
        m,
    }
}

/// Defining identities `‖[x]_m‖ = C ‖x‖` and `‖x - [x]_m‖ = C₁ (1 + C) ‖x‖`
/// of the reported constants.
pub fn check_constants(
    x: &Element,
    y: &Element,
    m: usize,
    basis: &BasisSpec,
    metric: MetricKind,
) -> BoundCheck {
    let c = constants(x, y, m, basis, metric);
    let nx = norm(x, basis, metric);
    let head = abs(norm(&project(x, m), basis, metric) - c.c_xm * nx);
    let tail = abs(tail_norm(x, m, basis, metric) - c.c1_xm * (1.0 + c.c_xm) * nx);
    BoundCheck::new("constants.identity", head.max(tail), 0.0, EXACT_TOL)
        .at_m(m)
        .with_value("c_xm", c.c_xm)
        .with_value("c1_xm", c.c1_xm)
        .with_value("g_xm", c.g_xm)
}

/// Coordinatewise commutation `(Tⁿx)ᵢeᵢ = Tⁿ(xᵢeᵢ)` for `i ≤ m`.
pub fn check_prop21(op: &OperatorSpec, x: &Element, n: usize, m: usize) -> Result<BoundCheck> {
    const NAME: &str = "prop21.commutation";
    if !commutes_with_truncation(op, x, m)? {
        return Ok(
            BoundCheck::hypothesis_unmet(NAME, "T(x_i e_i) != (Tx)_i e_i for some i <= m")
                .at_n(n)
                .at_m(m),
        );
    }
    let tnx = iterate(op, x, n)?;
    let mut worst = 0.0f64;
    for i in 1..=m {
        let lhs = tnx.coordinate_part(i);
        let rhs = iterate(op, &x.coordinate_part(i), n)?;
        worst = worst.max(distance(&lhs, &rhs, &BasisSpec::Canonical, MetricKind::L2));
    }
    Ok(BoundCheck::new(NAME, worst, 0.0, EXACT_TOL).at_n(n).at_m(m))
}

/// Vanishing of the m-th coefficient of `T^{n+k}x - Tⁿx` as `m` grows.
pub fn check_thm22_i(
    op: &OperatorSpec,
    x: &Element,
    k: usize,
    n: usize,
    m_values: &[usize],
    basis: &BasisSpec,
) -> Result<BoundCheck> {
    let top = *m_values.last().ok_or(Error::InvalidParameter {
        name: "m_values",
        reason: "must be nonempty".into(),
    })?;
    let tn = iterate(op, x, n)?;
    let tnk = iterate(op, &tn, k)?;
    let diff = tnk.sub(&tn);
    let term = |m: usize| abs(diff.coeff(m)) * basis.basis_norm(m);
    let q = CheckHorizon::quarter_start(m_values.len()) - 1;
    let quarter_max = m_values[q..].iter().map(|&m| term(m)).fold(0.0, f64::max);
    Ok(
        BoundCheck::new("thm22.i.coefficient_limit", term(top), 0.0, LIMIT_TOL)
            .at_n(n)
            .at_k(k)
            .at_m(top)
            .with_value("final_quarter_max", quarter_max)
            .interpreted(THM22_I_READING),
    )
}

/// `d([T^{n+k}x]_m, [Tⁿx]_m) ≤ (1 + ε) d(x, Tᵏx) + ε` beyond a found
/// threshold, plus the `limsup` surrogate.
pub fn check_thm22_ii(
    op: &OperatorSpec,
    x: &Element,
    k: usize,
    epsilon: f64,
    basis: &BasisSpec,
    metric: MetricKind,
    horizon: CheckHorizon,
) -> Result<BoundCheck> {
    let xs = orbit(op, x, horizon.n_max + k)?;
    let d_xk = distance(x, &xs[k], basis, metric);
    let rhs = (1.0 + epsilon) * d_xk + epsilon;
    let ms: Vec<usize> = (1..=horizon.m_max).collect();
    let table: Vec<Vec<f64>> = (1..=horizon.n_max)
        .map(|n| projection_norms(&xs[n + k].sub(&xs[n]), &ms, basis))
        .collect();

    let mut threshold = 1usize;
    for (ni, row) in table.iter().enumerate() {
        for (mi, v) in row.iter().enumerate() {
            if *v > rhs + DEFAULT_TOL {
                threshold = threshold.max((ni + 1).min(mi + 1) + 1);
            }
        }
    }
    let found = threshold <= horizon.admissible();
    let region_max = table
        .iter()
        .enumerate()
        .skip(threshold - 1)
        .flat_map(|(_, row)| row.iter().skip(threshold - 1))
        .fold(0.0f64, |a, v| a.max(*v));
    let qn = CheckHorizon::quarter_start(horizon.n_max);
    let qm = CheckHorizon::quarter_start(horizon.m_max);
    let limsup = table[qn - 1..]
        .iter()
        .flat_map(|row| row[qm - 1..].iter())
        .map(|v| v - d_xk)
        .fold(f64::NEG_INFINITY, f64::max);

    Ok(
        BoundCheck::new("thm22.ii.bound", region_max, rhs, DEFAULT_TOL)
            .at_k(k)
            .at_epsilon(epsilon)
            .at_n(threshold)
            .at_m(threshold)
            .with_value("n0", threshold as f64)
            .with_value("m0", threshold as f64)
            .with_value("limsup_surrogate", limsup)
            .with_value("n_max", horizon.n_max as f64)
            .with_value("m_max", horizon.m_max as f64)
            .require(
                found,
                format!("no threshold within horizon (needs {threshold})"),
            )
            .require(
                limsup <= DEFAULT_TOL,
                format!("limsup surrogate {limsup} > 0"),
            ),
    )
}

/// Step distance vanishes at the top of the horizon.
pub fn check_thm22_iii(
    op: &OperatorSpec,
    x: &Element,
    k: usize,
    basis: &BasisSpec,
    metric: MetricKind,
    horizon: CheckHorizon,
) -> Result<BoundCheck> {
    contracting(op)?;
    let tn = iterate(op, x, horizon.n_max)?;
    let tnk = iterate(op, &tn, k)?;
    let m = horizon.m_max;
    let lhs = distance(&project(&tnk, m), &project(&tn, m), basis, metric);
    Ok(BoundCheck::new("thm22.iii.step_limit", lhs, 0.0, LIMIT_TOL)
        .at_n(horizon.n_max)
        .at_m(m)
        .at_k(k)
        .interpreted(THM22_III_READING))
}

/// Smallest uniform threshold `m̄` beyond which the three `ε`-bounds hold on
/// every sampled pair, with the worst slack of each.
pub fn check_thm31_ii(
    op: &OperatorSpec,
    samples: &[Element],
    epsilon: f64,
    basis: &BasisSpec,
    metric: MetricKind,
    horizon: CheckHorizon,
) -> Result<Vec<BoundCheck>> {
    contracting(op)?;
    let orbits: Vec<Vec<Element>> = samples
        .iter()
        .map(|s| orbit(op, s, horizon.n_max))
        .collect::<Result<_>>()?;
    let ms: Vec<usize> = (1..=horizon.m_max).collect();
    let (n_max, m_max) = (horizon.n_max, horizon.m_max);

    // [n-1][m-1] worst values across samples / pairs
    let mut trunc_pair = alloc::vec![alloc::vec![0.0f64; m_max]; n_max];
    let mut full_pair = alloc::vec![0.0f64; n_max];
    let mut trunc_full = alloc::vec![alloc::vec![0.0f64; m_max]; n_max];
    for n in 1..=n_max {
        for o in &orbits {
            for m in 1..=m_max {
                let t = tail_norm(&o[n], m, basis, metric);
                trunc_full[n - 1][m - 1] = trunc_full[n - 1][m - 1].max(t);
            }
        }
        for (i, a) in orbits.iter().enumerate() {
            for b in &orbits[i + 1..] {
                let diff = a[n].sub(&b[n]);
                full_pair[n - 1] = full_pair[n - 1].max(norm(&diff, basis, metric));
                for (m, v) in projection_norms(&diff, &ms, basis).into_iter().enumerate() {
                    trunc_pair[n - 1][m] = trunc_pair[n - 1][m].max(v);
                }
            }
        }
    }

    let mut threshold = 1usize;
    for n in 1..=n_max {
        if full_pair[n - 1] > epsilon {
            threshold = threshold.max(n + 1);
        }
        for m in 1..=m_max {
            if trunc_pair[n - 1][m - 1] > epsilon || trunc_full[n - 1][m - 1] > 2.0 * epsilon {
                threshold = threshold.max(n.min(m) + 1);
            }
        }
    }
    let found = threshold <= horizon.admissible();
    let start = threshold.min(n_max.min(m_max));
    let region = |t: &Vec<Vec<f64>>| {
        t.iter()
            .skip(start - 1)
            .flat_map(|row| row.iter().skip(start - 1))
            .fold(0.0f64, |a, v| a.max(*v))
    };
    let worst_full = full_pair
        .iter()
        .skip(start - 1)
        .fold(0.0f64, |a, v| a.max(*v));
    let tag = |c: BoundCheck| {
        c.at_epsilon(epsilon)
            .at_m(threshold)
            .at_n(threshold)
            .with_value("m_bar", threshold as f64)
            .with_value("n_max", n_max as f64)
            .with_value("m_max", m_max as f64)
            .with_value("samples", samples.len() as f64)
            .require(
                found,
                format!("horizon exhausted (m_bar would be {threshold})"),
            )
    };
    Ok(alloc::vec![
        tag(BoundCheck::new(
            "thm31.ii.trunc_pair",
            region(&trunc_pair),
            epsilon,
            0.0
        )),
        tag(BoundCheck::new(
            "thm31.ii.full_pair",
            worst_full,
            epsilon,
            0.0
        )),
        tag(BoundCheck::new(
            "thm31.ii.trunc_vs_full",
            region(&trunc_full),
            2.0 * epsilon,
            0.0
        )),
    ])
}

/// `[T^{n+1}x]_m ∈ cl B(z, 4ε)` for `n, m` in a window above the solver's
/// `n̄`, over every sample.
pub fn check_thm31_iii(
    op: &OperatorSpec,
    samples: &[Element],
    epsilon: f64,
    basis: &BasisSpec,
    metric: MetricKind,
    window: usize,
) -> Result<BoundCheck> {
    let first = samples.first().ok_or(Error::InvalidParameter {
        name: "samples",
        reason: "need at least one sample".into(),
    })?;
    let domain = Domain::from_samples(samples.to_vec(), basis, metric);
    let sol = solve_fixed_point(
        op,
        first,
        epsilon,
        &domain,
        basis,
        metric,
        ProbeHorizon::default(),
    )?;
    let z = exact_fixed_point(op)?.z;
    let n_bar = sol.params.n_bar;
    let mut worst = 0.0f64;
    let mut at = (n_bar, n_bar);
    for s in samples {
        let mut it = iterate(op, s, n_bar + 1)?;
        for n in n_bar..=n_bar + window {
            for m in n_bar..=n_bar + window {
                let d = distance(&project(&it, m), &z, basis, metric);
                if d > worst {
                    worst = d;
                    at = (n, m);
                }
            }
            it = apply(op, &it)?;
        }
    }
    Ok(BoundCheck::new("thm31.iii.ball", worst, 4.0 * epsilon, 0.0)
        .at_epsilon(epsilon)
        .at_n(n_bar)
        .at_m(sol.params.m_bar)
        .with_value("n_bar", n_bar as f64)
        .with_value("m_bar", sol.params.m_bar as f64)
        .with_value("worst_n", at.0 as f64)
        .with_value("worst_m", at.1 as f64)
        .with_value("window", window as f64)
        .with_value("norm_bound", domain.norm_bound))
}

fn contraction_k(op: &OperatorSpec) -> Result<f64> {
    match op.class() {
        crate::ContractionClass::Contractive { k } => Ok(*k),
        other => Err(Error::ClassMismatch(format!(
            "needs a contractive operator, got {}",
            other.label()
        ))),
    }
}

/// Sup over `i ≤ n` of `C₁(Δᵢ)(1 + C(Δᵢ))` with `Δᵢ = Tⁱx - Tⁱy`, for
/// each `m` in `ms`, as a running table `[n-1][m-idx]`.
fn thm32_factor_table(
    xs: &[Element],
    ys: &[Element],
    n_max: usize,
    ms: &[usize],
    basis: &BasisSpec,
    metric: MetricKind,
) -> Vec<Vec<f64>> {
    let mut table = Vec::with_capacity(n_max);
    let mut running = alloc::vec![0.0f64; ms.len()];
    for i in 1..=n_max {
        let delta = xs[i].sub(&ys[i]);
        for (j, &m) in ms.iter().enumerate() {
            let c = constants(&delta, &Element::zero(), m, basis, metric);
            running[j] = running[j].max(c.c1_xm * (1.0 + c.c_xm));
        }
        table.push(running.clone());
    }
    table
}

/// `d([Tⁿx]_m, [Tⁿy]_m) ≤ Kⁿ(1 + sup_{i≤n} C₁ₘ(1 + Cₘ)) d(x, y)`.
pub fn check_thm32_bound(
    op: &OperatorSpec,
    x: &Element,
    y: &Element,
    n: usize,
    m: usize,
    basis: &BasisSpec,
    metric: MetricKind,
) -> Result<BoundCheck> {
    Ok(check_thm32_bound_grid(op, x, y, n, &[m], basis, metric)?
        .into_iter()
        .last()
        .expect("one cell per m"))
}

/// [`check_thm32_bound`] over `n ∈ 1..=n_max` and every `m` in `ms`; one
/// record per cell, row by row.
pub fn check_thm32_bound_grid(
    op: &OperatorSpec,
    x: &Element,
    y: &Element,
    n_max: usize,
    ms: &[usize],
    basis: &BasisSpec,
    metric: MetricKind,
) -> Result<Vec<BoundCheck>> {
    let k = contraction_k(op)?;
    let xs = orbit(op, x, n_max)?;
    let ys = orbit(op, y, n_max)?;
    let d0 = distance(x, y, basis, metric);
    let factors = thm32_factor_table(&xs, &ys, n_max, ms, basis, metric);
    let mut out = Vec::with_capacity(n_max * ms.len());
    for n in 1..=n_max {
        for (j, &m) in ms.iter().enumerate() {
            let lhs = distance(&project(&xs[n], m), &project(&ys[n], m), basis, metric);
            let sup = factors[n - 1][j];
            let rhs = powi(k, n as u64) * (1.0 + sup) * d0;
            out.push(
                BoundCheck::new("thm32.bound", lhs, rhs, DEFAULT_TOL)
                    .at_n(n)
                    .at_m(m)
                    .with_value("sup_factor", sup),
            );
        }
    }
    Ok(out)
}

/// Ratio `limsup` surrogates and the step-distance limit along `n = m`.
pub fn check_thm32_ratios(
    op: &OperatorSpec,
    x: &Element,
    y: &Element,
    basis: &BasisSpec,
    metric: MetricKind,
    horizon: usize,
) -> Result<Vec<BoundCheck>> {
    let k = contraction_k(op)?;
    if horizon < 2 {
        return Err(Error::InvalidParameter {
            name: "horizon",
            reason: "needs at least 2".into(),
        });
    }
    let xs = orbit(op, x, horizon + 1)?;
    let ys = orbit(op, y, horizon)?;
    let d = |a: &Element, b: &Element, m: usize| {
        distance(&project(a, m), &project(b, m), basis, metric)
    };
    let q = CheckHorizon::quarter_start(horizon);
    let mut pair = f64::NEG_INFINITY;
    let mut step = f64::NEG_INFINITY;
    for n in q.max(1)..=horizon {
        let pv = d(&xs[n], &ys[n], n) - k * d(&xs[n - 1], &ys[n - 1], n);
        let sv = d(&xs[n], &xs[n + 1], n) - k * d(&xs[n - 1], &xs[n], n);
        pair = pair.max(pv);
        step = step.max(sv);
    }
    let terminal = d(&xs[horizon], &xs[horizon + 1], horizon);
    let tag = |c: BoundCheck| {
        c.at_n(horizon)
            .at_m(horizon)
            .with_value("horizon", horizon as f64)
            .with_value("quarter_start", q as f64)
    };
    Ok(alloc::vec![
        tag(BoundCheck::new("thm32.ratio_pair", pair, 0.0, DEFAULT_TOL)),
        tag(BoundCheck::new("thm32.ratio_step", step, 0.0, DEFAULT_TOL)),
        tag(BoundCheck::new(
            "thm32.step_limit",
            terminal,
            0.0,
            LIMIT_TOL
        )),
    ])
}

/// Empirical `K̄_{mE}` and `ε̄_{mE}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thm32EmpiricalConstants {
    /// `K̄_{mE} = (K̄ε̄) / ε̄_{mE}` (0 when `ε̄ = 0`).
    pub k_bar_m_e: f64,
    /// `ε̄_{mE} = sup_{x∈E, n≤H} ‖Tⁿx - [Tⁿx]_m‖`.
    pub eps_bar_m_e: f64,
    /// The product `K̄_{mE} ε̄_{mE}`.
    pub product: f64,
    /// Label of the sampled subset.
    pub subset_tag: String,
    /// Truncation order.
    pub m: usize,
}

/// Smallest product `K̄ε̄ ≥ 0` making the subset display hold over every
/// sampled pair at the horizon. Passes by construction; the constants are
/// the output.
pub fn check_thm32_subset(
    op: &OperatorSpec,
    subset: &[Element],
    subset_tag: &str,
    m: usize,
    basis: &BasisSpec,
    metric: MetricKind,
    horizon: usize,
) -> Result<(BoundCheck, Thm32EmpiricalConstants)> {
    let k = contraction_k(op)?;
    let orbits: Vec<Vec<Element>> = subset
        .iter()
        .map(|s| orbit(op, s, horizon))
        .collect::<Result<_>>()?;
    let q = CheckHorizon::quarter_start(horizon.max(1));
    let mut excess = f64::NEG_INFINITY;
    for (i, a) in orbits.iter().enumerate() {
        for b in &orbits[i + 1..] {
            let base = distance(&project(&a[0], m), &project(&b[0], m), basis, metric);
            for n in q..=horizon.max(1) {
                let dn = distance(&project(&a[n], m), &project(&b[n], m), basis, metric);
                excess = excess.max(dn - base);
            }
        }
    }
    if excess == f64::NEG_INFINITY {
        excess = 0.0;
    }
    let eps_bar = orbits
        .iter()
        .flatten()
        .map(|e| tail_norm(e, m, basis, metric))
        .fold(0.0f64, f64::max);
    let product = excess.max(0.0) * (1.0 - k);
    let k_bar = if eps_bar > 0.0 {
        product / eps_bar
    } else {
        0.0
    };
    let lhs = excess - product / (1.0 - k);
    let check = BoundCheck::new("thm32.subset", lhs, 0.0, DEFAULT_TOL)
        .at_m(m)
        .at_n(horizon)
        .with_value("max_excess", excess)
        .with_value("k_bar_eps_bar", product)
        .with_value("k_bar", k_bar)
        .with_value("eps_bar", eps_bar);
    Ok((
        check,
        Thm32EmpiricalConstants {
            k_bar_m_e: k_bar,
            eps_bar_m_e: eps_bar,
            product,
            subset_tag: subset_tag.into(),
            m,
        },
    ))
}

/// Fixed point of `P_m T` on `X_m` by Picard iteration from the origin,
/// independent of the closed-form global solve.
fn restricted_fixed_point(op: &OperatorSpec, m: usize) -> Result<Element> {
    let b = BasisSpec::Canonical;
    let mut z = Element::zero();
    for _ in 0..100_000 {
        let next = project(&apply(op, &z)?, m);
        let step = distance(&next, &z, &b, MetricKind::L2);
        let scale = 1.0 + norm(&next, &b, MetricKind::L2);
        z = next;
        if step <= 4.0 * f64::EPSILON * scale {
            break;
        }
    }
    Ok(z)
}

/// The fixed point of `T` restricted to `X_m` coincides with the global one.
pub fn check_prop23(
    op: &OperatorSpec,
    m: usize,
    basis: &BasisSpec,
    metric: MetricKind,
) -> Result<BoundCheck> {
    const NAME: &str = "prop23.coincidence";
    contracting(op)?;
    if !op.preserves_truncation_space(m) {
        return Ok(BoundCheck::hypothesis_unmet(NAME, "T does not map X_m into itself").at_m(m));
    }
    let restricted = restricted_fixed_point(op, m)?;
    let global = exact_fixed_point(op)?.z;
    let lhs = distance(&restricted, &global, basis, metric);
    let residual = distance(
        &project(&apply(op, &restricted)?, m),
        &restricted,
        basis,
        metric,
    );
    Ok(BoundCheck::new(NAME, lhs, 0.0, FIXED_POINT_TOL)
        .at_m(m)
        .with_value("restricted_residual", residual))
}
