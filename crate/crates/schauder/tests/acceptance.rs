//! Acceptance suite: one PASS/FAIL line per criterion; exits non-zero if any
//! criterion fails.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use schauder_core::bounds::{
    check_constants, check_prop21, check_prop23, check_thm22_ii, check_thm31_iii,
    check_thm32_bound_grid, check_thm32_ratios, constants, CheckHorizon,
};
use schauder_core::delay_ode::{
    check_strip_contraction, check_truncation_m1, integrate, DelayScenario, ScalarRule,
};
use schauder_core::iteration::{solve_fixed_point, Domain, ProbeHorizon};
use schauder_core::linalg::Matrix;
use schauder_core::operators::{MultiplierTail, ScalarMap};
use schauder_core::sampling::ElementSampler;
use schauder_core::space::{basis_constant_estimate, norm};
use schauder_core::{
    BasisSpec, CheckStatus, ContractionClass, Element, MetricKind, OperatorKind, OperatorSpec,
};

const B: BasisSpec = BasisSpec::Canonical;
const L2: MetricKind = MetricKind::L2;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        ok,
        detail: detail.into(),
    }
}

trait Pick {
    /// Uniform in `0..n`.
    fn pick(&mut self, n: usize) -> usize;
}

impl Pick for ElementSampler {
    fn pick(&mut self, n: usize) -> usize {
        self.index(n) - 1
    }
}

/// Random matrix rescaled to the given spectral norm.
fn random_matrix(s: &mut ElementSampler, dim: usize, target: f64) -> Matrix {
    let rows: Vec<Vec<f64>> = (0..dim)
        .map(|_| (0..dim).map(|_| s.uniform(-1.0, 1.0)).collect())
        .collect();
    let norm = Matrix::from_rows(rows.clone()).unwrap().spectral_norm();
    let scale = if norm > 0.0 { target / norm } else { 0.0 };
    Matrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|v| v * scale).collect())
            .collect(),
    )
    .unwrap()
}

fn random_affine(s: &mut ElementSampler, k_max: f64) -> OperatorSpec {
    let dim = 1 + s.pick(4);
    let target = s.uniform(0.1, k_max);
    let a = random_matrix(s, dim, target);
    let gamma = s.uniform(-k_max, k_max);
    let b: Vec<f64> = (0..1 + s.pick(dim + 2))
        .map(|_| s.uniform(-1.0, 1.0))
        .collect();
    OperatorSpec::affine(a, gamma, Element::finite(b).unwrap()).unwrap()
}

fn random_diagonal(s: &mut ElementSampler, k_max: f64) -> OperatorSpec {
    let mults: Vec<f64> = (0..s.pick(9)).map(|_| s.uniform(-k_max, k_max)).collect();
    let tail = if s.pick(2) == 0 {
        MultiplierTail::Constant {
            value: s.uniform(-k_max, k_max),
        }
    } else {
        MultiplierTail::Geometric {
            amplitude: s.uniform(-k_max, k_max),
            ratio: s.uniform(-1.0, 1.0),
        }
    };
    OperatorSpec::diagonal(mults, tail).unwrap()
}

fn geometric_element(s: &mut ElementSampler) -> Element {
    let prefix: Vec<f64> = (0..s.pick(7)).map(|_| s.uniform(-1.0, 1.0)).collect();
    let mag = s.uniform(0.2, 0.9);
    let ratio = if s.pick(2) == 0 { mag } else { -mag };
    let first = s.uniform(0.1, 1.0) * if s.pick(2) == 0 { 1.0 } else { -1.0 };
    let amplitude = first / ratio.powi(prefix.len() as i32 + 1);
    Element::geometric(prefix, amplitude, ratio).unwrap()
}

fn criterion_1() -> Verdict {
    let mut s = ElementSampler::new(101, 8);
    let mut worst = 0.0f64;
    let mut runs = 0usize;
    for _ in 0..100 {
        let x = geometric_element(&mut s);
        let op = random_diagonal(&mut s, 0.95);
        for n in [0, 1, 2, 5, 10, 20] {
            for m in [1, 2, 4, 8, 16, 32, 64] {
                let c = check_prop21(&op, &x, n, m).unwrap();
                if c.status != CheckStatus::Pass {
                    return verdict(false, format!("n={n} m={m}: {c:?}"));
                }
                worst = worst.max(c.lhs);
                runs += 1;
            }
        }
    }
    verdict(
        worst <= 1e-12,
        format!("{runs} checks, max discrepancy {worst:.3e}"),
    )
}

fn criterion_2() -> Verdict {
    let (count, max_m, seed) = (1000, 64, 202);
    let est = basis_constant_estimate(&B, count, max_m, seed);
    // same stream the estimator draws from
    let mut s = ElementSampler::new(seed, 8).with_tails(true);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let x = s.sample();
        let a = norm(&x, &B, L2);
        let b = norm(&x, &B, MetricKind::SupPartialSum);
        worst = worst.max((a - b).abs());
    }
    let ok = (est - 1.0).abs() <= 1e-12 && worst <= 1e-12;
    verdict(
        ok,
        format!("estimate {est}, max |sup-partial - l2| {worst:.3e}"),
    )
}

fn criterion_3() -> Verdict {
    let mut s = ElementSampler::new(303, 6).with_tails(true);
    let mut ops = vec![OperatorSpec::constant_diagonal(0.5).unwrap()];
    ops.extend((0..10).map(|_| random_affine(&mut s, 0.9)));
    let d: Vec<Element> = (0..100).map(|_| s.sample_in_ball(1.0, &B, L2)).collect();
    let domain = Domain::new(d.clone(), 1.0);
    let mut worst_ratio = 0.0f64;
    let mut n_bars = Vec::new();
    for op in &ops {
        let sol = match solve_fixed_point(op, &d[0], 1e-3, &domain, &B, L2, ProbeHorizon::default())
        {
            Ok(sol) => sol,
            Err(e) => return verdict(false, format!("solver error {e}")),
        };
        if !sol.certificate.pass {
            return verdict(false, format!("certificate failed: {:?}", sol.certificate));
        }
        let ball = check_thm31_iii(op, &d, 1e-3, &B, L2, 10).unwrap();
        if !ball.pass {
            return verdict(false, format!("ball check failed: {ball:?}"));
        }
        worst_ratio = worst_ratio.max(ball.lhs / ball.rhs);
        n_bars.push(sol.params.n_bar);
    }
    verdict(
        true,
        format!("11 operators, n_bar {n_bars:?}, worst d/(4e) {worst_ratio:.3e}"),
    )
}

fn contractive_instance(s: &mut ElementSampler, i: usize) -> (OperatorSpec, bool) {
    match i % 3 {
        0 => (random_diagonal(s, 0.95), true),
        1 => (random_affine(s, 0.95), true),
        _ => {
            let map = [ScalarMap::Tanh, ScalarMap::Sine, ScalarMap::SoftSign][s.pick(3)];
            let k = s.uniform(0.1, 0.95);
            let op = OperatorSpec::new(
                OperatorKind::ComponentwiseNonlinear { map, constant: k },
                ContractionClass::Contractive { k },
            )
            .unwrap();
            (op, false)
        }
    }
}

fn criterion_4() -> Verdict {
    let mut s = ElementSampler::new(404, 6);
    let ms: Vec<usize> = (1..=64).collect();
    let mut worst = f64::INFINITY;
    let mut cells = 0usize;
    for i in 0..50 {
        let (op, tails) = contractive_instance(&mut s, i);
        let mut es = ElementSampler::new(4040 + i as u64, 6).with_tails(tails);
        let (x, y) = (es.sample(), es.sample());
        for c in check_thm32_bound_grid(&op, &x, &y, 30, &ms, &B, L2).unwrap() {
            cells += 1;
            worst = worst.min(c.slack);
            if !c.pass {
                return verdict(false, format!("instance {i}: {c:?}"));
            }
        }
    }
    verdict(
        worst >= -1e-9,
        format!("{cells} cells, min slack {worst:.3e}"),
    )
}

fn criterion_5() -> Verdict {
    let block = Matrix::from_rows(vec![
        vec![0.2, -0.3, 0.1],
        vec![0.0, 0.4, 0.2],
        vec![0.1, 0.1, -0.3],
    ])
    .unwrap();
    let curated = vec![
        ("diag-0.5", OperatorSpec::constant_diagonal(0.5).unwrap()),
        (
            "diag-decay-0.7",
            OperatorSpec::diagonal(
                vec![],
                MultiplierTail::Geometric {
                    amplitude: 1.0,
                    ratio: 0.7,
                },
            )
            .unwrap(),
        ),
        (
            "affine-1d",
            OperatorSpec::affine(Matrix::diag(&[0.5]), 0.0, Element::unit(1)).unwrap(),
        ),
        (
            "affine-2x2",
            OperatorSpec::affine(
                Matrix::from_rows(vec![vec![0.3, 0.2], vec![-0.1, 0.4]]).unwrap(),
                0.2,
                Element::finite(vec![1.0, -1.0]).unwrap(),
            )
            .unwrap(),
        ),
        (
            "affine-3x3",
            OperatorSpec::affine(
                block,
                -0.6,
                Element::finite(vec![0.5, 0.0, -1.0, 2.0]).unwrap(),
            )
            .unwrap(),
        ),
        (
            "tanh-0.6",
            OperatorSpec::new(
                OperatorKind::ComponentwiseNonlinear {
                    map: ScalarMap::Tanh,
                    constant: 0.6,
                },
                ContractionClass::Contractive { k: 0.6 },
            )
            .unwrap(),
        ),
    ];
    let mut worst = 0.0f64;
    for (tag, op) in &curated {
        let linear = op.is_linear();
        let xs = if linear {
            vec![
                Element::geometric(vec![], 2.0, 0.5).unwrap(),
                Element::unit(1),
                Element::finite(vec![3.0, -1.0, 0.5]).unwrap(),
            ]
        } else {
            vec![
                Element::unit(1),
                Element::finite(vec![3.0, -1.0, 0.5]).unwrap(),
            ]
        };
        for x in &xs {
            let cs = check_thm32_ratios(op, x, &Element::zero(), &B, L2, 60).unwrap();
            let step = &cs[2];
            worst = worst.max(step.lhs);
            if step.lhs > 1e-8 {
                return verdict(false, format!("{tag}: step distance {:.3e}", step.lhs));
            }
        }
    }
    verdict(
        true,
        format!("{} instances, max step distance {worst:.3e}", curated.len()),
    )
}

fn criterion_6() -> Verdict {
    let mut s = ElementSampler::new(606, 4);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let m0 = 1 + s.pick(4);
        let m = m0 + s.pick(5);
        let target = s.uniform(0.1, 0.9);
        let a = random_matrix(&mut s, m0, target);
        let gamma = s.uniform(-0.9, 0.9);
        let b: Vec<f64> = (0..1 + s.pick(m)).map(|_| s.uniform(-2.0, 2.0)).collect();
        let op = OperatorSpec::affine(a, gamma, Element::finite(b).unwrap()).unwrap();
        let c = check_prop23(&op, m, &B, L2).unwrap();
        if c.status != CheckStatus::Pass {
            return verdict(false, format!("instance {i} (m0={m0}, m={m}): {c:?}"));
        }
        worst = worst.max(c.lhs);
    }
    verdict(
        worst <= 1e-10,
        format!("20 instances, max distance {worst:.3e}"),
    )
}

fn criterion_7() -> Verdict {
    let threshold = 1e-6f64;
    let mut s = ElementSampler::new(707, 6);
    let mut worst_c1 = 0.0f64;
    let mut worst_identity = 0.0f64;
    for _ in 0..100 {
        let x = geometric_element(&mut s);
        let ratio = x.tail().max_abs_ratio();
        let support = x.prefix_len();
        let m_star = (threshold.ln() / ratio.ln()).ceil() as usize + support;
        let y = geometric_element(&mut s);
        for m in m_star..=m_star + 20 {
            let c = constants(&x, &y, m, &B, L2);
            worst_c1 = worst_c1.max(c.c1_xm);
        }
        for m in [0, 1, 2, support, support + 1, m_star] {
            let id = check_constants(&x, &y, m, &B, L2);
            worst_identity = worst_identity.max(id.lhs);
        }
    }
    let ok = worst_c1 <= threshold && worst_identity <= 1e-12;
    verdict(
        ok,
        format!("max C1 beyond threshold {worst_c1:.3e}, max identity error {worst_identity:.3e}"),
    )
}

fn reference_delay() -> DelayScenario {
    DelayScenario {
        a: -1.0,
        a0: ScalarRule::Constant { value: 0.4 },
        lambda_fn: ScalarRule::Reciprocal { scale: 0.5 },
        h: 0.5,
        sample_period: 1.0,
        phi: ScalarRule::Constant { value: 1.0 },
        dt: 1e-3,
        horizon: 40.0,
    }
}

fn criterion_8() -> Verdict {
    let s = reference_delay();
    let tr = integrate(&s).unwrap();
    let half = integrate(&s.with_dt(s.dt / 2.0)).unwrap();

    let sups = &tr.strip_sups;
    let strictly = sups.windows(2).skip(1).all(|w| w[1] < w[0]);
    let strips = check_strip_contraction(&tr, &s, 1e-6);
    let rho = strips.context.values["rho"];
    let a = strictly && rho < 1.0 && strips.pass;

    let y40 = tr.terminal();
    let agree = (y40 - half.terminal()).abs();
    let b = y40.abs() < 1e-6 && agree <= 1e-6;

    let exact = tr
        .times
        .iter()
        .zip(&tr.truncation_m1)
        .map(|(t, v)| (v - (-t).exp()).abs())
        .fold(0.0f64, f64::max);
    let free = DelayScenario {
        a0: ScalarRule::Zero,
        ..s.clone()
    };
    let free_tr = integrate(&free).unwrap();
    let y2 = free_tr.values[(2.0 / s.dt).round() as usize];
    let c = exact <= 1e-12 && (y2 - (-2.0f64).exp()).abs() <= 1e-6;

    let trunc = check_truncation_m1(&tr, &s, 1e-6);
    let residual = tr.residual(tr.values.len() - 1).abs();
    let d = trunc.pass && residual < 1e-6;

    verdict(
        a && b && c && d,
        format!(
            "(a) {} rho={rho:.4} (b) {} |y(40)|={:.3e} dt/2 diff={agree:.3e} (c) {} trunc err={exact:.1e} |y(2)-e^-2|={:.1e} (d) {} residual={residual:.3e}",
            ok_word(a),
            ok_word(b),
            y40.abs(),
            ok_word(c),
            (y2 - (-2.0f64).exp()).abs(),
            ok_word(d),
        ),
    )
}

fn ok_word(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILED"
    }
}

fn criterion_9() -> Verdict {
    let mut s = ElementSampler::new(909, 6).with_tails(true);
    let horizon = CheckHorizon {
        n_max: 48,
        m_max: 48,
    };
    let mut max_n0 = 0.0f64;
    let mut runs = 0;
    for i in 0..20 {
        let mut mults: Vec<f64> = (0..s.pick(6)).map(|_| s.uniform(-1.0, 1.0)).collect();
        if i % 2 == 0 {
            mults.push(if i % 4 == 0 { 1.0 } else { -1.0 });
        }
        let tail = match i % 3 {
            0 => MultiplierTail::Constant { value: 1.0 },
            1 => MultiplierTail::Constant { value: -1.0 },
            _ => MultiplierTail::Geometric {
                amplitude: 1.0,
                ratio: s.uniform(-1.0, 1.0),
            },
        };
        let op = OperatorSpec::new(
            OperatorKind::Diagonal {
                multipliers: mults,
                tail,
            },
            ContractionClass::Nonexpansive,
        )
        .unwrap();
        let x = s.sample();
        for k in [1, 2] {
            let c = check_thm22_ii(&op, &x, k, 1e-2, &B, L2, horizon).unwrap();
            runs += 1;
            if !c.pass {
                return verdict(false, format!("instance {i}, k={k}: {c:?}"));
            }
            max_n0 = max_n0.max(c.context.values["n0"]);
        }
    }
    verdict(true, format!("{runs} runs, largest n0 = m0 = {max_n0}"))
}

fn scenario_files() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    files.sort();
    files
}

fn criterion_10() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let files = scenario_files();
    let mut compared = 0usize;
    for f in &files {
        let stem = f.file_stem().unwrap().to_string_lossy().to_string();
        let mut dirs = Vec::new();
        for run in ["a", "b"] {
            let out = tmp.path().join(run).join(&stem);
            let status = Command::new(env!("CARGO_BIN_EXE_schauder"))
                .arg("run")
                .arg(f)
                .arg("--out")
                .arg(&out)
                .arg("--quiet")
                .env_remove(schauder::OUT_DIR_ENV)
                .status()
                .unwrap();
            if status.code() != Some(0) {
                return verdict(false, format!("{stem}: exit {status}"));
            }
            dirs.push(out);
        }
        let mut names: Vec<_> = std::fs::read_dir(&dirs[0])
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        for n in names {
            let a = std::fs::read(dirs[0].join(&n)).unwrap();
            let b = std::fs::read(dirs[1].join(&n)).unwrap_or_default();
            if a != b {
                return verdict(false, format!("{stem}/{}: differs", n.to_string_lossy()));
            }
            compared += 1;
        }
    }
    verdict(
        !files.is_empty(),
        format!("{} scenarios, {compared} files identical", files.len()),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Verdict, Option<Duration>);
    let criteria: [Criterion; 10] = [
        (
            "1 coordinatewise commutation",
            criterion_1,
            Some(Duration::from_secs(5)),
        ),
        ("2 monotone basis", criterion_2, None),
        (
            "3 4-epsilon ball",
            criterion_3,
            Some(Duration::from_secs(30)),
        ),
        (
            "4 truncated pair bound",
            criterion_4,
            Some(Duration::from_secs(60)),
        ),
        ("5 step-distance limit", criterion_5, None),
        ("6 fixed-point coincidence", criterion_6, None),
        ("7 constants", criterion_7, None),
        (
            "8 delay equation",
            criterion_8,
            Some(Duration::from_secs(20)),
        ),
        ("9 nonexpansive threshold", criterion_9, None),
        ("10 determinism", criterion_10, None),
    ];
    let mut failed = 0;
    for (name, f, limit) in criteria {
        let start = Instant::now();
        let v = f();
        let took = start.elapsed();
        let in_time = limit.is_none_or(|l| took <= l);
        let ok = v.ok && in_time;
        if !ok {
            failed += 1;
        }
        let timing = match limit {
            Some(l) => format!("{:.2}s / {}s", took.as_secs_f64(), l.as_secs()),
            None => format!("{:.2}s", took.as_secs_f64()),
        };
        println!(
            "{} criterion {name} [{timing}]: {}",
            if ok { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
