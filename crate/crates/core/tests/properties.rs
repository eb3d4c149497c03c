use proptest::prelude::*;
use schauder_core::bounds::{check_prop21, check_thm32_bound};
use schauder_core::iteration::run_grid;
use schauder_core::linalg::Matrix;
use schauder_core::operators::{apply, exact_fixed_point, iterate};
use schauder_core::space::{distance, norm, project, tail_norm, WeightTail};
use schauder_core::{BasisSpec, Element, MetricKind, OperatorSpec};

const B: BasisSpec = BasisSpec::Canonical;
const L2: MetricKind = MetricKind::L2;

fn element() -> impl Strategy<Value = Element> {
    (
        prop::collection::vec(-2.0f64..2.0, 0..8),
        prop::option::of((-1.0f64..1.0, -0.9f64..0.9)),
    )
        .prop_map(|(prefix, tail)| match tail {
            Some((a, r)) => Element::geometric(prefix, a, r).unwrap(),
            None => Element::finite(prefix).unwrap(),
        })
}

fn affine() -> impl Strategy<Value = OperatorSpec> {
    (
        prop::collection::vec(-0.3f64..0.3, 9),
        -0.6f64..0.6,
        prop::collection::vec(-1.0f64..1.0, 0..5),
    )
        .prop_map(|(a, gamma, b)| {
            let rows = a.chunks(3).map(|r| r.to_vec()).collect();
            OperatorSpec::affine(
                Matrix::from_rows(rows).unwrap(),
                gamma,
                Element::finite(b).unwrap(),
            )
            .unwrap()
        })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn projection_is_linear(x in element(), y in element(), a in -3.0f64..3.0, m in 0usize..12) {
        let lhs = project(&Element::lincomb(a, &x, 1.0, &y), m);
        let rhs = Element::lincomb(a, &project(&x, m), 1.0, &project(&y, m));
        prop_assert!(distance(&lhs, &rhs, &B, L2) <= 1e-12);
    }

    #[test]
    fn projection_is_idempotent(x in element(), m in 0usize..12, k in 0usize..12) {
        let p = project(&x, m);
        prop_assert_eq!(project(&p, m).clone(), p.clone());
        let nested = project(&project(&x, m.max(k)), m.min(k));
        prop_assert!(distance(&nested, &project(&x, m.min(k)), &B, L2) <= 1e-15);
    }

    #[test]
    fn norm_is_homogeneous(x in element(), a in -4.0f64..4.0) {
        prop_assert!(close(norm(&x.scale(a), &B, L2), a.abs() * norm(&x, &B, L2)));
    }

    #[test]
    fn distance_is_translation_invariant(x in element(), y in element(), z in element()) {
        let d = distance(&x, &y, &B, L2);
        prop_assert!(close(distance(&x.add(&z), &y.add(&z), &B, L2), d));
        prop_assert!(close(distance(&y, &x, &B, L2), d));
    }

    #[test]
    fn triangle_inequality(x in element(), y in element(), z in element()) {
        let s = distance(&x, &z, &B, L2) + distance(&z, &y, &B, L2);
        prop_assert!(distance(&x, &y, &B, L2) <= s + 1e-12);
    }

    #[test]
    fn partial_sum_metric_agrees_on_coordinate_bases(x in element(), w in 0.2f64..1.0) {
        prop_assert!(close(norm(&x, &B, L2), norm(&x, &B, MetricKind::SupPartialSum)));
        let wb = BasisSpec::weighted(vec![2.0, 0.5], WeightTail { amplitude: 1.0, ratio: w }).unwrap();
        prop_assert!(close(norm(&x, &wb, L2), norm(&x, &wb, MetricKind::SupPartialSum)));
    }

    #[test]
    fn projection_splits_the_norm(x in element(), m in 0usize..12) {
        let n2 = norm(&x, &B, L2).powi(2);
        let split = norm(&project(&x, m), &B, L2).powi(2) + tail_norm(&x, m, &B, L2).powi(2);
        prop_assert!(close(n2, split));
    }

    #[test]
    fn diagonal_commutes_with_coordinates(k in -0.99f64..0.99, x in element(), n in 0usize..6, m in 1usize..10) {
        let op = OperatorSpec::constant_diagonal(k).unwrap();
        let c = check_prop21(&op, &x, n, m).unwrap();
        prop_assert!(c.pass, "{:?}", c);
    }

    #[test]
    fn contraction_envelope(op in affine(), x in element(), y in element(), n in 0usize..12) {
        let k = op.class().contraction_constant().unwrap();
        let d = distance(&iterate(&op, &x, n).unwrap(), &iterate(&op, &y, n).unwrap(), &B, L2);
        prop_assert!(d <= k.powi(n as i32) * distance(&x, &y, &B, L2) + 1e-12);
    }

    #[test]
    fn picard_error_bound(op in affine(), x in element(), n in 1usize..20) {
        let k = op.class().contraction_constant().unwrap();
        let z = exact_fixed_point(&op).unwrap().z;
        prop_assert!(distance(&apply(&op, &z).unwrap(), &z, &B, L2) <= 1e-12);
        let tn = iterate(&op, &x, n).unwrap();
        let step = distance(&x, &apply(&op, &x).unwrap(), &B, L2);
        let bound = k.powi(n as i32) / (1.0 - k) * step;
        prop_assert!(distance(&tn, &z, &B, L2) <= bound + 1e-9);
    }

    #[test]
    fn truncated_pair_bound(op in affine(), x in element(), y in element(), n in 1usize..10, m in 1usize..12) {
        let c = check_thm32_bound(&op, &x, &y, n, m, &B, L2).unwrap();
        prop_assert!(c.pass, "{:?}", c);
    }

    #[test]
    fn grid_cells_obey_triangle_inequality(op in affine(), x in element(), y in element()) {
        let g = run_grid(&op, &x, &y, &[0, 1, 3, 7], &[1, 2, 4, 8, 16], &B, L2).unwrap();
        for e in g.cells() {
            prop_assert!(e.d_trunc_pair <= e.d_full + e.d_trunc_vs_full + e.d_trunc_vs_full_y + 1e-12);
            prop_assert!(e.d_full <= e.d_trunc_pair + e.d_trunc_vs_full + e.d_trunc_vs_full_y + 1e-12);
        }
    }
}
