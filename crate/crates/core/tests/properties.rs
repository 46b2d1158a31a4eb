//! Randomized properties of the algebra, the models and the sampler.

use proptest::prelude::*;

use lck_workbench::engine::Engine;
use lck_workbench::field::ChartPoint;
use lck_workbench::jet::{Jet2, Scalar};
use lck_workbench::lck::{compatibility_residual, residual_lck, LocalGeometry};
use lck_workbench::models::{dilation_residual, hopf_structure, sample_annulus, COORDINATE_CLEARANCE};
use lck_workbench::tensor::{j_on_oneform, wedge_11, Square};

const AD: Engine = Engine::AutoDiff;

fn coords(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.2f64..2.0, dim).prop_flat_map(|mags| {
        prop::collection::vec(any::<bool>(), mags.len())
            .prop_map(move |signs| mags.iter().zip(&signs).map(|(m, s)| if *s { *m } else { -*m }).collect())
    })
}

fn covector(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_is_antisymmetric_and_alternating(a in covector(6), b in covector(6)) {
        let ab = wedge_11(&a, &b);
        let ba = wedge_11(&b, &a);
        prop_assert!(ab.add(&ba).components().iter().all(|c| c.abs() <= 1e-14));
        prop_assert!(wedge_11(&a, &a).components().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn hopf_structure_is_hermitian(x in coords(4), alpha in covector(4)) {
        let hopf = hopf_structure(2, 2.0).unwrap();
        let loc = LocalGeometry::new(&hopf, &AD, &ChartPoint::new(x).unwrap()).unwrap();
        let (g, j) = (loc.g_values(), loc.j_values());
        prop_assert!(compatibility_residual(&g, &j) < 1e-12);
        let jj = j_on_oneform(&j, &j_on_oneform(&j, &alpha));
        for (u, v) in jj.iter().zip(&alpha) {
            prop_assert!((u + v).abs() < 1e-12);
        }
    }

    #[test]
    fn hopf_is_lck_everywhere(n in 2usize..=4, seed in any::<u64>()) {
        let hopf = hopf_structure(n, 3.0).unwrap();
        for p in sample_annulus(2 * n, 3.0, 4, seed).unwrap() {
            let loc = LocalGeometry::new(&hopf, &AD, &p).unwrap();
            prop_assert!(residual_lck(&loc) < 1e-9);
        }
    }

    #[test]
    fn hopf_is_dilation_invariant(x in coords(6), a in 1.1f64..20.0) {
        let hopf = hopf_structure(3, a).unwrap();
        prop_assert!(dilation_residual(&hopf, a, &ChartPoint::new(x).unwrap()) < 1e-11);
    }

    #[test]
    fn sampler_stays_in_annulus(dim in prop::sample::select(vec![2usize, 4, 6, 8]), a in 1.5f64..600.0, seed in any::<u64>()) {
        let points = sample_annulus(dim, a, 16, seed).unwrap();
        prop_assert_eq!(points.len(), 16);
        for p in &points {
            let r = p.radius();
            prop_assert!(r >= 1.0 - 1e-12 && r <= a * (1.0 + 1e-12), "r = {}", r);
            prop_assert!(p.coords().iter().all(|c| c.abs() >= COORDINATE_CLEARANCE));
        }
        prop_assert_eq!(points, sample_annulus(dim, a, 16, seed).unwrap());
    }

    #[test]
    fn jets_follow_the_chain_rule(x in 0.3f64..3.0, y in -2.0f64..2.0) {
        let v = Jet2::seed(&[x, y]);
        let h = (v[0] * v[1]).exp().ln() + v[0].sqrt();
        // h = xy + √x
        prop_assert!((h.grad[0] - (y + 0.5 / x.sqrt())).abs() < 1e-12);
        prop_assert!((h.grad[1] - x).abs() < 1e-12);
        prop_assert!((h.hess(0, 0) + 0.25 * x.powf(-1.5)).abs() < 1e-12);
        prop_assert!((h.hess(0, 1) - 1.0).abs() < 1e-12);
        prop_assert_eq!(h.hess(0, 1).to_bits(), h.hess(1, 0).to_bits());
    }

    #[test]
    fn inverse_metric_inverts(x in coords(4)) {
        let hopf = hopf_structure(2, 2.0).unwrap();
        let loc = LocalGeometry::new(&hopf, &AD, &ChartPoint::new(x).unwrap()).unwrap();
        let product = loc.g_values().matmul(&loc.g_inv_values()).sub(&Square::identity(4));
        prop_assert!(product.components().iter().all(|c| c.abs() < 1e-12));
    }
}
