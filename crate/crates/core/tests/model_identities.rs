//! Hand-derived values on the flat, Hopf and deformed models, checked through
//! the public API across modules.

use std::f64::consts::PI;

use lck_workbench::anchors::p0;
use lck_workbench::connection::{d1, d2, lie_form2};
use lck_workbench::engine::Engine;
use lck_workbench::error::Error;
use lck_workbench::field::ChartPoint;
use lck_workbench::lck::{lee_form, LocalGeometry};
use lck_workbench::models::{
    deform, deformed_metric_closed_form, diagonal_point, flat_kahler, hopf_structure, ModelDescriptor, ModelKind,
    RadialProfile,
};
use lck_workbench::quadrature::Quantity;
use lck_workbench::suite::{run_suite, SuiteOptions};
use lck_workbench::tensor::{
    contract, interior_2, interior_3, j_on_oneform, trace_omega, values, wedge_11, wedge_12, Form2,
};

const AD: Engine = Engine::AutoDiff;

fn e2pi() -> f64 {
    (2.0 * PI).exp()
}

fn hopf_points(n: usize) -> Vec<ChartPoint> {
    ModelDescriptor::new(ModelKind::Hopf, n, 2.0)
        .build(&AD)
        .unwrap()
        .samples(32, 3)
        .unwrap()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[test]
fn lee_form_has_unit_norm_on_hopf() {
    for n in [2, 3] {
        let hopf = hopf_structure(n, 2.0).unwrap();
        for p in hopf_points(n) {
            let loc = LocalGeometry::new(&hopf, &AD, &p).unwrap();
            let t_theta = contract(&values(&loc.lee), &values(&loc.theta));
            assert!((t_theta - 1.0).abs() < 1e-13, "θ(T) = {t_theta}");
        }
    }
}

#[test]
fn hopf_lee_form_and_field_at_unit_point() {
    let hopf = hopf_structure(2, 2.0).unwrap();
    let loc = LocalGeometry::new(&hopf, &AD, &p0()).unwrap();
    assert_eq!(values(&loc.theta), vec![-2.0, 0.0, 0.0, 0.0]);
    assert!(max_abs(&[values(&loc.lee)[0] + 0.5]) < 1e-15);
    let recovered = lee_form(&hopf, &AD, &p0()).unwrap();
    assert!(max_abs(&[recovered[0] + 2.0, recovered[1], recovered[2], recovered[3]]) < 1e-13);
}

#[test]
fn frame_at_unit_point_is_half_coordinate_frame() {
    let hopf = hopf_structure(2, 2.0).unwrap();
    let loc = LocalGeometry::new(&hopf, &AD, &p0()).unwrap();
    let frame = loc.frame().unwrap();
    for e in frame.vectors() {
        let norm: f64 = e.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 0.5).abs() < 1e-15);
        assert_eq!(e.iter().filter(|x| x.abs() > 1e-15).count(), 1);
    }
    let gram = frame.gram(&loc.g_values());
    for i in 0..4 {
        for j in 0..4 {
            let expected = if i == j { 1.0 } else { 0.0 };
            assert!((gram.get(i, j) - expected).abs() < 1e-12);
        }
    }
}

#[test]
fn flat_fundamental_form_is_standard() {
    let flat = flat_kahler(2).unwrap();
    let loc = LocalGeometry::new(&flat, &AD, &ChartPoint::new(vec![0.3, 1.0, -2.0, 0.5]).unwrap()).unwrap();
    let omega = loc.omega.values();
    for i in 0..4 {
        for j in 0..4 {
            let expected = match (i, j) {
                (0, 1) | (2, 3) => 1.0,
                (1, 0) | (3, 2) => -1.0,
                _ => 0.0,
            };
            assert_eq!(omega.get(i, j), expected);
        }
    }
    assert!(values(&loc.theta).iter().all(|&t| t == 0.0));
    assert!(loc.s.values().components().iter().all(|&s| s == 0.0));
}

#[test]
fn antiderivation_law_for_interior_product() {
    let hopf = hopf_structure(2, 2.0).unwrap();
    for p in hopf_points(2) {
        let loc = LocalGeometry::new(&hopf, &AD, &p).unwrap();
        let theta = values(&loc.theta);
        let omega = loc.omega.values();
        let x: Vec<f64> = p.coords().iter().map(|c| c.sin()).collect();
        let lhs = interior_3(&x, &wedge_12(&theta, &omega));
        let rhs = omega.scale(contract(&x, &theta)).sub(&wedge_11(&theta, &interior_2(&x, &omega)));
        assert!(max_abs(lhs.sub(&rhs).components()) < 1e-13);
    }
}

#[test]
fn omega_traces_on_hopf() {
    let hopf = hopf_structure(2, 2.0).unwrap();
    for p in hopf_points(2) {
        let loc = LocalGeometry::new(&hopf, &AD, &p).unwrap();
        let theta = values(&loc.theta);
        let j_theta = j_on_oneform(&loc.j_values(), &theta);
        let frame = loc.frame().unwrap();
        let (g_inv, j) = (loc.g_inv_values(), loc.j_values());
        let tr = trace_omega(&wedge_11(&theta, &j_theta).to_square(), &g_inv, &j, &frame);
        assert!((tr.frame_sum - 2.0).abs() < 1e-12, "Tr_ω(θ∧Jθ) = {}", tr.frame_sum);
        let d_j_theta = d1(&loc.j_theta()).values();
        let tr = trace_omega(&d_j_theta.to_square(), &g_inv, &j, &frame);
        assert!((tr.frame_sum + 2.0).abs() < 1e-12, "Tr_ω(dJθ) = {}", tr.frame_sum);
    }
}

#[test]
fn hopf_is_closed_lck_and_parallel() {
    for n in [2, 3] {
        let hopf = hopf_structure(n, e2pi()).unwrap();
        for p in hopf_points(n) {
            let loc = LocalGeometry::new(&hopf, &AD, &p).unwrap();
            assert!(max_abs(d1(&loc.theta).values().components()) < 1e-11);
            let d_omega = d2(&loc.omega).values();
            let theta_omega = wedge_12(&values(&loc.theta), &loc.omega.values());
            assert!(loc.norm_form3(&d_omega.sub(&theta_omega)) < 1e-9);
            assert!(loc.norm_bilinear(&loc.s.values()) < 1e-10);
        }
    }
}

#[test]
fn anti_lee_field_preserves_omega_on_hopf() {
    let hopf = hopf_structure(2, 2.0).unwrap();
    for p in hopf_points(2) {
        let loc = LocalGeometry::new(&hopf, &AD, &p).unwrap();
        let lie: Form2<f64> = lie_form2(&loc.anti_lee(), &loc.omega).values();
        assert!(loc.norm_form2(&lie) < 1e-9);
    }
}

#[test]
fn deformed_lee_form_is_rescaled() {
    let model = ModelDescriptor::new(ModelKind::HopfDeformed, 2, e2pi()).build(&AD).unwrap();
    let deformation = model.deformation.as_ref().unwrap();
    for p in model.samples(32, 5).unwrap() {
        let f = deformation.profile.eval(p.coords());
        let base_theta = deformation.base.theta().eval(p.coords());
        let recovered = lee_form(&model.structure, &AD, &p).unwrap();
        let diff: Vec<f64> = recovered.iter().zip(&base_theta).map(|(t, b)| t - (1.0 + f) * b).collect();
        assert!(max_abs(&diff) < 1e-9);
        let closed = deformed_metric_closed_form(&deformation.base, deformation.profile, &p);
        let defined = model.structure.metric().eval(p.coords());
        let gap: Vec<f64> = closed.components().iter().zip(&defined).map(|(a, b)| a - b).collect();
        assert!(max_abs(&gap) < 1e-11);
    }
}

#[test]
fn deformed_lee_norm_peaks_at_quarter_period() {
    let a = e2pi();
    let model = ModelDescriptor::new(ModelKind::HopfDeformed, 2, a).build(&AD).unwrap();
    let loc = LocalGeometry::new(&model.structure, &AD, &diagonal_point(4, a.powf(0.25)).unwrap()).unwrap();
    let norm = contract(&values(&loc.lee), &values(&loc.theta));
    assert!((norm - 1.5).abs() < 1e-9, "ḡ(T̄, T̄) = {norm}");
}

#[test]
fn deformed_lee_form_is_not_parallel_at_eighth_period() {
    let a = e2pi();
    let model = ModelDescriptor::new(ModelKind::HopfDeformed, 2, a).build(&AD).unwrap();
    let loc = LocalGeometry::new(&model.structure, &AD, &diagonal_point(4, a.powf(0.125)).unwrap()).unwrap();
    assert!(max_abs(loc.s.values().components()) > 0.01);
}

#[test]
fn deformation_preconditions_are_enforced() {
    let base = hopf_structure(2, 2.0).unwrap();
    let probes = hopf_points(2);
    let touching = deform(&base, RadialProfile::new(1.0, 2.0).unwrap(), &AD, &probes).unwrap_err();
    assert!(matches!(touching, Error::Precondition(_)), "{touching}");
    let flat = flat_kahler(2).unwrap();
    let profile = RadialProfile::new(0.5, 2.0).unwrap();
    let err = deform(&flat, profile, &AD, &probes).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)), "{err}");
}

#[test]
fn flat_suite_residuals_vanish() {
    let model = ModelDescriptor::new(ModelKind::Flat, 2, 2.0).build(&AD).unwrap();
    let report = run_suite(
        &model,
        &SuiteOptions {
            samples: 64,
            seed: 1,
            ..SuiteOptions::default()
        },
    )
    .unwrap();
    assert!(report.overall_pass);
    for c in &report.checks {
        assert!(c.max_residual <= 1e-12, "{} = {}", c.id, c.max_residual);
    }
}

#[test]
fn suite_examples_on_hopf_and_deformed() {
    let hopf = ModelDescriptor::new(ModelKind::Hopf, 2, 2.0).build(&AD).unwrap();
    let report = run_suite(&hopf, &SuiteOptions::default()).unwrap();
    assert!(report.overall_pass);
    assert!(report.check("id_naj").unwrap().max_residual <= 1e-9);

    let fd = Engine::finite_difference();
    let deformed = ModelDescriptor::new(ModelKind::HopfDeformed, 2, e2pi()).build(&fd).unwrap();
    let report = run_suite(
        &deformed,
        &SuiteOptions {
            engine: fd,
            ..SuiteOptions::default()
        },
    )
    .unwrap();
    assert!(report.check("id_cinci").unwrap().max_residual <= 1e-6);
    assert!(report.check("id_vaisman").unwrap().max_residual > 0.01);
    assert!(report.overall_pass);
}

#[test]
fn hopf_codifferential_integrand_vanishes_identically() {
    let hopf = hopf_structure(2, 2.0).unwrap();
    for p in hopf_points(2) {
        let loc = LocalGeometry::new(&hopf, &AD, &p).unwrap();
        assert!(Quantity::DivLee.eval(&loc).abs() < 1e-13);
        assert!(Quantity::LaplacianNorm.eval(&loc).abs() < 1e-12);
    }
}
