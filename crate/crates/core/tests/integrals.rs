//! Global identities over the fundamental domain.

use std::f64::consts::PI;

use lck_workbench::engine::Engine;
use lck_workbench::models::{ModelDescriptor, ModelKind};
use lck_workbench::quadrature::{
    check_integral_identities, converges_with_order, euclidean_annulus_volume, hopf_volume, integrate,
    integrate_many, QuadratureGrid, Quantity, RadialRule,
};

const AD: Engine = Engine::AutoDiff;

#[test]
fn euclidean_annulus_with_every_radial_rule() {
    let exact = euclidean_annulus_volume(3.0);
    for rule in [RadialRule::GaussLegendre, RadialRule::Trapezoid] {
        let n = if rule == RadialRule::Trapezoid { 4096 } else { 24 };
        let v = QuadratureGrid::new(3.0, n, 12, rule).unwrap().integrate_euclidean(|_| Ok(1.0)).unwrap();
        let tol = if rule == RadialRule::Trapezoid { 1e-6 } else { 1e-10 };
        assert!(((v - exact) / exact).abs() < tol, "{rule:?}: {v} vs {exact}");
    }
}

#[test]
fn hopf_volume_converges_under_angular_refinement() {
    let a = (2.0 * PI).exp();
    let model = ModelDescriptor::new(ModelKind::Hopf, 2, a).build(&AD).unwrap();
    let exact = hopf_volume(a);
    assert!((exact - 64.0 * PI.powi(3)).abs() < 1e-9);
    let errors: Vec<f64> = [2, 4, 8]
        .iter()
        .map(|&n| integrate(&model, Quantity::Volume, &QuadratureGrid::periodic(a, 4, n).unwrap(), &AD).unwrap() - exact)
        .collect();
    assert!(errors[0].abs() > 1e-3 * exact);
    assert!(converges_with_order(&errors, 1e-12 * exact, 2.0), "{errors:?}");
}

#[test]
fn stokes_identities_on_deformed_model() {
    let a = (2.0 * PI).exp();
    let model = ModelDescriptor::new(ModelKind::HopfDeformed, 2, a).build(&AD).unwrap();
    for n in [4, 8] {
        let checks = check_integral_identities(&model, &QuadratureGrid::periodic(a, 2 * n, n).unwrap(), &AD).unwrap();
        let names: Vec<&str> = checks.iter().map(|c| c.quantity.name()).collect();
        assert_eq!(names, ["volume", "div-lee", "laplacian-norm", "ibp-defect"]);
        for c in checks.iter().skip(1) {
            assert!(c.verdict.pass, "{} = {}", c.quantity, c.value);
        }
    }
}

#[test]
fn gradient_of_lee_form_integrates_to_zero_only_on_hopf() {
    let a = 2.0;
    let grid = QuadratureGrid::periodic(a, 8, 6).unwrap();
    let hopf = ModelDescriptor::new(ModelKind::Hopf, 2, a).build(&AD).unwrap();
    let deformed = ModelDescriptor::new(ModelKind::HopfDeformed, 2, a).build(&AD).unwrap();
    let q = [Quantity::GradLeeSq];
    assert!(integrate_many(&hopf, &q, &grid, &AD).unwrap()[0] < 1e-8);
    assert!(integrate_many(&deformed, &q, &grid, &AD).unwrap()[0] > 1.0);
}

#[test]
fn integrals_are_bitwise_reproducible() {
    let model = ModelDescriptor::new(ModelKind::HopfDeformed, 2, 2.0).build(&AD).unwrap();
    let grid = QuadratureGrid::periodic(2.0, 6, 4).unwrap();
    let first = integrate_many(&model, &Quantity::ALL, &grid, &AD).unwrap();
    let second = integrate_many(&model, &Quantity::ALL, &grid, &AD).unwrap();
    assert_eq!(
        first.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
        second.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
    );
}
