//! Hand-derived values that pin the sign and normalization conventions.
//!
//! `p₀ = (1, 0, 0, 0)` on the Hopf model with `n = 2`, where `g = 4δ`,
//! `θ = −2dx₁` and `∂φ = (−1, 0, 0, 0)` for the conformal factor `φ = ln 2 − ln r`.

use serde::Serialize;

use crate::connection::{christoffel_at, d0, laplacian, laplacian_at};
use crate::engine::Engine;
use crate::error::Result;
use crate::field::{ChartPoint, ComponentFn, Domain, LogRadius, ScalarField};
use crate::jet::Scalar;
use crate::lck::LocalGeometry;
use crate::models::{flat_kahler, hopf_structure};
use crate::suite::d_j_d;
use crate::tensor::{contract, interior_2, j_on_oneform, trace_omega, values, wedge_11};

/// A computed value against its closed form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Anchor {
    pub name: &'static str,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
}

impl Anchor {
    fn new(name: &'static str, value: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            name,
            value,
            expected,
            tolerance,
        }
    }

    pub fn error(&self) -> f64 {
        (self.value - self.expected).abs()
    }

    pub fn pass(&self) -> bool {
        self.error() <= self.tolerance
    }
}

pub fn p0() -> ChartPoint {
    ChartPoint::new(vec![1.0, 0.0, 0.0, 0.0]).expect("finite")
}

struct FirstCoordinateSquared;

impl ComponentFn for FirstCoordinateSquared {
    fn dim(&self) -> usize {
        4
    }
    fn len(&self) -> usize {
        1
    }
    fn domain(&self) -> Domain {
        Domain::Everywhere
    }
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        vec![x[0] * x[0]]
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Wedge normalization, sign of `Δ`, `J` on one-forms, and agreement of the
/// two differentiation engines on the Hopf metric.
pub fn convention_anchors() -> Result<Vec<Anchor>> {
    let e1 = [1.0, 0.0, 0.0, 0.0];
    let e2 = [0.0, 1.0, 0.0, 0.0];
    let wedge = wedge_11(&e1, &e2).get(0, 1);

    let flat = flat_kahler(2)?;
    let h = ScalarField::new(FirstCoordinateSquared)?;
    let lap = laplacian_at(&Engine::AutoDiff, flat.metric(), &h, &p0())?;

    let hopf = hopf_structure(2, 2.0)?;
    let loc = LocalGeometry::new(&hopf, &Engine::AutoDiff, &p0())?;
    let j_theta = j_on_oneform(&loc.j_values(), &values(&loc.theta));
    let t_omega = interior_2(&values(&loc.lee), &loc.omega.values());

    let q = ChartPoint::new(vec![0.7, -1.3, 0.4, 0.9])?;
    let ad = Engine::AutoDiff.jets(hopf.metric().as_field(), &q)?;
    let fd = Engine::finite_difference().jets(hopf.metric().as_field(), &q)?;
    let mut engine_gap = 0.0f64;
    for (a, f) in ad.iter().zip(&fd) {
        engine_gap = engine_gap.max((a.value - f.value).abs());
        engine_gap = engine_gap.max(max_abs_diff(&a.grad, &f.grad));
        for i in 0..4 {
            for j in 0..4 {
                engine_gap = engine_gap.max((a.hess(i, j) - f.hess(i, j)).abs());
            }
        }
    }

    Ok(vec![
        Anchor::new("(dx1∧dx2)(∂1, ∂2)", wedge, 1.0, 0.0),
        Anchor::new("Δ x1² on flat ℂ²", lap, -2.0, 1e-14),
        Anchor::new("J(−2dx1) = −2dy1", max_abs_diff(&j_theta, &[0.0, -2.0, 0.0, 0.0]), 0.0, 1e-14),
        Anchor::new("T⌟ω = Jθ", max_abs_diff(&t_omega, &j_theta), 0.0, 1e-14),
        Anchor::new("AD vs FD metric jets", engine_gap, 0.0, 1e-6),
    ])
}

/// Christoffel symbols, `Δ ln r`, `Tr_ω(dJd ln r)` and `Tr_ω ω` on the Hopf
/// model at `p₀`.
pub fn closed_form_anchors(engine: &Engine) -> Result<Vec<Anchor>> {
    let hopf = hopf_structure(2, 2.0)?;
    let gamma = christoffel_at(engine, hopf.metric(), &p0())?;
    let loc = LocalGeometry::new(&hopf, engine, &p0())?;
    let ln_r = engine.jets(&LogRadius { dim: 4 }, &p0())?[0];
    let g_inv = loc.g_inv_values();
    let j = loc.j_values();
    let frame = loc.frame()?;
    let lap_ln_r = laplacian(&g_inv, &loc.gamma.values(), ln_r);
    let tr_djd = trace_omega(&d_j_d(&loc, ln_r).to_square(), &g_inv, &j, &frame);
    let tr_omega = trace_omega(&loc.omega.values().to_square(), &g_inv, &j, &frame);
    let q = ChartPoint::new(vec![0.3, -1.2, 1.1, 0.5])?;
    let lap_far = laplacian_at(engine, hopf.metric(), &ScalarField::new(LogRadius { dim: 4 })?, &q)?;
    let t_ln_r = contract(&values(&loc.lee), &values(&d0(ln_r, 4)));
    let tol = 1e-12 * engine.tolerance_factor();
    let second = 1e-7 * engine.tolerance_factor();
    Ok(vec![
        Anchor::new("Γ¹₁₁", gamma.get(0, 0, 0), -1.0, tol),
        Anchor::new("Γ¹₂₂", gamma.get(0, 1, 1), 1.0, tol),
        Anchor::new("Γ²₁₂", gamma.get(1, 0, 1), -1.0, tol),
        Anchor::new("T(ln r)", t_ln_r, -0.5, tol),
        Anchor::new("Δ ln r at p₀", lap_ln_r, 0.0, 1e-9 * engine.tolerance_factor()),
        Anchor::new("Δ ln r off-axis", lap_far, 0.0, 1e-9 * engine.tolerance_factor()),
        Anchor::new("Tr_ω(dJd ln r)", tr_djd.frame_sum, 1.0, second),
        Anchor::new("Tr_ω ω", tr_omega.frame_sum, 4.0, 1e-12),
    ])
}
