//! The identity registry: every pointwise identity as a named residual, and the
//! runner that evaluates all applicable checks on a model's samples.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::connection::{d0, d1, d2, laplacian, lie_bilinear, lie_endo, lie_form2, lie_oneform, nabla_metric};
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::field::{ChartPoint, LogRadius};
use crate::jet::{Jet1, Jet2};
use crate::lck::{
    compatibility_residual, lee_form, residual_commutator, residual_gauduchon, residual_holomorphic, residual_killing,
    residual_lck, residual_potential, residual_vaisman, CheckVerdict, LocalGeometry,
};
use crate::models::{dilation_residual, residual_deformed_lck, residual_deformed_lee_norm, Model, ModelKind};
use crate::tensor::{
    contract, interior_2, interior_3, j_on_oneform, lower_all, omega_compose, trace_omega, values, vector_wedge,
    wedge_11, Form2, Square,
};

/// How many metric derivatives an identity involves; picks the tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Order {
    /// Pure algebra at a point.
    Structural,
    First,
    Second,
}

impl Order {
    pub fn base_tolerance(self) -> f64 {
        match self {
            Order::Structural => 1e-11,
            Order::First => 1e-9,
            Order::Second => 1e-7,
        }
    }
}

/// Tolerance of a check under an engine: derivative-bearing checks are
/// loosened by the engine's factor.
pub fn tolerance(check: &IdentityCheck, engine: &Engine) -> f64 {
    let base = check.tolerance.unwrap_or_else(|| check.order.base_tolerance());
    match check.order {
        Order::Structural => base,
        _ => base * engine.tolerance_factor(),
    }
}

/// What a residual closure sees at one point.
pub struct PointContext<'a> {
    pub model: &'a Model,
    pub engine: &'a Engine,
    pub loc: &'a LocalGeometry,
}

type Residual = fn(&PointContext<'_>) -> Result<f64>;
type Applicability = fn(&Model) -> Option<&'static str>;

/// One named identity.
#[derive(Clone, Copy)]
pub struct IdentityCheck {
    pub id: &'static str,
    pub description: &'static str,
    /// The identity as a formula.
    pub anchor: &'static str,
    pub order: Order,
    /// Overrides the ladder value for this check.
    pub tolerance: Option<f64>,
    /// `Some(reason)` when the check does not apply to the model.
    pub skip: Applicability,
    pub residual: Residual,
}

impl std::fmt::Debug for IdentityCheck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IdentityCheck").field("id", &self.id).finish()
    }
}

fn always(_: &Model) -> Option<&'static str> {
    None
}

fn deformed_only(m: &Model) -> Option<&'static str> {
    m.deformation
        .is_none()
        .then_some("needs a deformed model (base structure and profile)")
}

fn unit_lee_vaisman_only(m: &Model) -> Option<&'static str> {
    (m.descriptor.name != ModelKind::Hopf).then_some("holds only on Vaisman models with |θ| = 1")
}

fn needs_lee_form(m: &Model) -> Option<&'static str> {
    match m.descriptor.name {
        ModelKind::Flat => Some("θ ≡ 0, so ω = θ∧Jθ − dJθ cannot hold (the model is Kähler, not strictly lcK)"),
        _ => None,
    }
}

fn needs_dilation(m: &Model) -> Option<&'static str> {
    (!m.is_dilation_invariant()).then_some("the model is not defined on a Hopf quotient")
}

fn needs_recovery(m: &Model) -> Option<&'static str> {
    (m.structure.n() < 2).then_some("Lee form recovery needs n ≥ 2")
}

/// `Σ_a g^{ab} |R_a · R_b|`: the g-norm of a (1,2)-tensor given by its slices
/// `R_a = R(∂_a)`, each an endomorphism.
fn slice_norm(loc: &LocalGeometry, slices: &[Square<f64>]) -> f64 {
    let g = loc.g_values();
    let g_inv = loc.g_inv_values();
    let d = slices.len();
    let mut acc = 0.0;
    for a in 0..d {
        for b in 0..d {
            let w = g_inv.get(a, b);
            if w == 0.0 {
                continue;
            }
            acc += w * g.matmul(&slices[a]).matmul(&g_inv).matmul(&slices[b].transpose()).trace();
        }
    }
    acc.max(0.0).sqrt()
}

fn unit(d: usize, a: usize) -> Vec<f64> {
    (0..d).map(|i| if i == a { 1.0 } else { 0.0 }).collect()
}

fn combine(slices: &[Square<f64>], x: &[f64]) -> Square<f64> {
    let d = slices.len();
    let mut out = Square::zeros(d);
    for (s, &c) in slices.iter().zip(x) {
        out = out.add(&s.scale(c));
    }
    out
}

/// `∇_X J − ½(X∧Jθ + JX∧θ)` over the coordinate basis, plus `‖∇_T J‖`.
fn residual_naj(c: &PointContext<'_>) -> Result<f64> {
    let loc = c.loc;
    let d = loc.dim();
    let g = loc.g_values();
    let j = loc.j_values();
    let theta = values(&loc.theta);
    let lee = values(&loc.lee);
    let j_theta = values(&loc.j_theta());
    let j_theta_sharp = loc.g_inv_values().apply(&j_theta);
    let nabla_j = loc.nabla_j();
    let slices: Vec<Square<f64>> = (0..d)
        .map(|a| {
            let x = unit(d, a);
            let jx = j.apply(&x);
            let rhs = vector_wedge(&x, &g.apply(&x), &j_theta_sharp, &j_theta)
                .add(&vector_wedge(&jx, &g.apply(&jx), &lee, &theta))
                .scale(0.5);
            nabla_j[a].sub(&rhs)
        })
        .collect();
    Ok(slice_norm(loc, &slices) + loc.norm_endo(&combine(&nabla_j, &lee)))
}

/// `Σ(∇_{e_i}J)e_i − (n−1)JT` and `Σ(∇_{Je_i}J)e_i + (n−1)T`.
fn residual_cgnt(c: &PointContext<'_>) -> Result<f64> {
    let loc = c.loc;
    let d = loc.dim();
    let j = loc.j_values();
    let nabla_j = loc.nabla_j();
    let frame = loc.frame()?;
    let mut first = vec![0.0; d];
    let mut second = vec![0.0; d];
    for e in frame.vectors() {
        let a = combine(&nabla_j, e).apply(e);
        let b = combine(&nabla_j, &j.apply(e)).apply(e);
        for i in 0..d {
            first[i] += a[i];
            second[i] += b[i];
        }
    }
    let k = loc.n as f64 - 1.0;
    let lee = values(&loc.lee);
    let j_lee = j.apply(&lee);
    let r1: Vec<f64> = (0..d).map(|i| first[i] - k * j_lee[i]).collect();
    let r2: Vec<f64> = (0..d).map(|i| second[i] + k * lee[i]).collect();
    Ok(loc.norm_vector(&r1) + loc.norm_vector(&r2))
}

/// `‖L_T g − 2S‖`.
fn residual_doi(c: &PointContext<'_>) -> Result<f64> {
    let loc = c.loc;
    let lie = lie_bilinear(&lower_all(&loc.lee), &loc.g.lower());
    Ok(loc.norm_bilinear(&lie.sub(&loc.s.values().scale(2.0))))
}

/// `‖L_T ω − 2ω(F·,·)‖`.
fn residual_e3(c: &PointContext<'_>) -> Result<f64> {
    let loc = c.loc;
    let lie = lie_form2(&lower_all(&loc.lee), &loc.omega.lower()).to_square();
    let rhs = omega_compose(&loc.omega.values(), &loc.f.values()).scale(2.0);
    Ok(loc.norm_bilinear(&lie.sub(&rhs)))
}

/// `‖dJθ − 2ω(F·,·) + |θ|²ω − θ∧Jθ‖`.
fn residual_e4(c: &PointContext<'_>) -> Result<f64> {
    let loc = c.loc;
    let j_theta = loc.j_theta();
    let omega = loc.omega.values();
    let eta = d1(&j_theta)
        .values()
        .to_square()
        .sub(&omega_compose(&omega, &loc.f.values()).scale(2.0))
        .add(&omega.to_square().scale(loc.theta_norm_sq().value))
        .sub(&wedge_11(&values(&loc.theta), &values(&j_theta)).to_square());
    Ok(loc.norm_bilinear(&eta))
}

/// `‖L_T(Jθ) − J d|θ|²‖`.
fn residual_lie_jtheta(c: &PointContext<'_>) -> Result<f64> {
    let loc = c.loc;
    let lie = values(&lie_oneform(&lower_all(&loc.lee), &lower_all(&loc.j_theta())));
    let dh = values(&d0(loc.theta_norm_sq(), loc.dim()));
    let rhs = j_on_oneform(&loc.j_values(), &dh);
    let diff: Vec<f64> = lie.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    Ok(loc.norm_oneform(&diff))
}

/// `d(Jdh)` for a second-order jet `h`.
pub(crate) fn d_j_d(loc: &LocalGeometry, h: Jet2) -> Form2<f64> {
    let dh: Vec<Jet1> = d0(h, loc.dim());
    let j_dh = j_on_oneform(&loc.j.lower(), &dh);
    d1(&j_dh)
}

/// The full second-order identity for `dJd|θ|²`.
fn residual_djd(c: &PointContext<'_>) -> Result<f64> {
    let loc = c.loc;
    let h = loc.theta_norm_sq();
    let omega = loc.omega.values();
    let f = loc.f.values();
    let f2 = f.matmul(&f);
    let lie_f = lie_endo(&lower_all(&loc.lee), &loc.f);
    let theta = values(&loc.theta);
    let lee = values(&loc.lee);
    let dh = values(&d0(h, loc.dim()));
    let j = loc.j_values();
    let j_dh = j_on_oneform(&j, &dh);
    let j_theta = j_on_oneform(&j, &theta);
    let eta = d_j_d(loc, h)
        .to_square()
        .sub(&omega_compose(&omega, &f2).scale(4.0))
        .sub(&omega_compose(&omega, &lie_f).scale(2.0))
        .add(&omega.to_square().scale(contract(&lee, &dh)))
        .add(&omega_compose(&omega, &f).scale(2.0 * h.value))
        .sub(&wedge_11(&dh, &j_theta).to_square())
        .sub(&wedge_11(&theta, &j_dh).to_square());
    Ok(loc.norm_bilinear(&eta))
}

/// `|Tr_ω ω(A·,·) − Tr A|` for `A ∈ {F, F², J}`, through both trace routes.
fn residual_tr_i(c: &PointContext<'_>) -> Result<f64> {
    let loc = c.loc;
    let frame = loc.frame()?;
    let g_inv = loc.g_inv_values();
    let j = loc.j_values();
    let omega = loc.omega.values();
    let f = loc.f.values();
    let mut worst = 0.0f64;
    for a in [f.clone(), f.matmul(&f), j.clone()] {
        let tr = trace_omega(&omega_compose(&omega, &a), &g_inv, &j, &frame);
        let expected = a.trace();
        worst = worst
            .max((tr.frame_sum - expected).abs())
            .max((tr.contraction - expected).abs());
    }
    Ok(worst)
}

/// `|Tr_ω(α∧β) − 2g(Jα,β)|` for `(θ, Jθ)` and `(θ, d|θ|²)`.
fn residual_tr_ii(c: &PointContext<'_>) -> Result<f64> {
    let loc = c.loc;
    let frame = loc.frame()?;
    let g_inv = loc.g_inv_values();
    let j = loc.j_values();
    let theta = values(&loc.theta);
    let j_theta = j_on_oneform(&j, &theta);
    let dh = values(&d0(loc.theta_norm_sq(), loc.dim()));
    let mut worst = 0.0f64;
    for beta in [j_theta.clone(), dh] {
        let tr = trace_omega(&wedge_11(&theta, &beta).to_square(), &g_inv, &j, &frame);
        let expected = 2.0 * g_inv.pair(&j_theta, &beta);
        worst = worst
            .max((tr.frame_sum - expected).abs())
            .max((tr.contraction - expected).abs());
    }
    Ok(worst)
}

/// `|Tr_ω(dJdh) + 2Δh − 2(1−n)T(h)|` for `h ∈ {|θ|², ln r}`.
fn residual_tr_iii(c: &PointContext<'_>) -> Result<f64> {
    let loc = c.loc;
    let frame = loc.frame()?;
    let g_inv = loc.g_inv_values();
    let j = loc.j_values();
    let gamma = loc.gamma.values();
    let lee = values(&loc.lee);
    let ln_r = c.engine.jets(&LogRadius { dim: loc.dim() }, &loc.point)?[0];
    let n = loc.n as f64;
    let mut worst = 0.0f64;
    for h in [loc.theta_norm_sq(), ln_r] {
        let tr = trace_omega(&d_j_d(loc, h).to_square(), &g_inv, &j, &frame).contraction;
        let t_h = contract(&lee, &values(&d0(h, loc.dim())));
        let r = tr + 2.0 * laplacian(&g_inv, &gamma, h) - 2.0 * (1.0 - n) * t_h;
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// `|Δ|θ|² + T(|θ|²) + |θ|²δθ + 2|∇θ|² − T(δθ)|`.
fn residual_cinci(c: &PointContext<'_>) -> Result<f64> {
    let loc = c.loc;
    let h = loc.theta_norm_sq();
    let lee = values(&loc.lee);
    let delta = loc.delta_theta();
    let grad_delta: Vec<f64> = (0..loc.dim()).map(|k| delta.grad[k]).collect();
    let nabla_sq = loc.norm_bilinear(&loc.s.values()).powi(2);
    let r = laplacian(&loc.g_inv_values(), &loc.gamma.values(), h)
        + contract(&lee, &values(&d0(h, loc.dim())))
        + h.value * delta.value
        + 2.0 * nabla_sq
        - contract(&lee, &grad_delta);
    Ok(r.abs())
}

/// `|Tr F + δθ| + |Tr F² − |∇θ|²|`.
fn residual_tr_f(c: &PointContext<'_>) -> Result<f64> {
    let loc = c.loc;
    let f = loc.f.values();
    let nabla_sq = loc.norm_bilinear(&loc.s.values()).powi(2);
    Ok((f.trace() + loc.delta_theta().value).abs() + (f.matmul(&f).trace() - nabla_sq).abs())
}

/// `‖S − Sᵀ‖ + ‖g(F·,·) − S‖`.
fn residual_s(c: &PointContext<'_>) -> Result<f64> {
    let loc = c.loc;
    let s = loc.s.values();
    let g = loc.g_values();
    let f = loc.f.values();
    let gf = f.transpose().matmul(&g);
    Ok(loc.norm_bilinear(&s.sub(&s.transpose())) + loc.norm_bilinear(&gf.sub(&s)))
}

/// `max_k ‖∇_k g‖`.
fn residual_metricity(c: &PointContext<'_>) -> Result<f64> {
    let loc = c.loc;
    let nabla = nabla_metric(&loc.gamma.values(), &loc.g.lower());
    Ok(nabla
        .iter()
        .map(|b| loc.norm_bilinear(b))
        .fold(0.0, f64::max))
}

/// `‖ddθ‖ + ‖ddJθ‖`.
fn residual_dd(c: &PointContext<'_>) -> Result<f64> {
    let loc = c.loc;
    let dd_theta = d2(&d1(&loc.theta)).values();
    let dd_j_theta = d2(&d1(&loc.j_theta())).values();
    Ok(loc.norm_form3(&dd_theta) + loc.norm_form3(&dd_j_theta))
}

/// `‖L_X η − d(X⌟η) − X⌟dη‖` for `η ∈ {ω, Jθ}`, `X ∈ {T, JT}`.
fn residual_cartan(c: &PointContext<'_>) -> Result<f64> {
    let loc = c.loc;
    let j_theta = loc.j_theta();
    let mut total = 0.0;
    for x in [loc.lee.clone(), loc.anti_lee()] {
        let xv = values(&x);
        let lie = lie_form2(&lower_all(&x), &loc.omega.lower());
        let x_omega = interior_2(&x, &loc.omega);
        let rhs = d1(&x_omega).values().add(&interior_3(&xv, &d2(&loc.omega).values()));
        total += loc.norm_form2(&lie.sub(&rhs));

        let lie = values(&lie_oneform(&lower_all(&x), &lower_all(&j_theta)));
        let x_jt = contract(&x, &j_theta);
        let d_x_jt = values(&d0(x_jt, loc.dim()));
        let x_djt = interior_2(&xv, &d1(&j_theta).values());
        let diff: Vec<f64> = (0..loc.dim()).map(|i| lie[i] - d_x_jt[i] - x_djt[i]).collect();
        total += loc.norm_oneform(&diff);
    }
    Ok(total)
}

/// `‖g(J·,J·) − g‖ + ‖J² + 1‖` (componentwise maxima).
fn residual_compat(c: &PointContext<'_>) -> Result<f64> {
    let j = c.loc.j_values();
    let jj = j.matmul(&j).add(&Square::identity(j.dim()));
    let square = jj.components().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(compatibility_residual(&c.loc.g_values(), &j) + square)
}

/// Frame orthonormality and frame-sum vs contraction for `Tr_ω` of
/// `ω`, `θ∧Jθ` and `dJθ`, plus `|Tr_ω ω − 2n|`.
fn residual_frame(c: &PointContext<'_>) -> Result<f64> {
    let loc = c.loc;
    let g = loc.g_values();
    let g_inv = loc.g_inv_values();
    let j = loc.j_values();
    let frame = loc.frame()?;
    let gram = frame.gram(&g).sub(&Square::identity(loc.dim()));
    let mut worst = gram.components().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let theta = values(&loc.theta);
    let j_theta = loc.j_theta();
    let omega = loc.omega.values().to_square();
    for eta in [
        omega.clone(),
        wedge_11(&theta, &values(&j_theta)).to_square(),
        d1(&j_theta).values().to_square(),
    ] {
        let tr = trace_omega(&eta, &g_inv, &j, &frame);
        worst = worst.max((tr.frame_sum - tr.contraction).abs());
    }
    let tr = trace_omega(&omega, &g_inv, &j, &frame);
    Ok(worst.max((tr.contraction - 2.0 * loc.n as f64).abs()))
}

/// `|recovered θ − θ|_g`.
fn residual_lee_form(c: &PointContext<'_>) -> Result<f64> {
    let recovered = lee_form(&c.model.structure, c.engine, &c.loc.point)?;
    let theta = values(&c.loc.theta);
    let diff: Vec<f64> = recovered.iter().zip(&theta).map(|(a, b)| a - b).collect();
    Ok(c.loc.norm_oneform(&diff))
}

fn residual_dilation(c: &PointContext<'_>) -> Result<f64> {
    Ok(dilation_residual(&c.model.structure, c.model.descriptor.a, &c.loc.point))
}

fn residual_omegavais(c: &PointContext<'_>) -> Result<f64> {
    Ok(residual_potential(c.loc))
}

fn deformation<'a>(c: &PointContext<'a>) -> Result<&'a crate::models::Deformation> {
    c.model
        .deformation
        .as_ref()
        .ok_or_else(|| Error::Unsupported("check needs a deformed model".into()))
}

fn residual_deform_lck(c: &PointContext<'_>) -> Result<f64> {
    let def = deformation(c)?;
    Ok(residual_deformed_lck(&def.base, def.profile, c.loc))
}

fn residual_norm_t(c: &PointContext<'_>) -> Result<f64> {
    let def = deformation(c)?;
    Ok(residual_deformed_lee_norm(&def.base, def.profile, c.loc))
}

fn residual_holo(c: &PointContext<'_>) -> Result<f64> {
    Ok(residual_holomorphic(c.loc, &c.loc.lee).max(residual_commutator(c.loc)))
}

fn residual_killing_jt(c: &PointContext<'_>) -> Result<f64> {
    Ok(residual_killing(c.loc, &c.loc.anti_lee()))
}

fn residual_killing_t(c: &PointContext<'_>) -> Result<f64> {
    Ok(residual_killing(c.loc, &c.loc.lee))
}

fn residual_vaisman_check(c: &PointContext<'_>) -> Result<f64> {
    Ok(residual_vaisman(c.loc))
}

fn residual_gauduchon_check(c: &PointContext<'_>) -> Result<f64> {
    Ok(residual_gauduchon(c.loc))
}

fn residual_potential_check(c: &PointContext<'_>) -> Result<f64> {
    Ok(residual_potential(c.loc))
}

fn residual_lck_check(c: &PointContext<'_>) -> Result<f64> {
    Ok(residual_lck(c.loc))
}

macro_rules! check {
    ($id:literal, $order:ident, $skip:expr, $residual:expr, $anchor:literal, $desc:literal) => {
        check!($id, $order, None, $skip, $residual, $anchor, $desc)
    };
    ($id:literal, $order:ident, $tol:expr, $skip:expr, $residual:expr, $anchor:literal, $desc:literal) => {
        IdentityCheck {
            id: $id,
            description: $desc,
            anchor: $anchor,
            order: Order::$order,
            tolerance: $tol,
            skip: $skip,
            residual: $residual,
        }
    };
}

/// Every check, in report order.
pub static REGISTRY: &[IdentityCheck] = &[
    check!("id_compat", Structural, always, residual_compat,
        "g(J·,J·) = g, J² = −1", "Hermitian compatibility of (g, J)"),
    check!("id_frame", Structural, Some(1e-10), always, residual_frame,
        "Tr_ω η = Σ η(e_i, Je_i) = g^{ac}J^b_c η_ab, Tr_ω ω = 2n", "frame independence of the ω-trace"),
    check!("id_dilation", Structural, needs_dilation, residual_dilation,
        "(x ↦ ax)^*(g, J, ω, θ) = (g, J, ω, θ)", "invariance under the Hopf dilation"),
    check!("id_metricity", First, Some(1e-10), always, residual_metricity,
        "∇g = 0", "Levi-Civita connection is metric"),
    check!("id_dd", First, always, residual_dd,
        "d∘d = 0 on θ, Jθ", "exterior derivative squares to zero"),
    check!("id_S", First, Some(1e-10), always, residual_s,
        "S = ∇θ symmetric, g(F·,·) = S", "symmetry of ∇θ and F = ∇T"),
    check!("id_cartan", First, always, residual_cartan,
        "L_X η = d(X⌟η) + X⌟dη", "Cartan formula for X ∈ {T, JT}, η ∈ {ω, Jθ}"),
    check!("id_lee_form", First, needs_recovery, residual_lee_form,
        "θ(X) = (1/(2n−2)) Σ dω(X, e_i, Je_i)", "Lee form recovered from (g, J) matches θ"),
    check!("id_lck", First, always, residual_lck_check,
        "dω = θ∧ω, dθ = 0", "the lcK condition"),
    check!("id_naj", First, always, residual_naj,
        "∇_X J = ½(X∧Jθ + JX∧θ), ∇_T J = 0", "covariant derivative of J"),
    check!("id_cgnt", First, always, residual_cgnt,
        "Σ(∇_{e_i}J)e_i = (n−1)JT, Σ(∇_{Je_i}J)e_i = −(n−1)T", "frame sums of ∇J"),
    check!("id_doi", First, always, residual_doi,
        "L_T g = 2S", "Lie derivative of g along T"),
    check!("id_e3", First, always, residual_e3,
        "L_T ω = 2ω(F·,·)", "Lie derivative of ω along T"),
    check!("id_e4", First, always, residual_e4,
        "dJθ = 2ω(F·,·) − |θ|²ω + θ∧Jθ", "exterior derivative of Jθ"),
    check!("id_lie_jtheta", First, always, residual_lie_jtheta,
        "L_T(Jθ) = Jd|θ|²", "Lie derivative of Jθ along T"),
    check!("id_djd", Second, always, residual_djd,
        "dJd|θ|² = 4ω(F²·,·) + 2ω(L_T F·,·) − T(|θ|²)ω − 2|θ|²ω(F·,·) + d|θ|²∧Jθ + θ∧Jd|θ|²",
        "second-order formula for dJd|θ|²"),
    check!("id_tr_i", First, always, residual_tr_i,
        "Tr_ω ω(A·,·) = Tr A", "ω-trace of ω(A·,·) for A ∈ {F, F², J}"),
    check!("id_tr_ii", First, always, residual_tr_ii,
        "Tr_ω(α∧β) = 2g(Jα, β)", "ω-trace of a wedge for (θ, Jθ), (θ, d|θ|²)"),
    check!("id_tr_iii", Second, always, residual_tr_iii,
        "Tr_ω(dJdh) = −2Δh + 2(1−n)T(h)", "ω-trace of dJdh for h ∈ {|θ|², ln r}"),
    check!("id_cinci", Second, always, residual_cinci,
        "Δ|θ|² + T(|θ|²) + |θ|²δθ + 2|∇θ|² − T(δθ) = 0", "scalar identity for |θ|²"),
    check!("id_trF", First, always, residual_tr_f,
        "Tr F = −δθ, Tr F² = |∇θ|²", "traces of F"),
    check!("id_omegavais", First, unit_lee_vaisman_only, residual_omegavais,
        "ω = θ∧Jθ − dJθ", "potential form of ω on Vaisman models with |θ| = 1"),
    check!("id_deform_lck", First, deformed_only, residual_deform_lck,
        "dω̄ = (1+f)θ∧ω̄", "the deformed structure is lcK with Lee form (1+f)θ"),
    check!("id_norm_T", First, deformed_only, residual_norm_t,
        "ḡ(T̄, T̄) = 1 + f, T̄ = T", "Lee field of the deformed metric"),
    check!("id_holo", First, always, residual_holo,
        "L_T J = 0, FJ = JF", "the Lee field is holomorphic"),
    check!("id_killing_JT", First, always, residual_killing_jt,
        "L_{JT} g = 0", "the anti-Lee field is Killing"),
    check!("id_killing_T", First, always, residual_killing_t,
        "L_T g = 0", "the Lee field is Killing"),
    check!("id_vaisman", First, always, residual_vaisman_check,
        "∇θ = 0", "Vaisman condition"),
    check!("id_gauduchon", First, always, residual_gauduchon_check,
        "δθ = 0", "Gauduchon condition"),
    check!("id_potential", First, needs_lee_form, residual_potential_check,
        "ω = θ∧Jθ − dJθ", "lcK potential condition"),
];

pub fn find_check(id: &str) -> Option<&'static IdentityCheck> {
    REGISTRY.iter().find(|c| c.id == id)
}

/// Checks that must fail on a model; a pass is a suite failure.
pub fn expected_failures(kind: ModelKind) -> &'static [&'static str] {
    match kind {
        ModelKind::HopfDeformed => &["id_vaisman", "id_gauduchon", "id_potential", "id_killing_T"],
        ModelKind::Flat | ModelKind::Hopf => &[],
    }
}

/// One row of a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub paper_anchor: String,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub witness: Vec<f64>,
}

impl CheckRecord {
    fn new(check: &IdentityCheck, verdict: CheckVerdict) -> Self {
        Self {
            id: check.id.to_string(),
            paper_anchor: check.anchor.to_string(),
            max_residual: verdict.max_residual,
            mean_residual: verdict.mean_residual,
            tolerance: verdict.tolerance,
            pass: verdict.pass,
            witness: verdict.witness,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SkippedCheck {
    pub id: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub model: crate::models::ModelDescriptor,
    pub engine: String,
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<CheckRecord>,
    pub expected_failures: Vec<String>,
    pub overall_pass: bool,
    #[serde(skip)]
    pub skipped: Vec<SkippedCheck>,
}

impl SuiteReport {
    pub fn check(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// Whether a record is in line with expectations: passes, or fails while
    /// being an expected failure.
    pub fn as_expected(&self, record: &CheckRecord) -> bool {
        record.pass != self.expected_failures.contains(&record.id)
    }

    /// Records whose verdict contradicts expectations.
    pub fn unexpected(&self) -> Vec<&CheckRecord> {
        self.checks.iter().filter(|c| !self.as_expected(c)).collect()
    }
}

/// Options of a suite run.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOptions {
    pub engine: Engine,
    pub samples: usize,
    pub seed: u64,
    /// Per-id tolerance replacements (already engine-adjusted).
    pub tolerance_overrides: BTreeMap<String, f64>,
    /// Restrict to these ids when non-empty.
    pub only: Vec<String>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            engine: Engine::AutoDiff,
            samples: 256,
            seed: 42,
            tolerance_overrides: BTreeMap::new(),
            only: Vec::new(),
        }
    }
}

/// Evaluates one check on explicit samples.
pub fn run_check(
    check: &IdentityCheck,
    model: &Model,
    engine: &Engine,
    samples: &[ChartPoint],
) -> Result<CheckVerdict> {
    if let Some(reason) = (check.skip)(model) {
        return Err(Error::Unsupported(format!("{} skipped: {reason}", check.id)));
    }
    let tol = tolerance(check, engine);
    crate::lck::run_pointwise(check.id, tol, &model.structure, engine, samples, |loc| {
        (check.residual)(&PointContext { model, engine, loc })
    })
}

/// Runs every applicable registry check over the model's seeded samples.
///
/// The local geometry is built once per sample; points are processed in
/// parallel and reduced in sample order, so reports are identical across runs.
pub fn run_suite(model: &Model, options: &SuiteOptions) -> Result<SuiteReport> {
    for id in options.only.iter().chain(options.tolerance_overrides.keys()) {
        if find_check(id).is_none() {
            return Err(Error::Config(format!("unknown check id `{id}`")));
        }
    }
    let engine = &options.engine;
    let samples = model.samples(options.samples, options.seed)?;
    let mut active = Vec::new();
    let mut skipped = Vec::new();
    for check in REGISTRY {
        if !options.only.is_empty() && !options.only.iter().any(|id| id == check.id) {
            continue;
        }
        match (check.skip)(model) {
            Some(reason) => skipped.push(SkippedCheck {
                id: check.id.to_string(),
                reason: reason.to_string(),
            }),
            None => active.push(check),
        }
    }

    let per_point: Vec<Vec<f64>> = samples
        .par_iter()
        .map(|p| {
            let loc = LocalGeometry::new(&model.structure, engine, p)?;
            let ctx = PointContext {
                model,
                engine,
                loc: &loc,
            };
            active.iter().map(|c| (c.residual)(&ctx)).collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;

    let checks: Vec<CheckRecord> = active
        .iter()
        .enumerate()
        .map(|(k, check)| {
            let tol = options
                .tolerance_overrides
                .get(check.id)
                .copied()
                .unwrap_or_else(|| tolerance(check, engine));
            let residuals: Vec<(ChartPoint, f64)> = samples
                .iter()
                .zip(&per_point)
                .map(|(p, r)| (p.clone(), r[k]))
                .collect();
            CheckRecord::new(check, CheckVerdict::from_residuals(check.id, tol, &residuals))
        })
        .collect();

    let expected: Vec<String> = expected_failures(model.descriptor.name)
        .iter()
        .filter(|id| checks.iter().any(|c| c.id == **id))
        .map(|id| id.to_string())
        .collect();
    let mut report = SuiteReport {
        model: model.descriptor,
        engine: engine.name().to_string(),
        seed: options.seed,
        samples: options.samples,
        checks,
        expected_failures: expected,
        overall_pass: false,
        skipped,
    };
    report.overall_pass = report.unexpected().is_empty();
    Ok(report)
}

/// The hypotheses and conclusion of the Vaisman criterion on one model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Hypotheses {
    pub holomorphic: bool,
    /// `max |θ| − min |θ|` over the samples.
    pub lee_norm_spread: f64,
    pub gauduchon: bool,
    pub potential: bool,
    pub vaisman: bool,
    pub max_codifferential: f64,
}

/// Holomorphic `T` with constant `|θ|` (within this bound) or `δθ = 0` forces Vaisman.
pub const CONSTANT_NORM_TOL: f64 = 1e-8;

impl Hypotheses {
    pub fn constant_norm(&self) -> bool {
        self.lee_norm_spread <= CONSTANT_NORM_TOL
    }

    /// `holomorphic ∧ (constant |θ| ∨ Gauduchon) ⇒ Vaisman`.
    pub fn criterion_consistent(&self) -> bool {
        !(self.holomorphic && (self.constant_norm() || self.gauduchon)) || self.vaisman
    }

    /// `holomorphic ∧ potential ⇒ Vaisman`.
    pub fn potential_consistent(&self) -> bool {
        !(self.holomorphic && self.potential) || self.vaisman
    }
}

/// Evaluates the hypotheses of the Vaisman criterion on a model's samples.
pub fn hypotheses(model: &Model, engine: &Engine, samples: &[ChartPoint]) -> Result<Hypotheses> {
    let verdict = |id: &str| -> Result<CheckVerdict> {
        let check = find_check(id).expect("registered id");
        run_check(check, model, engine, samples)
    };
    let norms: Vec<f64> = samples
        .par_iter()
        .map(|p| Ok(LocalGeometry::new(&model.structure, engine, p)?.theta_norm_sq().value.sqrt()))
        .collect::<Result<_>>()?;
    let max = norms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let gauduchon = verdict("id_gauduchon")?;
    let potential = match needs_lee_form(model) {
        Some(_) => false,
        None => verdict("id_potential")?.pass,
    };
    Ok(Hypotheses {
        holomorphic: verdict("id_holo")?.pass,
        lee_norm_spread: max - min,
        gauduchon: gauduchon.pass,
        potential,
        vaisman: verdict("id_vaisman")?.pass,
        max_codifferential: gauduchon.max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelDescriptor;

    #[test]
    fn registry_ids_are_unique() {
        let mut ids: Vec<&str> = REGISTRY.iter().map(|c| c.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), REGISTRY.len());
    }

    #[test]
    fn expected_failures_are_registered() {
        for kind in ModelKind::ALL {
            for id in expected_failures(kind) {
                assert!(find_check(id).is_some(), "{id}");
            }
        }
    }

    #[test]
    fn fd_loosens_derivative_checks_only() {
        let fd = Engine::finite_difference();
        assert_eq!(tolerance(find_check("id_compat").unwrap(), &fd), 1e-11);
        assert!((tolerance(find_check("id_djd").unwrap(), &fd) - 1e-5).abs() < 1e-18);
        assert_eq!(tolerance(find_check("id_lck").unwrap(), &Engine::AutoDiff), 1e-9);
    }

    #[test]
    fn unknown_override_is_a_config_error() {
        let model = ModelDescriptor::new(ModelKind::Flat, 2, 2.0).build(&Engine::AutoDiff).unwrap();
        let mut options = SuiteOptions {
            samples: 4,
            ..SuiteOptions::default()
        };
        options.tolerance_overrides.insert("id_nope".into(), 1.0);
        assert!(matches!(run_suite(&model, &options), Err(Error::Config(_))));
    }

    #[test]
    fn skipped_check_is_not_run() {
        let model = ModelDescriptor::new(ModelKind::Flat, 2, 2.0).build(&Engine::AutoDiff).unwrap();
        let samples = model.samples(2, 0).unwrap();
        assert!(run_check(find_check("id_norm_T").unwrap(), &model, &Engine::AutoDiff, &samples).is_err());
    }

    #[test]
    fn criterion_logic() {
        let h = Hypotheses {
            holomorphic: true,
            lee_norm_spread: 0.0,
            gauduchon: false,
            potential: false,
            vaisman: false,
            max_codifferential: 0.5,
        };
        assert!(!h.criterion_consistent());
        assert!(Hypotheses { vaisman: true, ..h }.criterion_consistent());
        assert!(Hypotheses { lee_norm_spread: 0.5, ..h }.criterion_consistent());
    }
}
