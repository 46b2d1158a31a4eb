//! Explicit models: flat `ℂⁿ`, the Hopf Vaisman structure on `ℂⁿ∖{0}`, the
//! radial profile and the deformation `ω̄ = ω + fθ∧Jθ`, plus the seeded sampler
//! of the fundamental domain `1 ≤ r ≤ a`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::connection::d0;
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::field::{
    radius_squared, ChartPoint, ComplexStructureField, ComponentFn, ConstantField, Domain, MetricField, OneFormField,
    ScalarField, TwoFormField,
};
use crate::jet::{Scalar, MAX_DIM};
use crate::lck::{residual_vaisman, LckStructure, LocalGeometry};
use crate::tensor::{self, j_on_oneform, values, wedge_11, wedge_12, Form2, Square};

/// Components of the standard complex structure on `ℝ²ⁿ` with interleaved
/// coordinates `(x₁, y₁, …)`: `J∂x_k = ∂y_k`, `J∂y_k = −∂x_k`.
pub fn standard_j(n: usize) -> Vec<f64> {
    let d = 2 * n;
    let mut j = vec![0.0; d * d];
    for k in 0..n {
        j[(2 * k + 1) * d + 2 * k] = 1.0;
        j[2 * k * d + 2 * k + 1] = -1.0;
    }
    j
}

fn check_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::Config(format!("complex dimension n = {n}, need n ≥ {min}")));
    }
    if 2 * n > MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: 2 * n,
            max: MAX_DIM,
        });
    }
    Ok(())
}

fn check_a(a: f64) -> Result<()> {
    if !(a > 1.0) || !a.is_finite() {
        return Err(Error::Config(format!("dilation factor a = {a}, need a > 1")));
    }
    Ok(())
}

/// Flat `ℂⁿ` with `θ = 0`.
pub fn flat_kahler(n: usize) -> Result<LckStructure> {
    check_n(n, 1)?;
    let d = 2 * n;
    let mut delta = vec![0.0; d * d];
    for i in 0..d {
        delta[i * d + i] = 1.0;
    }
    LckStructure::new(
        n,
        MetricField::new(ConstantField::new(d, delta))?,
        ComplexStructureField::new(ConstantField::new(d, standard_j(n)))?,
        OneFormField::new(ConstantField::new(d, vec![0.0; d]))?,
    )
}

/// `g = (4/r²) g_{ℂⁿ}`.
#[derive(Clone, Copy, Debug)]
pub struct HopfMetric {
    pub n: usize,
}

impl ComponentFn for HopfMetric {
    fn dim(&self) -> usize {
        2 * self.n
    }
    fn len(&self) -> usize {
        4 * self.n * self.n
    }
    fn domain(&self) -> Domain {
        Domain::PuncturedOrigin
    }
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let d = self.dim();
        let c = radius_squared(x).recip() * 4.0;
        let mut g = vec![S::zero(); d * d];
        for i in 0..d {
            g[i * d + i] = c;
        }
        g
    }
}

/// `θ = −2 dr/r`, i.e. `θ_i = −2x_i/r²`.
#[derive(Clone, Copy, Debug)]
pub struct HopfLeeForm {
    pub n: usize,
}

impl ComponentFn for HopfLeeForm {
    fn dim(&self) -> usize {
        2 * self.n
    }
    fn len(&self) -> usize {
        2 * self.n
    }
    fn domain(&self) -> Domain {
        Domain::PuncturedOrigin
    }
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let c = radius_squared(x).recip() * -2.0;
        x.iter().map(|&xi| xi * c).collect()
    }
}

/// The Hopf structure `(4r⁻²g_{ℂⁿ}, J, θ = −2dr/r)` on `ℂⁿ∖{0}`, invariant
/// under `x ↦ ax`.
pub fn hopf_structure(n: usize, a: f64) -> Result<LckStructure> {
    check_n(n, 2)?;
    check_a(a)?;
    LckStructure::new(
        n,
        MetricField::new(HopfMetric { n })?,
        ComplexStructureField::new(ConstantField::new(2 * n, standard_j(n)))?,
        OneFormField::new(HopfLeeForm { n })?,
    )
}

/// `f(r) = A·sin(2π ln r / ln a)`, periodic under `r ↦ ar`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub amplitude: f64,
    pub a: f64,
}

impl RadialProfile {
    pub fn new(amplitude: f64, a: f64) -> Result<Self> {
        check_a(a)?;
        if !amplitude.is_finite() {
            return Err(Error::Config(format!("profile amplitude {amplitude} is not finite")));
        }
        Ok(Self { amplitude, a })
    }

    /// `f` as a function of the radius.
    pub fn eval_radius<S: Scalar>(&self, r: S) -> S {
        (r.ln() * (2.0 * PI / self.a.ln())).sin() * self.amplitude
    }

    /// `f` as a function of the chart coordinates.
    pub fn eval<S: Scalar>(&self, x: &[S]) -> S {
        let ln_r = radius_squared(x).ln() * 0.5;
        (ln_r * (2.0 * PI / self.a.ln())).sin() * self.amplitude
    }

    /// `min f = −|A|`, attained on every fundamental domain.
    pub fn minimum(&self) -> f64 {
        -self.amplitude.abs()
    }

    pub fn field(&self, dim: usize) -> Result<ScalarField> {
        ScalarField::new(ProfileField { profile: *self, dim })
    }
}

struct ProfileField {
    profile: RadialProfile,
    dim: usize,
}

impl ComponentFn for ProfileField {
    fn dim(&self) -> usize {
        self.dim
    }
    fn len(&self) -> usize {
        1
    }
    fn domain(&self) -> Domain {
        Domain::PuncturedOrigin
    }
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        vec![self.profile.eval(x)]
    }
}

/// The deformed fields built from a base structure and a profile.
struct Deformed {
    base: LckStructure,
    profile: RadialProfile,
}

impl Deformed {
    fn base_parts<S: Scalar>(&self, x: &[S]) -> (Square<S>, Form2<S>, Vec<S>, S) {
        let d = self.base.dim();
        let j = Square::from_components(d, self.base.complex_structure().eval(x)).expect("shape checked");
        let omega = Form2::from_components(d, self.base.omega().eval(x)).expect("shape checked");
        let theta = self.base.theta().eval(x);
        (j, omega, theta, self.profile.eval(x))
    }

    /// `ω̄ = ω + fθ∧Jθ`.
    fn omega_bar<S: Scalar>(&self, x: &[S]) -> (Square<S>, Form2<S>) {
        let (j, omega, theta, f) = self.base_parts(x);
        let j_theta = j_on_oneform(&j, &theta);
        let bar = omega.add(&wedge_11(&theta, &j_theta).scale(f));
        (j, bar)
    }
}

struct DeformedMetric(Deformed);
struct DeformedLeeForm(Deformed);

impl ComponentFn for DeformedMetric {
    fn dim(&self) -> usize {
        self.0.base.dim()
    }
    fn len(&self) -> usize {
        self.dim() * self.dim()
    }
    fn domain(&self) -> Domain {
        self.0.base.domain().intersect(Domain::PuncturedOrigin)
    }
    /// `ḡ(X,Y) = ω̄(X, JY)`, i.e. `ḡ_ij = ω̄_ik J^k_j`.
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let d = self.dim();
        let (j, bar) = self.0.omega_bar(x);
        let mut g = Vec::with_capacity(d * d);
        for i in 0..d {
            for jj in 0..d {
                g.push((0..d).fold(S::zero(), |acc, k| acc + bar.get(i, k) * j.get(k, jj)));
            }
        }
        g
    }
}

impl ComponentFn for DeformedLeeForm {
    fn dim(&self) -> usize {
        self.0.base.dim()
    }
    fn len(&self) -> usize {
        self.dim()
    }
    fn domain(&self) -> Domain {
        self.0.base.domain().intersect(Domain::PuncturedOrigin)
    }
    /// `θ̄ = (1+f)θ`.
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let f = self.0.profile.eval(x);
        self.0.base.theta().eval(x).into_iter().map(|t| t * (f + 1.0)).collect()
    }
}

/// Largest accepted `‖df∧θ‖` and `‖∇θ‖`, `||θ| − 1|` at probe points.
pub const DEFORM_PRECONDITION_TOL: f64 = 1e-9;

/// `(ḡ, J, ω̄, (1+f)θ)` with `ω̄ = ω + fθ∧Jθ` and `ḡ = ω̄(·, J·)`.
///
/// The base must be Vaisman with `|θ| = 1`, `f > −1` and `df∧θ = 0`; all three
/// are checked at the probe points (and `f > −1` also from the profile range).
pub fn deform(
    base: &LckStructure,
    profile: RadialProfile,
    engine: &Engine,
    probes: &[ChartPoint],
) -> Result<LckStructure> {
    if profile.minimum() <= -1.0 {
        return Err(Error::Precondition(format!(
            "profile attains f = {} ≤ −1, so ḡ is not positive-definite",
            profile.minimum()
        )));
    }
    let f_field = profile.field(base.dim())?;
    for p in probes {
        let loc = LocalGeometry::new(base, engine, p)?;
        let vaisman = residual_vaisman(&loc);
        if !(vaisman <= DEFORM_PRECONDITION_TOL) {
            return Err(Error::Precondition(format!(
                "base is not Vaisman at {:?}: ‖∇θ‖ = {vaisman:e}",
                p.coords()
            )));
        }
        let norm = loc.theta_norm_sq().value.sqrt();
        if !((norm - 1.0).abs() <= DEFORM_PRECONDITION_TOL) {
            return Err(Error::Precondition(format!(
                "base Lee form has |θ| = {norm} ≠ 1 at {:?}",
                p.coords()
            )));
        }
        let f = engine.jets(f_field.as_field(), p)?[0];
        if !(f.value > -1.0) {
            return Err(Error::Precondition(format!("f = {} ≤ −1 at {:?}", f.value, p.coords())));
        }
        let df = d0(f, base.dim());
        let wedge = loc.norm_form2(&wedge_11(&values(&df), &values(&loc.theta)));
        if !(wedge <= DEFORM_PRECONDITION_TOL) {
            return Err(Error::Precondition(format!(
                "df∧θ = {wedge:e} ≠ 0 at {:?}",
                p.coords()
            )));
        }
    }
    let parts = || Deformed {
        base: base.clone(),
        profile,
    };
    LckStructure::new(
        base.n(),
        MetricField::new(DeformedMetric(parts()))?,
        base.complex_structure().clone(),
        OneFormField::new(DeformedLeeForm(parts()))?,
    )
}

/// `ω̄ = ω + fθ∧Jθ` directly, for comparison with the fundamental form of `(ḡ, J)`.
pub fn deformed_omega(base: &LckStructure, profile: RadialProfile) -> Result<TwoFormField> {
    TwoFormField::new(DeformedOmega(Deformed {
        base: base.clone(),
        profile,
    }))
}

struct DeformedOmega(Deformed);

impl ComponentFn for DeformedOmega {
    fn dim(&self) -> usize {
        self.0.base.dim()
    }
    fn len(&self) -> usize {
        crate::field::binomial(self.dim(), 2)
    }
    fn domain(&self) -> Domain {
        self.0.base.domain().intersect(Domain::PuncturedOrigin)
    }
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        self.0.omega_bar(x).1.components().to_vec()
    }
}

/// `ḡ = g + f(θ⊗θ + Jθ⊗Jθ)` at a point, the closed form of the deformed metric.
pub fn deformed_metric_closed_form(base: &LckStructure, profile: RadialProfile, p: &ChartPoint) -> Square<f64> {
    let x = p.coords();
    let d = base.dim();
    let g = Square::from_components(d, base.metric().eval(x)).expect("shape checked");
    let j = Square::from_components(d, base.complex_structure().eval(x)).expect("shape checked");
    let theta = base.theta().eval(x);
    let j_theta = j_on_oneform(&j, &theta);
    let f = profile.eval(x);
    g.add(&Square::from_fn(d, |a, b| {
        f * (theta[a] * theta[b] + j_theta[a] * j_theta[b])
    }))
}

/// `‖dω̄ − (1+f)θ∧ω̄‖` with `θ` the base Lee form.
pub fn residual_deformed_lck(base: &LckStructure, profile: RadialProfile, loc: &LocalGeometry) -> f64 {
    let x = loc.point.coords();
    let theta = base.theta().eval(x);
    let f = profile.eval(x);
    let rhs = wedge_12(&theta, &loc.omega.values()).scale(1.0 + f);
    let d_omega = crate::connection::d2(&loc.omega).values();
    loc.norm_form3(&d_omega.sub(&rhs))
}

/// `|ḡ(T̄,T̄) − (1+f)| + |T̄ − T|_ḡ`, where `T` is the base Lee field.
pub fn residual_deformed_lee_norm(base: &LckStructure, profile: RadialProfile, loc: &LocalGeometry) -> f64 {
    let x = loc.point.coords();
    let f = profile.eval(x);
    let lee_bar = values(&loc.lee);
    let norm_sq = tensor::vector_norm_sq(&loc.g_values(), &lee_bar);
    let g0 = Square::from_components(loc.dim(), base.metric().eval(x)).expect("shape checked");
    let lee0 = tensor::sharp(&g0.inverse().expect("base metric is non-degenerate"), &base.theta().eval(x));
    let diff: Vec<f64> = lee_bar.iter().zip(&lee0).map(|(a, b)| a - b).collect();
    (norm_sq - (1.0 + f)).abs() + loc.norm_vector(&diff)
}

/// Which explicit model to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Flat,
    Hopf,
    HopfDeformed,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Flat, ModelKind::Hopf, ModelKind::HopfDeformed];

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Flat => "flat",
            ModelKind::Hopf => "hopf",
            ModelKind::HopfDeformed => "hopf-deformed",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown model `{s}` (expected flat, hopf or hopf-deformed)")))
    }
}

/// Parameters of a model; `a` also bounds the sampled annulus `1 ≤ r ≤ a` for
/// the flat model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub name: ModelKind,
    pub n: usize,
    pub a: f64,
    pub amplitude: f64,
}

impl Default for ModelDescriptor {
    fn default() -> Self {
        Self {
            name: ModelKind::Hopf,
            n: 2,
            a: (2.0 * PI).exp(),
            amplitude: 0.5,
        }
    }
}

impl ModelDescriptor {
    pub fn new(name: ModelKind, n: usize, a: f64) -> Self {
        Self {
            name,
            n,
            a,
            ..Self::default()
        }
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// Builds the model, checking the deformation preconditions at a few
    /// deterministic probe points.
    pub fn build(&self, engine: &Engine) -> Result<Model> {
        check_a(self.a)?;
        match self.name {
            ModelKind::Flat => Ok(Model {
                descriptor: *self,
                structure: flat_kahler(self.n)?,
                deformation: None,
            }),
            ModelKind::Hopf => Ok(Model {
                descriptor: *self,
                structure: hopf_structure(self.n, self.a)?,
                deformation: None,
            }),
            ModelKind::HopfDeformed => {
                let base = hopf_structure(self.n, self.a)?;
                let profile = RadialProfile::new(self.amplitude, self.a)?;
                let probes = sample_annulus(self.dim(), self.a, 8, 0)?;
                let structure = deform(&base, profile, engine, &probes)?;
                Ok(Model {
                    descriptor: *self,
                    structure,
                    deformation: Some(Deformation { base, profile }),
                })
            }
        }
    }
}

/// The base structure and profile of a deformed model.
#[derive(Clone, Debug)]
pub struct Deformation {
    pub base: LckStructure,
    pub profile: RadialProfile,
}

#[derive(Clone, Debug)]
pub struct Model {
    pub descriptor: ModelDescriptor,
    pub structure: LckStructure,
    pub deformation: Option<Deformation>,
}

impl Model {
    /// Whether the structure is invariant under `x ↦ ax` (true of both Hopf models).
    pub fn is_dilation_invariant(&self) -> bool {
        self.descriptor.name != ModelKind::Flat
    }

    pub fn samples(&self, count: usize, seed: u64) -> Result<Vec<ChartPoint>> {
        sample_annulus(self.structure.dim(), self.descriptor.a, count, seed)
    }
}

/// `max` over components of `|a²g(ap) − g(p)|`, `|aθ(ap) − θ(p)|`,
/// `|a²ω(ap) − ω(p)|` and `|J(ap) − J(p)|`: the pullback under `x ↦ ax`.
pub fn dilation_residual(s: &LckStructure, a: f64, p: &ChartPoint) -> f64 {
    let q = p.scaled(a);
    let (x, y) = (p.coords(), q.coords());
    let pairs: [(Vec<f64>, Vec<f64>, f64); 4] = [
        (s.metric().eval(x), s.metric().eval(y), a * a),
        (s.theta().eval(x), s.theta().eval(y), a),
        (s.omega().eval(x), s.omega().eval(y), a * a),
        (s.complex_structure().eval(x), s.complex_structure().eval(y), 1.0),
    ];
    pairs
        .iter()
        .flat_map(|(at_p, at_q, w)| at_p.iter().zip(at_q).map(move |(u, v)| (w * v - u).abs()))
        .fold(0.0, f64::max)
}

const PRIMES: [u64; MAX_DIM + 1] = [2, 3, 5, 7, 11, 13, 17, 19, 23];

fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut acc = 0.0;
    while index > 0 {
        acc += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    acc
}

/// Smallest accepted `|x_i|` of a sample.
pub const COORDINATE_CLEARANCE: f64 = 1e-6;

/// `count` deterministic points of the annulus `1 ≤ r ≤ a` in `ℝ^dim`.
///
/// A Halton sequence with a seeded Cranley–Patterson shift drives `ln r`
/// (uniform on `[0, ln a]`) and a Box–Muller direction. Points with a
/// coordinate closer than `1e-6` to zero are skipped.
pub fn sample_annulus(dim: usize, a: f64, count: usize, seed: u64) -> Result<Vec<ChartPoint>> {
    check_a(a)?;
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::DimensionTooLarge { dim, max: MAX_DIM });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..=dim).map(|_| rng.random::<f64>()).collect();
    let coords_dim = dim + dim % 2;
    let ln_a = a.ln();
    let mut out = Vec::with_capacity(count);
    let mut index = 1u64;
    while out.len() < count {
        let u: Vec<f64> = (0..=dim)
            .map(|k| (radical_inverse(index, PRIMES[k]) + shift[k]).fract())
            .collect();
        index += 1;
        let mut normals = Vec::with_capacity(coords_dim);
        for pair in 0..coords_dim / 2 {
            let u1 = 1.0 - u[1 + 2 * pair];
            let u2 = u.get(2 + 2 * pair).copied().unwrap_or(0.5);
            let rho = (-2.0 * u1.ln()).sqrt();
            normals.push(rho * (2.0 * PI * u2).cos());
            normals.push(rho * (2.0 * PI * u2).sin());
        }
        normals.truncate(dim);
        let norm = normals.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            continue;
        }
        let r = (u[0] * ln_a).exp();
        let x: Vec<f64> = normals.iter().map(|v| v * r / norm).collect();
        if x.iter().any(|v| v.abs() < COORDINATE_CLEARANCE) {
            continue;
        }
        out.push(ChartPoint::new(x)?);
    }
    Ok(out)
}

/// The point `r·(1, 1, …)/√dim`.
pub fn diagonal_point(dim: usize, r: f64) -> Result<ChartPoint> {
    ChartPoint::new(vec![r / (dim as f64).sqrt(); dim])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lck::residual_lck;

    const A: f64 = 535.4916555247646; // e^{2π}

    #[test]
    fn standard_j_squares_to_minus_identity() {
        let j = Square::from_components(4, standard_j(2)).unwrap();
        let jj = j.matmul(&j);
        assert_eq!(jj, Square::identity(4).scale(-1.0));
        assert_eq!(j.get(1, 0), 1.0);
    }

    #[test]
    fn profile_at_quarter_period() {
        let f = RadialProfile::new(0.5, A).unwrap();
        assert!((f.eval_radius(A.powf(0.25)) - 0.5).abs() < 1e-12);
        assert!(f.eval_radius(1.0).abs() < 1e-15);
    }

    #[test]
    fn profile_is_dilation_periodic() {
        let f = RadialProfile::new(0.5, 2.0).unwrap();
        for k in 0..64 {
            let r = 1.0 + k as f64 / 64.0;
            assert!((f.eval_radius(2.0 * r) - f.eval_radius(r)).abs() < 1e-12);
        }
    }

    #[test]
    fn hopf_omega_at_unit_point() {
        let s = hopf_structure(2, A).unwrap();
        let omega = s.omega().eval(&[1.0, 0.0, 0.0, 0.0]);
        let expected = Form2::from_fn(4, |i, j| match (i, j) {
            (0, 1) | (2, 3) => 4.0,
            _ => 0.0,
        });
        assert_eq!(omega, expected.components());
    }

    #[test]
    fn deform_rejects_large_amplitude() {
        let base = hopf_structure(2, A).unwrap();
        let probes = sample_annulus(4, A, 4, 0).unwrap();
        let profile = RadialProfile::new(1.0, A).unwrap();
        assert!(matches!(
            deform(&base, profile, &Engine::AutoDiff, &probes),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn deform_rejects_non_vaisman_base() {
        let base = hopf_structure(2, A).unwrap();
        let probes = sample_annulus(4, A, 4, 0).unwrap();
        let profile = RadialProfile::new(0.5, A).unwrap();
        let once = deform(&base, profile, &Engine::AutoDiff, &probes).unwrap();
        assert!(deform(&once, profile, &Engine::AutoDiff, &probes).is_err());
    }

    #[test]
    fn deformed_structure_is_lck() {
        let model = ModelDescriptor::new(ModelKind::HopfDeformed, 2, A).build(&Engine::AutoDiff).unwrap();
        for p in model.samples(16, 3).unwrap() {
            let loc = LocalGeometry::new(&model.structure, &Engine::AutoDiff, &p).unwrap();
            assert!(residual_lck(&loc) < 1e-9);
        }
    }

    #[test]
    fn flat_requires_positive_n_and_hopf_requires_two() {
        assert!(flat_kahler(0).is_err());
        assert!(flat_kahler(1).is_ok());
        assert!(hopf_structure(1, 2.0).is_err());
        assert!(hopf_structure(2, 1.0).is_err());
        assert!(hopf_structure(5, 2.0).is_err());
    }

    #[test]
    fn sampler_is_deterministic_and_in_annulus() {
        let a = sample_annulus(6, 2.0, 100, 7).unwrap();
        let b = sample_annulus(6, 2.0, 100, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_annulus(6, 2.0, 100, 8).unwrap());
        for p in &a {
            let r = p.radius();
            assert!((1.0 - 1e-12..=2.0 + 1e-12).contains(&r));
            assert!(p.coords().iter().all(|x| x.abs() >= COORDINATE_CLEARANCE));
        }
    }

    #[test]
    fn model_kind_round_trips_through_text() {
        for k in ModelKind::ALL {
            assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
        }
        assert!("torus".parse::<ModelKind>().is_err());
    }
}
