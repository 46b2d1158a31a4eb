//! Hermitian structures `(g, J)` with their fundamental form and Lee form, the
//! per-point evaluation of every derived quantity, and the lcK predicate
//! checkers.

use rayon::prelude::*;
use serde::Serialize;

use crate::connection::{
    christoffel, codifferential, d1, d2, lie_bilinear, lie_endo, metric_jets, nabla_oneform, nabla_vector, Christoffel,
};
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::field::{
    binomial, ChartPoint, ComplexStructureField, ComponentFn, Domain, EndoField, MetricField, OneFormField,
    TwoFormField, VectorField,
};
use crate::jet::{Jet1, Jet2, Scalar, MAX_DIM};
use crate::tensor::{
    self, bilinear_norm_sq, covector_norm_sq, endo_norm_sq, form2_norm_sq, form3_norm_sq, j_on_oneform, lower_all,
    orthonormal_frame, values, wedge_11, wedge_12, Form2, OrthonormalFrame, Square,
};

/// `ω(X,Y) = g(JX,Y)`, i.e. `ω_ij = J^k_i g_kj`, antisymmetrized.
pub fn fundamental_form(g: &MetricField, j: &ComplexStructureField) -> Result<TwoFormField> {
    if g.dim() != j.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: j.dim(),
        });
    }
    TwoFormField::new(FundamentalForm {
        g: g.clone(),
        j: j.clone(),
    })
}

struct FundamentalForm {
    g: MetricField,
    j: ComplexStructureField,
}

impl ComponentFn for FundamentalForm {
    fn dim(&self) -> usize {
        self.g.dim()
    }
    fn len(&self) -> usize {
        binomial(self.g.dim(), 2)
    }
    fn domain(&self) -> Domain {
        self.g.domain().intersect(self.j.domain())
    }
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let d = self.dim();
        let g = Square::from_components(d, self.g.eval(x)).expect("shape checked");
        let j = Square::from_components(d, self.j.eval(x)).expect("shape checked");
        let b = Square::from_fn(d, |a, b| {
            (0..d).fold(S::zero(), |acc, k| acc + j.get(k, a) * g.get(k, b))
        });
        Form2::antisymmetrize(&b).components().to_vec()
    }
}

/// `max |g(J∂_i, J∂_j) − g_ij|`.
pub fn compatibility_residual(g: &Square<f64>, j: &Square<f64>) -> f64 {
    let pulled = j.transpose().matmul(g).matmul(j);
    pulled
        .components()
        .iter()
        .zip(g.components())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Threshold above which `(g, J)` is rejected as non-Hermitian.
pub const COMPATIBILITY_LIMIT: f64 = 1e-8;

/// A Hermitian structure `(g, J, ω, θ)` on a chart of real dimension `2n`.
#[derive(Clone, Debug)]
pub struct LckStructure {
    n: usize,
    g: MetricField,
    j: ComplexStructureField,
    omega: TwoFormField,
    theta: OneFormField,
}

impl LckStructure {
    /// Assembles the structure; `ω` is built from `(g, J)`.
    pub fn new(n: usize, g: MetricField, j: ComplexStructureField, theta: OneFormField) -> Result<Self> {
        let dim = 2 * n;
        if n == 0 || dim > MAX_DIM {
            return Err(Error::DimensionTooLarge { dim, max: MAX_DIM });
        }
        for found in [g.dim(), j.dim(), theta.dim()] {
            if found != dim {
                return Err(Error::DimensionMismatch { expected: dim, found });
            }
        }
        let omega = fundamental_form(&g, &j)?;
        Ok(Self { n, g, j, omega, theta })
    }

    /// Complex dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Real dimension `2n`.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn metric(&self) -> &MetricField {
        &self.g
    }

    pub fn complex_structure(&self) -> &ComplexStructureField {
        &self.j
    }

    pub fn omega(&self) -> &TwoFormField {
        &self.omega
    }

    pub fn theta(&self) -> &OneFormField {
        &self.theta
    }

    /// The Lee vector field `T = θ^♯`.
    pub fn lee_vector_field(&self) -> Result<VectorField> {
        tensor::sharp_field(&self.g, &self.theta)
    }

    /// The anti-Lee vector field `JT`.
    pub fn anti_lee_vector_field(&self) -> Result<VectorField> {
        VectorField::new(ApplyEndo {
            a: self.j.as_endo(),
            x: self.lee_vector_field()?,
        })
    }

    pub fn domain(&self) -> Domain {
        self.g
            .domain()
            .intersect(self.j.domain())
            .intersect(self.theta.domain())
    }

    /// Verifies the Hermitian and lcK invariants at the probe points.
    pub fn validate(&self, engine: &Engine, probes: &[ChartPoint]) -> Result<()> {
        for p in probes {
            let g = Square::from_components(self.dim(), engine.values(self.g.as_field(), p)?)?;
            let j = Square::from_components(self.dim(), engine.values(self.j.as_field(), p)?)?;
            let residual = compatibility_residual(&g, &j);
            if !(residual <= COMPATIBILITY_LIMIT) {
                return Err(Error::Incompatible { residual });
            }
            let loc = LocalGeometry::new(self, engine, p)?;
            let lck = residual_lck(&loc);
            if !(lck <= 1e-9) {
                return Err(Error::Precondition(format!(
                    "structure is not lcK at {:?}: |dω − θ∧ω| + |dθ| = {lck:e}",
                    p.coords()
                )));
            }
        }
        Ok(())
    }
}

struct ApplyEndo {
    a: EndoField,
    x: VectorField,
}

impl ComponentFn for ApplyEndo {
    fn dim(&self) -> usize {
        self.x.dim()
    }
    fn len(&self) -> usize {
        self.x.dim()
    }
    fn domain(&self) -> Domain {
        self.a.domain().intersect(self.x.domain())
    }
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let a = Square::from_components(self.dim(), self.a.eval(x)).expect("shape checked");
        a.apply(&self.x.eval(x))
    }
}

/// Every quantity the checks need at one point, as jets of the base fields.
///
/// Built once per sample point; nothing is shared between points.
#[derive(Clone, Debug)]
pub struct LocalGeometry {
    pub point: ChartPoint,
    pub n: usize,
    pub g: Square<Jet2>,
    pub g_inv: Square<Jet2>,
    pub j: Square<Jet2>,
    pub omega: Form2<Jet2>,
    pub theta: Vec<Jet2>,
    /// `T = θ^♯`.
    pub lee: Vec<Jet2>,
    pub gamma: Christoffel<Jet1>,
    /// `S = ∇θ`, `S_ij = (∇_{∂_i}θ)(∂_j)`.
    pub s: Square<Jet1>,
    /// `F = ∇T` as an endomorphism.
    pub f: Square<Jet1>,
}

impl LocalGeometry {
    pub fn new(structure: &LckStructure, engine: &Engine, p: &ChartPoint) -> Result<Self> {
        let d = structure.dim();
        if p.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: p.dim(),
            });
        }
        let g = metric_jets(engine, &structure.g, p)?;
        let g_inv = g.inverse()?;
        let j = Square::from_components(d, engine.jets(structure.j.as_field(), p)?)?;
        let omega = Form2::from_components(d, engine.jets(structure.omega.as_field(), p)?)?;
        let theta = engine.jets(structure.theta.as_field(), p)?;
        let lee = tensor::sharp(&g_inv, &theta);
        let gamma = christoffel(&g, &g_inv);
        let s = nabla_oneform(&gamma, &theta);
        let f = nabla_vector(&gamma, &lee);
        Ok(Self {
            point: p.clone(),
            n: structure.n(),
            g,
            g_inv,
            j,
            omega,
            theta,
            lee,
            gamma,
            s,
            f,
        })
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn g_values(&self) -> Square<f64> {
        self.g.values()
    }

    pub fn g_inv_values(&self) -> Square<f64> {
        self.g_inv.values()
    }

    pub fn j_values(&self) -> Square<f64> {
        self.j.values()
    }

    /// `|θ|²` as an order-2 jet.
    pub fn theta_norm_sq(&self) -> Jet2 {
        self.g_inv.pair(&self.theta, &self.theta)
    }

    /// `Jθ`.
    pub fn j_theta(&self) -> Vec<Jet2> {
        j_on_oneform(&self.j, &self.theta)
    }

    /// `JT`.
    pub fn anti_lee(&self) -> Vec<Jet2> {
        self.j.apply(&self.lee)
    }

    /// `δθ = −g^{ij}(∇θ)_ij` with one derivative to spare.
    pub fn delta_theta(&self) -> Jet1 {
        codifferential(&self.g_inv.lower(), &self.gamma, &self.theta)
    }

    pub fn frame(&self) -> Result<OrthonormalFrame> {
        orthonormal_frame(&self.g_values())
    }

    /// `∇_{∂_k}J` for every coordinate direction `k`.
    pub fn nabla_j(&self) -> Vec<Square<f64>> {
        crate::connection::nabla_endo(&self.gamma.values(), &self.j.lower())
    }

    pub fn norm_oneform(&self, alpha: &[f64]) -> f64 {
        covector_norm_sq(&self.g_inv_values(), alpha).max(0.0).sqrt()
    }

    pub fn norm_vector(&self, x: &[f64]) -> f64 {
        tensor::vector_norm_sq(&self.g_values(), x).max(0.0).sqrt()
    }

    pub fn norm_form2(&self, eta: &Form2<f64>) -> f64 {
        form2_norm_sq(&self.g_inv_values(), eta).max(0.0).sqrt()
    }

    pub fn norm_form3(&self, eta: &tensor::Form3<f64>) -> f64 {
        form3_norm_sq(&self.g_inv_values(), eta).max(0.0).sqrt()
    }

    pub fn norm_bilinear(&self, b: &Square<f64>) -> f64 {
        bilinear_norm_sq(&self.g_inv_values(), b).max(0.0).sqrt()
    }

    pub fn norm_endo(&self, a: &Square<f64>) -> f64 {
        endo_norm_sq(&self.g_values(), &self.g_inv_values(), a).max(0.0).sqrt()
    }
}

/// `‖dω − θ∧ω‖ + ‖dθ‖`.
pub fn residual_lck(loc: &LocalGeometry) -> f64 {
    let d_omega = d2(&loc.omega).values();
    let theta = values(&loc.theta);
    let wedge = wedge_12(&theta, &loc.omega.values());
    let d_theta = d1(&loc.theta).values();
    loc.norm_form3(&d_omega.sub(&wedge)) + loc.norm_form2(&d_theta)
}

/// `‖∇θ‖`.
pub fn residual_vaisman(loc: &LocalGeometry) -> f64 {
    loc.norm_bilinear(&loc.s.values())
}

/// `|δθ|`.
pub fn residual_gauduchon(loc: &LocalGeometry) -> f64 {
    loc.delta_theta().value.abs()
}

/// `‖ω − θ∧Jθ + dJθ‖`.
pub fn residual_potential(loc: &LocalGeometry) -> f64 {
    let theta = values(&loc.theta);
    let j_theta = loc.j_theta();
    let d_j_theta = d1(&j_theta).values();
    let eta = loc
        .omega
        .values()
        .sub(&wedge_11(&theta, &values(&j_theta)))
        .add(&d_j_theta);
    loc.norm_form2(&eta)
}

/// `‖L_X J‖` for a vector field given by its jets.
pub fn residual_holomorphic(loc: &LocalGeometry, x: &[Jet2]) -> f64 {
    let lie = lie_endo(&lower_all(x), &loc.j.lower());
    loc.norm_endo(&lie)
}

/// `‖FJ − JF‖` with `F = ∇T`.
pub fn residual_commutator(loc: &LocalGeometry) -> f64 {
    let f = loc.f.values();
    loc.norm_endo(&f.commutator(&loc.j_values()))
}

/// `‖L_X g‖`.
pub fn residual_killing(loc: &LocalGeometry, x: &[Jet2]) -> f64 {
    let lie = lie_bilinear(&lower_all(x), &loc.g.lower());
    loc.norm_bilinear(&lie)
}

/// The Lee form recovered from `(g, J)` alone:
/// `θ(X) = (1/(2n−2)) Σ_i dω(X, e_i, Je_i) = dω_{kab} g^{ac} J^b_c / (2n−2)`.
pub fn lee_form(structure: &LckStructure, engine: &Engine, p: &ChartPoint) -> Result<Vec<f64>> {
    let n = structure.n();
    if n < 2 {
        return Err(Error::Unsupported(
            "Lee form recovery needs complex dimension n ≥ 2".into(),
        ));
    }
    let d = structure.dim();
    let g = metric_jets(engine, structure.metric(), p)?;
    let g_inv = g.values().inverse()?;
    let j = Square::from_components(d, engine.values(structure.complex_structure().as_field(), p)?)?;
    let omega = Form2::from_components(d, engine.jets(structure.omega().as_field(), p)?)?;
    let d_omega = d2(&omega).values();
    let scale = 1.0 / (2.0 * n as f64 - 2.0);
    Ok((0..d)
        .map(|k| {
            let mut acc = 0.0;
            for a in 0..d {
                for b in 0..d {
                    for c in 0..d {
                        acc += d_omega.get(k, a, b) * g_inv.get(a, c) * j.get(b, c);
                    }
                }
            }
            acc * scale
        })
        .collect())
}

/// Outcome of one residual check over a sample set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckVerdict {
    pub name: String,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Chart coordinates of the sample attaining `max_residual`.
    pub witness: Vec<f64>,
}

impl CheckVerdict {
    /// Reduces per-point residuals in sample order; ties keep the earliest
    /// point, and a non-finite residual is always the maximum.
    pub fn from_residuals(name: impl Into<String>, tolerance: f64, residuals: &[(ChartPoint, f64)]) -> Self {
        let mut max = 0.0f64;
        let mut witness: Option<&ChartPoint> = None;
        let mut sum = 0.0;
        for (p, r) in residuals {
            sum += r;
            let worse = match witness {
                None => true,
                Some(_) if max.is_nan() => false,
                Some(_) => r.is_nan() || *r > max,
            };
            if worse {
                max = *r;
                witness = Some(p);
            }
        }
        let mean = if residuals.is_empty() {
            0.0
        } else {
            sum / residuals.len() as f64
        };
        Self {
            name: name.into(),
            max_residual: max,
            mean_residual: mean,
            tolerance,
            pass: max <= tolerance,
            witness: witness.map(|p| p.coords().to_vec()).unwrap_or_default(),
        }
    }
}

/// Evaluates a residual at every sample (in parallel) and reduces in order.
pub fn run_pointwise(
    name: &str,
    tolerance: f64,
    structure: &LckStructure,
    engine: &Engine,
    samples: &[ChartPoint],
    residual: impl Fn(&LocalGeometry) -> Result<f64> + Sync,
) -> Result<CheckVerdict> {
    let residuals: Vec<(ChartPoint, f64)> = samples
        .par_iter()
        .map(|p| {
            let loc = LocalGeometry::new(structure, engine, p)?;
            Ok((p.clone(), residual(&loc)?))
        })
        .collect::<Result<_>>()?;
    Ok(CheckVerdict::from_residuals(name, tolerance, &residuals))
}

/// Default tolerance for first-derivative identities under automatic differentiation.
pub const FIRST_ORDER_TOL: f64 = 1e-9;

pub fn check_lck(s: &LckStructure, engine: &Engine, samples: &[ChartPoint]) -> Result<CheckVerdict> {
    run_pointwise("lck", FIRST_ORDER_TOL * engine.tolerance_factor(), s, engine, samples, |l| {
        Ok(residual_lck(l))
    })
}

pub fn check_vaisman(s: &LckStructure, engine: &Engine, samples: &[ChartPoint]) -> Result<CheckVerdict> {
    run_pointwise("vaisman", FIRST_ORDER_TOL * engine.tolerance_factor(), s, engine, samples, |l| {
        Ok(residual_vaisman(l))
    })
}

pub fn check_gauduchon(s: &LckStructure, engine: &Engine, samples: &[ChartPoint]) -> Result<CheckVerdict> {
    run_pointwise("gauduchon", FIRST_ORDER_TOL * engine.tolerance_factor(), s, engine, samples, |l| {
        Ok(residual_gauduchon(l))
    })
}

pub fn check_potential(s: &LckStructure, engine: &Engine, samples: &[ChartPoint]) -> Result<CheckVerdict> {
    run_pointwise("potential", FIRST_ORDER_TOL * engine.tolerance_factor(), s, engine, samples, |l| {
        Ok(residual_potential(l))
    })
}

/// Which vector field a holomorphy or Killing check is about.
#[derive(Clone, Debug)]
pub enum VectorChoice {
    /// `T = θ^♯`; holomorphy also cross-checks `‖[F, J]‖`.
    Lee,
    /// `JT`.
    AntiLee,
    Custom(VectorField),
}

fn vector_jets(loc: &LocalGeometry, choice: &VectorChoice, engine: &Engine) -> Result<Vec<Jet2>> {
    match choice {
        VectorChoice::Lee => Ok(loc.lee.clone()),
        VectorChoice::AntiLee => Ok(loc.anti_lee()),
        VectorChoice::Custom(x) => engine.jets(x.as_field(), &loc.point),
    }
}

/// `‖L_X J‖`, and for the Lee field also `‖[F, J]‖` (both must vanish together).
pub fn check_holomorphic(
    s: &LckStructure,
    x: &VectorChoice,
    engine: &Engine,
    samples: &[ChartPoint],
) -> Result<CheckVerdict> {
    run_pointwise("holomorphic", FIRST_ORDER_TOL * engine.tolerance_factor(), s, engine, samples, |l| {
        let lie = residual_holomorphic(l, &vector_jets(l, x, engine)?);
        Ok(match x {
            VectorChoice::Lee => lie.max(residual_commutator(l)),
            _ => lie,
        })
    })
}

/// `‖L_X g‖`.
pub fn check_killing(
    s: &LckStructure,
    x: &VectorChoice,
    engine: &Engine,
    samples: &[ChartPoint],
) -> Result<CheckVerdict> {
    run_pointwise("killing", FIRST_ORDER_TOL * engine.tolerance_factor(), s, engine, samples, |l| {
        Ok(residual_killing(l, &vector_jets(l, x, engine)?))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_reduction_is_order_stable() {
        let pts: Vec<ChartPoint> = (0..4)
            .map(|k| ChartPoint::new(vec![k as f64, 1.0]).unwrap())
            .collect();
        let residuals = vec![
            (pts[0].clone(), 0.1),
            (pts[1].clone(), 0.3),
            (pts[2].clone(), 0.3),
            (pts[3].clone(), 0.2),
        ];
        let v = CheckVerdict::from_residuals("x", 0.25, &residuals);
        assert_eq!(v.max_residual, 0.3);
        assert_eq!(v.witness, vec![1.0, 1.0]);
        assert!(!v.pass);
        assert!((v.mean_residual - 0.225).abs() < 1e-15);
    }

    #[test]
    fn nan_residual_fails() {
        let p = ChartPoint::new(vec![0.0, 1.0]).unwrap();
        let q = ChartPoint::new(vec![2.0, 1.0]).unwrap();
        let v = CheckVerdict::from_residuals("x", 1.0, &[(p, 0.5), (q, f64::NAN)]);
        assert!(!v.pass);
        assert_eq!(v.witness, vec![2.0, 1.0]);
    }

    #[test]
    fn pass_iff_max_within_tolerance() {
        let p = ChartPoint::new(vec![0.0, 1.0]).unwrap();
        assert!(CheckVerdict::from_residuals("x", 0.5, &[(p.clone(), 0.5)]).pass);
        assert!(!CheckVerdict::from_residuals("x", 0.5, &[(p, 0.5000001)]).pass);
    }
}
