//! Levi-Civita connection and the first/second order differential operators.
//!
//! Every operator takes jets at some order and returns the result one order
//! lower: feed it [`Jet2`](crate::jet::Jet2) components and it hands back
//! [`Jet1`](crate::jet::Jet1) results that can be differentiated once more;
//! feed it `Jet1` and it returns plain values. Second derivatives of derived
//! quantities (`∂F` with `F = ∇T`, say) are therefore always obtained by jet
//! composition.

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::field::{ChartPoint, MetricField, OneFormField, ScalarField};
use crate::jet::{Differentiable, Jet1, Jet2, Scalar};
use crate::tensor::{lower_all, partial_all, DiffForm, Form2, Form3, Square};

/// Christoffel symbols `Γ^k_ij`, indexed `[k][i][j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel<S> {
    dim: usize,
    data: Vec<S>,
}

impl<S: Scalar> Christoffel<S> {
    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> S {
        self.data[(k * self.dim + i) * self.dim + j]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> Christoffel<f64> {
        Christoffel {
            dim: self.dim,
            data: self.data.iter().map(|s| s.value()).collect(),
        }
    }
}

impl<S: Differentiable> Christoffel<S> {
    pub fn lower(&self) -> Christoffel<S::Lower> {
        Christoffel {
            dim: self.dim,
            data: self.data.iter().map(|s| s.lower()).collect(),
        }
    }
}

/// `Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)`.
///
/// Only `i ≤ j` is computed; the other half is mirrored, so torsion-freeness
/// holds exactly.
pub fn christoffel<J: Differentiable>(g: &Square<J>, g_inv: &Square<J>) -> Christoffel<J::Lower> {
    let d = g.dim();
    // dg[(m * d + i) * d + j] = ∂_m g_ij
    let mut dg = Vec::with_capacity(d * d * d);
    for m in 0..d {
        for i in 0..d {
            for j in 0..d {
                dg.push(g.get(i, j).partial(m));
            }
        }
    }
    let dgi = |m: usize, i: usize, j: usize| dg[(m * d + i) * d + j];
    let g_inv = g_inv.lower();
    let mut data = vec![J::Lower::zero(); d * d * d];
    for k in 0..d {
        for i in 0..d {
            for j in i..d {
                let mut acc = J::Lower::zero();
                for l in 0..d {
                    acc += g_inv.get(k, l) * (dgi(i, j, l) + dgi(j, i, l) - dgi(l, i, j));
                }
                let value = acc * 0.5;
                data[(k * d + i) * d + j] = value;
                data[(k * d + j) * d + i] = value;
            }
        }
    }
    Christoffel { dim: d, data }
}

/// Christoffel symbols of a metric field at a point.
pub fn christoffel_at(engine: &Engine, g: &MetricField, p: &ChartPoint) -> Result<Christoffel<f64>> {
    let g = metric_jets(engine, g, p)?;
    let g_inv = g.inverse()?;
    Ok(christoffel(&g, &g_inv).values())
}

pub(crate) fn metric_jets(engine: &Engine, g: &MetricField, p: &ChartPoint) -> Result<Square<Jet2>> {
    Square::from_components(g.dim(), engine.jets(g.as_field(), p)?)
}

/// `(∇α)_ij = (∇_{∂_i}α)(∂_j) = ∂_iα_j − Γ^k_ij α_k`.
pub fn nabla_oneform<J: Differentiable>(gamma: &Christoffel<J::Lower>, alpha: &[J]) -> Square<J::Lower> {
    let d = alpha.len();
    let low = lower_all(alpha);
    Square::from_fn(d, |i, j| {
        let mut acc = alpha[j].partial(i);
        for k in 0..d {
            acc -= gamma.get(k, i, j) * low[k];
        }
        acc
    })
}

/// `∇X` as an endomorphism: `(∇X)^i_j = ∂_j X^i + Γ^i_jk X^k`, so that
/// `(∇X)(∂_j) = ∇_{∂_j}X`.
pub fn nabla_vector<J: Differentiable>(gamma: &Christoffel<J::Lower>, x: &[J]) -> Square<J::Lower> {
    let d = x.len();
    let low = lower_all(x);
    Square::from_fn(d, |i, j| {
        let mut acc = x[i].partial(j);
        for k in 0..d {
            acc += gamma.get(i, j, k) * low[k];
        }
        acc
    })
}

/// `∇_{∂_k} A` for every `k`: `(∇_k A)^i_j = ∂_k A^i_j + Γ^i_km A^m_j − Γ^m_kj A^i_m`.
pub fn nabla_endo<J: Differentiable>(gamma: &Christoffel<J::Lower>, a: &Square<J>) -> Vec<Square<J::Lower>> {
    let d = a.dim();
    let low = a.lower();
    (0..d)
        .map(|k| {
            Square::from_fn(d, |i, j| {
                let mut acc = a.get(i, j).partial(k);
                for m in 0..d {
                    acc += gamma.get(i, k, m) * low.get(m, j);
                    acc -= gamma.get(m, k, j) * low.get(i, m);
                }
                acc
            })
        })
        .collect()
}

/// `∇_{∂_k} g` for every `k`; identically zero for the Levi-Civita connection.
pub fn nabla_metric<J: Differentiable>(gamma: &Christoffel<J::Lower>, g: &Square<J>) -> Vec<Square<J::Lower>> {
    let d = g.dim();
    let low = g.lower();
    (0..d)
        .map(|k| {
            Square::from_fn(d, |i, j| {
                let mut acc = g.get(i, j).partial(k);
                for m in 0..d {
                    acc -= gamma.get(m, k, i) * low.get(m, j);
                    acc -= gamma.get(m, k, j) * low.get(i, m);
                }
                acc
            })
        })
        .collect()
}

/// The pair `S = ∇α` (bilinear) and `F = g⁻¹S` (endomorphism) at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct SecondFundamentalData {
    /// `S_ij = (∇_{∂_i}α)(∂_j)`.
    pub s: Square<f64>,
    /// `F^i_j = g^{ik} S_jk`, i.e. `g(F∂_j, ∂_k) = S(∂_j, ∂_k)`.
    pub f: Square<f64>,
}

/// `∇α` of a one-form field at a point, with its endomorphism.
pub fn cov_deriv_oneform(
    engine: &Engine,
    g: &MetricField,
    alpha: &OneFormField,
    p: &ChartPoint,
) -> Result<SecondFundamentalData> {
    let gj = metric_jets(engine, g, p)?;
    let g_inv = gj.inverse()?;
    let gamma = christoffel(&gj, &g_inv);
    let a = engine.jets(alpha.as_field(), p)?;
    let s = nabla_oneform(&gamma, &a).values();
    let g_inv = g_inv.values();
    let d = s.dim();
    let f = Square::from_fn(d, |i, j| (0..d).map(|k| g_inv.get(i, k) * s.get(j, k)).sum());
    Ok(SecondFundamentalData { s, f })
}

/// `dh`, i.e. `(dh)_i = ∂_i h`.
pub fn d0<J: Differentiable>(h: J, dim: usize) -> Vec<J::Lower> {
    (0..dim).map(|i| h.partial(i)).collect()
}

/// `(dα)_ij = ∂_iα_j − ∂_jα_i`.
pub fn d1<J: Differentiable>(alpha: &[J]) -> Form2<J::Lower> {
    Form2::from_fn(alpha.len(), |i, j| alpha[j].partial(i) - alpha[i].partial(j))
}

/// `(dη)_ijk = ∂_iη_jk + ∂_jη_ki + ∂_kη_ij`.
pub fn d2<J: Differentiable>(eta: &Form2<J>) -> Form3<J::Lower> {
    Form3::from_fn(eta.dim(), |i, j, k| {
        eta.get(j, k).partial(i) + eta.get(k, i).partial(j) + eta.get(i, j).partial(k)
    })
}

/// Exterior derivative of a 0-, 1- or 2-form.
pub fn exterior_d<J: Differentiable>(eta: &DiffForm<J>, dim: usize) -> Result<DiffForm<J::Lower>> {
    match eta {
        DiffForm::Zero(h) => Ok(DiffForm::One(d0(*h, dim))),
        DiffForm::One(a) => Ok(DiffForm::Two(d1(a))),
        DiffForm::Two(e) => Ok(DiffForm::Three(d2(e))),
        DiffForm::Three(_) => Err(Error::InvalidDegree {
            op: "exterior derivative",
            degree: 3,
        }),
    }
}

/// `X(h) = X^k ∂_k h`.
pub fn lie_function<J: Differentiable>(x: &[J], h: J) -> J::Lower {
    let mut acc = J::Lower::zero();
    for (k, xk) in x.iter().enumerate() {
        acc += xk.lower() * h.partial(k);
    }
    acc
}

/// `(L_X g)_ij = X^k∂_k g_ij + g_kj ∂_i X^k + g_ik ∂_j X^k` (any (0,2)-tensor).
pub fn lie_bilinear<J: Differentiable>(x: &[J], b: &Square<J>) -> Square<J::Lower> {
    let d = b.dim();
    let xl = lower_all(x);
    let dx: Vec<Vec<J::Lower>> = (0..d).map(|i| partial_all(x, i)).collect(); // dx[i][k] = ∂_i X^k
    let bl = b.lower();
    Square::from_fn(d, |i, j| {
        let mut acc = J::Lower::zero();
        for k in 0..d {
            acc += xl[k] * b.get(i, j).partial(k);
            acc += bl.get(k, j) * dx[i][k];
            acc += bl.get(i, k) * dx[j][k];
        }
        acc
    })
}

/// `(L_X α)_i = X^k∂_kα_i + α_k ∂_i X^k`.
pub fn lie_oneform<J: Differentiable>(x: &[J], alpha: &[J]) -> Vec<J::Lower> {
    let d = alpha.len();
    let xl = lower_all(x);
    let al = lower_all(alpha);
    (0..d)
        .map(|i| {
            let mut acc = J::Lower::zero();
            for k in 0..d {
                acc += xl[k] * alpha[i].partial(k);
                acc += al[k] * x[k].partial(i);
            }
            acc
        })
        .collect()
}

/// `(L_X η)_ij = X^k∂_kη_ij + η_kj ∂_i X^k + η_ik ∂_j X^k`.
pub fn lie_form2<J: Differentiable>(x: &[J], eta: &Form2<J>) -> Form2<J::Lower> {
    let d = eta.dim();
    let xl = lower_all(x);
    let el = eta.lower();
    Form2::from_fn(d, |i, j| {
        let mut acc = J::Lower::zero();
        for k in 0..d {
            acc += xl[k] * eta.get(i, j).partial(k);
            acc += el.get(k, j) * x[k].partial(i);
            acc += el.get(i, k) * x[k].partial(j);
        }
        acc
    })
}

/// `(L_X A)^i_j = X^k∂_k A^i_j − A^k_j ∂_k X^i + A^i_k ∂_j X^k`.
pub fn lie_endo<J: Differentiable>(x: &[J], a: &Square<J>) -> Square<J::Lower> {
    let d = a.dim();
    let xl = lower_all(x);
    let al = a.lower();
    Square::from_fn(d, |i, j| {
        let mut acc = J::Lower::zero();
        for k in 0..d {
            acc += xl[k] * a.get(i, j).partial(k);
            acc -= al.get(k, j) * x[i].partial(k);
            acc += al.get(i, k) * x[k].partial(j);
        }
        acc
    })
}

/// Tensors a Lie derivative can act on.
#[derive(Clone, Debug, PartialEq)]
pub enum LieTarget<S> {
    /// A symmetric (0,2)-tensor such as the metric.
    Metric(Square<S>),
    Form(DiffForm<S>),
    /// A (1,1)-tensor such as `J` or `∇T`.
    Endo(Square<S>),
}

pub fn lie_derivative<J: Differentiable>(x: &[J], target: &LieTarget<J>) -> Result<LieTarget<J::Lower>> {
    Ok(match target {
        LieTarget::Metric(b) => LieTarget::Metric(lie_bilinear(x, b)),
        LieTarget::Endo(a) => LieTarget::Endo(lie_endo(x, a)),
        LieTarget::Form(DiffForm::Zero(h)) => LieTarget::Form(DiffForm::Zero(lie_function(x, *h))),
        LieTarget::Form(DiffForm::One(a)) => LieTarget::Form(DiffForm::One(lie_oneform(x, a))),
        LieTarget::Form(DiffForm::Two(e)) => LieTarget::Form(DiffForm::Two(lie_form2(x, e))),
        LieTarget::Form(DiffForm::Three(_)) => {
            return Err(Error::InvalidDegree {
                op: "Lie derivative",
                degree: 3,
            })
        }
    })
}

/// `δα = −g^{ij}(∇α)_ij`.
pub fn codifferential<J: Differentiable>(
    g_inv: &Square<J::Lower>,
    gamma: &Christoffel<J::Lower>,
    alpha: &[J],
) -> J::Lower {
    let nabla = nabla_oneform(gamma, alpha);
    -metric_trace(g_inv, &nabla)
}

/// `g^{ij} B_ij`.
pub fn metric_trace<S: Scalar>(g_inv: &Square<S>, b: &Square<S>) -> S {
    let d = b.dim();
    let mut acc = S::zero();
    for i in 0..d {
        for j in 0..d {
            acc += g_inv.get(i, j) * b.get(i, j);
        }
    }
    acc
}

/// Divergence form `δα = −(1/√det g) ∂_i(√det g · g^{ij}α_j)`; the independent
/// route used to cross-check [`codifferential`].
pub fn codifferential_divergence<J: Differentiable>(g: &Square<J>, g_inv: &Square<J>, alpha: &[J]) -> J::Lower {
    let d = alpha.len();
    let vol = g.determinant().sqrt();
    let mut div = J::Lower::zero();
    for i in 0..d {
        let mut v = J::zero();
        for j in 0..d {
            v += g_inv.get(i, j) * alpha[j];
        }
        div += (vol * v).partial(i);
    }
    -(div / vol.lower())
}

/// `Δh = δ(dh)`, computed as the metric trace of `∇dh`
/// (so `Δ = −Σ∂²` on flat space).
pub fn laplacian(g_inv: &Square<f64>, gamma: &Christoffel<f64>, h: Jet2) -> f64 {
    let dh: Vec<Jet1> = d0(h, g_inv.dim());
    codifferential(g_inv, gamma, &dh)
}

/// `Δh = −(1/√det g) ∂_i(√det g · g^{ij} ∂_j h)`; oracle for [`laplacian`].
pub fn laplacian_divergence(g: &Square<Jet2>, g_inv: &Square<Jet2>, h: Jet2) -> f64 {
    let d = g.dim();
    let vol = g.determinant().sqrt().lower();
    let g_inv = g_inv.lower();
    let dh = d0(h, d);
    let mut div = 0.0;
    for i in 0..d {
        let mut v = Jet1::constant(0.0);
        for j in 0..d {
            v += g_inv.get(i, j) * dh[j];
        }
        div += (vol * v).partial(i);
    }
    -div / vol.value
}

/// `δα` of a one-form field at a point.
pub fn codifferential_at(engine: &Engine, g: &MetricField, alpha: &OneFormField, p: &ChartPoint) -> Result<f64> {
    let gj = metric_jets(engine, g, p)?;
    let g_inv = gj.inverse()?;
    let gamma = christoffel(&gj, &g_inv);
    let a = engine.jets(alpha.as_field(), p)?;
    let a1: Vec<Jet1> = lower_all(&a);
    Ok(codifferential(&g_inv.values(), &gamma.values(), &a1))
}

/// `Δh` of a scalar field at a point.
pub fn laplacian_at(engine: &Engine, g: &MetricField, h: &ScalarField, p: &ChartPoint) -> Result<f64> {
    let gj = metric_jets(engine, g, p)?;
    let g_inv = gj.inverse()?;
    let gamma = christoffel(&gj, &g_inv).values();
    let hj = engine.jets(h.as_field(), p)?[0];
    Ok(laplacian(&g_inv.values(), &gamma, hj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ComponentFn, ConstantField, CoordinateFunction, Domain};

    struct Conformal;

    // 4/r² δ_ij on ℝ⁴∖{0}
    impl ComponentFn for Conformal {
        fn dim(&self) -> usize {
            4
        }
        fn len(&self) -> usize {
            16
        }
        fn domain(&self) -> Domain {
            Domain::PuncturedOrigin
        }
        fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
            let r2 = x.iter().fold(S::zero(), |a, &v| a + v * v);
            let c = r2.recip() * 4.0;
            (0..16)
                .map(|k| if k / 4 == k % 4 { c } else { S::zero() })
                .collect()
        }
    }

    struct XOneDxOne;

    impl ComponentFn for XOneDxOne {
        fn dim(&self) -> usize {
            4
        }
        fn len(&self) -> usize {
            4
        }
        fn domain(&self) -> Domain {
            Domain::Everywhere
        }
        fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
            vec![x[0], S::zero(), S::zero(), S::zero()]
        }
    }

    fn flat_metric() -> MetricField {
        let mut comps = vec![0.0; 16];
        for i in 0..4 {
            comps[i * 5] = 1.0;
        }
        MetricField::new(ConstantField::new(4, comps)).unwrap()
    }

    fn p0() -> ChartPoint {
        ChartPoint::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn flat_metric_has_vanishing_christoffels() {
        let gamma = christoffel_at(&Engine::AutoDiff, &flat_metric(), &p0()).unwrap();
        assert!(gamma.data.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn conformal_christoffels_at_unit_point() {
        let g = MetricField::new(Conformal).unwrap();
        let gamma = christoffel_at(&Engine::AutoDiff, &g, &p0()).unwrap();
        // Γ^k_ij = δ_i^k∂_jφ + δ_j^k∂_iφ − δ_ij∂^kφ with φ = ln 2 − ln r, ∂φ = (−1,0,0,0)
        assert!((gamma.get(0, 0, 0) + 1.0).abs() < 1e-14);
        assert!((gamma.get(0, 1, 1) - 1.0).abs() < 1e-14);
        assert!((gamma.get(1, 0, 1) + 1.0).abs() < 1e-14);
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(gamma.get(k, i, j).to_bits(), gamma.get(k, j, i).to_bits());
                }
            }
        }
    }

    #[test]
    fn metricity_holds_for_conformal_metric() {
        let g = MetricField::new(Conformal).unwrap();
        let p = ChartPoint::new(vec![0.8, -1.1, 0.3, 0.6]).unwrap();
        let gj = metric_jets(&Engine::AutoDiff, &g, &p).unwrap();
        let gamma = christoffel(&gj, &gj.inverse().unwrap());
        for slab in nabla_metric(&gamma.lower(), &gj.lower()) {
            assert!(slab.components().iter().all(|c| c.abs() < 1e-12));
        }
    }

    #[test]
    fn exterior_derivative_of_coordinate_differential_vanishes() {
        let x = Jet2::seed(&[0.4, 1.0, -0.3, 2.0]);
        let dx1: Vec<Jet2> = (0..4).map(|i| if i == 0 { Jet2::constant(1.0) } else { Jet2::constant(0.0) }).collect();
        assert!(d1(&dx1).components().iter().all(|c| c.value == 0.0));
        // d(d h) = 0 exactly up to rounding
        let h = (x[0] * x[1]).sin() + x[2] * x[3] * x[3];
        let dh = d0(h, 4);
        assert!(d1(&dh).components().iter().all(|&c| c.abs() < 1e-15));
        assert!(matches!(
            exterior_d(&DiffForm::Three(Form3::<Jet2>::zeros(4)), 4),
            Err(Error::InvalidDegree { .. })
        ));
    }

    #[test]
    fn flat_codifferential_of_radial_form() {
        let alpha = OneFormField::new(XOneDxOne).unwrap();
        let delta = codifferential_at(&Engine::AutoDiff, &flat_metric(), &alpha, &p0()).unwrap();
        assert!((delta + 1.0).abs() < 1e-15);
    }

    #[test]
    fn laplacian_sign_anchor() {
        struct Square1;
        impl ComponentFn for Square1 {
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
        let h = ScalarField::new(Square1).unwrap();
        let lap = laplacian_at(&Engine::AutoDiff, &flat_metric(), &h, &p0()).unwrap();
        assert!((lap + 2.0).abs() < 1e-15);
    }

    #[test]
    fn laplacian_of_log_radius_on_conformal_metric() {
        let g = MetricField::new(Conformal).unwrap();
        let h = ScalarField::new(crate::field::LogRadius { dim: 4 }).unwrap();
        for coords in [vec![1.0, 0.0, 0.0, 0.0], vec![0.3, -2.0, 1.1, 0.7]] {
            let p = ChartPoint::new(coords).unwrap();
            let lap = laplacian_at(&Engine::AutoDiff, &g, &h, &p).unwrap();
            assert!(lap.abs() < 1e-12, "Δ ln r = {lap}");
        }
    }

    #[test]
    fn lie_derivative_of_constant_endomorphism_along_constant_field() {
        let x: Vec<Jet2> = vec![Jet2::constant(1.0), Jet2::constant(0.0), Jet2::constant(0.0), Jet2::constant(0.0)];
        let mut j = Square::<Jet2>::zeros(4);
        j.set(1, 0, Jet2::constant(1.0));
        j.set(0, 1, Jet2::constant(-1.0));
        j.set(3, 2, Jet2::constant(1.0));
        j.set(2, 3, Jet2::constant(-1.0));
        let l = lie_endo(&x, &j);
        assert!(l.components().iter().all(|c| c.value == 0.0 && c.grad.iter().all(|&g| g == 0.0)));
    }

    #[test]
    fn lie_derivative_rejects_three_forms() {
        let x = vec![Jet2::constant(1.0); 4];
        let target = LieTarget::Form(DiffForm::Three(Form3::zeros(4)));
        assert!(lie_derivative(&x, &target).is_err());
    }

    #[test]
    fn lie_derivative_of_coordinate_along_itself() {
        let x = Jet2::seed(&[2.0, 1.0]);
        let field = CoordinateFunction { dim: 2, index: 0 };
        let h = field.eval(&x)[0];
        // X = x₀∂₀, X(x₀) = x₀
        let v = vec![x[0], Jet2::constant(0.0)];
        assert_eq!(lie_function(&v, h).value, 2.0);
    }
}
