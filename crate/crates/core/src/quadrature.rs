//! Integration over the fundamental domain `1 ≤ r ≤ a` of the Hopf models in
//! real dimension four.
//!
//! Coordinates are `s = ln r` and Hopf angles `(η, ξ₁, ξ₂)` with
//! `x = r(cos η cos ξ₁, cos η sin ξ₁, sin η cos ξ₂, sin η sin ξ₂)`, so the
//! Euclidean measure is `r⁴ sin η cos η ds dη dξ₁ dξ₂`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connection::{d0, laplacian};
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::field::ChartPoint;
use crate::lck::{CheckVerdict, LocalGeometry};
use crate::models::{Model, ModelKind};
use crate::tensor::{contract, values, Square};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P_n'(x) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Rule used along `s = ln r ∈ [0, ln a]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadialRule {
    /// Equal weights at `s_k = kL/N`; spectral for `a`-periodic integrands.
    PeriodicTrapezoid,
    /// Closed trapezoid with `N + 1` nodes; second order for any smooth integrand.
    Trapezoid,
    GaussLegendre,
}

/// A product grid on the fundamental domain.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureGrid {
    pub a: f64,
    pub n_r: usize,
    pub n_ang: usize,
    pub radial_rule: RadialRule,
    radial: Vec<(f64, f64)>,
    eta: Vec<(f64, f64)>,
    xi: Vec<(f64, f64)>,
}

impl QuadratureGrid {
    /// `n_r` radial nodes and `n_ang` nodes per angle (Gauss–Legendre in `η`,
    /// uniform in `ξ₁`, `ξ₂`).
    pub fn new(a: f64, n_r: usize, n_ang: usize, radial_rule: RadialRule) -> Result<Self> {
        if !(a > 1.0) || !a.is_finite() {
            return Err(Error::Config(format!("dilation factor a = {a}, need a > 1")));
        }
        if n_r == 0 || n_ang == 0 {
            return Err(Error::Config("grid sizes must be positive".into()));
        }
        let len = a.ln();
        let radial = match radial_rule {
            RadialRule::PeriodicTrapezoid => {
                let h = len / n_r as f64;
                (0..n_r).map(|k| (k as f64 * h, h)).collect()
            }
            RadialRule::Trapezoid => {
                let h = len / n_r as f64;
                (0..=n_r)
                    .map(|k| {
                        let w = if k == 0 || k == n_r { 0.5 * h } else { h };
                        (k as f64 * h, w)
                    })
                    .collect()
            }
            RadialRule::GaussLegendre => {
                let (x, w) = gauss_legendre(n_r);
                x.iter()
                    .zip(&w)
                    .map(|(x, w)| (0.5 * len * (x + 1.0), 0.5 * len * w))
                    .collect()
            }
        };
        let (x, w) = gauss_legendre(n_ang);
        let eta = x
            .iter()
            .zip(&w)
            .map(|(x, w)| (0.25 * PI * (x + 1.0), 0.25 * PI * w))
            .collect();
        let h = 2.0 * PI / n_ang as f64;
        let xi = (0..n_ang).map(|k| (k as f64 * h, h)).collect();
        Ok(Self {
            a,
            n_r,
            n_ang,
            radial_rule,
            radial,
            eta,
            xi,
        })
    }

    /// The periodic grid used for all model integrals.
    pub fn periodic(a: f64, n_r: usize, n_ang: usize) -> Result<Self> {
        Self::new(a, n_r, n_ang, RadialRule::PeriodicTrapezoid)
    }

    pub fn len(&self) -> usize {
        self.radial.len() * self.eta.len() * self.xi.len() * self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node `k` as a chart point with its Euclidean weight.
    fn node(&self, k: usize) -> (ChartPoint, f64) {
        let m = self.xi.len();
        let (i2, rest) = (k % m, k / m);
        let (i1, rest) = (rest % m, rest / m);
        let (ie, ir) = (rest % self.eta.len(), rest / self.eta.len());
        let (s, ws) = self.radial[ir];
        let (eta, we) = self.eta[ie];
        let (xi1, w1) = self.xi[i1];
        let (xi2, w2) = self.xi[i2];
        let r = s.exp();
        let (se, ce) = eta.sin_cos();
        let x = vec![
            r * ce * xi1.cos(),
            r * ce * xi1.sin(),
            r * se * xi2.cos(),
            r * se * xi2.sin(),
        ];
        let weight = ws * we * w1 * w2 * r.powi(4) * se * ce;
        (ChartPoint::new(x).expect("finite coordinates"), weight)
    }

    /// `Σ w_k h(x_k)` against the Euclidean measure, in parallel with an
    /// order-fixed pairwise reduction.
    pub fn integrate_euclidean(&self, h: impl Fn(&ChartPoint) -> Result<f64> + Sync) -> Result<f64> {
        let terms: Vec<f64> = (0..self.len())
            .into_par_iter()
            .map(|k| {
                let (p, w) = self.node(k);
                Ok(w * h(&p)?)
            })
            .collect::<Result<_>>()?;
        Ok(pairwise_sum(&terms))
    }
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        return v.iter().sum();
    }
    let (l, r) = v.split_at(v.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

/// Closed-form Euclidean measure of the annulus `1 ≤ r ≤ a` in `ℝ⁴`.
pub fn euclidean_annulus_volume(a: f64) -> f64 {
    0.5 * PI * PI * (a.powi(4) - 1.0)
}

/// `vol_g = 32π² ln a` for the Hopf metric in complex dimension two.
pub fn hopf_volume(a: f64) -> f64 {
    32.0 * PI * PI * a.ln()
}

/// `vol_ḡ = vol_g`: `√det ḡ = (1+f)√det g` and `f` has zero mean in `ln r`.
pub fn deformed_volume(a: f64) -> f64 {
    hopf_volume(a)
}

/// Scalar integrands available from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// `1`.
    Volume,
    /// `δθ`.
    DivLee,
    /// `Δ|θ|²`.
    LaplacianNorm,
    /// `T(|θ|²) − |θ|²δθ`.
    IbpDefect,
    /// `|∇θ|²`.
    GradLeeSq,
}

impl Quantity {
    pub const ALL: [Quantity; 5] = [
        Quantity::Volume,
        Quantity::DivLee,
        Quantity::LaplacianNorm,
        Quantity::IbpDefect,
        Quantity::GradLeeSq,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::Volume => "volume",
            Quantity::DivLee => "div-lee",
            Quantity::LaplacianNorm => "laplacian-norm",
            Quantity::IbpDefect => "ibp-defect",
            Quantity::GradLeeSq => "grad-lee-sq",
        }
    }

    /// The integrand at one point.
    pub fn eval(&self, loc: &LocalGeometry) -> f64 {
        match self {
            Quantity::Volume => 1.0,
            Quantity::DivLee => loc.delta_theta().value,
            Quantity::LaplacianNorm => laplacian(&loc.g_inv_values(), &loc.gamma.values(), loc.theta_norm_sq()),
            Quantity::IbpDefect => {
                let h = loc.theta_norm_sq();
                let t_h = contract(&values(&loc.lee), &values(&d0(h, loc.dim())));
                t_h - h.value * loc.delta_theta().value
            }
            Quantity::GradLeeSq => loc.norm_bilinear(&loc.s.values()).powi(2),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = Quantity::ALL.iter().map(|q| q.name()).collect();
                Error::Config(format!("unknown quantity `{s}` (expected one of {})", known.join(", ")))
            })
    }
}

fn check_model(model: &Model) -> Result<()> {
    if model.structure.n() != 2 {
        return Err(Error::Unsupported(format!(
            "quadrature runs in complex dimension 2 only, got n = {}",
            model.structure.n()
        )));
    }
    if model.descriptor.name == ModelKind::Flat {
        return Err(Error::Unsupported("quadrature needs a Hopf model".into()));
    }
    Ok(())
}

/// `∫ h vol_g` over the fundamental domain, with `vol_g = √det g dx` of the
/// model's own metric.
pub fn integrate(model: &Model, quantity: Quantity, grid: &QuadratureGrid, engine: &Engine) -> Result<f64> {
    Ok(integrate_many(model, &[quantity], grid, engine)?[0])
}

/// Several integrals sharing one pass over the grid. The volume alone needs
/// only metric values; other quantities build the local geometry per node.
pub fn integrate_many(
    model: &Model,
    quantities: &[Quantity],
    grid: &QuadratureGrid,
    engine: &Engine,
) -> Result<Vec<f64>> {
    check_model(model)?;
    let needs_geometry = quantities.iter().any(|q| *q != Quantity::Volume);
    let dim = model.structure.dim();
    let terms: Vec<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (p, w) = grid.node(k);
            if !needs_geometry {
                let g = Square::from_components(dim, model.structure.metric().eval(p.coords()))?;
                return Ok(vec![w * g.determinant().sqrt(); quantities.len()]);
            }
            let loc = LocalGeometry::new(&model.structure, engine, &p)?;
            let vol = w * loc.g_values().determinant().sqrt();
            Ok(quantities.iter().map(|q| vol * q.eval(&loc)).collect())
        })
        .collect::<Result<_>>()?;
    Ok((0..quantities.len())
        .map(|i| pairwise_sum(&terms.iter().map(|t| t[i]).collect::<Vec<_>>()))
        .collect())
}

/// Bound for integrals that must vanish, as a fraction of the volume.
pub const VANISHING_FRACTION: f64 = 1e-3;

/// Relative bound on the volume against its closed form.
pub const VOLUME_REL_TOL: f64 = 1e-6;

/// Bound on `∫|∇θ|²` on the Vaisman model.
pub const PARALLEL_TOL: f64 = 1e-8;

/// The value an integral must take on a model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Expectation {
    pub value: f64,
    pub tolerance: f64,
    /// Whether the tolerance bounds the relative error.
    pub relative: bool,
}

/// Closed-form value of `∫ q vol` where one is known:
///
/// * volume: `32π² ln a` (also for the deformed metric), relative `1e-6`;
/// * `δθ`, `Δ|θ|²` and `T(|θ|²) − |θ|²δθ`: zero by Stokes, within `1e-3 · vol`;
/// * `|∇θ|²`: zero on the Vaisman model, within `1e-8`.
pub fn expectation(model: &Model, quantity: Quantity) -> Option<Expectation> {
    let d = &model.descriptor;
    let volume = match d.name {
        ModelKind::Flat => return None,
        ModelKind::Hopf => hopf_volume(d.a),
        ModelKind::HopfDeformed => deformed_volume(d.a),
    };
    let vanishing = |tolerance| Expectation {
        value: 0.0,
        tolerance,
        relative: false,
    };
    match quantity {
        Quantity::Volume => Some(Expectation {
            value: volume,
            tolerance: VOLUME_REL_TOL,
            relative: true,
        }),
        Quantity::DivLee | Quantity::LaplacianNorm | Quantity::IbpDefect => Some(vanishing(VANISHING_FRACTION * volume)),
        Quantity::GradLeeSq => (d.name == ModelKind::Hopf).then(|| vanishing(PARALLEL_TOL)),
    }
}

/// An integral together with its verdict against the expectation.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralCheck {
    pub quantity: Quantity,
    pub value: f64,
    pub verdict: CheckVerdict,
}

/// Judges an integral value; `None` when the quantity has no expected value.
pub fn judge(model: &Model, quantity: Quantity, value: f64) -> Option<IntegralCheck> {
    let e = expectation(model, quantity)?;
    let mut residual = (value - e.value).abs();
    if e.relative {
        residual /= e.value.abs();
    }
    Some(IntegralCheck {
        quantity,
        value,
        verdict: CheckVerdict {
            name: format!("int_{}", quantity.name().replace('-', "_")),
            max_residual: residual,
            mean_residual: residual,
            tolerance: e.tolerance,
            pass: residual <= e.tolerance,
            witness: Vec::new(),
        },
    })
}

/// Global identities on the fundamental domain: the closed-form volume,
/// `∫δθ = 0`, `∫Δ|θ|² = 0`, `∫T(|θ|²) = ∫|θ|²δθ`, and on the Vaisman model
/// `∫|∇θ|² = 0`.
pub fn check_integral_identities(model: &Model, grid: &QuadratureGrid, engine: &Engine) -> Result<Vec<IntegralCheck>> {
    let values = integrate_many(model, &Quantity::ALL, grid, engine)?;
    Ok(Quantity::ALL
        .iter()
        .zip(values)
        .filter_map(|(&q, v)| judge(model, q, v))
        .collect())
}

/// Observed orders `log₂(e_k / e_{k+1})` of a sequence of errors on grids
/// refined by two. Pairs where the finer error is already below `floor` yield
/// `None`: the rule has converged to roundoff.
pub fn observed_orders(errors: &[f64], floor: f64) -> Vec<Option<f64>> {
    errors
        .windows(2)
        .map(|w| (w[1].abs() > floor).then(|| (w[0].abs() / w[1].abs()).log2()))
        .collect()
}

/// Every refinement either reaches `floor` or shrinks the error at least
/// `2^min_order`-fold.
pub fn converges_with_order(errors: &[f64], floor: f64, min_order: f64) -> bool {
    observed_orders(errors, floor)
        .iter()
        .all(|o| o.is_none_or(|o| o >= min_order))
}
