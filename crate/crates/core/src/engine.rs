//! Differentiation engines producing order-2 jets of base fields.
//!
//! All operators downstream consume [`Jet2`] components of the base fields
//! (metric, complex structure, Lee form, profile). The automatic engine seeds
//! the chart coordinates and evaluates the field on jets. The finite-difference
//! engine evaluates the field on plain values and fills the same jets from
//! central difference stencils, so it exercises an independent route to every
//! derivative while sharing the algebra that follows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ChartPoint, Field};
use crate::jet::Jet2;

/// Accuracy order of the central difference stencils.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StencilOrder {
    Second,
    Fourth,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteDifference {
    /// The step is `step_scale · max(1, r)`.
    pub step_scale: f64,
    pub order: StencilOrder,
}

impl Default for FiniteDifference {
    fn default() -> Self {
        Self {
            step_scale: 1e-4,
            order: StencilOrder::Fourth,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub enum Engine {
    #[default]
    AutoDiff,
    FiniteDifference(FiniteDifference),
}

impl Engine {
    pub fn finite_difference() -> Self {
        Engine::FiniteDifference(FiniteDifference::default())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Engine::AutoDiff => "ad",
            Engine::FiniteDifference(_) => "fd",
        }
    }

    /// Multiplier applied to every tolerance of the ladder.
    pub fn tolerance_factor(&self) -> f64 {
        match self {
            Engine::AutoDiff => 1.0,
            Engine::FiniteDifference(_) => 100.0,
        }
    }

    /// Value, gradient and Hessian of every component of `field` at `p`.
    pub fn jets(&self, field: &dyn Field, p: &ChartPoint) -> Result<Vec<Jet2>> {
        if field.dim() != p.dim() {
            return Err(Error::DimensionMismatch {
                expected: field.dim(),
                found: p.dim(),
            });
        }
        field.domain().check(p)?;
        match self {
            Engine::AutoDiff => Ok(field.eval_jet2(&Jet2::seed(p.coords()))),
            Engine::FiniteDifference(fd) => fd.jets(field, p),
        }
    }

    /// Plain component values of `field` at `p`.
    pub fn values(&self, field: &dyn Field, p: &ChartPoint) -> Result<Vec<f64>> {
        if field.dim() != p.dim() {
            return Err(Error::DimensionMismatch {
                expected: field.dim(),
                found: p.dim(),
            });
        }
        field.domain().check(p)?;
        Ok(field.eval_f64(p.coords()))
    }
}

impl FiniteDifference {
    pub fn step(&self, p: &ChartPoint) -> f64 {
        self.step_scale * p.radius().max(1.0)
    }

    fn jets(&self, field: &dyn Field, p: &ChartPoint) -> Result<Vec<Jet2>> {
        let d = p.dim();
        let h = self.step(p);
        let x0 = p.coords();
        let eval = |shifts: &[(usize, f64)]| -> Result<Vec<f64>> {
            let mut x = x0.to_vec();
            for &(k, s) in shifts {
                x[k] += s * h;
            }
            let q = ChartPoint::new(x)?;
            field.domain().check(&q)?;
            Ok(field.eval_f64(q.coords()))
        };

        // first-derivative weights per unit offset
        let d1: &[(f64, f64)] = match self.order {
            StencilOrder::Second => &[(-1.0, -0.5), (1.0, 0.5)],
            StencilOrder::Fourth => &[
                (-2.0, 1.0 / 12.0),
                (-1.0, -8.0 / 12.0),
                (1.0, 8.0 / 12.0),
                (2.0, -1.0 / 12.0),
            ],
        };
        // second-derivative weights, including the centre
        let d2: &[(f64, f64)] = match self.order {
            StencilOrder::Second => &[(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)],
            StencilOrder::Fourth => &[
                (-2.0, -1.0 / 12.0),
                (-1.0, 16.0 / 12.0),
                (0.0, -30.0 / 12.0),
                (1.0, 16.0 / 12.0),
                (2.0, -1.0 / 12.0),
            ],
        };

        let centre = eval(&[])?;
        let m = centre.len();
        let mut grad = vec![vec![0.0; d]; m];
        let mut hess = vec![vec![0.0; d * d]; m];

        for k in 0..d {
            for &(s, w) in d1 {
                let f = eval(&[(k, s)])?;
                for c in 0..m {
                    grad[c][k] += w * f[c] / h;
                }
            }
            for &(s, w) in d2 {
                let f = if s == 0.0 { centre.clone() } else { eval(&[(k, s)])? };
                for c in 0..m {
                    hess[c][k * d + k] += w * f[c] / (h * h);
                }
            }
        }
        for j in 0..d {
            for i in 0..j {
                for &(si, wi) in d1 {
                    for &(sj, wj) in d1 {
                        let f = eval(&[(i, si), (j, sj)])?;
                        for c in 0..m {
                            hess[c][i * d + j] += wi * wj * f[c] / (h * h);
                        }
                    }
                }
            }
        }
        Ok((0..m)
            .map(|c| Jet2::from_parts(centre[c], &grad[c], |i, j| hess[c][i * d + j]))
            .collect())
    }
}
