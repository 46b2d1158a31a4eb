//! Chart points and tensor fields evaluable at plain values or jets.
//!
//! A field is a map from chart coordinates to a flat list of components. The
//! component layout depends on the tensor kind:
//!
//! * scalar: one component;
//! * one-form `α_i` and vector `X^i`: `dim` components;
//! * two-form `η_ij` (`i < j`) and three-form `η_ijk` (`i < j < k`): the
//!   strictly increasing index tuples in lexicographic order;
//! * metric `g_ij` and endomorphism `A^i_j`: row-major `dim × dim`, with the
//!   row carrying the first index.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::{Jet1, Jet2, Scalar, MAX_DIM};

/// A point of the real chart `ℝ^dim` (or `ℝ^dim ∖ {0}`).
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint {
    coords: Vec<f64>,
}

impl ChartPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() > MAX_DIM {
            return Err(Error::DimensionTooLarge {
                dim: coords.len(),
                max: MAX_DIM,
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::OutsideDomain {
                coords,
                reason: "non-finite coordinate",
            });
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Euclidean radius `(Σ x_i²)^{1/2}`.
    pub fn radius(&self) -> f64 {
        self.coords.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// The image of this point under the dilation `x ↦ λx`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coords: self.coords.iter().map(|x| x * factor).collect(),
        }
    }
}

/// Where a field is defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Domain {
    Everywhere,
    /// `ℝ^dim ∖ {0}`.
    PuncturedOrigin,
}

impl Domain {
    pub fn check(&self, p: &ChartPoint) -> Result<()> {
        match self {
            Domain::Everywhere => Ok(()),
            Domain::PuncturedOrigin if p.radius() > 0.0 => Ok(()),
            Domain::PuncturedOrigin => Err(Error::OutsideDomain {
                coords: p.coords().to_vec(),
                reason: "r = 0",
            }),
        }
    }

    /// The domain on which both fields are defined.
    pub fn intersect(self, other: Domain) -> Domain {
        self.max(other)
    }
}

/// Type-erased component map over a chart.
pub trait Field: Send + Sync {
    fn dim(&self) -> usize;
    fn len(&self) -> usize;
    fn domain(&self) -> Domain;
    fn eval_f64(&self, x: &[f64]) -> Vec<f64>;
    fn eval_jet1(&self, x: &[Jet1]) -> Vec<Jet1>;
    fn eval_jet2(&self, x: &[Jet2]) -> Vec<Jet2>;
}

/// A component map written once, generically over the scalar type.
///
/// Every `ComponentFn` is a [`Field`].
pub trait ComponentFn: Send + Sync {
    fn dim(&self) -> usize;
    fn len(&self) -> usize;
    fn domain(&self) -> Domain;
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S>;
}

impl<T: ComponentFn> Field for T {
    fn dim(&self) -> usize {
        ComponentFn::dim(self)
    }
    fn len(&self) -> usize {
        ComponentFn::len(self)
    }
    fn domain(&self) -> Domain {
        ComponentFn::domain(self)
    }
    fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.eval(x)
    }
    fn eval_jet1(&self, x: &[Jet1]) -> Vec<Jet1> {
        self.eval(x)
    }
    fn eval_jet2(&self, x: &[Jet2]) -> Vec<Jet2> {
        self.eval(x)
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

macro_rules! typed_field {
    ($(#[$meta:meta])* $name:ident, $kind:literal, $len:expr) => {
        $(#[$meta])*
        #[derive(Clone)]
        pub struct $name(Arc<dyn Field>);

        impl $name {
            pub fn new(field: impl Field + 'static) -> Result<Self> {
                Self::from_arc(Arc::new(field))
            }

            pub fn from_arc(field: Arc<dyn Field>) -> Result<Self> {
                let dim = field.dim();
                if dim > MAX_DIM {
                    return Err(Error::DimensionTooLarge { dim, max: MAX_DIM });
                }
                let expected = ($len)(dim);
                if field.len() != expected {
                    return Err(Error::Shape {
                        kind: $kind,
                        dim,
                        expected,
                        found: field.len(),
                    });
                }
                Ok(Self(field))
            }

            pub fn dim(&self) -> usize {
                self.0.dim()
            }

            pub fn domain(&self) -> Domain {
                self.0.domain()
            }

            pub fn as_field(&self) -> &dyn Field {
                &*self.0
            }

            pub fn into_arc(self) -> Arc<dyn Field> {
                self.0
            }

            /// Raw components at `x`, in the layout documented for this kind.
            pub fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
                S::eval_field(&*self.0, x)
            }
        }

        impl std::fmt::Debug for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.debug_struct(stringify!($name))
                    .field("dim", &self.dim())
                    .field("domain", &self.domain())
                    .finish()
            }
        }
    };
}

typed_field!(ScalarField, "scalar", |_d: usize| 1);
typed_field!(OneFormField, "one-form", |d: usize| d);
typed_field!(VectorField, "vector field", |d: usize| d);
typed_field!(TwoFormField, "two-form", |d: usize| binomial(d, 2));
typed_field!(ThreeFormField, "three-form", |d: usize| binomial(d, 3));
typed_field!(MetricField, "metric", |d: usize| d * d);
typed_field!(EndoField, "endomorphism field", |d: usize| d * d);
typed_field!(
    /// An almost complex structure `J^i_j`. Compatibility with a metric is
    /// verified where the pair is assembled into a structure.
    ComplexStructureField,
    "complex structure",
    |d: usize| d * d
);

impl ComplexStructureField {
    /// Views the complex structure as a plain endomorphism field.
    pub fn as_endo(&self) -> EndoField {
        EndoField(self.0.clone())
    }
}

/// A field with constant components.
#[derive(Clone, Debug)]
pub struct ConstantField {
    dim: usize,
    components: Vec<f64>,
}

impl ConstantField {
    pub fn new(dim: usize, components: Vec<f64>) -> Self {
        Self { dim, components }
    }
}

impl ComponentFn for ConstantField {
    fn dim(&self) -> usize {
        self.dim
    }
    fn len(&self) -> usize {
        self.components.len()
    }
    fn domain(&self) -> Domain {
        Domain::Everywhere
    }
    fn eval<S: Scalar>(&self, _x: &[S]) -> Vec<S> {
        self.components.iter().map(|&c| S::constant(c)).collect()
    }
}

/// The coordinate function `x_k`.
#[derive(Clone, Copy, Debug)]
pub struct CoordinateFunction {
    pub dim: usize,
    pub index: usize,
}

impl ComponentFn for CoordinateFunction {
    fn dim(&self) -> usize {
        self.dim
    }
    fn len(&self) -> usize {
        1
    }
    fn domain(&self) -> Domain {
        Domain::Everywhere
    }
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        vec![x[self.index]]
    }
}

/// `ln r`, defined away from the origin.
#[derive(Clone, Copy, Debug)]
pub struct LogRadius {
    pub dim: usize,
}

impl ComponentFn for LogRadius {
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
        let r2 = x.iter().fold(S::zero(), |acc, &xi| acc + xi * xi);
        vec![r2.ln() * 0.5]
    }
}

/// Squared Euclidean radius `Σ x_i²`.
pub fn radius_squared<S: Scalar>(x: &[S]) -> S {
    x.iter().fold(S::zero(), |acc, &xi| acc + xi * xi)
}
