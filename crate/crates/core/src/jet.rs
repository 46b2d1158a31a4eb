//! Forward-mode jets carrying first and second coordinate derivatives.
//!
//! Every derivative in the workbench flows through these types. A [`Jet2`]
//! holds a value together with its gradient and Hessian with respect to the
//! chart coordinates; a [`Jet1`] drops the Hessian. Arithmetic on jets applies
//! the product and chain rules exactly, so composite fields (a deformed metric
//! built from a profile, a Lee form and a complex structure, say) are
//! differentiated to second order without any differencing.
//!
//! The Hessian is stored packed (upper triangle only), which makes
//! `hess(i, j) == hess(j, i)` hold bit-for-bit.
//!
//! Derivative storage has a fixed capacity of [`MAX_DIM`] coordinates; slots
//! beyond the chart dimension simply stay zero.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use crate::field::Field;

/// Largest chart dimension the jets can differentiate against.
pub const MAX_DIM: usize = 8;

/// Number of stored Hessian entries.
pub const PACKED_LEN: usize = MAX_DIM * (MAX_DIM + 1) / 2;

/// Position of the (unordered) pair `{i, j}` in packed Hessian storage.
#[inline]
pub fn packed_index(i: usize, j: usize) -> usize {
    let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
    hi * (hi + 1) / 2 + lo
}

/// Real scalar arithmetic shared by `f64`, [`Jet1`] and [`Jet2`].
///
/// Tensor algebra and model formulas are written once against this trait and
/// evaluated at plain values or at jets.
pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + AddAssign
    + SubAssign
{
    fn constant(c: f64) -> Self;
    fn value(&self) -> f64;
    fn recip(self) -> Self;
    fn sqrt(self) -> Self;
    fn ln(self) -> Self;
    fn exp(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;

    /// Evaluates a type-erased field at a point expressed in this scalar type.
    fn eval_field(field: &dyn Field, x: &[Self]) -> Vec<Self>;

    fn zero() -> Self {
        Self::constant(0.0)
    }

    fn one() -> Self {
        Self::constant(1.0)
    }

    fn powi(self, k: i32) -> Self {
        if k < 0 {
            return self.powi(-k).recip();
        }
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self;
        }
        acc
    }
}

/// Scalars that can be differentiated once more, dropping one derivative order.
pub trait Differentiable: Scalar {
    type Lower: Scalar;

    /// The same quantity with the highest derivative order discarded.
    fn lower(&self) -> Self::Lower;

    /// The coordinate derivative `∂ₖ` of this quantity.
    fn partial(&self, k: usize) -> Self::Lower;
}

impl Scalar for f64 {
    #[inline]
    fn constant(c: f64) -> Self {
        c
    }
    #[inline]
    fn value(&self) -> f64 {
        *self
    }
    #[inline]
    fn recip(self) -> Self {
        1.0 / self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn eval_field(field: &dyn Field, x: &[Self]) -> Vec<Self> {
        field.eval_f64(x)
    }
}

/// A value with its coordinate gradient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet1 {
    pub value: f64,
    pub grad: [f64; MAX_DIM],
}

impl Jet1 {
    pub fn constant(value: f64) -> Self {
        Self {
            value,
            grad: [0.0; MAX_DIM],
        }
    }

    /// The coordinate function `x_k` evaluated at `value`.
    pub fn variable(value: f64, k: usize) -> Self {
        let mut jet = Self::constant(value);
        jet.grad[k] = 1.0;
        jet
    }

    #[inline]
    fn chain(self, f0: f64, f1: f64) -> Self {
        let mut grad = [0.0; MAX_DIM];
        for (out, g) in grad.iter_mut().zip(self.grad.iter()) {
            *out = f1 * g;
        }
        Self { value: f0, grad }
    }
}

impl Differentiable for Jet1 {
    type Lower = f64;

    fn lower(&self) -> f64 {
        self.value
    }

    fn partial(&self, k: usize) -> f64 {
        self.grad[k]
    }
}

impl Add for Jet1 {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: Self) -> Self {
        self.value += rhs.value;
        for (a, b) in self.grad.iter_mut().zip(rhs.grad.iter()) {
            *a += b;
        }
        self
    }
}

impl Sub for Jet1 {
    type Output = Self;
    #[inline]
    fn sub(mut self, rhs: Self) -> Self {
        self.value -= rhs.value;
        for (a, b) in self.grad.iter_mut().zip(rhs.grad.iter()) {
            *a -= b;
        }
        self
    }
}

impl Mul for Jet1 {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let mut grad = [0.0; MAX_DIM];
        for (k, out) in grad.iter_mut().enumerate() {
            *out = self.value * rhs.grad[k] + rhs.value * self.grad[k];
        }
        Self {
            value: self.value * rhs.value,
            grad,
        }
    }
}

impl Div for Jet1 {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl Neg for Jet1 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl Add<f64> for Jet1 {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: f64) -> Self {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet1 {
    type Output = Self;
    #[inline]
    fn sub(mut self, rhs: f64) -> Self {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet1 {
    type Output = Self;
    #[inline]
    fn mul(mut self, rhs: f64) -> Self {
        self.value *= rhs;
        for g in self.grad.iter_mut() {
            *g *= rhs;
        }
        self
    }
}

impl Div<f64> for Jet1 {
    type Output = Self;
    #[inline]
    fn div(self, rhs: f64) -> Self {
        self * (1.0 / rhs)
    }
}

impl AddAssign for Jet1 {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet1 {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl Scalar for Jet1 {
    fn constant(c: f64) -> Self {
        Jet1::constant(c)
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn recip(self) -> Self {
        let r = 1.0 / self.value;
        self.chain(r, -r * r)
    }
    fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s)
    }
    fn ln(self) -> Self {
        self.chain(self.value.ln(), 1.0 / self.value)
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e)
    }
    fn sin(self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }
    fn eval_field(field: &dyn Field, x: &[Self]) -> Vec<Self> {
        field.eval_jet1(x)
    }
}

/// A value with its coordinate gradient and Hessian (order-2 jet).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: [f64; MAX_DIM],
    hess: [f64; PACKED_LEN],
}

impl Jet2 {
    pub fn constant(value: f64) -> Self {
        Self {
            value,
            grad: [0.0; MAX_DIM],
            hess: [0.0; PACKED_LEN],
        }
    }

    /// The coordinate function `x_k` evaluated at `value`.
    pub fn variable(value: f64, k: usize) -> Self {
        let mut jet = Self::constant(value);
        jet.grad[k] = 1.0;
        jet
    }

    /// Seeds every coordinate of a point as an independent variable.
    pub fn seed(coords: &[f64]) -> Vec<Self> {
        coords
            .iter()
            .enumerate()
            .map(|(k, &x)| Self::variable(x, k))
            .collect()
    }

    /// Assembles a jet from externally computed derivatives. Only the upper
    /// triangle `hess(i, j)` with `i <= j` is read from `hess_entry`.
    pub fn from_parts(
        value: f64,
        grad: &[f64],
        mut hess_entry: impl FnMut(usize, usize) -> f64,
    ) -> Self {
        let mut jet = Self::constant(value);
        jet.grad[..grad.len()].copy_from_slice(grad);
        let dim = grad.len();
        for j in 0..dim {
            for i in 0..=j {
                jet.hess[packed_index(i, j)] = hess_entry(i, j);
            }
        }
        jet
    }

    #[inline]
    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess[packed_index(i, j)]
    }

    #[inline]
    fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        let mut out = Self::constant(f0);
        for k in 0..MAX_DIM {
            out.grad[k] = f1 * self.grad[k];
        }
        for j in 0..MAX_DIM {
            for i in 0..=j {
                let p = packed_index(i, j);
                out.hess[p] = f1 * self.hess[p] + f2 * self.grad[i] * self.grad[j];
            }
        }
        out
    }
}

impl Differentiable for Jet2 {
    type Lower = Jet1;

    fn lower(&self) -> Jet1 {
        Jet1 {
            value: self.value,
            grad: self.grad,
        }
    }

    fn partial(&self, k: usize) -> Jet1 {
        let mut grad = [0.0; MAX_DIM];
        for (m, g) in grad.iter_mut().enumerate() {
            *g = self.hess(k, m);
        }
        Jet1 {
            value: self.grad[k],
            grad,
        }
    }
}

impl Add for Jet2 {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: Self) -> Self {
        self.value += rhs.value;
        for (a, b) in self.grad.iter_mut().zip(rhs.grad.iter()) {
            *a += b;
        }
        for (a, b) in self.hess.iter_mut().zip(rhs.hess.iter()) {
            *a += b;
        }
        self
    }
}

impl Sub for Jet2 {
    type Output = Self;
    #[inline]
    fn sub(mut self, rhs: Self) -> Self {
        self.value -= rhs.value;
        for (a, b) in self.grad.iter_mut().zip(rhs.grad.iter()) {
            *a -= b;
        }
        for (a, b) in self.hess.iter_mut().zip(rhs.hess.iter()) {
            *a -= b;
        }
        self
    }
}

impl Mul for Jet2 {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::constant(self.value * rhs.value);
        for k in 0..MAX_DIM {
            out.grad[k] = self.value * rhs.grad[k] + rhs.value * self.grad[k];
        }
        for j in 0..MAX_DIM {
            for i in 0..=j {
                let p = packed_index(i, j);
                out.hess[p] = self.value * rhs.hess[p]
                    + rhs.value * self.hess[p]
                    + self.grad[i] * rhs.grad[j]
                    + self.grad[j] * rhs.grad[i];
            }
        }
        out
    }
}

impl Div for Jet2 {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl Neg for Jet2 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl Add<f64> for Jet2 {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: f64) -> Self {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Self;
    #[inline]
    fn sub(mut self, rhs: f64) -> Self {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Self;
    #[inline]
    fn mul(mut self, rhs: f64) -> Self {
        self.value *= rhs;
        for g in self.grad.iter_mut() {
            *g *= rhs;
        }
        for h in self.hess.iter_mut() {
            *h *= rhs;
        }
        self
    }
}

impl Div<f64> for Jet2 {
    type Output = Self;
    #[inline]
    fn div(self, rhs: f64) -> Self {
        self * (1.0 / rhs)
    }
}

impl AddAssign for Jet2 {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet2 {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl Scalar for Jet2 {
    fn constant(c: f64) -> Self {
        Jet2::constant(c)
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn recip(self) -> Self {
        let r = 1.0 / self.value;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }
    fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.value))
    }
    fn ln(self) -> Self {
        let r = 1.0 / self.value;
        self.chain(self.value.ln(), r, -r * r)
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }
    fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }
    fn eval_field(field: &dyn Field, x: &[Self]) -> Vec<Self> {
        field.eval_jet2(x)
    }
}

/// Sums scalars left to right.
pub fn sum<S: Scalar>(terms: impl IntoIterator<Item = S>) -> S {
    terms.into_iter().fold(S::zero(), |acc, t| acc + t)
}
