//! Pointwise multilinear algebra on a real `2n`-dimensional chart.
//!
//! Containers here are generic over [`Scalar`], so the same wedge, interior
//! product or index raising runs on plain values and on jets.
//!
//! Conventions (fixed once, used everywhere):
//!
//! * `(α∧β)(X,Y) = α(X)β(Y) − α(Y)β(X)`;
//! * `(α∧η)(X,Y,Z) = α(X)η(Y,Z) + α(Y)η(Z,X) + α(Z)η(X,Y)`;
//! * `(X⌟η)(Y,…) = η(X,Y,…)`;
//! * `(Jα)(X) = −α(JX)`, so that `Jθ = θ^♯⌟ω` when `ω = g(J·,·)`;
//! * `(X∧Y)Z = g(X,Z)Y − g(Y,Z)X` for the endomorphism attached to two vectors.

use crate::error::{Error, Result};
use crate::field::{binomial, ComplexStructureField, ComponentFn, Domain, MetricField, OneFormField, TwoFormField, VectorField};
use crate::jet::{Differentiable, Scalar};

/// A `dim × dim` array, row-major. Used for bilinear forms `B_ij` and for
/// endomorphisms `A^i_j` (row = upper index).
#[derive(Clone, Debug, PartialEq)]
pub struct Square<S> {
    dim: usize,
    data: Vec<S>,
}

impl<S: Scalar> Square<S> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![S::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_components(dim: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: S) {
        self.data[i * self.dim + j] = value;
    }

    pub fn components(&self) -> &[S] {
        &self.data
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Square<T> {
        Square {
            dim: self.dim,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn values(&self) -> Square<f64> {
        self.map(|s| s.value())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let d = self.dim;
        Self::from_fn(d, |i, j| {
            let mut acc = S::zero();
            for k in 0..d {
                acc += self.get(i, k) * rhs.get(k, j);
            }
            acc
        })
    }

    /// `(A v)^i = A^i_j v^j`.
    pub fn apply(&self, v: &[S]) -> Vec<S> {
        (0..self.dim)
            .map(|i| {
                let mut acc = S::zero();
                for (j, &vj) in v.iter().enumerate() {
                    acc += self.get(i, j) * vj;
                }
                acc
            })
            .collect()
    }

    /// `B(u, v) = u^i B_ij v^j`.
    pub fn pair(&self, u: &[S], v: &[S]) -> S {
        let mut acc = S::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += u[i] * self.get(i, j) * v[j];
            }
        }
        acc
    }

    pub fn trace(&self) -> S {
        (0..self.dim).fold(S::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(i, j) + rhs.get(i, j))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(i, j) - rhs.get(i, j))
    }

    pub fn scale(&self, c: S) -> Self {
        self.map(|&s| s * c)
    }

    /// Commutator `AB − BA`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        self.matmul(rhs).sub(&rhs.matmul(self))
    }

    /// Inverse by Gauss–Jordan elimination with partial pivoting on values.
    pub fn inverse(&self) -> Result<Self> {
        let d = self.dim;
        let mut a = self.clone();
        let mut inv = Self::identity(d);
        let scale = self
            .data
            .iter()
            .map(|s| s.value().abs())
            .fold(0.0f64, f64::max);
        for col in 0..d {
            let pivot_row = (col..d)
                .max_by(|&r, &s| {
                    a.get(r, col)
                        .value()
                        .abs()
                        .total_cmp(&a.get(s, col).value().abs())
                })
                .unwrap_or(col);
            let pivot = a.get(pivot_row, col);
            if !(pivot.value().abs() > 1e-14 * scale) {
                return Err(Error::Degenerate {
                    what: "matrix",
                    pivot: pivot.value(),
                });
            }
            if pivot_row != col {
                for j in 0..d {
                    a.data.swap(pivot_row * d + j, col * d + j);
                    inv.data.swap(pivot_row * d + j, col * d + j);
                }
            }
            let p_inv = a.get(col, col).recip();
            for j in 0..d {
                a.set(col, j, a.get(col, j) * p_inv);
                inv.set(col, j, inv.get(col, j) * p_inv);
            }
            for row in 0..d {
                if row == col {
                    continue;
                }
                let factor = a.get(row, col);
                for j in 0..d {
                    a.set(row, j, a.get(row, j) - factor * a.get(col, j));
                    inv.set(row, j, inv.get(row, j) - factor * inv.get(col, j));
                }
            }
        }
        Ok(inv)
    }

    /// Determinant by elimination with partial pivoting on values.
    pub fn determinant(&self) -> S {
        let d = self.dim;
        let mut a = self.clone();
        let mut det = S::one();
        for col in 0..d {
            let pivot_row = (col..d)
                .max_by(|&r, &s| {
                    a.get(r, col)
                        .value()
                        .abs()
                        .total_cmp(&a.get(s, col).value().abs())
                })
                .unwrap_or(col);
            if pivot_row != col {
                for j in 0..d {
                    a.data.swap(pivot_row * d + j, col * d + j);
                }
                det = -det;
            }
            let pivot = a.get(col, col);
            if pivot.value() == 0.0 {
                return S::zero();
            }
            det = det * pivot;
            let p_inv = pivot.recip();
            for row in col + 1..d {
                let factor = a.get(row, col) * p_inv;
                for j in col..d {
                    a.set(row, j, a.get(row, j) - factor * a.get(col, j));
                }
            }
        }
        det
    }
}

impl<S: Differentiable> Square<S> {
    pub fn lower(&self) -> Square<S::Lower> {
        self.map(|s| s.lower())
    }

    pub fn partial(&self, k: usize) -> Square<S::Lower> {
        self.map(|s| s.partial(k))
    }
}

/// Drops one derivative order from every entry.
pub fn lower_all<S: Differentiable>(v: &[S]) -> Vec<S::Lower> {
    v.iter().map(|s| s.lower()).collect()
}

/// `∂_k` of every entry.
pub fn partial_all<S: Differentiable>(v: &[S], k: usize) -> Vec<S::Lower> {
    v.iter().map(|s| s.partial(k)).collect()
}

pub fn values<S: Scalar>(v: &[S]) -> Vec<f64> {
    v.iter().map(|s| s.value()).collect()
}

/// Position of `(i, j)`, `i < j`, in canonical two-form storage.
#[inline]
pub fn pair_index(dim: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < dim);
    i * dim - i * (i + 1) / 2 + (j - i - 1)
}

/// Position of `(i, j, k)`, `i < j < k`, in canonical three-form storage.
pub fn triple_index(dim: usize, i: usize, j: usize, k: usize) -> usize {
    debug_assert!(i < j && j < k && k < dim);
    let mut idx = 0;
    for a in 0..i {
        idx += binomial(dim - 1 - a, 2);
    }
    for b in i + 1..j {
        idx += dim - 1 - b;
    }
    idx + (k - j - 1)
}

/// A two-form stored by its components `η_ij`, `i < j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Form2<S> {
    dim: usize,
    comps: Vec<S>,
}

impl<S: Scalar> Form2<S> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            comps: vec![S::zero(); binomial(dim, 2)],
        }
    }

    /// Builds the form from `f(i, j)` evaluated for `i < j` only.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut comps = Vec::with_capacity(binomial(dim, 2));
        for i in 0..dim {
            for j in i + 1..dim {
                comps.push(f(i, j));
            }
        }
        Self { dim, comps }
    }

    pub fn from_components(dim: usize, comps: Vec<S>) -> Result<Self> {
        if comps.len() != binomial(dim, 2) {
            return Err(Error::DimensionMismatch {
                expected: binomial(dim, 2),
                found: comps.len(),
            });
        }
        Ok(Self { dim, comps })
    }

    /// Antisymmetric part `½(B_ij − B_ji)` of a bilinear form.
    pub fn antisymmetrize(b: &Square<S>) -> Self {
        Self::from_fn(b.dim(), |i, j| (b.get(i, j) - b.get(j, i)) * 0.5)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[S] {
        &self.comps
    }

    /// `η(∂_i, ∂_j)`, expanded by sign from canonical storage.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.comps[pair_index(self.dim, i, j)],
            std::cmp::Ordering::Greater => -self.comps[pair_index(self.dim, j, i)],
            std::cmp::Ordering::Equal => S::zero(),
        }
    }

    pub fn to_square(&self) -> Square<S> {
        Square::from_fn(self.dim, |i, j| self.get(i, j))
    }

    pub fn eval(&self, x: &[S], y: &[S]) -> S {
        self.to_square().pair(x, y)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Form2<T> {
        Form2 {
            dim: self.dim,
            comps: self.comps.iter().map(f).collect(),
        }
    }

    pub fn values(&self) -> Form2<f64> {
        self.map(|s| s.value())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a - b)
    }

    pub fn scale(&self, c: S) -> Self {
        self.map(|&s| s * c)
    }

    fn zip(&self, rhs: &Self, f: impl Fn(S, S) -> S) -> Self {
        Self {
            dim: self.dim,
            comps: self
                .comps
                .iter()
                .zip(rhs.comps.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl<S: Differentiable> Form2<S> {
    pub fn lower(&self) -> Form2<S::Lower> {
        self.map(|s| s.lower())
    }
}

/// A three-form stored by its components `η_ijk`, `i < j < k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Form3<S> {
    dim: usize,
    comps: Vec<S>,
}

impl<S: Scalar> Form3<S> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            comps: vec![S::zero(); binomial(dim, 3)],
        }
    }

    /// Builds the form from `f(i, j, k)` evaluated for `i < j < k` only.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize) -> S) -> Self {
        let mut comps = Vec::with_capacity(binomial(dim, 3));
        for i in 0..dim {
            for j in i + 1..dim {
                for k in j + 1..dim {
                    comps.push(f(i, j, k));
                }
            }
        }
        Self { dim, comps }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[S] {
        &self.comps
    }

    /// `η(∂_i, ∂_j, ∂_k)`, expanded by the sign of the sorting permutation.
    pub fn get(&self, i: usize, j: usize, k: usize) -> S {
        if i == j || j == k || i == k {
            return S::zero();
        }
        let mut idx = [i, j, k];
        let mut sign = false;
        // three-element bubble sort, tracking parity
        for (a, b) in [(0, 1), (1, 2), (0, 1)] {
            if idx[a] > idx[b] {
                idx.swap(a, b);
                sign = !sign;
            }
        }
        let c = self.comps[triple_index(self.dim, idx[0], idx[1], idx[2])];
        if sign {
            -c
        } else {
            c
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Form3<T> {
        Form3 {
            dim: self.dim,
            comps: self.comps.iter().map(f).collect(),
        }
    }

    pub fn values(&self) -> Form3<f64> {
        self.map(|s| s.value())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            dim: self.dim,
            comps: self
                .comps
                .iter()
                .zip(rhs.comps.iter())
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: S) -> Self {
        self.map(|&s| s * c)
    }
}

/// A differential form of degree at most three at a point.
#[derive(Clone, Debug, PartialEq)]
pub enum DiffForm<S> {
    Zero(S),
    One(Vec<S>),
    Two(Form2<S>),
    Three(Form3<S>),
}

impl<S: Scalar> DiffForm<S> {
    pub fn degree(&self) -> usize {
        match self {
            DiffForm::Zero(_) => 0,
            DiffForm::One(_) => 1,
            DiffForm::Two(_) => 2,
            DiffForm::Three(_) => 3,
        }
    }

    fn scale(&self, c: S) -> Self {
        match self {
            DiffForm::Zero(s) => DiffForm::Zero(*s * c),
            DiffForm::One(a) => DiffForm::One(a.iter().map(|&x| x * c).collect()),
            DiffForm::Two(f) => DiffForm::Two(f.scale(c)),
            DiffForm::Three(f) => DiffForm::Three(f.scale(c)),
        }
    }
}

/// `α∧β` for forms of total degree at most three.
pub fn wedge<S: Scalar>(alpha: &DiffForm<S>, beta: &DiffForm<S>) -> Result<DiffForm<S>> {
    match (alpha, beta) {
        (DiffForm::Zero(c), other) | (other, DiffForm::Zero(c)) => Ok(other.scale(*c)),
        (DiffForm::One(a), DiffForm::One(b)) => Ok(DiffForm::Two(wedge_11(a, b))),
        (DiffForm::One(a), DiffForm::Two(e)) => Ok(DiffForm::Three(wedge_12(a, e))),
        // β∧α = α∧β for a 1-form and a 2-form
        (DiffForm::Two(e), DiffForm::One(a)) => Ok(DiffForm::Three(wedge_12(a, e))),
        (l, r) => Err(Error::DegreeOverflow {
            left: l.degree(),
            right: r.degree(),
        }),
    }
}

/// `(α∧β)_ij = α_iβ_j − α_jβ_i`.
pub fn wedge_11<S: Scalar>(alpha: &[S], beta: &[S]) -> Form2<S> {
    Form2::from_fn(alpha.len(), |i, j| alpha[i] * beta[j] - alpha[j] * beta[i])
}

/// `(α∧η)_ijk = α_iη_jk + α_jη_ki + α_kη_ij`.
pub fn wedge_12<S: Scalar>(alpha: &[S], eta: &Form2<S>) -> Form3<S> {
    Form3::from_fn(alpha.len(), |i, j, k| {
        alpha[i] * eta.get(j, k) + alpha[j] * eta.get(k, i) + alpha[k] * eta.get(i, j)
    })
}

/// `X⌟η` for a form of degree 1, 2 or 3.
pub fn interior<S: Scalar>(x: &[S], eta: &DiffForm<S>) -> Result<DiffForm<S>> {
    match eta {
        DiffForm::Zero(_) => Err(Error::InvalidDegree {
            op: "interior product",
            degree: 0,
        }),
        DiffForm::One(a) => Ok(DiffForm::Zero(contract(x, a))),
        DiffForm::Two(e) => Ok(DiffForm::One(interior_2(x, e))),
        DiffForm::Three(e) => Ok(DiffForm::Two(interior_3(x, e))),
    }
}

/// `α(X) = X^i α_i`.
pub fn contract<S: Scalar>(x: &[S], alpha: &[S]) -> S {
    x.iter()
        .zip(alpha.iter())
        .fold(S::zero(), |acc, (&xi, &ai)| acc + xi * ai)
}

/// `(X⌟η)_j = X^i η_ij`.
pub fn interior_2<S: Scalar>(x: &[S], eta: &Form2<S>) -> Vec<S> {
    let d = eta.dim();
    (0..d)
        .map(|j| (0..d).fold(S::zero(), |acc, i| acc + x[i] * eta.get(i, j)))
        .collect()
}

/// `(X⌟η)_jk = X^i η_ijk`.
pub fn interior_3<S: Scalar>(x: &[S], eta: &Form3<S>) -> Form2<S> {
    let d = eta.dim();
    Form2::from_fn(d, |j, k| {
        (0..d).fold(S::zero(), |acc, i| acc + x[i] * eta.get(i, j, k))
    })
}

/// `α^♯`, given the inverse metric.
pub fn sharp<S: Scalar>(g_inv: &Square<S>, alpha: &[S]) -> Vec<S> {
    g_inv.apply(alpha)
}

/// `X^♭`, given the metric.
pub fn flat<S: Scalar>(g: &Square<S>, x: &[S]) -> Vec<S> {
    g.apply(x)
}

/// `(Jα)_i = −α_k J^k_i`.
pub fn j_on_oneform<S: Scalar>(j: &Square<S>, alpha: &[S]) -> Vec<S> {
    let d = j.dim();
    (0..d)
        .map(|i| -(0..d).fold(S::zero(), |acc, k| acc + alpha[k] * j.get(k, i)))
        .collect()
}

/// The bilinear form `ω(A·,·)`, i.e. `B_ij = A^k_i ω_kj`.
pub fn omega_compose<S: Scalar>(omega: &Form2<S>, a: &Square<S>) -> Square<S> {
    let d = omega.dim();
    Square::from_fn(d, |i, j| {
        (0..d).fold(S::zero(), |acc, k| acc + a.get(k, i) * omega.get(k, j))
    })
}

/// The endomorphism `(X∧Y)Z = g(X,Z)Y − g(Y,Z)X`, from the vectors and their
/// metric duals.
pub fn vector_wedge<S: Scalar>(x: &[S], x_flat: &[S], y: &[S], y_flat: &[S]) -> Square<S> {
    Square::from_fn(x.len(), |i, j| x_flat[j] * y[i] - y_flat[j] * x[i])
}

/// A `g`-orthonormal basis at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalFrame {
    vectors: Vec<Vec<f64>>,
}

impl OrthonormalFrame {
    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// `g(e_i, e_j)`.
    pub fn gram(&self, g: &Square<f64>) -> Square<f64> {
        Square::from_fn(self.vectors.len(), |i, j| {
            g.pair(&self.vectors[i], &self.vectors[j])
        })
    }
}

/// Gram–Schmidt applied to the coordinate frame `∂_1, …, ∂_dim`.
pub fn orthonormal_frame(g: &Square<f64>) -> Result<OrthonormalFrame> {
    let d = g.dim();
    let scale = (0..d).map(|i| g.get(i, i).abs()).fold(0.0, f64::max);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(d);
    for k in 0..d {
        let mut v = vec![0.0; d];
        v[k] = 1.0;
        // modified Gram–Schmidt, applied twice for stability
        for _ in 0..2 {
            for e in &vectors {
                let c = g.pair(e, &v);
                for (vi, ei) in v.iter_mut().zip(e.iter()) {
                    *vi -= c * ei;
                }
            }
        }
        let norm_sq = g.pair(&v, &v);
        if !(norm_sq > 1e-14 * scale) {
            return Err(Error::Degenerate {
                what: "coordinate frame",
                pivot: norm_sq,
            });
        }
        let inv = 1.0 / norm_sq.sqrt();
        vectors.push(v.into_iter().map(|x| x * inv).collect());
    }
    Ok(OrthonormalFrame { vectors })
}

/// `Tr_ω η` computed twice: as the frame sum and as a full contraction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceOmega {
    /// `Σ_i η(e_i, Je_i)` over an orthonormal frame.
    pub frame_sum: f64,
    /// `g^{ac} J^b_c η_ab`.
    pub contraction: f64,
}

/// Trace of a bilinear form against `ω`.
pub fn trace_omega(
    eta: &Square<f64>,
    g_inv: &Square<f64>,
    j: &Square<f64>,
    frame: &OrthonormalFrame,
) -> TraceOmega {
    let frame_sum = frame
        .vectors()
        .iter()
        .map(|e| eta.pair(e, &j.apply(e)))
        .sum();
    let d = eta.dim();
    let mut contraction = 0.0;
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                contraction += g_inv.get(a, c) * j.get(b, c) * eta.get(a, b);
            }
        }
    }
    TraceOmega {
        frame_sum,
        contraction,
    }
}

/// `|α|²_g = g^{ij}α_iα_j`.
pub fn covector_norm_sq(g_inv: &Square<f64>, alpha: &[f64]) -> f64 {
    g_inv.pair(alpha, alpha)
}

/// `|X|²_g = g_ij X^i X^j`.
pub fn vector_norm_sq(g: &Square<f64>, x: &[f64]) -> f64 {
    g.pair(x, x)
}

/// `|B|²_g = g^{ia}g^{jb}B_ij B_ab` for a bilinear form.
pub fn bilinear_norm_sq(g_inv: &Square<f64>, b: &Square<f64>) -> f64 {
    let raised = g_inv.matmul(b).matmul(g_inv);
    let d = b.dim();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            acc += b.get(i, j) * raised.get(i, j);
        }
    }
    acc
}

/// `|η|²_g = (1/2!) g^{ia}g^{jb}η_ijη_ab`.
pub fn form2_norm_sq(g_inv: &Square<f64>, eta: &Form2<f64>) -> f64 {
    0.5 * bilinear_norm_sq(g_inv, &eta.to_square())
}

/// `|η|²_g = (1/3!) g^{ia}g^{jb}g^{kc}η_ijkη_abc`.
pub fn form3_norm_sq(g_inv: &Square<f64>, eta: &Form3<f64>) -> f64 {
    let d = eta.dim();
    let full = |i: usize, j: usize, k: usize| eta.get(i, j, k);
    // raise one index at a time
    let mut t1 = vec![0.0; d * d * d];
    for a in 0..d {
        for j in 0..d {
            for k in 0..d {
                let mut acc = 0.0;
                for i in 0..d {
                    acc += g_inv.get(a, i) * full(i, j, k);
                }
                t1[(a * d + j) * d + k] = acc;
            }
        }
    }
    let mut t2 = vec![0.0; d * d * d];
    for a in 0..d {
        for b in 0..d {
            for k in 0..d {
                let mut acc = 0.0;
                for j in 0..d {
                    acc += g_inv.get(b, j) * t1[(a * d + j) * d + k];
                }
                t2[(a * d + b) * d + k] = acc;
            }
        }
    }
    let mut acc = 0.0;
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let mut raised = 0.0;
                for k in 0..d {
                    raised += g_inv.get(c, k) * t2[(a * d + b) * d + k];
                }
                acc += raised * full(a, b, c);
            }
        }
    }
    acc / 6.0
}

/// `|A|²_g = g_ij g^{ab} A^i_a A^j_b` for an endomorphism.
pub fn endo_norm_sq(g: &Square<f64>, g_inv: &Square<f64>, a: &Square<f64>) -> f64 {
    g.matmul(a).matmul(g_inv).matmul(&a.transpose()).trace()
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &Square<f64>) -> f64 {
    let d = m.dim();
    let mat = nalgebra::DMatrix::from_fn(d, d, |i, j| 0.5 * (m.get(i, j) + m.get(j, i)));
    mat.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// The one-form field `Jα`.
pub fn j_on_oneform_field(
    j: &ComplexStructureField,
    alpha: &OneFormField,
) -> Result<OneFormField> {
    check_dims(j.dim(), alpha.dim())?;
    OneFormField::new(JOnOneForm {
        j: j.clone(),
        alpha: alpha.clone(),
    })
}

/// The two-form field `α∧β`.
pub fn wedge_field(alpha: &OneFormField, beta: &OneFormField) -> Result<TwoFormField> {
    check_dims(alpha.dim(), beta.dim())?;
    TwoFormField::new(WedgeOneForms {
        alpha: alpha.clone(),
        beta: beta.clone(),
    })
}

/// The vector field `α^♯`.
pub fn sharp_field(g: &MetricField, alpha: &OneFormField) -> Result<VectorField> {
    check_dims(g.dim(), alpha.dim())?;
    VectorField::new(SharpField {
        g: g.clone(),
        alpha: alpha.clone(),
    })
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

struct JOnOneForm {
    j: ComplexStructureField,
    alpha: OneFormField,
}

impl ComponentFn for JOnOneForm {
    fn dim(&self) -> usize {
        self.alpha.dim()
    }
    fn len(&self) -> usize {
        self.alpha.dim()
    }
    fn domain(&self) -> Domain {
        self.j.domain().intersect(self.alpha.domain())
    }
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let d = self.dim();
        let j = Square::from_components(d, self.j.eval(x)).expect("shape checked");
        j_on_oneform(&j, &self.alpha.eval(x))
    }
}

struct WedgeOneForms {
    alpha: OneFormField,
    beta: OneFormField,
}

impl ComponentFn for WedgeOneForms {
    fn dim(&self) -> usize {
        self.alpha.dim()
    }
    fn len(&self) -> usize {
        binomial(self.alpha.dim(), 2)
    }
    fn domain(&self) -> Domain {
        self.alpha.domain().intersect(self.beta.domain())
    }
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        wedge_11(&self.alpha.eval(x), &self.beta.eval(x)).comps
    }
}

struct SharpField {
    g: MetricField,
    alpha: OneFormField,
}

impl ComponentFn for SharpField {
    fn dim(&self) -> usize {
        self.alpha.dim()
    }
    fn len(&self) -> usize {
        self.alpha.dim()
    }
    fn domain(&self) -> Domain {
        self.g.domain().intersect(self.alpha.domain())
    }
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let d = self.dim();
        let g = Square::from_components(d, self.g.eval(x)).expect("shape checked");
        // a singular metric yields non-finite components rather than a panic
        match g.inverse() {
            Ok(g_inv) => sharp(&g_inv, &self.alpha.eval(x)),
            Err(_) => vec![S::constant(f64::NAN); d],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn basis(d: usize, k: usize) -> Vec<f64> {
        let mut v = vec![0.0; d];
        v[k] = 1.0;
        v
    }

    fn standard_j(n: usize) -> Square<f64> {
        let mut j = Square::zeros(2 * n);
        for k in 0..n {
            j.set(2 * k + 1, 2 * k, 1.0);
            j.set(2 * k, 2 * k + 1, -1.0);
        }
        j
    }

    #[test]
    fn canonical_indices_enumerate_in_order() {
        let d = 6;
        let mut expected = 0;
        for i in 0..d {
            for j in i + 1..d {
                assert_eq!(pair_index(d, i, j), expected);
                expected += 1;
            }
        }
        let mut expected = 0;
        for i in 0..d {
            for j in i + 1..d {
                for k in j + 1..d {
                    assert_eq!(triple_index(d, i, j, k), expected);
                    expected += 1;
                }
            }
        }
    }

    #[test]
    fn dx1_wedge_dx2_on_coordinate_pair() {
        let e1 = basis(4, 0);
        let e2 = basis(4, 1);
        let form = wedge_11(&e1, &e2);
        assert_eq!(form.eval(&e1, &e2), 1.0);
        assert_eq!(form.eval(&e2, &e1), -1.0);
    }

    #[test]
    fn form_wedged_with_itself_vanishes() {
        let theta = vec![-2.0, 0.3, 1.1, -0.7];
        let form = wedge_11(&theta, &theta);
        assert!(form.components().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn hopf_theta_wedge_jtheta_at_unit_point() {
        // θ = −2dx₁, Jθ = −2dy₁ (coordinate index 1)
        let theta = vec![-2.0, 0.0, 0.0, 0.0];
        let jtheta = j_on_oneform(&standard_j(2), &theta);
        assert_eq!(jtheta, vec![0.0, -2.0, 0.0, 0.0]);
        let form = wedge_11(&theta, &jtheta);
        assert_eq!(form.get(0, 1), 4.0);
    }

    #[test]
    fn wedge_degree_overflow() {
        let a = DiffForm::Two(Form2::<f64>::zeros(4));
        let b = DiffForm::Two(Form2::<f64>::zeros(4));
        assert!(matches!(
            wedge(&a, &b),
            Err(Error::DegreeOverflow { left: 2, right: 2 })
        ));
        let c = DiffForm::One(vec![1.0, 0.0, 0.0, 0.0]);
        let t = DiffForm::Three(Form3::<f64>::zeros(4));
        assert!(wedge(&c, &t).is_err());
    }

    #[test]
    fn interior_of_zero_form_is_rejected() {
        assert!(interior(&[1.0, 0.0], &DiffForm::Zero(3.0)).is_err());
    }

    #[test]
    fn hopf_interior_lee_vector_with_omega() {
        // T = −½∂₁, ω = 4(dx₁∧dy₁ + dx₂∧dy₂)
        let omega = Form2::from_fn(4, |i, j| {
            if (i, j) == (0, 1) || (i, j) == (2, 3) {
                4.0
            } else {
                0.0
            }
        });
        let t = vec![-0.5, 0.0, 0.0, 0.0];
        assert_eq!(interior_2(&t, &omega), vec![0.0, -2.0, 0.0, 0.0]);
    }

    #[test]
    fn j_squared_on_forms_is_minus_identity() {
        let j = standard_j(3);
        let alpha = vec![0.3, -1.2, 2.5, 0.1, -0.4, 0.9];
        let jj = j_on_oneform(&j, &j_on_oneform(&j, &alpha));
        for (a, b) in jj.iter().zip(alpha.iter()) {
            assert_eq!(*a, -b);
        }
    }

    #[test]
    fn flat_kahler_j_sign_anchor() {
        // ω(∂x, ∂y) = g(J∂x, ∂y) = 1 > 0 and J dx₁ = dy₁
        let j = standard_j(2);
        assert_eq!(j_on_oneform(&j, &basis(4, 0)), basis(4, 1));
    }

    #[test]
    fn sharp_and_flat_on_hopf_point() {
        let g = Square::from_fn(4, |i, k| if i == k { 4.0 } else { 0.0 });
        let g_inv = g.inverse().unwrap();
        let t = sharp(&g_inv, &[-2.0, 0.0, 0.0, 0.0]);
        assert_eq!(t, vec![-0.5, 0.0, 0.0, 0.0]);
        assert_eq!(flat(&g, &t), vec![-2.0, 0.0, 0.0, 0.0]);
        assert!((contract(&t, &[-2.0, 0.0, 0.0, 0.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_metric_is_degenerate() {
        let mut g = Square::<f64>::identity(4);
        g.set(3, 3, 0.0);
        assert!(matches!(g.inverse(), Err(Error::Degenerate { .. })));
        assert!(orthonormal_frame(&g).is_err());
    }

    #[test]
    fn frame_of_scaled_metric() {
        let g = Square::from_fn(4, |i, k| if i == k { 4.0 } else { 0.0 });
        let frame = orthonormal_frame(&g).unwrap();
        for (k, e) in frame.vectors().iter().enumerate() {
            let mut expected = vec![0.0; 4];
            expected[k] = 0.5;
            assert_eq!(e, &expected);
        }
        let flat_frame = orthonormal_frame(&Square::identity(4)).unwrap();
        for (k, e) in flat_frame.vectors().iter().enumerate() {
            assert_eq!(e, &basis(4, k));
        }
    }

    #[test]
    fn trace_of_fundamental_form_is_dimension() {
        let g = Square::identity(4);
        let j = standard_j(2);
        let omega = Form2::antisymmetrize(&Square::from_fn(4, |i, k| {
            (0..4).map(|m| j.get(m, i) * g.get(m, k)).sum()
        }));
        let frame = orthonormal_frame(&g).unwrap();
        let tr = trace_omega(&omega.to_square(), &g.inverse().unwrap(), &j, &frame);
        assert!((tr.frame_sum - 4.0).abs() < 1e-12);
        assert!((tr.contraction - 4.0).abs() < 1e-12);
    }

    #[test]
    fn determinant_and_inverse_jets() {
        use crate::jet::Jet2;
        let x = Jet2::seed(&[2.0, 3.0]);
        let m = Square::from_fn(2, |i, j| match (i, j) {
            (0, 0) => x[0],
            (1, 1) => x[1],
            (0, 1) | (1, 0) => x[0] * x[1] * 0.1,
            _ => unreachable!(),
        });
        let det = m.determinant();
        // det = x0 x1 − 0.01 x0² x1²
        assert!((det.value - (6.0 - 0.36)).abs() < 1e-14);
        assert!((det.grad[0] - (3.0 - 0.02 * 2.0 * 9.0)).abs() < 1e-14);
        let inv = m.inverse().unwrap();
        let prod = m.matmul(&inv);
        for i in 0..2 {
            for j in 0..2 {
                let e = prod.get(i, j);
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((e.value - target).abs() < 1e-14);
                assert!(e.grad.iter().all(|g| g.abs() < 1e-14));
                assert!(e.hess(0, 1).abs() < 1e-13);
            }
        }
    }

    proptest! {
        #[test]
        fn two_form_antisymmetry_is_exact(
            comps in proptest::collection::vec(-10.0f64..10.0, 15),
            i in 0usize..6, j in 0usize..6,
        ) {
            let form = Form2::from_components(6, comps).unwrap();
            prop_assert_eq!(form.get(i, j), -form.get(j, i));
        }

        #[test]
        fn three_form_antisymmetry_is_exact(
            comps in proptest::collection::vec(-10.0f64..10.0, 20),
            i in 0usize..6, j in 0usize..6, k in 0usize..6,
        ) {
            let form = Form3 { dim: 6, comps };
            prop_assert_eq!(form.get(i, j, k), -form.get(j, i, k));
            prop_assert_eq!(form.get(i, j, k), -form.get(i, k, j));
            prop_assert_eq!(form.get(i, j, k), form.get(j, k, i));
        }

        #[test]
        fn interior_is_an_antiderivation(
            theta in proptest::collection::vec(-3.0f64..3.0, 4),
            x in proptest::collection::vec(-3.0f64..3.0, 4),
            omega in proptest::collection::vec(-3.0f64..3.0, 6),
        ) {
            let omega = Form2::from_components(4, omega).unwrap();
            let lhs = interior_3(&x, &wedge_12(&theta, &omega));
            let rhs = omega
                .scale(contract(&x, &theta))
                .sub(&wedge_11(&theta, &interior_2(&x, &omega)));
            for (a, b) in lhs.components().iter().zip(rhs.components()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn trace_omega_frame_independent(
            diag in proptest::collection::vec(0.5f64..4.0, 2),
            eta in proptest::collection::vec(-2.0f64..2.0, 6),
        ) {
            // Hermitian metric: constant on each complex line
            let g = Square::from_fn(4, |i, k| if i == k { diag[i / 2] } else { 0.0 });
            let j = standard_j(2);
            let eta = Form2::from_components(4, eta).unwrap().to_square();
            let frame = orthonormal_frame(&g).unwrap();
            let tr = trace_omega(&eta, &g.inverse().unwrap(), &j, &frame);
            prop_assert!((tr.frame_sum - tr.contraction).abs() < 1e-10);
        }

        #[test]
        fn trace_of_wedge_is_twice_pairing(
            alpha in proptest::collection::vec(-2.0f64..2.0, 4),
            beta in proptest::collection::vec(-2.0f64..2.0, 4),
        ) {
            let g = Square::<f64>::identity(4);
            let j = standard_j(2);
            let frame = orthonormal_frame(&g).unwrap();
            let form = wedge_11(&alpha, &beta).to_square();
            let tr = trace_omega(&form, &g, &j, &frame);
            let pairing = 2.0 * contract(&j_on_oneform(&j, &alpha), &beta);
            prop_assert!((tr.frame_sum - pairing).abs() < 1e-12);
        }
    }
}
