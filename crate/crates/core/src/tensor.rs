//! Dense covariant tensors of rank 2 and rank 4.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ModelPoint, Vector};
use crate::tolerance::Tolerance;

/// Fully covariant rank-4 tensor stored as a dense `m^4` table,
/// row-major over `(i, j, k, l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadTensor {
    dim: usize,
    comps: Vec<f64>,
}

impl QuadTensor {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            comps: vec![0.0; dim.pow(4)],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut comps = Vec::with_capacity(dim.pow(4));
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        comps.push(f(i, j, k, l));
                    }
                }
            }
        }
        Self { dim, comps }
    }

    pub fn from_components(dim: usize, comps: Vec<f64>) -> Result<Self> {
        if comps.len() != dim.pow(4) {
            return Err(Error::DimensionMismatch {
                expected: dim.pow(4),
                found: comps.len(),
            });
        }
        Ok(Self { dim, comps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[f64] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<f64> {
        self.comps
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.dim + j) * self.dim + k) * self.dim + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.comps[self.offset(i, j, k, l)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, value: f64) {
        let o = self.offset(i, j, k, l);
        self.comps[o] = value;
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |a, c| a.max(c.abs()))
    }

    /// `max(1, max |component|)`, the scale every relative residual uses.
    pub fn scale(&self) -> f64 {
        Tolerance::scale(self.max_abs())
    }

    /// Frobenius inner product of the component tables.
    pub fn dot(&self, other: &Self) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn check_model(&self, model: &ModelPoint) -> Result<()> {
        if self.dim != model.dim() {
            return Err(Error::DimensionMismatch {
                expected: model.dim(),
                found: self.dim,
            });
        }
        Ok(())
    }

    /// `T(x, y, z, u)`.
    pub fn eval(&self, x: &Vector, y: &Vector, z: &Vector, u: &Vector) -> f64 {
        let m = self.dim;
        let mut acc = 0.0;
        let mut idx = 0;
        for i in 0..m {
            let mut si = 0.0;
            for j in 0..m {
                let mut sj = 0.0;
                for k in 0..m {
                    let row = &self.comps[idx..idx + m];
                    idx += m;
                    let mut sk = 0.0;
                    for (t, ul) in row.iter().zip(u.iter()) {
                        sk += t * ul;
                    }
                    sj += z[k] * sk;
                }
                si += y[j] * sj;
            }
            acc += x[i] * si;
        }
        acc
    }

    /// Pull back through the linear map `a` in the selected slots:
    /// `T'(e_i, ...) = T(a e_i, ...)` for every slot flagged in `slots`.
    pub fn pullback(&self, a: &DMatrix<f64>, slots: [bool; 4]) -> Self {
        let m = self.dim;
        let mut cur = self.comps.clone();
        let strides = [m * m * m, m * m, m, 1];
        for (slot, &on) in slots.iter().enumerate() {
            if !on {
                continue;
            }
            let stride = strides[slot];
            let mut next = vec![0.0; cur.len()];
            for (o, out) in next.iter_mut().enumerate() {
                let idx = (o / stride) % m;
                let base = o - idx * stride;
                let mut s = 0.0;
                for c in 0..m {
                    let coeff = a[(c, idx)];
                    if coeff != 0.0 {
                        s += coeff * cur[base + c * stride];
                    }
                }
                *out = s;
            }
            cur = next;
        }
        Self { dim: m, comps: cur }
    }

    /// `T` with its slots permuted: result `(i0,i1,i2,i3) -> T[i_{p0}, i_{p1}, i_{p2}, i_{p3}]`.
    pub fn permuted(&self, p: [usize; 4]) -> Self {
        Self::from_fn(self.dim, |i, j, k, l| {
            let idx = [i, j, k, l];
            self.get(idx[p[0]], idx[p[1]], idx[p[2]], idx[p[3]])
        })
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            comps: self.comps.iter().map(|v| v * c).collect(),
        }
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: f64, other: &Self) {
        assert_eq!(self.dim, other.dim, "tensor dimension mismatch");
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            *a += c * b;
        }
    }
}

impl Add for &QuadTensor {
    type Output = QuadTensor;
    fn add(self, rhs: &QuadTensor) -> QuadTensor {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &QuadTensor {
    type Output = QuadTensor;
    fn sub(self, rhs: &QuadTensor) -> QuadTensor {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Add for QuadTensor {
    type Output = QuadTensor;
    fn add(mut self, rhs: QuadTensor) -> QuadTensor {
        self.axpy(1.0, &rhs);
        self
    }
}

impl Sub for QuadTensor {
    type Output = QuadTensor;
    fn sub(mut self, rhs: QuadTensor) -> QuadTensor {
        self.axpy(-1.0, &rhs);
        self
    }
}

impl AddAssign<&QuadTensor> for QuadTensor {
    fn add_assign(&mut self, rhs: &QuadTensor) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&QuadTensor> for QuadTensor {
    fn sub_assign(&mut self, rhs: &QuadTensor) {
        self.axpy(-1.0, rhs);
    }
}

impl Mul<&QuadTensor> for f64 {
    type Output = QuadTensor;
    fn mul(self, rhs: &QuadTensor) -> QuadTensor {
        rhs.scaled(self)
    }
}

impl Mul<QuadTensor> for f64 {
    type Output = QuadTensor;
    fn mul(self, rhs: QuadTensor) -> QuadTensor {
        rhs.scaled(self)
    }
}

impl Neg for QuadTensor {
    type Output = QuadTensor;
    fn neg(self) -> QuadTensor {
        self.scaled(-1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Symmetry {
    Symmetric,
    Unconstrained,
}

/// Rank-2 covariant tensor (Ricci forms and the generators of `phi`, `psi`).
#[derive(Debug, Clone, PartialEq)]
pub struct Bilinear {
    comps: DMatrix<f64>,
    symmetry: Symmetry,
}

impl Bilinear {
    /// Symmetric form; fails when `comps` is not symmetric within `tol`.
    pub fn symmetric(comps: DMatrix<f64>, tol: Tolerance) -> Result<Self> {
        let r = symmetry_residual(&comps);
        if !tol.accepts(r) {
            return Err(Error::NotSymmetric(r));
        }
        Ok(Self {
            comps,
            symmetry: Symmetry::Symmetric,
        })
    }

    pub fn unconstrained(comps: DMatrix<f64>) -> Self {
        Self {
            comps,
            symmetry: Symmetry::Unconstrained,
        }
    }

    /// Tags the form symmetric when it is, unconstrained otherwise.
    pub(crate) fn detect(comps: DMatrix<f64>) -> Self {
        let symmetry = if Tolerance::default().accepts(symmetry_residual(&comps)) {
            Symmetry::Symmetric
        } else {
            Symmetry::Unconstrained
        };
        Self { comps, symmetry }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            comps: DMatrix::zeros(dim, dim),
            symmetry: Symmetry::Symmetric,
        }
    }

    /// The metric itself as a bilinear form.
    pub fn metric(model: &ModelPoint) -> Self {
        Self {
            comps: model.metric().clone(),
            symmetry: Symmetry::Symmetric,
        }
    }

    pub fn comps(&self) -> &DMatrix<f64> {
        &self.comps
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn dim(&self) -> usize {
        self.comps.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.comps[(i, j)]
    }

    pub fn eval(&self, x: &Vector, y: &Vector) -> f64 {
        x.dot(&(&self.comps * y))
    }

    /// `tr_g S = g^{ij} S_ij`.
    pub fn trace(&self, model: &ModelPoint) -> f64 {
        model.metric_inv().component_mul(&self.comps).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.amax()
    }

    /// Largest asymmetry relative to `max(1, max |S_ij|)`.
    pub fn symmetry_residual(&self) -> f64 {
        symmetry_residual(&self.comps)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            comps: &self.comps * c,
            symmetry: self.symmetry,
        }
    }

    /// `a * self + b * other`; symmetric only when both inputs are.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        let symmetry =
            if self.symmetry == Symmetry::Symmetric && other.symmetry == Symmetry::Symmetric {
                Symmetry::Symmetric
            } else {
                Symmetry::Unconstrained
            };
        Self {
            comps: &self.comps * a + &other.comps * b,
            symmetry,
        }
    }
}

fn symmetry_residual(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).amax() / Tolerance::scale(m.amax())
}
