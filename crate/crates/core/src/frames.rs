//! Orthonormal frames of prescribed signature and 2-planes.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelPoint, Vector};
use crate::tensor::QuadTensor;
use crate::tolerance::Tolerance;

/// Relative singular-value floor below which input vectors count as dependent.
const DEPENDENCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    fn of(v: f64) -> Self {
        if v < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

/// Ordered orthonormal vectors with their sign labels `g(v,v) = +-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    vectors: Vec<Vector>,
    signs: Vec<Sign>,
}

impl Frame {
    pub fn empty() -> Self {
        Self {
            vectors: Vec::new(),
            signs: Vec::new(),
        }
    }

    pub(crate) fn from_parts(vectors: Vec<Vector>, signs: Vec<Sign>) -> Self {
        debug_assert_eq!(vectors.len(), signs.len());
        Self { vectors, signs }
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn negatives(&self) -> usize {
        self.signs.iter().filter(|s| **s == Sign::Minus).count()
    }

    pub(crate) fn push(&mut self, v: Vector, s: Sign) {
        self.vectors.push(v);
        self.signs.push(s);
    }

    /// Largest deviation of the Gram matrix from `diag(signs)`, relative to
    /// the Euclidean size of the vectors involved.
    pub fn orthonormality_residual(&self, model: &ModelPoint) -> f64 {
        let mut worst = 0.0f64;
        for (a, va) in self.vectors.iter().enumerate() {
            for (b, vb) in self.vectors.iter().enumerate() {
                let want = if a == b { self.signs[a].value() } else { 0.0 };
                let size = (va.norm() * vb.norm()).max(1.0);
                worst = worst.max((model.g(va, vb) - want).abs() / size);
            }
        }
        worst
    }

    /// Remove the frame components from `v`: `v - sum_f eps_f g(v,f) f`.
    pub(crate) fn project_out(&self, model: &ModelPoint, v: &Vector) -> Vector {
        let mut w = v.clone();
        for (f, s) in self.vectors.iter().zip(&self.signs) {
            let c = s.value() * model.g(&w, f);
            w.axpy(-c, f, 1.0);
        }
        w
    }
}

/// A 2-plane given by a basis, with its cached Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    basis: [Vector; 2],
    gram: [[f64; 2]; 2],
}

impl Plane {
    pub fn new(model: &ModelPoint, x: Vector, y: Vector) -> Result<Self> {
        model.check_vector(&x)?;
        model.check_vector(&y)?;
        let (nx, ny) = (x.norm(), y.norm());
        if nx == 0.0 || ny == 0.0 {
            return Err(Error::DependentInput);
        }
        let xh = &x / nx;
        let perp = &y - &xh * xh.dot(&y);
        if perp.norm() <= DEPENDENCE_TOL * ny {
            return Err(Error::DependentInput);
        }
        let gram = [
            [model.g(&x, &x), model.g(&x, &y)],
            [model.g(&y, &x), model.g(&y, &y)],
        ];
        Ok(Self {
            basis: [x, y],
            gram,
        })
    }

    pub fn basis(&self) -> &[Vector; 2] {
        &self.basis
    }

    pub fn gram(&self) -> [[f64; 2]; 2] {
        self.gram
    }

    /// Basis rescaled to Euclidean unit length; all classifications use it so
    /// that verdicts do not depend on the scale of the given basis.
    fn unit_basis(&self) -> [Vector; 2] {
        [
            &self.basis[0] / self.basis[0].norm(),
            &self.basis[1] / self.basis[1].norm(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Degeneracy {
    Nondegenerate,
    WeaklyIsotropic,
    StronglyIsotropic,
}

impl Degeneracy {
    pub fn label(self) -> &'static str {
        match self {
            Degeneracy::Nondegenerate => "nondegenerate",
            Degeneracy::WeaklyIsotropic => "weakly isotropic",
            Degeneracy::StronglyIsotropic => "strongly isotropic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Holomorphy {
    Holomorphic,
    Antiholomorphic,
    Generic,
}

impl Holomorphy {
    pub fn label(self) -> &'static str {
        match self {
            Holomorphy::Holomorphic => "holomorphic",
            Holomorphy::Antiholomorphic => "antiholomorphic",
            Holomorphy::Generic => "generic",
        }
    }
}

fn gram_of(model: &ModelPoint, b: &[Vector; 2]) -> [[f64; 2]; 2] {
    [
        [model.g(&b[0], &b[0]), model.g(&b[0], &b[1])],
        [model.g(&b[1], &b[0]), model.g(&b[1], &b[1])],
    ]
}

/// Rank of the restricted metric: singular values of the Gram matrix of the
/// unit basis, thresholded at `tol * (1 + max |Gram entry|)`.
pub fn classify_plane(model: &ModelPoint, p: &Plane, tol: Tolerance) -> Degeneracy {
    let gm = gram_of(model, &p.unit_basis());
    let (a, b, c) = (gm[0][0], 0.5 * (gm[0][1] + gm[1][0]), gm[1][1]);
    let mean = 0.5 * (a + c);
    let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let max_entry = a.abs().max(b.abs()).max(c.abs());
    let thr = tol.rel * (1.0 + max_entry);
    let rank = [(mean + rad).abs(), (mean - rad).abs()]
        .iter()
        .filter(|s| **s > thr)
        .count();
    match rank {
        2 => Degeneracy::Nondegenerate,
        1 => Degeneracy::WeaklyIsotropic,
        _ => Degeneracy::StronglyIsotropic,
    }
}

/// Holomorphic when `J` maps the plane into itself, antiholomorphic when the
/// plane is `g`-orthogonal to its image (and not holomorphic).
pub fn classify_holomorphy(model: &ModelPoint, p: &Plane, tol: Tolerance) -> Result<Holomorphy> {
    let j = model.require_j()?;
    let [x, y] = p.unit_basis();
    let jx = j * &x;
    let jy = j * &y;

    // Euclidean projection of Jx, Jy onto span{x, y}
    let basis = DMatrix::from_columns(&[x.clone(), y.clone()]);
    let normal = basis.transpose() * &basis;
    let inv = normal.try_inverse().ok_or(Error::DependentInput)?;
    let off_plane = |v: &Vector| -> f64 {
        let coeff = &inv * (basis.transpose() * v);
        (v - &basis * coeff).norm() / v.norm().max(f64::MIN_POSITIVE)
    };
    let j_scale = j.amax();
    if off_plane(&jx).max(off_plane(&jy)) <= tol.rel * (1.0 + j_scale) {
        return Ok(Holomorphy::Holomorphic);
    }
    let scale = 1.0 + model.metric().amax() * j_scale;
    let mixed = [
        model.g(&x, &jx),
        model.g(&x, &jy),
        model.g(&y, &jx),
        model.g(&y, &jy),
    ];
    if mixed.iter().all(|v| v.abs() <= tol.rel * scale) {
        Ok(Holomorphy::Antiholomorphic)
    } else {
        Ok(Holomorphy::Generic)
    }
}

/// `K = R(x,y,y,x) / (g(x,x) g(y,y) - g(x,y)^2)` on a nondegenerate plane.
pub fn sectional_curvature(
    model: &ModelPoint,
    r: &QuadTensor,
    p: &Plane,
    tol: Tolerance,
) -> Result<f64> {
    r.check_model(model)?;
    let ub = p.unit_basis();
    let gm = gram_of(model, &ub);
    let den = gm[0][0] * gm[1][1] - gm[0][1] * gm[1][0];
    let max_entry = gm.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    if den.abs() <= tol.rel * (1.0 + max_entry).powi(2) {
        return Err(Error::DegeneratePlane);
    }
    let [x, y] = ub;
    Ok(r.eval(&x, &y, &y, &x) / den)
}

/// `K(x,y)` for an already orthonormal (or at least nondegenerate) pair,
/// skipping the degeneracy check.
pub(crate) fn sectional_unchecked(
    model: &ModelPoint,
    r: &QuadTensor,
    x: &Vector,
    y: &Vector,
) -> f64 {
    let gxy = model.g(x, y);
    r.eval(x, y, y, x) / (model.g(x, x) * model.g(y, y) - gxy * gxy)
}

fn check_independent(vectors: &[Vector]) -> Result<()> {
    if vectors.is_empty() {
        return Ok(());
    }
    let stack = DMatrix::from_columns(vectors);
    let sv = stack.singular_values();
    let max = sv.max();
    let min = sv.min();
    if max == 0.0 || min <= DEPENDENCE_TOL * max {
        return Err(Error::DependentInput);
    }
    Ok(())
}

/// Continue `frame` with candidates: at every step each remaining candidate is
/// projected off the frame and the one with the largest `|g(w,w)|` is taken
/// (lowest index on ties). If every remaining self-product vanishes but two
/// candidates pair non-trivially, their sum replaces the first.
///
/// With `drop_dependent`, candidates that project to zero are discarded
/// instead of reported.
fn extend_frame(
    model: &ModelPoint,
    mut frame: Frame,
    candidates: Vec<Vector>,
    tol: Tolerance,
    drop_dependent: bool,
) -> Result<Frame> {
    let refs: Vec<f64> = candidates.iter().map(|v| v.norm()).collect();
    let mut pool: Vec<(Vector, f64)> = candidates.into_iter().zip(refs).collect();
    while !pool.is_empty() && frame.len() < model.dim() {
        let mut projected: Vec<(Vector, f64)> = Vec::with_capacity(pool.len());
        for (v, reference) in pool.drain(..) {
            let w = frame.project_out(model, &v);
            if w.norm() <= DEPENDENCE_TOL * reference.max(f64::MIN_POSITIVE) {
                if drop_dependent {
                    continue;
                }
                return Err(Error::DependentInput);
            }
            projected.push((w, reference));
        }
        if projected.is_empty() {
            break;
        }
        let mut best: Option<(usize, f64)> = None;
        for (idx, (w, _)) in projected.iter().enumerate() {
            let q = model.g(w, w).abs();
            if best.is_none_or(|(_, bq)| q > bq) {
                best = Some((idx, q));
            }
        }
        let (idx, q) = best.expect("non-empty pool");
        let w = &projected[idx].0;
        if q > tol.rel * w.norm_squared() {
            let (w, _) = projected.remove(idx);
            let gww = model.g(&w, &w);
            frame.push(&w / gww.abs().sqrt(), Sign::of(gww));
            pool = projected;
            continue;
        }
        // every remaining direction is null: look for a pairing
        let mut pair: Option<(usize, usize, f64)> = None;
        for a in 0..projected.len() {
            for b in a + 1..projected.len() {
                let (wa, wb) = (&projected[a].0, &projected[b].0);
                let rel = model.g(wa, wb).abs() / (wa.norm() * wb.norm());
                if rel > tol.rel && pair.is_none_or(|(_, _, r)| rel > r) {
                    pair = Some((a, b, rel));
                }
            }
        }
        let Some((a, b, _)) = pair else {
            return Err(Error::DegenerateSubspace);
        };
        let (wa, wb) = (projected[a].0.clone(), projected[b].0.clone());
        let c = model.g(&wa, &wb).signum() * wa.norm() / wb.norm();
        projected[a].0 = &wa + &wb * c;
        pool = projected;
    }
    Ok(frame)
}

/// Indefinite Gram-Schmidt with pivoting. The result spans the same subspace
/// as `vectors`; fails when the vectors are dependent or their span is
/// degenerate.
pub fn gram_schmidt_indefinite(
    model: &ModelPoint,
    vectors: &[Vector],
    tol: Tolerance,
) -> Result<Frame> {
    for v in vectors {
        model.check_vector(v)?;
    }
    check_independent(vectors)?;
    extend_frame(model, Frame::empty(), vectors.to_vec(), tol, false)
}

/// Extend an orthonormal frame to a full orthonormal basis. Candidates are
/// `m` seeded random vectors followed by the standard basis as a fallback.
pub fn complete_to_basis(
    model: &ModelPoint,
    frame: &Frame,
    seed: u64,
    tol: Tolerance,
) -> Result<Frame> {
    let m = model.dim();
    let mut rng = crate::sampling::stream_rng(seed, 0);
    let mut candidates: Vec<Vector> = (0..m)
        .map(|_| Vector::from_fn(m, |_, _| rng.random_range(-1.0..=1.0)))
        .collect();
    candidates.extend((0..m).map(|i| {
        let mut e = Vector::zeros(m);
        e[i] = 1.0;
        e
    }));
    let full = extend_frame(model, frame.clone(), candidates, tol, true)?;
    if full.len() != m {
        return Err(Error::DegenerateSubspace);
    }
    Ok(full)
}
