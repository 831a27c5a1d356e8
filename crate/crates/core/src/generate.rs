//! Random tensor families used by the fuzz harness, the tests and the CLI.

use nalgebra::DMatrix;
use rand::Rng;

use crate::canonical::{bochner, build_space_form, pi1, pi2, psi};
use crate::error::Result;
use crate::model::ModelPoint;
use crate::tensor::{Bilinear, QuadTensor};

fn noise<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(-1.0..=1.0)
}

/// Project onto curvature-like tensors: antisymmetrize both pairs, symmetrize
/// under pair exchange, then remove the cyclic part, `T - b(T)/3`.
pub fn curvature_projection(t: &QuadTensor) -> QuadTensor {
    let m = t.dim();
    let a = QuadTensor::from_fn(m, |i, j, k, l| {
        0.25 * (t.get(i, j, k, l) - t.get(j, i, k, l) - t.get(i, j, l, k) + t.get(j, i, l, k))
    });
    let p = QuadTensor::from_fn(m, |i, j, k, l| {
        0.5 * (a.get(i, j, k, l) + a.get(k, l, i, j))
    });
    QuadTensor::from_fn(m, |i, j, k, l| {
        let cyc = p.get(i, j, k, l) + p.get(j, k, i, l) + p.get(k, i, j, l);
        p.get(i, j, k, l) - cyc / 3.0
    })
}

/// Uniform `[-1,1]` noise projected onto curvature-like tensors.
pub fn random_curvature_like<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> QuadTensor {
    let raw = QuadTensor::from_fn(dim, |_, _, _, _| noise(rng));
    curvature_projection(&raw)
}

pub fn random_symmetric<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Bilinear {
    let a = DMatrix::from_fn(dim, dim, |_, _| noise(rng));
    Bilinear::detect((&a + a.transpose()) * 0.5)
}

/// Symmetric `S` with `S(Jx,Jy) = S(x,y)`; such forms satisfy the hybrid condition.
pub fn random_hybrid_symmetric<R: Rng + ?Sized>(
    model: &ModelPoint,
    rng: &mut R,
) -> Result<Bilinear> {
    let j = model.require_j()?;
    let s = random_symmetric(model.dim(), rng).comps().clone();
    let inv = (&s + j.transpose() * &s * j) * 0.5;
    Ok(Bilinear::detect((&inv + inv.transpose()) * 0.5))
}

/// Skew `A` with `A(Jx,Jy) = -A(x,y)`; such forms satisfy the hybrid condition.
pub fn random_hybrid_skew<R: Rng + ?Sized>(model: &ModelPoint, rng: &mut R) -> Result<Bilinear> {
    let j = model.require_j()?;
    let m = model.dim();
    let a = DMatrix::from_fn(m, m, |_, _| noise(rng));
    let a = (&a - a.transpose()) * 0.5;
    let anti = (&a - j.transpose() * &a * j) * 0.5;
    Ok(Bilinear::unconstrained((&anti - anti.transpose()) * 0.5))
}

/// Average over `T`, `T(.,.,J,J)`, `T(J,J,.,.)` and `T(J,J,J,J)`.
fn j_average(j: &DMatrix<f64>, t: &QuadTensor) -> QuadTensor {
    let last = t.pullback(j, [false, false, true, true]);
    let first = t.pullback(j, [true, true, false, false]);
    let all = t.pullback(j, [true; 4]);
    let mut out = t.clone();
    out += &last;
    out += &first;
    out += &all;
    out.scaled(0.25)
}

/// Project onto Kaehler-type curvature tensors (curvature-like and
/// `T(x,y,Jz,Ju) = T(x,y,z,u)`) by alternating projections.
pub fn kaehler_projection(model: &ModelPoint, t: &QuadTensor) -> Result<QuadTensor> {
    let j = model.require_j()?;
    let mut cur = curvature_projection(t);
    for _ in 0..200 {
        let next = curvature_projection(&j_average(j, &cur));
        let delta = (&next - &cur).max_abs();
        cur = next;
        if delta <= 1e-15 * cur.scale() {
            break;
        }
    }
    Ok(cur)
}

pub fn random_kaehler<R: Rng + ?Sized>(model: &ModelPoint, rng: &mut R) -> Result<QuadTensor> {
    let raw = QuadTensor::from_fn(model.dim(), |_, _, _, _| noise(rng));
    kaehler_projection(model, &raw)
}

/// `nu pi1 + psi(S) + psi(A) + c pi2` with `S` and `A` random hybrid forms.
/// Every member has constant antiholomorphic sectional curvature `nu`.
pub fn random_constant_antiholomorphic<R: Rng + ?Sized>(
    model: &ModelPoint,
    nu: f64,
    rng: &mut R,
) -> Result<QuadTensor> {
    let s = random_hybrid_symmetric(model, rng)?;
    let a = random_hybrid_skew(model, rng)?;
    let c = noise(rng);
    let mut t = pi1(model).scaled(nu);
    t += &psi(model, &s)?;
    t += &psi(model, &a)?;
    t += &pi2(model)?.scaled(c);
    Ok(t)
}

/// `R - B(R)` for random curvature-like `R`: the Bochner-flat part.
pub fn random_bochner_flat<R: Rng + ?Sized>(model: &ModelPoint, rng: &mut R) -> Result<QuadTensor> {
    let r = random_curvature_like(model.dim(), rng);
    let b = bochner(model, &r)?;
    Ok(&r - &b.tensor)
}

pub fn random_kaehler_bochner_flat<R: Rng + ?Sized>(
    model: &ModelPoint,
    rng: &mut R,
) -> Result<QuadTensor> {
    let r = random_kaehler(model, rng)?;
    let b = bochner(model, &r)?;
    Ok(&r - &b.tensor)
}

/// Random space form with `nu`, `mu` uniform in `[-1,1]`.
pub fn random_space_form<R: Rng + ?Sized>(model: &ModelPoint, rng: &mut R) -> Result<QuadTensor> {
    let nu = noise(rng);
    let mu = noise(rng);
    build_space_form(model, nu, mu)
}
