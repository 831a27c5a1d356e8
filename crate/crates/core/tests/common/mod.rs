//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use isocurv::{ModelPoint, QuadTensor, Tolerance, Vector};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn noise(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-1.0..=1.0)
}

pub fn random_matrix(m: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(m, m, |_, _| noise(rng))
}

pub fn random_sym(m: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let a = random_matrix(m, rng);
    (&a + a.transpose()) * 0.5
}

/// `P^T D P` with `D` the signature diagonal and `P` a random perturbation of
/// the identity; with `complex`, `J = P^-1 J0 P` for the standard `J0`.
pub fn random_model(m: usize, s: usize, complex: bool, rng: &mut ChaCha8Rng) -> ModelPoint {
    let p = DMatrix::identity(m, m) + random_matrix(m, rng) * 0.3;
    let d = DMatrix::from_fn(m, m, |i, j| match (i == j, i < s) {
        (false, _) => 0.0,
        (true, true) => -1.0,
        (true, false) => 1.0,
    });
    let g = p.transpose() * &d * &p;
    let g = (&g + g.transpose()) * 0.5;
    let model = ModelPoint::with_metric(m, s, g).expect("metric of the requested signature");
    if !complex {
        return model;
    }
    let j0 = DMatrix::from_fn(m, m, |i, j| {
        if i % 2 == 1 && j == i - 1 {
            1.0
        } else if i % 2 == 0 && j == i + 1 {
            -1.0
        } else {
            0.0
        }
    });
    let pinv = p.clone().try_inverse().expect("invertible");
    model
        .with_complex_structure(pinv * j0 * p, Tolerance::new(1e-8))
        .expect("compatible J")
}

/// Orthonormal basis from the eigen-decomposition of the metric, with signs.
pub fn orthonormal_basis(model: &ModelPoint) -> Vec<(Vector, f64)> {
    let eig = model.metric().clone().symmetric_eigen();
    (0..model.dim())
        .map(|a| {
            let lam = eig.eigenvalues[a];
            let v: Vector = eig.eigenvectors.column(a).into_owned() / lam.abs().sqrt();
            (v, lam.signum())
        })
        .collect()
}

pub fn basis_vector(m: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(m);
    v[i] = 1.0;
    v
}

/// `rho(y,z) = sum_a eps_a R(f_a, y, z, f_a)` in components.
pub fn oracle_ricci(model: &ModelPoint, t: &QuadTensor) -> DMatrix<f64> {
    let m = model.dim();
    let basis = orthonormal_basis(model);
    DMatrix::from_fn(m, m, |y, z| {
        let (ey, ez) = (basis_vector(m, y), basis_vector(m, z));
        basis
            .iter()
            .map(|(f, eps)| eps * t.eval(f, &ey, &ez, f))
            .sum()
    })
}

/// `rho*(y,z) = sum_a eps_a R(f_a, y, Jz, Jf_a)`.
pub fn oracle_ricci_star(model: &ModelPoint, t: &QuadTensor) -> DMatrix<f64> {
    let m = model.dim();
    let j = model.complex_structure().expect("J");
    let basis = orthonormal_basis(model);
    DMatrix::from_fn(m, m, |y, z| {
        let ey = basis_vector(m, y);
        let jz = j * basis_vector(m, z);
        basis
            .iter()
            .map(|(f, eps)| eps * t.eval(f, &ey, &jz, &(j * f)))
            .sum()
    })
}

/// Max-norm difference relative to `max(1, |expected|_max)`.
pub fn rel_err(actual: &DMatrix<f64>, expected: &DMatrix<f64>) -> f64 {
    (actual - expected).amax() / expected.amax().max(1.0)
}

pub fn rel_err_tensor(actual: &QuadTensor, expected: &QuadTensor) -> f64 {
    (actual - expected).max_abs() / expected.scale()
}
