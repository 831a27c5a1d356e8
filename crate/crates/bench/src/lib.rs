//! Shared fixtures for the benchmarks.

use isocurv::generate::{random_curvature_like, random_kaehler};
use isocurv::sampling::stream_rng;
use isocurv::{ModelPoint, QuadTensor};

/// Model with the standard `J` and a random curvature-like tensor on it.
pub fn random_fixture(dim: usize, index: usize, seed: u64) -> (ModelPoint, QuadTensor) {
    let model = ModelPoint::hermitian(dim, index).expect("even signature");
    let mut rng = stream_rng(seed, 0);
    (model, random_curvature_like(dim, &mut rng))
}

/// Same, with a tensor of Kaehler type.
pub fn kaehler_fixture(dim: usize, index: usize, seed: u64) -> (ModelPoint, QuadTensor) {
    let model = ModelPoint::hermitian(dim, index).expect("even signature");
    let mut rng = stream_rng(seed, 0);
    let t = random_kaehler(&model, &mut rng).expect("model has J");
    (model, t)
}
