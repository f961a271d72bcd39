//! Shared fixtures for the benchmark targets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use daflab_core::forms::{HermitianMetricPoint, MultiDegreeForm};
use daflab_core::grid::PeriodicScalarField;

pub fn metric(n: u8, seed: u64) -> HermitianMetricPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    HermitianMetricPoint::random(n, &mut rng)
}

pub fn form(n: u8, p: u8, q: u8, seed: u64) -> MultiDegreeForm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    MultiDegreeForm::random(n, p, q, &mut rng).expect("valid bidegree")
}

pub fn smooth_field(n: usize, dims: usize, seed: u64) -> PeriodicScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PeriodicScalarField::random_smooth(&vec![n; dims], &vec![1.0; dims], 0.5, 2, &mut rng)
        .expect("valid grid")
}
