//! Fixtures shared by the benchmarks in `benches/`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use singlet_core::PipelineConfig;

/// Seeded random Hermitian matrix with entries in the unit square.
pub fn random_hermitian(dim: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
        for j in i + 1..dim {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// White-noise configuration matching the measured correlation level.
pub fn noisy_config(seed: u64) -> PipelineConfig {
    PipelineConfig {
        noise: 0.126,
        seed,
        ..PipelineConfig::default()
    }
}
