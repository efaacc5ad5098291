use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ringfft_core::Polynomial;

pub const DEFAULT_SEED: u64 = 42;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Polynomial with coefficients uniform in `[-scale, scale]`.
pub fn random_polynomial(
    rng: &mut ChaCha8Rng,
    n: usize,
    scale: f64,
) -> ringfft_core::Result<Polynomial> {
    Polynomial::new((0..n).map(|_| rng.random_range(-scale..=scale)).collect())
}
