#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ringfft_core::{ComplexWord, Polynomial};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_poly(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Polynomial {
    Polynomial::new((0..n).map(|_| rng.random_range(-scale..=scale)).collect()).unwrap()
}

/// Greedy one-to-one matching of two value lists within `tol`.
pub fn multiset_matches(a: &[ComplexWord], b: &[ComplexWord], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        let best = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, x.max_abs_diff(*y)))
            .min_by(|p, q| p.1.total_cmp(&q.1));
        match best {
            Some((j, d)) if d <= tol => {
                used[j] = true;
                true
            }
            _ => false,
        }
    })
}
