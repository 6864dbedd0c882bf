//! Seeded random streams. Every consumer derives its generator from a
//! `(seed, stream)` pair, so parallel and serial runs draw identical numbers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::Vector;

pub type StreamRng = ChaCha8Rng;

/// Independent stream `index` of the generator seeded by `seed`.
pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn gaussian_vector<R: Rng>(rng: &mut R, dim: usize) -> Vector {
    Vector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// A uniformly random unit vector.
pub fn unit_vector<R: Rng>(rng: &mut R, dim: usize) -> Vector {
    loop {
        let v = gaussian_vector(rng, dim);
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}

/// Uniform point of the standard simplex with `k` vertices, as barycentric
/// weights.
pub fn simplex_weights<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..k)
        .map(|_| -rng.random_range(f64::MIN_POSITIVE..1.0).ln())
        .collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| stream(7, 1).random()).collect();
        let b: Vec<u64> = (0..4).map(|_| stream(7, 1).random()).collect();
        assert_eq!(a, b);
        let x: u64 = stream(7, 1).random();
        let y: u64 = stream(7, 2).random();
        assert_ne!(x, y);
    }

    #[test]
    fn simplex_weights_sum_to_one() {
        let mut r = stream(0, 0);
        let w = simplex_weights(&mut r, 5);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(w.iter().all(|&x| x > 0.0));
    }
}
