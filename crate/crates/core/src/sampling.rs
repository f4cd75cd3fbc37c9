//! Deterministic sample sets used by pointwise checks and witness searches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::{frac, int, Rational};

pub const DEFAULT_SEED: u64 = 0x5EED;
pub const RANDOM_SAMPLES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampler {
    pub seed: u64,
    pub random: usize,
}

impl Default for Sampler {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            random: RANDOM_SAMPLES,
        }
    }
}

impl Sampler {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    /// The grid `{-1, 0, 1}^d` followed by `self.random` seeded points in `[-1, 1]^d`.
    pub fn points(&self, d: usize) -> Vec<Vec<Rational>> {
        let mut out = grid(d);
        out.extend(self.random_points(d, self.random));
        out
    }

    /// Seeded points with coordinates `k/16`, `|k| <= 16`.
    pub fn random_points(&self, d: usize, count: usize) -> Vec<Vec<Rational>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ (d as u64).wrapping_mul(0x9E37_79B9));
        (0..count)
            .map(|_| (0..d).map(|_| frac(rng.gen_range(-16..=16), 16)).collect())
            .collect()
    }

    /// Points for hunting down a witness of a nonzero polynomial: the sample
    /// set first, then a longer tail of points with assorted denominators.
    pub fn witness_points(&self, d: usize) -> impl Iterator<Item = Vec<Rational>> {
        let base = self.points(d);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(0xA11CE));
        let tail = (0..2000).map(move |_| {
            (0..d)
                .map(|_| frac(rng.gen_range(-40..=40), rng.gen_range(1..=13)))
                .collect::<Vec<_>>()
        });
        base.into_iter().chain(tail)
    }

    /// A few generic points, used to determine generic ranks.
    pub fn generic_points(&self, d: usize) -> Vec<Vec<Rational>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(31).wrapping_add(7));
        (0..3)
            .map(|_| {
                (0..d)
                    .map(|_| frac(rng.gen_range(-97..=97), rng.gen_range(1..=29)))
                    .collect()
            })
            .collect()
    }
}

pub fn grid(d: usize) -> Vec<Vec<Rational>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-1..=1).map(move |k| {
                    let mut q = p.clone();
                    q.push(int(k));
                    q
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_size_and_determinism() {
        let s = Sampler::default();
        assert_eq!(grid(3).len(), 27);
        assert_eq!(s.points(2).len(), 9 + RANDOM_SAMPLES);
        assert_eq!(s.points(2), s.points(2));
        assert_ne!(s.points(2), Sampler::with_seed(1).points(2));
    }
}
