//! Deterministic low-discrepancy sampling of points, pairs and triples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::system::Sampling;

const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn radical_inverse(mut k: u64, base: u32) -> f64 {
    let b = base as u64;
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while k > 0 {
        out += (k % b) as f64 * inv;
        k /= b;
        inv /= base as f64;
    }
    out
}

/// A Halton sequence with a seeded random rotation (Cranley–Patterson).
#[derive(Debug, Clone)]
pub struct Halton {
    shift: Vec<f64>,
    index: u64,
}

impl Halton {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim <= PRIMES.len(), "at most {} dimensions", PRIMES.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Halton { shift: (0..dim).map(|_| rng.gen::<f64>()).collect(), index: 1 }
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        let k = self.index;
        self.index += 1;
        self.shift
            .iter()
            .zip(PRIMES)
            .map(|(s, p)| {
                let v = radical_inverse(k, p) + s;
                if v >= 1.0 {
                    v - 1.0
                } else {
                    v
                }
            })
            .collect()
    }
}

/// Seed and sample count shared by the checkers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampler {
    pub seed: u64,
    pub count: usize,
}

impl Sampler {
    pub fn new(seed: u64, count: usize) -> Self {
        Sampler { seed, count }
    }

    fn halton<S: Sampling>(&self, sys: &S, per: usize) -> Halton {
        Halton::new(sys.sample_dim() * per + per.saturating_sub(1), self.seed)
    }

    pub fn points<S: Sampling>(&self, sys: &S) -> Vec<S::Point> {
        let mut h = self.halton(sys, 1);
        (0..self.count).map(|_| sys.sample(&h.next_point())).collect()
    }

    /// Pairs `(p, q)` with `d(p, q) ≤ radius`.
    pub fn pairs<S: Sampling>(&self, sys: &S, radius: f64) -> Vec<(S::Point, S::Point)> {
        let dim = sys.sample_dim();
        let mut h = self.halton(sys, 2);
        (0..self.count)
            .map(|_| {
                let u = h.next_point();
                let p = sys.sample(&u[..dim]);
                let q = sys.nearby(&p, radius * u[2 * dim], &u[dim..2 * dim]);
                (p, q)
            })
            .collect()
    }

    /// Triples pairwise within `radius`.
    pub fn triples<S: Sampling>(&self, sys: &S, radius: f64) -> Vec<(S::Point, S::Point, S::Point)> {
        let dim = sys.sample_dim();
        let mut h = self.halton(sys, 3);
        (0..self.count)
            .map(|_| {
                let u = h.next_point();
                let p = sys.sample(&u[..dim]);
                let q = sys.nearby(&p, 0.5 * radius * u[3 * dim], &u[dim..2 * dim]);
                let r = sys.nearby(&p, 0.5 * radius * u[3 * dim + 1], &u[2 * dim..3 * dim]);
                (p, q, r)
            })
            .collect()
    }

    /// A seeded generator for auxiliary randomness.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ 0x5eed_5eed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_in_unit_cube_and_deterministic() {
        let mut a = Halton::new(3, 7);
        let mut b = Halton::new(3, 7);
        for _ in 0..100 {
            let p = a.next_point();
            assert_eq!(p, b.next_point());
            assert!(p.iter().all(|v| (0.0..1.0).contains(v)));
        }
    }

    #[test]
    fn radical_inverse_base2() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
    }
}
