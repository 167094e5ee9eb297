//! Compact metric spaces with a homeomorphism and its Lipschitz data.

use std::fmt::Debug;

use crate::error::Result;

/// A compact metric space `(M, d)` together with an invertible map `f`.
pub trait MetricSystem {
    type Point: Clone + Debug + PartialEq;

    fn id(&self) -> String;
    fn dist(&self, p: &Self::Point, q: &Self::Point) -> f64;
    fn fwd(&self, p: &Self::Point) -> Self::Point;
    fn inv(&self, p: &Self::Point) -> Self::Point;
    /// Lipschitz constant of `f`.
    fn lip_fwd(&self) -> f64;
    /// Lipschitz constant of `f^{-1}`.
    fn lip_inv(&self) -> f64;
    fn diam(&self) -> f64;

    /// Distance below which two points count as equal.
    fn tolerance(&self) -> f64 {
        1e-10
    }

    /// `f^k(p)`, using the inverse for negative `k`.
    fn iterate(&self, p: &Self::Point, k: i64) -> Self::Point {
        let mut out = p.clone();
        if k >= 0 {
            for _ in 0..k {
                out = self.fwd(&out);
            }
        } else {
            for _ in 0..(-k) {
                out = self.inv(&out);
            }
        }
        out
    }

    fn lip(&self) -> f64 {
        self.lip_fwd().max(self.lip_inv())
    }
}

/// `f^k(p)`.
pub fn apply_iter<S: MetricSystem>(sys: &S, p: &S::Point, k: i64) -> S::Point {
    sys.iterate(p, k)
}

/// `L_n = 1 + L + ... + L^{n-1}`.
pub fn lipschitz_geom_sum(l: f64, n: u32) -> f64 {
    assert!(n >= 1, "L_n needs n >= 1");
    let mut sum = 0.0;
    let mut pow = 1.0;
    for _ in 0..n {
        sum += pow;
        pow *= l;
    }
    sum
}

/// The same space with `f^{-1}` as the map.
#[derive(Debug, Clone, Copy)]
pub struct Reversed<'a, S>(pub &'a S);

impl<S: MetricSystem> MetricSystem for Reversed<'_, S> {
    type Point = S::Point;

    fn id(&self) -> String {
        format!("{}^-1", self.0.id())
    }
    fn dist(&self, p: &Self::Point, q: &Self::Point) -> f64 {
        self.0.dist(p, q)
    }
    fn fwd(&self, p: &Self::Point) -> Self::Point {
        self.0.inv(p)
    }
    fn inv(&self, p: &Self::Point) -> Self::Point {
        self.0.fwd(p)
    }
    fn lip_fwd(&self) -> f64 {
        self.0.lip_inv()
    }
    fn lip_inv(&self) -> f64 {
        self.0.lip_fwd()
    }
    fn diam(&self) -> f64 {
        self.0.diam()
    }
    fn tolerance(&self) -> f64 {
        self.0.tolerance()
    }
    fn iterate(&self, p: &Self::Point, k: i64) -> Self::Point {
        self.0.iterate(p, -k)
    }
}

/// Deterministic construction of points from unit-cube coordinates.
pub trait Sampling: MetricSystem {
    /// Number of unit coordinates consumed per call.
    fn sample_dim(&self) -> usize;
    /// A point of the carrier determined by `u ∈ [0,1)^dim`.
    fn sample(&self, u: &[f64]) -> Self::Point;
    /// A point at distance at most `radius` from `p`, determined by `u`.
    fn nearby(&self, p: &Self::Point, radius: f64, u: &[f64]) -> Self::Point;
}

/// Conversion between points and flat coordinate arrays for serialization.
pub trait Coordinates: MetricSystem {
    fn to_coords(&self, p: &Self::Point) -> Vec<f64>;
    fn from_coords(&self, c: &[f64]) -> Result<Self::Point>;
}

impl<S: Sampling> Sampling for Reversed<'_, S> {
    fn sample_dim(&self) -> usize {
        self.0.sample_dim()
    }
    fn sample(&self, u: &[f64]) -> Self::Point {
        self.0.sample(u)
    }
    fn nearby(&self, p: &Self::Point, radius: f64, u: &[f64]) -> Self::Point {
        self.0.nearby(p, radius, u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geom_sum_small_cases() {
        assert_eq!(lipschitz_geom_sum(1.0, 5), 5.0);
        assert_eq!(lipschitz_geom_sum(2.0, 3), 7.0);
        assert_eq!(lipschitz_geom_sum(3.0, 1), 1.0);
    }

    #[test]
    fn geom_sum_recursion() {
        for &l in &[1.0, 1.5, 2.0, 2.618] {
            for n in 1..20 {
                let lhs = l * lipschitz_geom_sum(l, n) + 1.0;
                let rhs = lipschitz_geom_sum(l, n + 1);
                assert!((lhs - rhs).abs() <= 1e-12 * rhs);
            }
        }
    }
}
