//! Circle rotation, an isometry used as a control system.

use super::circle;
use crate::error::{Error, Result};
use crate::system::{Coordinates, MetricSystem, Sampling};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    alpha: f64,
}

impl Rotation {
    pub fn new(alpha: f64) -> Self {
        Rotation { alpha: circle::wrap01(alpha) }
    }

    pub fn angle(&self) -> f64 {
        self.alpha
    }
}

impl MetricSystem for Rotation {
    type Point = f64;

    fn id(&self) -> String {
        format!("rotation-{}", self.alpha)
    }
    fn dist(&self, p: &f64, q: &f64) -> f64 {
        circle::dist(*p, *q)
    }
    fn fwd(&self, p: &f64) -> f64 {
        circle::wrap01(p + self.alpha)
    }
    fn inv(&self, p: &f64) -> f64 {
        circle::wrap01(p - self.alpha)
    }
    fn lip_fwd(&self) -> f64 {
        1.0
    }
    fn lip_inv(&self) -> f64 {
        1.0
    }
    fn diam(&self) -> f64 {
        0.5
    }
    fn iterate(&self, p: &f64, k: i64) -> f64 {
        circle::wrap01(p + (k as f64 * self.alpha).rem_euclid(1.0))
    }
}

impl Sampling for Rotation {
    fn sample_dim(&self) -> usize {
        1
    }
    fn sample(&self, u: &[f64]) -> f64 {
        circle::wrap01(u[0])
    }
    fn nearby(&self, p: &f64, radius: f64, u: &[f64]) -> f64 {
        circle::wrap01(p + (2.0 * u[0] - 1.0) * radius.min(0.5))
    }
}

impl Coordinates for Rotation {
    fn to_coords(&self, p: &f64) -> Vec<f64> {
        vec![*p]
    }
    fn from_coords(&self, c: &[f64]) -> Result<f64> {
        match c {
            [t] if t.is_finite() => Ok(circle::wrap01(*t)),
            _ => Err(Error::InvalidParameter(format!("circle point needs one coordinate, got {c:?}"))),
        }
    }
}
