//! The dyadic odometer truncated to `D` digits: `a ↦ a + 1 mod 2^D` with
//! `d(a, b) = 2^{-k}`, `k` the first differing binary digit.

use crate::error::{Error, Result};
use crate::orbit::PseudoOrbit;
use crate::system::{Coordinates, MetricSystem, Sampling};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Odometer {
    digits: u32,
}

impl Odometer {
    pub fn new(digits: u32) -> Result<Self> {
        if !(1..=63).contains(&digits) {
            return Err(Error::InvalidParameter(format!("odometer needs 1..=63 digits, got {digits}")));
        }
        Ok(Odometer { digits })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn modulus(&self) -> u64 {
        1u64 << self.digits
    }

    fn mask(&self) -> u64 {
        self.modulus() - 1
    }

    /// Adds `k` with carry.
    pub fn add(&self, a: u64, k: i64) -> u64 {
        (a as i64).wrapping_add(k) as u64 & self.mask()
    }

    /// Binary digits, least significant first.
    pub fn digit_vector(&self, a: u64) -> Vec<u8> {
        (0..self.digits).map(|k| ((a >> k) & 1) as u8).collect()
    }
}

impl MetricSystem for Odometer {
    type Point = u64;

    fn id(&self) -> String {
        format!("odometer-{}", self.digits)
    }
    fn dist(&self, a: &u64, b: &u64) -> f64 {
        let x = (a ^ b) & self.mask();
        if x == 0 {
            0.0
        } else {
            0.5f64.powi(x.trailing_zeros() as i32)
        }
    }
    fn fwd(&self, a: &u64) -> u64 {
        self.add(*a, 1)
    }
    fn inv(&self, a: &u64) -> u64 {
        self.add(*a, -1)
    }
    fn lip_fwd(&self) -> f64 {
        1.0
    }
    fn lip_inv(&self) -> f64 {
        1.0
    }
    fn diam(&self) -> f64 {
        1.0
    }
    fn tolerance(&self) -> f64 {
        0.0
    }
    fn iterate(&self, a: &u64, k: i64) -> u64 {
        self.add(*a, k)
    }
}

impl Sampling for Odometer {
    fn sample_dim(&self) -> usize {
        1
    }
    fn sample(&self, u: &[f64]) -> u64 {
        ((u[0] * self.modulus() as f64) as u64).min(self.mask())
    }
    /// Keeps the low digits that pin the distance below `radius`.
    fn nearby(&self, p: &u64, radius: f64, u: &[f64]) -> u64 {
        if radius >= 1.0 {
            return self.sample(u);
        }
        let mut k = 0u32;
        while k < self.digits && 0.5f64.powi(k as i32) > radius {
            k += 1;
        }
        if k >= self.digits {
            return *p;
        }
        let high = self.sample(u) >> k << k;
        (p & ((1u64 << k) - 1)) | high
    }
}

impl Coordinates for Odometer {
    fn to_coords(&self, p: &u64) -> Vec<f64> {
        vec![*p as f64]
    }
    fn from_coords(&self, c: &[f64]) -> Result<u64> {
        match c {
            [v] if *v >= 0.0 && v.fract() == 0.0 && *v < self.modulus() as f64 => Ok(*v as u64),
            _ => Err(Error::InvalidParameter(format!("{c:?} is not an odometer state"))),
        }
    }
}

/// `Sh(x) = x_0`.
pub fn odometer_projection_shadow(sys: &Odometer, x: &PseudoOrbit<u64>) -> u64 {
    x.at(sys, 0)
}
