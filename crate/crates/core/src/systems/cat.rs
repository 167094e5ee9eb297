//! The cat map `A = [[2,1],[1,1]]` on the 2-torus in fixed-point arithmetic.
//!
//! Coordinates are integers scaled by `2^bits`. The linear map and its inverse
//! are exact on this grid, so orbits of a stored point can be followed for as
//! many steps as the precision allows (`λ_u^k · 2^{-bits}` stays small).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::bracket::{check_domain, Bracket, Hyperbolicity};
use crate::error::{Error, Result};
use crate::orbit::{Extension, PseudoOrbit};
use crate::system::{Coordinates, MetricSystem, Sampling};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TorusPoint {
    x: BigInt,
    y: BigInt,
}

type Mat = [[BigInt; 2]; 2];

#[derive(Debug, Clone)]
pub struct CatMap {
    bits: u32,
    one: BigInt,
    half: BigInt,
    /// unit eigenvectors, raw fixed point
    vu: [BigInt; 2],
    vs: [BigInt; 2],
    lambda_s_raw: BigInt,
    lambda_u: f64,
    lambda_s: f64,
    scale: f64,
}

/// Bracket domain radius in the torus metric.
pub const CAT_GAMMA: f64 = 0.2;

impl CatMap {
    /// A cat map with `bits` fractional bits of precision (at least 64).
    pub fn new(bits: u32) -> Self {
        assert!((64..=960).contains(&bits), "precision must be 64..=960 bits");
        let one = BigInt::one() << bits;
        let half = BigInt::one() << (bits - 1);
        let sqrt5 = (BigInt::from(5) << (2 * bits)).sqrt();
        let phi = (&one + &sqrt5) >> 1u32;
        let norm_sq = ((&phi * &phi) >> bits) + &one;
        let norm = (norm_sq << bits).sqrt();
        let vu = [(&phi << bits) / &norm, (&one << bits) / &norm];
        let vs = [vu[1].clone(), -vu[0].clone()];
        let lambda_s_raw = (BigInt::from(3) * &one - &sqrt5) >> 1u32;
        let s5 = 5f64.sqrt();
        CatMap {
            bits,
            one,
            half,
            vu,
            vs,
            lambda_s_raw,
            lambda_u: (3.0 + s5) / 2.0,
            lambda_s: (3.0 - s5) / 2.0,
            scale: 2f64.powi(-(bits as i32)),
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Precision adequate for following orbits over `steps` iterates.
    pub fn bits_for_horizon(steps: u32) -> u32 {
        (64 + (steps as f64 * 1.4).ceil() as u32).clamp(64, 960)
    }

    pub fn lambda_u(&self) -> f64 {
        self.lambda_u
    }

    pub fn lambda_s(&self) -> f64 {
        self.lambda_s
    }

    /// Unit eigenvectors `(v_u, v_s)` as floats.
    pub fn eigenvectors(&self) -> ([f64; 2], [f64; 2]) {
        (
            [self.raw_f64(&self.vu[0]), self.raw_f64(&self.vu[1])],
            [self.raw_f64(&self.vs[0]), self.raw_f64(&self.vs[1])],
        )
    }

    fn raw_f64(&self, v: &BigInt) -> f64 {
        v.to_f64().unwrap_or(f64::NAN) * self.scale
    }

    fn from_f64_raw(&self, v: f64) -> BigInt {
        let (mant, exp, sign) = num_traits::Float::integer_decode(v);
        let m = BigInt::from(mant) * BigInt::from(sign);
        let shift = exp as i64 + self.bits as i64;
        if shift >= 0 {
            m << shift as u32
        } else {
            m >> (-shift) as u32
        }
    }

    fn reduce(&self, v: BigInt) -> BigInt {
        v.mod_floor(&self.one)
    }

    /// Representative of `v mod 1` in `[-1/2, 1/2)`.
    fn centered(&self, v: BigInt) -> BigInt {
        let r = v.mod_floor(&self.one);
        if r >= self.half {
            r - &self.one
        } else {
            r
        }
    }

    pub fn point(&self, x: f64, y: f64) -> TorusPoint {
        TorusPoint {
            x: self.reduce(self.from_f64_raw(x.rem_euclid(1.0))),
            y: self.reduce(self.from_f64_raw(y.rem_euclid(1.0))),
        }
    }

    pub fn coords(&self, p: &TorusPoint) -> (f64, f64) {
        (self.raw_f64(&p.x), self.raw_f64(&p.y))
    }

    /// The lifted displacement from `p` to `q` with components in `[-1/2, 1/2)`.
    fn delta(&self, p: &TorusPoint, q: &TorusPoint) -> [BigInt; 2] {
        [self.centered(&q.x - &p.x), self.centered(&q.y - &p.y)]
    }

    fn norm(&self, v: &[BigInt; 2]) -> f64 {
        self.raw_f64(&v[0]).hypot(self.raw_f64(&v[1]))
    }

    fn dot(&self, a: &[BigInt; 2], b: &[BigInt; 2]) -> BigInt {
        (&a[0] * &b[0] + &a[1] * &b[1]) >> self.bits
    }

    fn translate(&self, p: &TorusPoint, v: &[BigInt; 2]) -> TorusPoint {
        TorusPoint { x: self.reduce(&p.x + &v[0]), y: self.reduce(&p.y + &v[1]) }
    }

    fn scaled(&self, t: &BigInt, v: &[BigInt; 2]) -> [BigInt; 2] {
        [(t * &v[0]) >> self.bits, (t * &v[1]) >> self.bits]
    }

    /// `p + (dx, dy)` on the torus.
    pub fn offset(&self, p: &TorusPoint, dx: f64, dy: f64) -> TorusPoint {
        self.translate(p, &[self.from_f64_raw(dx), self.from_f64_raw(dy)])
    }

    /// `p + t·v_u + s·v_s`.
    pub fn offset_eigen(&self, p: &TorusPoint, t: f64, s: f64) -> TorusPoint {
        let a = self.scaled(&self.from_f64_raw(t), &self.vu);
        let b = self.scaled(&self.from_f64_raw(s), &self.vs);
        self.translate(p, &[&a[0] + &b[0], &a[1] + &b[1]])
    }

    /// Unstable and stable components of the displacement from `p` to `q`.
    pub fn eigen_components(&self, p: &TorusPoint, q: &TorusPoint) -> (f64, f64) {
        let d = self.delta(p, q);
        (self.raw_f64(&self.dot(&d, &self.vu)), self.raw_f64(&self.dot(&d, &self.vs)))
    }

    fn apply_mat(&self, m: &Mat, p: &TorusPoint) -> TorusPoint {
        TorusPoint {
            x: self.reduce(&m[0][0] * &p.x + &m[0][1] * &p.y),
            y: self.reduce(&m[1][0] * &p.x + &m[1][1] * &p.y),
        }
    }

    fn mat_mul(&self, a: &Mat, b: &Mat) -> Mat {
        let e = |i: usize, j: usize| self.reduce(&a[i][0] * &b[0][j] + &a[i][1] * &b[1][j]);
        [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
    }

    fn mat_pow(&self, base: Mat, mut k: u64) -> Mat {
        let mut acc: Mat = [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]];
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mat_mul(&acc, &b);
            }
            k >>= 1;
            if k > 0 {
                b = self.mat_mul(&b, &b);
            }
        }
        acc
    }

    fn a_mat() -> Mat {
        [[BigInt::from(2), BigInt::from(1)], [BigInt::from(1), BigInt::from(1)]]
    }

    fn a_inv_mat() -> Mat {
        [[BigInt::from(1), BigInt::from(-1)], [BigInt::from(-1), BigInt::from(2)]]
    }

    /// The crossing of `p`'s unstable leaf with `q`'s stable leaf.
    pub fn bracket_point(&self, p: &TorusPoint, q: &TorusPoint) -> TorusPoint {
        let d = self.delta(p, q);
        let t = self.dot(&d, &self.vs);
        let back = self.scaled(&t, &self.vs);
        self.translate(q, &[-&back[0], -&back[1]])
    }

    /// The unique point whose orbit stays near `x`, from the linear
    /// decomposition of the lifted jumps `e_k = x_{k+1} - A x_k`.
    pub fn oracle_shadow(&self, x: &PseudoOrbit<TorusPoint>) -> Result<TorusPoint> {
        let (lo, hi) = (x.lo(), x.hi());
        let e = x.entries();
        let n = e.len();
        let jump = |k: usize| -> Result<(BigInt, BigInt)> {
            let next = if k + 1 < n { &e[k + 1] } else { &e[0] };
            let d = self.delta(&self.fwd(&e[k]), next);
            if self.norm(&d) >= 0.25 {
                return Err(Error::AmbiguousLift { index: lo + k as i64, size: self.norm(&d) });
            }
            Ok((self.dot(&d, &self.vu), self.dot(&d, &self.vs)))
        };
        let ls = &self.lambda_s_raw;
        let mut wu = BigInt::zero();
        let mut ws = BigInt::zero();
        match x.extension() {
            Extension::OrbitCapped => {
                // jumps e_k for k in [lo, hi-1]
                let mut k = hi - 1;
                while k >= 0.max(lo) {
                    let (eu, _) = jump((k - lo) as usize)?;
                    wu = ((wu + eu) * ls) >> self.bits;
                    k -= 1;
                }
                for k in lo..0.min(hi) {
                    let (_, es) = jump((k - lo) as usize)?;
                    ws = ((ws * ls) >> self.bits) + es;
                }
            }
            Extension::Periodic => {
                let nn = n as i64;
                let idx = |k: i64| (k - lo).rem_euclid(nn) as usize;
                for k in (0..nn).rev() {
                    let (eu, _) = jump(idx(k))?;
                    wu = ((wu + eu) * ls) >> self.bits;
                }
                for k in -nn..0 {
                    let (_, es) = jump(idx(k))?;
                    ws = ((ws * ls) >> self.bits) + es;
                }
                let mut ls_n = self.one.clone();
                for _ in 0..n {
                    ls_n = (ls_n * ls) >> self.bits;
                }
                let denom = &self.one - ls_n;
                wu = (wu << self.bits) / &denom;
                ws = (ws << self.bits) / &denom;
            }
        }
        let base = x.at(self, 0);
        let a = self.scaled(&wu, &self.vu);
        let b = self.scaled(&(-ws), &self.vs);
        Ok(self.translate(&base, &[&a[0] + &b[0], &a[1] + &b[1]]))
    }

    /// Bound `|w| ≤ λ_u/(λ_u-1) · sup|e|` on the oracle's correction.
    pub fn oracle_error_bound(&self, sup_jump: f64) -> f64 {
        sup_jump * self.lambda_u / (self.lambda_u - 1.0)
    }
}

impl MetricSystem for CatMap {
    type Point = TorusPoint;

    fn id(&self) -> String {
        "cat".into()
    }
    fn dist(&self, p: &TorusPoint, q: &TorusPoint) -> f64 {
        self.norm(&self.delta(p, q))
    }
    fn fwd(&self, p: &TorusPoint) -> TorusPoint {
        TorusPoint { x: self.reduce(BigInt::from(2) * &p.x + &p.y), y: self.reduce(&p.x + &p.y) }
    }
    fn inv(&self, p: &TorusPoint) -> TorusPoint {
        TorusPoint { x: self.reduce(&p.x - &p.y), y: self.reduce(BigInt::from(2) * &p.y - &p.x) }
    }
    fn lip_fwd(&self) -> f64 {
        self.lambda_u
    }
    fn lip_inv(&self) -> f64 {
        self.lambda_u
    }
    fn diam(&self) -> f64 {
        std::f64::consts::FRAC_1_SQRT_2
    }
    fn tolerance(&self) -> f64 {
        1e-10
    }
    fn iterate(&self, p: &TorusPoint, k: i64) -> TorusPoint {
        if k.unsigned_abs() <= 6 {
            let mut out = p.clone();
            for _ in 0..k.unsigned_abs() {
                out = if k > 0 { self.fwd(&out) } else { self.inv(&out) };
            }
            return out;
        }
        let base = if k > 0 { Self::a_mat() } else { Self::a_inv_mat() };
        self.apply_mat(&self.mat_pow(base, k.unsigned_abs()), p)
    }
}

impl Sampling for CatMap {
    fn sample_dim(&self) -> usize {
        2
    }
    fn sample(&self, u: &[f64]) -> TorusPoint {
        self.point(u[0], u[1])
    }
    fn nearby(&self, p: &TorusPoint, radius: f64, u: &[f64]) -> TorusPoint {
        let theta = std::f64::consts::TAU * u[0];
        let r = radius.min(0.49) * u[1];
        self.offset(p, r * theta.cos(), r * theta.sin())
    }
}

impl Coordinates for CatMap {
    fn to_coords(&self, p: &TorusPoint) -> Vec<f64> {
        let (x, y) = self.coords(p);
        vec![x, y]
    }
    fn from_coords(&self, c: &[f64]) -> Result<TorusPoint> {
        match c {
            [x, y] if x.is_finite() && y.is_finite() => Ok(self.point(*x, *y)),
            _ => Err(Error::InvalidParameter(format!("torus point needs two finite coordinates, got {c:?}"))),
        }
    }
}

/// The stable/unstable crossing bracket.
#[derive(Debug, Clone, Copy)]
pub struct CatBracket;

impl Bracket<CatMap> for CatBracket {
    fn name(&self) -> String {
        "cat-linear".into()
    }
    fn radius(&self) -> f64 {
        CAT_GAMMA
    }
    fn eval(&self, sys: &CatMap, p: &TorusPoint, q: &TorusPoint) -> Result<TorusPoint> {
        check_domain(sys, p, q, CAT_GAMMA)?;
        Ok(sys.bracket_point(p, q))
    }
    fn declared(&self) -> Option<Hyperbolicity> {
        Some(Hyperbolicity { c: 1.0, mu: (3.0 - 5f64.sqrt()) / 2.0 })
    }
}

/// `[p, q]` for the cat map, rejecting pairs outside the domain.
pub fn cat_bracket(sys: &CatMap, p: &TorusPoint, q: &TorusPoint) -> Result<TorusPoint> {
    CatBracket.eval(sys, p, q)
}

/// The closed-form shadow of a cat-map pseudo-orbit.
pub fn cat_oracle_shadow(sys: &CatMap, x: &PseudoOrbit<TorusPoint>) -> Result<TorusPoint> {
    sys.oracle_shadow(x)
}

/// The cat map plus a smooth displacement of sup-norm `eps`:
/// `g(p) = A p + eps/√2 · (sin 2πy, sin 2πx)`.
#[derive(Debug, Clone)]
pub struct PerturbedCat {
    cat: CatMap,
    eps: f64,
}

impl PerturbedCat {
    pub fn new(cat: CatMap, eps: f64) -> Self {
        assert!(eps >= 0.0 && eps < 1e-2, "perturbation size must be small");
        PerturbedCat { cat, eps }
    }

    pub fn cat(&self) -> &CatMap {
        &self.cat
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    fn bump(&self, p: &TorusPoint) -> (f64, f64) {
        let (x, y) = self.cat.coords(p);
        let k = self.eps * std::f64::consts::FRAC_1_SQRT_2;
        let tau = std::f64::consts::TAU;
        (k * (tau * y).sin(), k * (tau * x).sin())
    }
}

impl MetricSystem for PerturbedCat {
    type Point = TorusPoint;

    fn id(&self) -> String {
        format!("cat+bump({})", self.eps)
    }
    fn dist(&self, p: &TorusPoint, q: &TorusPoint) -> f64 {
        self.cat.dist(p, q)
    }
    fn fwd(&self, p: &TorusPoint) -> TorusPoint {
        let (bx, by) = self.bump(p);
        self.cat.offset(&self.cat.fwd(p), bx, by)
    }
    fn inv(&self, y: &TorusPoint) -> TorusPoint {
        // p = A^{-1}(y - b(p)), a contraction for small eps
        let mut p = self.cat.inv(y);
        for _ in 0..60 {
            let (bx, by) = self.bump(&p);
            let next = self.cat.inv(&self.cat.offset(y, -bx, -by));
            let step = self.cat.dist(&next, &p);
            p = next;
            if step < 1e-17 {
                break;
            }
        }
        p
    }
    fn lip_fwd(&self) -> f64 {
        self.cat.lambda_u + std::f64::consts::TAU * self.eps
    }
    fn lip_inv(&self) -> f64 {
        self.cat.lambda_u / (1.0 - self.cat.lambda_u * std::f64::consts::TAU * self.eps)
    }
    fn diam(&self) -> f64 {
        self.cat.diam()
    }
}

impl Sampling for PerturbedCat {
    fn sample_dim(&self) -> usize {
        2
    }
    fn sample(&self, u: &[f64]) -> TorusPoint {
        self.cat.sample(u)
    }
    fn nearby(&self, p: &TorusPoint, radius: f64, u: &[f64]) -> TorusPoint {
        self.cat.nearby(p, radius, u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_data() {
        let c = CatMap::new(128);
        assert!((c.lambda_u() * c.lambda_s() - 1.0).abs() < 1e-15);
        let (vu, vs) = c.eigenvectors();
        assert!((vu[0].hypot(vu[1]) - 1.0).abs() < 1e-15);
        assert!((vu[0] * vs[0] + vu[1] * vs[1]).abs() < 1e-15);
        let avu = [2.0 * vu[0] + vu[1], vu[0] + vu[1]];
        assert!((avu[0] - c.lambda_u() * vu[0]).abs() < 1e-14);
        assert!((avu[1] - c.lambda_u() * vu[1]).abs() < 1e-14);
    }

    #[test]
    fn one_step_matrix() {
        let c = CatMap::new(64);
        let p = c.point(0.1, 0.2);
        let (x, y) = c.coords(&c.fwd(&p));
        assert!((x - 0.4).abs() < 1e-15 && (y - 0.3).abs() < 1e-15);
        let origin = c.point(0.0, 0.0);
        assert_eq!(c.iterate(&origin, 5), origin);
    }

    #[test]
    fn inverse_is_exact() {
        let c = CatMap::new(96);
        let p = c.point(0.123, 0.987);
        assert_eq!(c.inv(&c.fwd(&p)), p);
        assert_eq!(c.iterate(&c.iterate(&p, 40), -40), p);
        let mut q = p.clone();
        for _ in 0..40 {
            q = c.fwd(&q);
        }
        assert_eq!(c.iterate(&p, 40), q);
    }

    #[test]
    fn bracket_on_leaves() {
        let c = CatMap::new(128);
        let p = c.point(0.3, 0.6);
        let along_s = c.offset_eigen(&p, 0.0, 0.05);
        let along_u = c.offset_eigen(&p, 0.05, 0.0);
        assert!(c.dist(&c.bracket_point(&p, &along_s), &p) < 1e-30);
        assert!(c.dist(&c.bracket_point(&p, &along_u), &along_u) < 1e-30);
        assert_eq!(c.bracket_point(&p, &p), p);
    }

    #[test]
    fn oracle_single_jump_term() {
        let c = CatMap::new(128);
        let x0 = c.point(0.2, 0.7);
        let x1 = c.offset_eigen(&c.fwd(&x0), 1e-4, 3e-5);
        let x = PseudoOrbit::new(0, vec![x0.clone(), x1], Extension::OrbitCapped).unwrap();
        let s = c.oracle_shadow(&x).unwrap();
        let (u, st) = c.eigen_components(&x0, &s);
        assert!((u - 1e-4 / c.lambda_u()).abs() < 1e-18);
        assert!(st.abs() < 1e-30);
    }
}
