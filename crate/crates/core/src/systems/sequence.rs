//! The shift on bi-infinite sequences over a compact base, with the metric
//! `d̃_s(x, y) = Σ 2^{-|i|} d(x_i, y_i)`.
//!
//! A sequence is a finite window of entries with a fixed fill value outside.
//! Windows are trimmed of fill at both ends, so structural equality is
//! equality of sequences. Over a finite alphabet the metric is a sum of
//! distinct dyadic weights and is exact in `f64` while indices stay below
//! about 50 in absolute value.

use std::fmt::Debug;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::circle;
use crate::bracket::{Bracket, Hyperbolicity};
use crate::error::{Error, Result};
use crate::orbit::{Extension, PseudoOrbit};
use crate::system::{Coordinates, MetricSystem, Sampling};

/// The space each coordinate of a sequence lives in.
pub trait Base: Debug + Clone {
    type Sym: Clone + Debug + PartialEq;
    fn id(&self) -> String;
    fn dist(&self, a: &Self::Sym, b: &Self::Sym) -> f64;
    fn diam(&self) -> f64;
    fn fill(&self) -> Self::Sym;
    fn random(&self, rng: &mut ChaCha8Rng) -> Self::Sym;
    /// A symbol within `radius` of `a`.
    fn near(&self, a: &Self::Sym, radius: f64, rng: &mut ChaCha8Rng) -> Self::Sym;
    fn to_f64(&self, a: &Self::Sym) -> f64;
    fn from_f64(&self, v: f64) -> Result<Self::Sym>;
}

/// `{0, ..., k-1}` with the discrete metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabet {
    pub k: u32,
}

impl Base for Alphabet {
    type Sym = u32;
    fn id(&self) -> String {
        format!("shift-{}", self.k)
    }
    fn dist(&self, a: &u32, b: &u32) -> f64 {
        if a == b {
            0.0
        } else {
            1.0
        }
    }
    fn diam(&self) -> f64 {
        if self.k > 1 {
            1.0
        } else {
            0.0
        }
    }
    fn fill(&self) -> u32 {
        0
    }
    fn random(&self, rng: &mut ChaCha8Rng) -> u32 {
        rng.gen_range(0..self.k)
    }
    fn near(&self, a: &u32, radius: f64, rng: &mut ChaCha8Rng) -> u32 {
        if radius >= 1.0 {
            self.random(rng)
        } else {
            *a
        }
    }
    fn to_f64(&self, a: &u32) -> f64 {
        *a as f64
    }
    fn from_f64(&self, v: f64) -> Result<u32> {
        if v >= 0.0 && v < self.k as f64 && v.fract() == 0.0 {
            Ok(v as u32)
        } else {
            Err(Error::InvalidParameter(format!("{v} is not a symbol of a {}-letter alphabet", self.k)))
        }
    }
}

/// The circle `R mod 1` with arc length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircleBase;

impl Base for CircleBase {
    type Sym = f64;
    fn id(&self) -> String {
        "shift-circle".into()
    }
    fn dist(&self, a: &f64, b: &f64) -> f64 {
        circle::dist(*a, *b)
    }
    fn diam(&self) -> f64 {
        0.5
    }
    fn fill(&self) -> f64 {
        0.0
    }
    fn random(&self, rng: &mut ChaCha8Rng) -> f64 {
        rng.gen::<f64>()
    }
    fn near(&self, a: &f64, radius: f64, rng: &mut ChaCha8Rng) -> f64 {
        circle::wrap01(a + radius.min(0.5) * (2.0 * rng.gen::<f64>() - 1.0))
    }
    fn to_f64(&self, a: &f64) -> f64 {
        *a
    }
    fn from_f64(&self, v: f64) -> Result<f64> {
        if v.is_finite() {
            Ok(circle::wrap01(v))
        } else {
            Err(Error::InvalidParameter(format!("{v} is not a circle point")))
        }
    }
}

/// A bi-infinite sequence: `entries[k]` sits at index `offset + k`, fill elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct Seq<T> {
    offset: i64,
    entries: Vec<T>,
}

impl<T: Clone + PartialEq> Seq<T> {
    pub fn new(offset: i64, mut entries: Vec<T>, fill: &T) -> Self {
        let start = entries.iter().position(|e| e != fill);
        match start {
            None => Seq { offset: 0, entries: Vec::new() },
            Some(s) => {
                let end = entries.iter().rposition(|e| e != fill).unwrap();
                entries.truncate(end + 1);
                entries.drain(..s);
                Seq { offset: offset + s as i64, entries }
            }
        }
    }

    /// The constant fill sequence.
    pub fn constant() -> Self {
        Seq { offset: 0, entries: Vec::new() }
    }

    pub fn get(&self, i: i64, fill: &T) -> T {
        let k = i - self.offset;
        if k < 0 || k >= self.entries.len() as i64 {
            fill.clone()
        } else {
            self.entries[k as usize].clone()
        }
    }

    /// Indices carrying non-fill entries, or `None` for the constant sequence.
    pub fn support(&self) -> Option<(i64, i64)> {
        if self.entries.is_empty() {
            None
        } else {
            Some((self.offset, self.offset + self.entries.len() as i64 - 1))
        }
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    /// `(σ^k x)_i = x_{i+k}`.
    pub fn shifted(&self, k: i64) -> Self {
        Seq { offset: self.offset - k, entries: self.entries.clone() }
    }

    /// Entries at `lo..=hi`.
    pub fn window(&self, lo: i64, hi: i64, fill: &T) -> Vec<T> {
        (lo..=hi).map(|i| self.get(i, fill)).collect()
    }
}

fn union<T: Clone + PartialEq>(a: &Seq<T>, b: &Seq<T>) -> Option<(i64, i64)> {
    match (a.support(), b.support()) {
        (None, None) => None,
        (Some(s), None) | (None, Some(s)) => Some(s),
        (Some((a0, a1)), Some((b0, b1))) => Some((a0.min(b0), a1.max(b1))),
    }
}

/// The shift `σ` on sequences over `base`.
#[derive(Debug, Clone)]
pub struct SequenceSystem<B: Base> {
    base: B,
    mu: f64,
    sample_radius: i64,
}

pub type SymbolicShift = SequenceSystem<Alphabet>;
pub type CircleShift = SequenceSystem<CircleBase>;

impl<B: Base> SequenceSystem<B> {
    /// Shift with weight 1/2; sampled sequences are supported on `[-w, w]`.
    pub fn new(base: B, sample_radius: i64) -> Self {
        SequenceSystem { base, mu: 0.5, sample_radius }
    }

    pub fn base(&self) -> &B {
        &self.base
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sample_radius(&self) -> i64 {
        self.sample_radius
    }

    pub fn seq(&self, offset: i64, entries: Vec<B::Sym>) -> Seq<B::Sym> {
        Seq::new(offset, entries, &self.base.fill())
    }

    pub fn get(&self, x: &Seq<B::Sym>, i: i64) -> B::Sym {
        x.get(i, &self.base.fill())
    }

    /// `d̃_m`, the weighted supremum metric.
    pub fn dist_max(&self, x: &Seq<B::Sym>, y: &Seq<B::Sym>) -> f64 {
        let Some((lo, hi)) = union(x, y) else { return 0.0 };
        (lo..=hi)
            .map(|i| self.mu.powi(i.unsigned_abs() as i32) * self.base.dist(&self.get(x, i), &self.get(y, i)))
            .fold(0.0, f64::max)
    }

    /// `[x, y]_i = x_i` for `i ≤ -1` and `y_i` for `i ≥ 0`.
    pub fn splice(&self, x: &Seq<B::Sym>, y: &Seq<B::Sym>) -> Seq<B::Sym> {
        self.splice_at(x, y, 0)
    }

    /// Entries of `x` below `cut`, entries of `y` from `cut` on.
    pub fn splice_at(&self, x: &Seq<B::Sym>, y: &Seq<B::Sym>, cut: i64) -> Seq<B::Sym> {
        let Some((lo, hi)) = union(x, y) else { return Seq::constant() };
        let entries = (lo..=hi).map(|i| if i < cut { self.get(x, i) } else { self.get(y, i) }).collect();
        self.seq(lo, entries)
    }

    /// A random sequence supported on `[-w, w]`.
    pub fn random_seq(&self, rng: &mut ChaCha8Rng, w: i64) -> Seq<B::Sym> {
        let entries = (-w..=w).map(|_| self.base.random(rng)).collect();
        self.seq(-w, entries)
    }
}

impl<B: Base> MetricSystem for SequenceSystem<B> {
    type Point = Seq<B::Sym>;

    fn id(&self) -> String {
        self.base.id()
    }
    fn dist(&self, x: &Seq<B::Sym>, y: &Seq<B::Sym>) -> f64 {
        let Some((lo, hi)) = union(x, y) else { return 0.0 };
        let fill = self.base.fill();
        let mut sum = 0.0;
        for i in lo..=hi {
            let d = self.base.dist(&x.get(i, &fill), &y.get(i, &fill));
            if d != 0.0 {
                sum += self.mu.powi(i.unsigned_abs() as i32) * d;
            }
        }
        sum
    }
    fn fwd(&self, x: &Seq<B::Sym>) -> Seq<B::Sym> {
        x.shifted(1)
    }
    fn inv(&self, x: &Seq<B::Sym>) -> Seq<B::Sym> {
        x.shifted(-1)
    }
    fn lip_fwd(&self) -> f64 {
        1.0 / self.mu
    }
    fn lip_inv(&self) -> f64 {
        1.0 / self.mu
    }
    fn diam(&self) -> f64 {
        self.base.diam() * (1.0 + self.mu) / (1.0 - self.mu)
    }
    fn tolerance(&self) -> f64 {
        0.0
    }
    fn iterate(&self, x: &Seq<B::Sym>, k: i64) -> Seq<B::Sym> {
        x.shifted(k)
    }
}

fn rng_from(u: f64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64((u * 2f64.powi(53)) as u64)
}

impl<B: Base> Sampling for SequenceSystem<B> {
    fn sample_dim(&self) -> usize {
        1
    }
    fn sample(&self, u: &[f64]) -> Seq<B::Sym> {
        self.random_seq(&mut rng_from(u[0]), self.sample_radius)
    }
    /// Changes coordinates far enough out that the weighted sum stays below `radius`.
    fn nearby(&self, p: &Seq<B::Sym>, radius: f64, u: &[f64]) -> Seq<B::Sym> {
        let mut rng = rng_from(u[0]);
        if radius <= 0.0 || self.base.diam() == 0.0 {
            return p.clone();
        }
        // 2·diam·Σ_{|i|≥j} μ^{|i|} = 2·diam·μ^j/(1-μ) ≤ radius
        let mut j = 0i64;
        while 2.0 * self.base.diam() * self.mu.powi(j as i32) / (1.0 - self.mu) > radius {
            j += 1;
        }
        let fill = self.base.fill();
        let w = self.sample_radius.max(j + 2);
        let entries = (-w..=w)
            .map(|i| {
                let cur = p.get(i, &fill);
                if i.abs() >= j {
                    self.base.random(&mut rng)
                } else {
                    cur
                }
            })
            .collect();
        let mut out = self.seq(-w, entries);
        if let Some((lo, hi)) = p.support() {
            if lo < -w || hi > w {
                let entries = (lo.min(-w)..=hi.max(w))
                    .map(|i| if i.abs() >= j && i.abs() <= w { out.get(i, &fill) } else { p.get(i, &fill) })
                    .collect();
                out = self.seq(lo.min(-w), entries);
            }
        }
        out
    }
}

impl<B: Base> Coordinates for SequenceSystem<B> {
    /// `[offset, entries...]`.
    fn to_coords(&self, p: &Seq<B::Sym>) -> Vec<f64> {
        let mut out = vec![p.offset as f64];
        out.extend(p.entries.iter().map(|s| self.base.to_f64(s)));
        out
    }
    fn from_coords(&self, c: &[f64]) -> Result<Seq<B::Sym>> {
        let (first, rest) = c
            .split_first()
            .ok_or_else(|| Error::InvalidParameter("sequence point needs an offset".into()))?;
        if first.fract() != 0.0 {
            return Err(Error::InvalidParameter(format!("offset {first} is not an integer")));
        }
        let entries = rest.iter().map(|v| self.base.from_f64(*v)).collect::<Result<Vec<_>>>()?;
        Ok(self.seq(*first as i64, entries))
    }
}

/// `[x, y]_i = x_i` for `i ≤ -1`, `y_i` for `i ≥ 0`.
#[derive(Debug, Clone, Copy)]
pub struct ShiftBracket;

impl<B: Base> Bracket<SequenceSystem<B>> for ShiftBracket {
    fn name(&self) -> String {
        "shift-splice".into()
    }
    fn radius(&self) -> f64 {
        f64::INFINITY
    }
    fn eval(&self, sys: &SequenceSystem<B>, p: &Seq<B::Sym>, q: &Seq<B::Sym>) -> Result<Seq<B::Sym>> {
        Ok(sys.splice(p, q))
    }
    fn declared(&self) -> Option<Hyperbolicity> {
        Some(Hyperbolicity { c: 1.0, mu: 0.5 })
    }
}

/// Indices at which the diagonal of `α` can differ from the fill.
fn diagonal_range<B: Base>(sys: &SequenceSystem<B>, alpha: &PseudoOrbit<Seq<B::Sym>>) -> (i64, i64) {
    let (lo, hi) = (alpha.lo(), alpha.hi());
    match alpha.extension() {
        Extension::OrbitCapped => {
            let below = alpha.entries()[0].support().map_or(lo, |(a, _)| lo + a.min(0));
            let above = alpha.entries().last().unwrap().support().map_or(hi, |(_, b)| hi + b.max(0));
            (below.min(lo), above.max(hi))
        }
        Extension::Periodic => {
            let n = alpha.len() as i64;
            let reps = (sys.sample_radius / n + 1) * n;
            (lo - reps, hi + reps)
        }
    }
}

/// `(Sh_σ α)_i = (α_i)_0`.
///
/// For capped `α` the diagonal is eventually fill and the result is exact.
/// For periodic `α` it is periodic, and is returned on a window covering the
/// sampling radius with fill beyond.
pub fn shift_canonical_shadow<B: Base>(sys: &SequenceSystem<B>, alpha: &PseudoOrbit<Seq<B::Sym>>) -> Seq<B::Sym> {
    let (a, b) = diagonal_range(sys, alpha);
    let entries = (a..=b).map(|i| sys.get(&alpha.at(sys, i), 0)).collect();
    sys.seq(a, entries)
}

/// `x_0 = α_0`, `x_n = [σ x_{n-1}, α_n]`, `y_n = σ^{-n} x_n`, checking
/// `(y_n)_i = (α_i)_0` for `0 ≤ i ≤ n`.
pub fn shift_mutual_induction<B: Base>(
    sys: &SequenceSystem<B>,
    alpha: &PseudoOrbit<Seq<B::Sym>>,
    n: usize,
) -> Result<Vec<Seq<B::Sym>>> {
    let mut x = alpha.at(sys, 0);
    let mut ys = vec![x.clone()];
    for k in 1..=n as i64 {
        x = sys.splice(&sys.fwd(&x), &alpha.at(sys, k));
        ys.push(x.shifted(-k));
    }
    for (k, y) in ys.iter().enumerate() {
        for i in 0..=k as i64 {
            let want = sys.get(&alpha.at(sys, i), 0);
            if sys.get(y, i) != want {
                return Err(Error::Construction(format!("mutual induction identity fails at n = {k}, i = {i}")));
            }
        }
    }
    Ok(ys)
}

/// The time-reversed recursion, splicing between indices 0 and 1 so that
/// `(ŷ_n)_{-i} = (α_{-i})_0` for `0 ≤ i ≤ n`.
pub fn shift_backward_induction<B: Base>(
    sys: &SequenceSystem<B>,
    alpha: &PseudoOrbit<Seq<B::Sym>>,
    n: usize,
) -> Result<Vec<Seq<B::Sym>>> {
    let mut x = alpha.at(sys, 0);
    let mut ys = vec![x.clone()];
    for k in 1..=n as i64 {
        x = sys.splice_at(&alpha.at(sys, -k), &sys.inv(&x), 1);
        ys.push(x.shifted(k));
    }
    for (k, y) in ys.iter().enumerate() {
        for i in 0..=k as i64 {
            let want = sys.get(&alpha.at(sys, -i), 0);
            if sys.get(y, -i) != want {
                return Err(Error::Construction(format!("backward induction identity fails at n = {k}, i = {i}")));
            }
        }
    }
    Ok(ys)
}

/// `[z⁻, z⁺]` from the `n`-th stages of both recursions.
pub fn shift_limit_assembly<B: Base>(
    sys: &SequenceSystem<B>,
    alpha: &PseudoOrbit<Seq<B::Sym>>,
    n: usize,
) -> Result<Seq<B::Sym>> {
    let z_plus = shift_mutual_induction(sys, alpha, n)?.pop().unwrap();
    let z_minus = shift_backward_induction(sys, alpha, n)?.pop().unwrap();
    Ok(sys.splice(&z_minus, &z_plus))
}

/// `Sh(σ∘α)` and `σ(Sh α)`, where `σ∘α` applies the shift to every
/// coordinate of `α` rather than shifting the index.
pub fn coordinatewise_shift_sides<B: Base>(
    sys: &SequenceSystem<B>,
    alpha: &PseudoOrbit<Seq<B::Sym>>,
) -> (Seq<B::Sym>, Seq<B::Sym>) {
    let lhs = shift_canonical_shadow(sys, &alpha.map_entries(|s| sys.fwd(s)));
    let rhs = sys.fwd(&shift_canonical_shadow(sys, alpha));
    (lhs, rhs)
}
