//! Finite windows of bi-infinite sequences and the orbit constructions on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::MetricSystem;

/// How the stored window extends to all of `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Extension {
    /// Forward orbit of `x_hi` above the window, backward orbit of `x_lo` below it.
    OrbitCapped,
    /// The window is exactly one period.
    Periodic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PseudoOrbit<P> {
    lo: i64,
    entries: Vec<P>,
    extension: Extension,
}

impl<P: Clone> PseudoOrbit<P> {
    pub fn new(lo: i64, entries: Vec<P>, extension: Extension) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidWindow("empty window".into()));
        }
        Ok(PseudoOrbit { lo, entries, extension })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.entries.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entries(&self) -> &[P] {
        &self.entries
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    /// The stored entry at `i`, if `i` lies in the window.
    pub fn stored(&self, i: i64) -> Option<&P> {
        if i < self.lo || i > self.hi() {
            None
        } else {
            Some(&self.entries[(i - self.lo) as usize])
        }
    }

    /// `x_i` for any integer `i`.
    pub fn at<S: MetricSystem<Point = P>>(&self, sys: &S, i: i64) -> P {
        match self.extension {
            Extension::Periodic => {
                let n = self.entries.len() as i64;
                self.entries[(i - self.lo).rem_euclid(n) as usize].clone()
            }
            Extension::OrbitCapped => {
                if i > self.hi() {
                    sys.iterate(self.entries.last().unwrap(), i - self.hi())
                } else if i < self.lo {
                    sys.iterate(&self.entries[0], i - self.lo)
                } else {
                    self.entries[(i - self.lo) as usize].clone()
                }
            }
        }
    }

    /// `x_from, ..., x_to`, extending incrementally outside the window.
    pub fn values<S: MetricSystem<Point = P>>(&self, sys: &S, from: i64, to: i64) -> Vec<P> {
        if to < from {
            return Vec::new();
        }
        if self.extension == Extension::Periodic {
            return (from..=to).map(|i| self.at(sys, i)).collect();
        }
        let (lo, hi) = (self.lo, self.hi());
        let mut out = Vec::with_capacity((to - from + 1) as usize);
        if from < lo {
            let below_end = to.min(lo - 1);
            let mut cur = sys.iterate(&self.entries[0], below_end - lo);
            let mut below = vec![cur.clone()];
            for _ in from..below_end {
                cur = sys.inv(&cur);
                below.push(cur.clone());
            }
            below.reverse();
            out.extend(below);
        }
        let a = from.max(lo);
        let b = to.min(hi);
        if a <= b {
            out.extend_from_slice(&self.entries[(a - lo) as usize..=(b - lo) as usize]);
        }
        if to > hi {
            let start = from.max(hi + 1);
            let mut cur = sys.iterate(self.entries.last().unwrap(), start - hi);
            out.push(cur.clone());
            for _ in start..to {
                cur = sys.fwd(&cur);
                out.push(cur.clone());
            }
        }
        out
    }

    /// `σ^k(x)`, with `(σ^k x)_i = x_{i+k}`.
    pub fn shift(&self, k: i64) -> Self {
        PseudoOrbit { lo: self.lo - k, entries: self.entries.clone(), extension: self.extension }
    }

    /// The time-reversed sequence `x̂_i = x_{-i}`, a pseudo-orbit of `f^{-1}`.
    pub fn reversed(&self) -> Self {
        let mut entries = self.entries.clone();
        entries.reverse();
        PseudoOrbit { lo: -self.hi(), entries, extension: self.extension }
    }

    /// Applies `g` to every entry, keeping window and extension.
    pub fn map_entries(&self, g: impl Fn(&P) -> P) -> Self {
        PseudoOrbit { lo: self.lo, entries: self.entries.iter().map(g).collect(), extension: self.extension }
    }
}

/// `f∘x`, the coordinate-wise image.
pub fn image<S: MetricSystem>(sys: &S, x: &PseudoOrbit<S::Point>) -> PseudoOrbit<S::Point> {
    x.map_entries(|p| sys.fwd(p))
}

/// The true orbit of `p` on the window `[lo, hi]`.
pub fn orbit_map<S: MetricSystem>(sys: &S, p: &S::Point, lo: i64, hi: i64) -> Result<PseudoOrbit<S::Point>> {
    if lo > 0 || hi < 0 {
        return Err(Error::InvalidWindow(format!("orbit window [{lo}, {hi}] must contain 0")));
    }
    let x = PseudoOrbit { lo: 0, entries: vec![p.clone()], extension: Extension::OrbitCapped };
    PseudoOrbit::new(lo, x.values(sys, lo, hi), Extension::OrbitCapped)
}

/// The orbit of `p` in negative time glued to the orbit of `q` in nonnegative time.
pub fn connect<S: MetricSystem>(
    sys: &S,
    p: &S::Point,
    q: &S::Point,
    lo: i64,
    hi: i64,
) -> Result<PseudoOrbit<S::Point>> {
    if lo > -1 || hi < 0 {
        return Err(Error::InvalidWindow(format!("connect window [{lo}, {hi}] needs lo <= -1 and hi >= 0")));
    }
    let past = orbit_map(sys, p, lo, 0)?;
    let future = orbit_map(sys, q, 0, hi)?;
    let mut entries: Vec<S::Point> = past.entries[..past.entries.len() - 1].to_vec();
    entries.extend_from_slice(&future.entries);
    PseudoOrbit::new(lo, entries, Extension::OrbitCapped)
}

/// Restriction of `x` to `[-n, n]`, capped by true orbits of `x_{±n}`.
pub fn orbit_cap<P: Clone>(x: &PseudoOrbit<P>, n: i64) -> Result<PseudoOrbit<P>> {
    if n < 0 || x.lo > -n || x.hi() < n {
        return Err(Error::WindowTooSmall { lo: x.lo, hi: x.hi(), want_lo: -n, want_hi: n });
    }
    let a = (-n - x.lo) as usize;
    let b = (n - x.lo) as usize;
    PseudoOrbit::new(-n, x.entries[a..=b].to_vec(), Extension::OrbitCapped)
}

/// The jump sequence `δ_i = d(f(x_{i-1}), x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jumps {
    first: i64,
    values: Vec<f64>,
    periodic: bool,
}

impl Jumps {
    /// `δ_i` for any integer `i`.
    pub fn get(&self, i: i64) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        if self.periodic {
            let n = self.values.len() as i64;
            return self.values[(i - self.first).rem_euclid(n) as usize];
        }
        let k = i - self.first;
        if k < 0 || k >= self.values.len() as i64 {
            0.0
        } else {
            self.values[k as usize]
        }
    }

    /// Index of the first stored jump.
    pub fn first(&self) -> i64 {
        self.first
    }

    /// Index of the last stored jump; jumps vanish beyond it unless periodic.
    pub fn last(&self) -> i64 {
        self.first + self.values.len() as i64 - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

pub fn jumps<S: MetricSystem>(sys: &S, x: &PseudoOrbit<S::Point>) -> Jumps {
    let e = &x.entries;
    match x.extension {
        Extension::OrbitCapped => {
            let values = e.windows(2).map(|w| sys.dist(&sys.fwd(&w[0]), &w[1])).collect();
            Jumps { first: x.lo + 1, values, periodic: false }
        }
        Extension::Periodic => {
            let n = e.len();
            let values = (0..n).map(|k| sys.dist(&sys.fwd(&e[(k + n - 1) % n]), &e[k])).collect();
            Jumps { first: x.lo, values, periodic: true }
        }
    }
}

/// `δ_i^m = L^m Σ_{j=1..m} δ_{(i-1)m+j}`.
pub fn block_jumps(j: &Jumps, m: u32, i: i64, l: f64) -> f64 {
    assert!(m >= 1, "block length must be positive");
    let m = m as i64;
    let s: f64 = (1..=m).map(|k| j.get((i - 1) * m + k)).sum();
    l.powi(m as i32) * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::rotation::Rotation;

    fn rot() -> Rotation {
        Rotation::new(0.25)
    }

    #[test]
    fn values_match_pointwise_extension() {
        let s = rot();
        let x = PseudoOrbit::new(-1, vec![0.1, 0.5, 0.9], Extension::OrbitCapped).unwrap();
        let v = x.values(&s, -4, 4);
        for (k, i) in (-4..=4).enumerate() {
            assert!(s.dist(&v[k], &x.at(&s, i)) < 1e-15, "index {i}");
        }
        assert!(s.dist(&x.at(&s, 3), &(0.9 + 0.5)) < 1e-15);
        assert!(s.dist(&x.at(&s, -3), &(0.1 - 0.5)) < 1e-15);
    }

    #[test]
    fn periodic_wraps() {
        let s = rot();
        let x = PseudoOrbit::new(0, vec![0.0, 0.3], Extension::Periodic).unwrap();
        assert_eq!(x.at(&s, 2), 0.0);
        assert_eq!(x.at(&s, -1), 0.3);
        let j = jumps(&s, &x);
        assert_eq!(j.values().len(), 2);
        // wrap jump d(f(x_1), x_0) = d(0.55, 0)
        assert!((j.get(0) - 0.45).abs() < 1e-15);
        assert!((j.get(2) - j.get(0)).abs() == 0.0);
    }

    #[test]
    fn shift_and_reverse_reindex() {
        let s = rot();
        let x = PseudoOrbit::new(-2, vec![0.0, 0.1, 0.2, 0.3], Extension::OrbitCapped).unwrap();
        let y = x.shift(1);
        for i in -6..6 {
            assert_eq!(y.at(&s, i), x.at(&s, i + 1));
        }
        let r = x.reversed();
        assert_eq!((r.lo(), r.hi()), (-1, 2));
        for i in -1..=2 {
            assert_eq!(r.at(&s, i), x.at(&s, -i));
        }
    }

    #[test]
    fn connect_has_single_jump() {
        let s = rot();
        let x = connect(&s, &0.1, &0.4, -3, 3).unwrap();
        let j = jumps(&s, &x);
        for i in -10..10 {
            if i == 0 {
                assert!((j.get(0) - 0.3).abs() < 1e-12);
            } else {
                assert!(j.get(i) < 1e-15, "i={i}");
            }
        }
    }

    #[test]
    fn orbit_cap_restricts() {
        let x = PseudoOrbit::new(-3, vec![1, 2, 3, 4, 5, 6, 7], Extension::OrbitCapped).unwrap();
        let y = orbit_cap(&x, 1).unwrap();
        assert_eq!((y.lo(), y.hi()), (-1, 1));
        assert_eq!(y.entries(), &[3, 4, 5]);
        assert!(orbit_cap(&x, 4).is_err());
        assert_eq!(orbit_cap(&x, 3).unwrap(), x);
    }

    #[test]
    fn block_jump_formula() {
        let j = Jumps { first: 1, values: vec![1.0; 8], periodic: false };
        assert_eq!(block_jumps(&j, 1, 3, 2.0), 2.0);
        assert_eq!(block_jumps(&j, 3, 1, 2.0), 8.0 * 3.0);
        assert_eq!(block_jumps(&j, 3, 4, 2.0), 0.0);
    }
}
