//! Seeded pseudo-orbit generators with prescribed jump schedules.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbit::{Extension, PseudoOrbit};
use crate::system::Sampling;

/// Upper bound on the jump `δ_i` at each index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Schedule {
    Constant { delta: f64 },
    /// A single jump at `index`.
    OneSpike { delta: f64, index: i64 },
    /// `δ·2^{-|i|}`.
    GeometricDecay { delta: f64 },
    /// Zero on `|i| ≤ quiet`, `δ` elsewhere.
    QuietWindow { delta: f64, quiet: i64 },
}

impl Schedule {
    pub fn bound(&self, i: i64) -> f64 {
        match *self {
            Schedule::Constant { delta } => delta,
            Schedule::OneSpike { delta, index } => {
                if i == index {
                    delta
                } else {
                    0.0
                }
            }
            Schedule::GeometricDecay { delta } => delta * 0.5f64.powi(i.unsigned_abs().min(1100) as i32),
            Schedule::QuietWindow { delta, quiet } => {
                if i.abs() <= quiet {
                    0.0
                } else {
                    delta
                }
            }
        }
    }

    pub fn delta(&self) -> f64 {
        match *self {
            Schedule::Constant { delta }
            | Schedule::OneSpike { delta, .. }
            | Schedule::GeometricDecay { delta }
            | Schedule::QuietWindow { delta, .. } => delta,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Schedule::Constant { .. } => "constant",
            Schedule::OneSpike { .. } => "one-spike",
            Schedule::GeometricDecay { .. } => "geometric-decay",
            Schedule::QuietWindow { .. } => "quiet-window",
        }
    }
}

/// Sampled jumps are drawn from a ball this much smaller than the bound, so
/// that roundoff in `f∘f^{-1}` cannot push them past it.
const MARGIN: f64 = 1.0 - 1e-9;

/// A capped pseudo-orbit on `[lo, hi]` through `start` at index 0 with
/// `δ_i ≤ schedule.bound(i)`; zero-bound jumps are exactly zero.
///
/// Nonnegative indices are built forward, `x_i = ζ_i(f(x_{i-1}))`; negative
/// ones backward, `x_{i-1} = f^{-1}(ζ_i(x_i))`, where `ζ_i` moves a point by at
/// most the bound. Runs of zero jumps left of 0 are then rebuilt forward from
/// their left end.
pub fn generate<S: Sampling>(
    sys: &S,
    start: &S::Point,
    schedule: Schedule,
    lo: i64,
    hi: i64,
    seed: u64,
) -> Result<PseudoOrbit<S::Point>> {
    if lo > 0 || hi < 0 {
        return Err(Error::InvalidWindow(format!("generator window [{lo}, {hi}] must contain 0")));
    }
    if !(schedule.delta() >= 0.0) {
        return Err(Error::InvalidParameter(format!("jump size {} must be nonnegative", schedule.delta())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = sys.sample_dim();
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..dim).map(|_| rng.gen::<f64>()).collect() };

    let mut below = Vec::with_capacity((-lo) as usize);
    let mut cur = start.clone();
    for i in (lo + 1..=0).rev() {
        let b = schedule.bound(i);
        let u = draw(&mut rng);
        let moved = if b > 0.0 { sys.nearby(&cur, b * MARGIN, &u) } else { cur.clone() };
        cur = sys.inv(&moved);
        below.push(cur.clone());
    }
    below.reverse();
    let mut entries = below;
    entries.push(start.clone());

    // exact zeros on quiet runs left of 0
    let mut i = lo + 1;
    while i <= 0 {
        if schedule.bound(i) == 0.0 {
            let k = (i - lo) as usize;
            entries[k] = sys.fwd(&entries[k - 1]);
        }
        i += 1;
    }

    let mut cur = entries.last().unwrap().clone();
    for i in 1..=hi {
        let b = schedule.bound(i);
        let u = draw(&mut rng);
        let image = sys.fwd(&cur);
        cur = if b > 0.0 { sys.nearby(&image, b * MARGIN, &u) } else { image };
        entries.push(cur.clone());
    }
    PseudoOrbit::new(lo, entries, Extension::OrbitCapped)
}

/// A periodic pseudo-orbit of period `n` through `start`: `x_i = ζ_i(f(x_{i-1}))`
/// for `0 < i < n` and the wrap jump `d(f(x_{n-1}), x_0)` left as it falls.
pub fn generate_cycle<S: Sampling>(
    sys: &S,
    start: &S::Point,
    delta: f64,
    n: usize,
    seed: u64,
) -> Result<PseudoOrbit<S::Point>> {
    if n == 0 {
        return Err(Error::InvalidParameter("period must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = sys.sample_dim();
    let mut entries = vec![start.clone()];
    for _ in 1..n {
        let u: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
        let image = sys.fwd(entries.last().unwrap());
        entries.push(if delta > 0.0 { sys.nearby(&image, delta * MARGIN, &u) } else { image });
    }
    PseudoOrbit::new(0, entries, Extension::Periodic)
}

/// A seeded random point of the carrier.
pub fn random_point<S: Sampling>(sys: &S, seed: u64) -> S::Point {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let u: Vec<f64> = (0..sys.sample_dim()).map(|_| rng.gen::<f64>()).collect();
    sys.sample(&u)
}
