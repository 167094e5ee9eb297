//! The weighted sequence metrics and the two discrepancy functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbit::{jumps, Extension, PseudoOrbit};
use crate::system::MetricSystem;

/// A quantity known to lie in `[value, value + tail_bound]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundedValue {
    pub value: f64,
    pub tail_bound: f64,
}

impl BoundedValue {
    pub fn exact(value: f64) -> Self {
        BoundedValue { value, tail_bound: 0.0 }
    }

    pub fn upper(&self) -> f64 {
        self.value + self.tail_bound
    }
}

/// Weight and truncation horizon for `d̃_s` and `d̃_m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeqMetric {
    pub mu: f64,
    pub horizon: i64,
}

impl Default for SeqMetric {
    fn default() -> Self {
        SeqMetric { mu: 0.5, horizon: 64 }
    }
}

impl SeqMetric {
    pub fn new(mu: f64, horizon: i64) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::InvalidParameter(format!("sequence weight mu = {mu} must lie in (0,1)")));
        }
        if horizon < 0 {
            return Err(Error::InvalidParameter(format!("horizon {horizon} must be nonnegative")));
        }
        Ok(SeqMetric { mu, horizon })
    }

    /// Bound on one side's contribution beyond the horizon.
    pub fn side_tail(&self, diam: f64) -> f64 {
        diam * self.mu.powi((self.horizon + 1) as i32) / (1.0 - self.mu)
    }
}

/// True when index `i` lies in the capped part of `x` above the window (`up`) or below it.
fn capped_beyond<P: Clone>(x: &PseudoOrbit<P>, i: i64, up: bool) -> bool {
    x.extension() == Extension::OrbitCapped && if up { i >= x.hi() } else { i <= x.lo() }
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("sequence weight mu = {mu} must lie in (0,1)")))
    }
}

/// `d̃_s(x, y) = Σ μ^{|i|} d(x_i, y_i)`, truncated at the horizon.
///
/// A side's tail is dropped when both sequences are already true orbits there
/// and agree at the horizon, since they then agree beyond it.
pub fn tilde_dist_s<S: MetricSystem>(
    sys: &S,
    x: &PseudoOrbit<S::Point>,
    y: &PseudoOrbit<S::Point>,
    metric: SeqMetric,
) -> Result<BoundedValue> {
    check_mu(metric.mu)?;
    let n = metric.horizon;
    let xs = x.values(sys, -n, n);
    let ys = y.values(sys, -n, n);
    let mut value = 0.0;
    for k in 0..xs.len() {
        let i = k as i64 - n;
        value += metric.mu.powi(i.unsigned_abs() as i32) * sys.dist(&xs[k], &ys[k]);
    }
    let side = metric.side_tail(sys.diam());
    let mut tail = 0.0;
    for (up, k) in [(true, xs.len() - 1), (false, 0)] {
        let i = k as i64 - n;
        let closed = capped_beyond(x, i, up) && capped_beyond(y, i, up) && xs[k] == ys[k];
        if !closed {
            tail += side;
        }
    }
    Ok(BoundedValue { value, tail_bound: tail })
}

/// `d̃_m(x, y) = sup μ^{|i|} d(x_i, y_i)`, truncated at the horizon.
pub fn tilde_dist_m<S: MetricSystem>(
    sys: &S,
    x: &PseudoOrbit<S::Point>,
    y: &PseudoOrbit<S::Point>,
    metric: SeqMetric,
) -> Result<BoundedValue> {
    check_mu(metric.mu)?;
    let n = metric.horizon;
    let xs = x.values(sys, -n, n);
    let ys = y.values(sys, -n, n);
    let mut value: f64 = 0.0;
    for k in 0..xs.len() {
        let i = k as i64 - n;
        value = value.max(metric.mu.powi(i.unsigned_abs() as i32) * sys.dist(&xs[k], &ys[k]));
    }
    let tail = (sys.diam() * metric.mu.powi((n + 1) as i32) - value).max(0.0);
    Ok(BoundedValue { value, tail_bound: tail })
}

/// `D¹(x) = sup_i d(f(x_{i-1}), x_i)`.
pub fn discrepancy1<S: MetricSystem>(sys: &S, x: &PseudoOrbit<S::Point>) -> f64 {
    jumps(sys, x).sup()
}

/// `d̃_s(σ^i x, orb(x_i))` for every `i` in the window, each truncated at the horizon.
pub fn local_discrepancy<S: MetricSystem>(
    sys: &S,
    x: &PseudoOrbit<S::Point>,
    metric: SeqMetric,
) -> Result<Vec<BoundedValue>> {
    check_mu(metric.mu)?;
    let n = metric.horizon;
    let (lo, hi) = (x.lo(), x.hi());
    let xs = x.values(sys, lo - n, hi + n);
    let side = metric.side_tail(sys.diam());
    let mut out = Vec::with_capacity(x.len());
    for i in lo..=hi {
        let c = (i - lo + n) as usize;
        let mut value = 0.0;
        let mut tail = 0.0;
        for dir in [1i64, -1] {
            let mut cur = xs[c].clone();
            let mut last_equal = true;
            for j in 1..=n {
                cur = if dir > 0 { sys.fwd(&cur) } else { sys.inv(&cur) };
                let other = &xs[(c as i64 + dir * j) as usize];
                let d = sys.dist(&cur, other);
                value += metric.mu.powi(j as i32) * d;
                last_equal = cur == *other;
            }
            let at = i + dir * n;
            let closed = n > 0 && last_equal && capped_beyond(x, at, dir > 0);
            if !closed {
                tail += side;
            }
        }
        out.push(BoundedValue { value, tail_bound: tail });
    }
    Ok(out)
}

/// `D²(x) = sup_i d̃_s(σ^i x, orb(x_i))`.
///
/// For capped orbits the supremum over `Z` is attained on the window: beyond
/// it each term is a `μ`-damped copy of the term at the nearest window end.
pub fn discrepancy2<S: MetricSystem>(
    sys: &S,
    x: &PseudoOrbit<S::Point>,
    metric: SeqMetric,
) -> Result<BoundedValue> {
    let local = local_discrepancy(sys, x, metric)?;
    let value = local.iter().map(|b| b.value).fold(0.0, f64::max);
    let tail = local.iter().map(|b| b.tail_bound).fold(0.0, f64::max);
    Ok(BoundedValue { value, tail_bound: tail })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::orbit_map;
    use crate::systems::rotation::Rotation;

    #[test]
    fn identical_orbits_have_zero_distance() {
        let s = Rotation::new(0.1);
        let x = orbit_map(&s, &0.3, -5, 5).unwrap();
        let d = tilde_dist_s(&s, &x, &x, SeqMetric::new(0.5, 10).unwrap()).unwrap();
        assert_eq!(d, BoundedValue::exact(0.0));
    }

    #[test]
    fn tail_formula() {
        let m = SeqMetric::new(0.5, 10).unwrap();
        let two_sided = 2.0 * m.side_tail(1.0);
        assert!((two_sided - 2.0 * 0.5f64.powi(11) / 0.5).abs() < 1e-18);
        assert!((two_sided - 0.001953125).abs() < 1e-12);
    }

    #[test]
    fn single_index_difference() {
        let s = Rotation::new(0.1);
        let x = PseudoOrbit::new(-2, vec![0.1, 0.2, 0.3, 0.4, 0.5], Extension::OrbitCapped).unwrap();
        let y = PseudoOrbit::new(-2, vec![0.1, 0.2, 0.35, 0.4, 0.5], Extension::OrbitCapped).unwrap();
        let d = tilde_dist_s(&s, &x, &y, SeqMetric::default()).unwrap();
        assert!((d.value - 0.05).abs() < 1e-15);
        assert_eq!(d.tail_bound, 0.0);
    }

    #[test]
    fn orbit_has_zero_discrepancy() {
        let s = Rotation::new(0.37);
        let x = orbit_map(&s, &0.11, -8, 8).unwrap();
        assert!(discrepancy1(&s, &x) < 1e-15);
        assert!(discrepancy2(&s, &x, SeqMetric::default()).unwrap().value < 1e-13);
    }
}
