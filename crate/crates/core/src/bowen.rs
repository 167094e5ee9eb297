//! Bowen's iterative shadowing from a hyperbolic bracket.
//!
//! `q_0 = x_0`, `q_n = [f^m(q_{n-1}), x_{nm}]`, `p_n = f^{-nm}(q_n)`; the
//! forward half-shadow is `lim p_n`, the backward half is the same recursion
//! for `f^{-1}` on the time-reversed orbit, and the shadow is their bracket.
//! Each stage checks the gap, running-sum and step bounds that make the
//! recursion well defined and convergent.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bracket::{Bracket, Swapped};
use crate::error::{Admissibility, Error, Result};
use crate::metric::{local_discrepancy, BoundedValue, SeqMetric};
use crate::orbit::{block_jumps, image, jumps, Extension, Jumps, PseudoOrbit};
use crate::report::CheckReport;
use crate::system::{lipschitz_geom_sum, MetricSystem, Reversed};
use crate::verify::{shadow_error_profile, ShadowingMethod};

/// How the jump size of an input is checked before iterating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdmissibilityMode {
    /// Reject inputs with `D¹(x) > delta_cap`.
    Strict,
    /// Accept any input and fail only if a bracket is evaluated off its domain.
    DomainChecked,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BowenConfig {
    pub m: u32,
    pub tol: f64,
    pub max_stages: usize,
    pub c: f64,
    pub mu: f64,
    /// Lipschitz constant of `f` and `f^{-1}`.
    pub lip: f64,
    /// Bracket domain radius.
    pub gamma: f64,
    pub delta_cap: f64,
    pub mode: AdmissibilityMode,
    pub assert_lemmas: bool,
    /// Run at least enough stages for `x_{nm}` to pass the window end.
    pub cover_window: bool,
}

/// Smallest `m ≥ 1` with `c μ^m ≤ 1/(2c)`.
pub fn choose_m(c: f64, mu: f64) -> u32 {
    assert!(c >= 1.0 && mu > 0.0 && mu < 1.0, "need c >= 1 and mu in (0,1)");
    let target = 1.0 / (2.0 * c);
    let mut m = 1u32;
    while c * mu.powi(m as i32) > target {
        m += 1;
    }
    m
}

impl BowenConfig {
    /// Configuration with `m` from [`choose_m`] and `delta_cap = γ/(2L_m)`.
    pub fn new(c: f64, mu: f64, lip: f64, gamma: f64) -> Result<Self> {
        if !(c >= 1.0 && mu > 0.0 && mu < 1.0 && lip >= 1.0 && gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need c >= 1, mu in (0,1), L >= 1, gamma > 0 (got c={c}, mu={mu}, L={lip}, gamma={gamma})"
            )));
        }
        let m = choose_m(c, mu);
        let delta_cap = gamma / (2.0 * lipschitz_geom_sum(lip, m));
        Ok(BowenConfig {
            m,
            tol: 1e-12,
            max_stages: 512,
            c,
            mu,
            lip,
            gamma,
            delta_cap,
            mode: AdmissibilityMode::Strict,
            assert_lemmas: true,
            cover_window: true,
        })
    }

    /// Configuration from a bracket's declared constants.
    pub fn for_bracket<S: MetricSystem, B: Bracket<S>>(sys: &S, b: &B) -> Result<Self> {
        let h = b
            .declared()
            .ok_or_else(|| Error::InvalidParameter(format!("bracket {} declares no (c, mu)", b.name())))?;
        Self::new(h.c, h.mu, sys.lip(), b.radius())
    }

    pub fn with_mode(mut self, mode: AdmissibilityMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn kappa(&self) -> f64 {
        10.0 / 3.0 * self.c + 1.0
    }

    /// `L_m = 1 + L + ... + L^{m-1}`.
    pub fn lm(&self) -> f64 {
        lipschitz_geom_sum(self.lip, self.m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || !(self.tol > 0.0) || self.max_stages == 0 {
            return Err(Error::InvalidParameter("need m >= 1, tol > 0, max_stages >= 1".into()));
        }
        let lhs = self.c * self.mu.powi(self.m as i32);
        let rhs = 1.0 / (2.0 * self.c);
        if lhs > rhs * (1.0 + 1e-12) {
            return Err(Error::Inadmissible { bound: Admissibility::BlockContraction, observed: lhs, limit: rhs });
        }
        let need = 2.0 * self.delta_cap * self.lm();
        if need > self.gamma * (1.0 + 1e-12) {
            return Err(Error::Inadmissible { bound: Admissibility::JumpSize, observed: need, limit: self.gamma });
        }
        Ok(())
    }

    /// `c (2δL_m) μ^{(n+1)m} / (1 - μ^m)`, the distance from `p_n` to the limit.
    pub fn tail(&self, delta: f64, n: usize) -> f64 {
        let mm = self.mu.powi(self.m as i32);
        self.c * 2.0 * delta * self.lm() * mm.powi(n as i32 + 1) / (1.0 - mm)
    }
}

/// Bounds observed at one stage of the recursion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub forward: bool,
    pub stage: usize,
    /// `d(f^m(q_{n-1}), x_{nm})`.
    pub gap: f64,
    /// `2δL_m`.
    pub gap_bound: f64,
    /// `Σ_{l ≤ n} δ_l^m / 2^{n-l}`.
    pub running_sum: f64,
    /// `d(p_n, p_{n-1})`.
    pub step: f64,
    /// `c μ^{nm} (2δL_m)`.
    pub step_bound: f64,
}

/// Values indexed from `lo`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub lo: i64,
    pub values: Vec<f64>,
}

impl Profile {
    pub fn get(&self, i: i64) -> Option<f64> {
        let k = i - self.lo;
        if k < 0 {
            None
        } else {
            self.values.get(k as usize).copied()
        }
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShadowResult<P> {
    pub point: P,
    pub stages_used: usize,
    pub tail_bound: f64,
    pub per_index_error: Option<Profile>,
    pub stages: Vec<StageRecord>,
    /// Backward and forward half-shadows, when the result is their bracket.
    pub halves: Option<(P, P)>,
}

impl<P> ShadowResult<P> {
    pub fn exact(point: P) -> Self {
        ShadowResult { point, stages_used: 0, tail_bound: 0.0, per_index_error: None, stages: Vec::new(), halves: None }
    }
}

/// Relative and absolute slack for the stage assertions.
const REL_SLACK: f64 = 1e-9;
const ABS_SLACK: f64 = 1e-15;

fn within(observed: f64, bound: f64) -> bool {
    observed <= bound * (1.0 + REL_SLACK) + ABS_SLACK
}

/// `x_i` for increasing `i`, reusing the last capped iterate.
struct Cursor<'a, S: MetricSystem> {
    sys: &'a S,
    x: &'a PseudoOrbit<S::Point>,
    cached: Option<(i64, S::Point)>,
}

impl<'a, S: MetricSystem> Cursor<'a, S> {
    fn new(sys: &'a S, x: &'a PseudoOrbit<S::Point>) -> Self {
        Cursor { sys, x, cached: None }
    }

    fn get(&mut self, i: i64) -> S::Point {
        if self.x.extension() == Extension::Periodic || i <= self.x.hi() {
            return self.x.at(self.sys, i);
        }
        let p = match &self.cached {
            Some((j, p)) if *j <= i => self.sys.iterate(p, i - j),
            _ => self.x.at(self.sys, i),
        };
        self.cached = Some((i, p.clone()));
        p
    }
}

fn check_jump_size(cfg: &BowenConfig, delta: f64) -> Result<()> {
    if cfg.mode == AdmissibilityMode::Strict && delta > cfg.delta_cap {
        return Err(Error::Inadmissible { bound: Admissibility::JumpSize, observed: delta, limit: cfg.delta_cap });
    }
    Ok(())
}

/// The forward half-shadow `Sh⁺(x)`.
pub fn forward_map<S: MetricSystem, B: Bracket<S>>(
    sys: &S,
    b: &B,
    cfg: &BowenConfig,
    x: &PseudoOrbit<S::Point>,
) -> Result<ShadowResult<S::Point>> {
    forward_inner(sys, b, cfg, x, true)
}

fn forward_inner<S: MetricSystem, B: Bracket<S>>(
    sys: &S,
    b: &B,
    cfg: &BowenConfig,
    x: &PseudoOrbit<S::Point>,
    forward: bool,
) -> Result<ShadowResult<S::Point>> {
    cfg.validate()?;
    let js = jumps(sys, x);
    let delta = js.sup();
    check_jump_size(cfg, delta)?;
    let m = cfg.m as i64;
    let gap_bound = 2.0 * delta * cfg.lm();
    let mm = cfg.mu.powi(cfg.m as i32);
    let min_stages = if cfg.cover_window { ((x.hi().max(0) + m - 1) / m).max(1) as usize } else { 1 };

    let mut cursor = Cursor::new(sys, x);
    let mut q = x.at(sys, 0);
    let mut p = q.clone();
    let mut running = 0.0;
    let mut step_scale = cfg.c * gap_bound;
    let mut stages = Vec::new();
    for n in 1..=cfg.max_stages {
        let fq = sys.iterate(&q, m);
        let xn = cursor.get(n as i64 * m);
        let gap = sys.dist(&fq, &xn);
        running = running / 2.0 + block_jumps(&js, cfg.m, n as i64, cfg.lip);
        if cfg.assert_lemmas {
            if !within(gap, gap_bound) {
                return Err(Error::LemmaViolation { lemma: "block gap", stage: n, observed: gap, bound: gap_bound });
            }
            if !within(gap, running) {
                return Err(Error::LemmaViolation { lemma: "running sum", stage: n, observed: gap, bound: running });
            }
        }
        q = b.eval(sys, &fq, &xn)?;
        let next = sys.iterate(&q, -(n as i64) * m);
        let step = sys.dist(&next, &p);
        step_scale *= mm;
        if cfg.assert_lemmas && !within(step, step_scale) {
            return Err(Error::LemmaViolation { lemma: "stage step", stage: n, observed: step, bound: step_scale });
        }
        p = next;
        stages.push(StageRecord {
            forward,
            stage: n,
            gap,
            gap_bound,
            running_sum: running,
            step,
            step_bound: step_scale,
        });
        let tail = cfg.tail(delta, n);
        if n >= min_stages && tail <= cfg.tol {
            return Ok(ShadowResult {
                point: p,
                stages_used: n,
                tail_bound: tail,
                per_index_error: None,
                stages,
                halves: None,
            });
        }
    }
    Err(Error::NonConvergence { stages: cfg.max_stages, tail: cfg.tail(delta, cfg.max_stages) })
}

/// The backward half-shadow `Sh⁻(x)`: the forward recursion for `f^{-1}`
/// on `x̂_i = x_{-i}` with the bracket arguments exchanged.
pub fn backward_map<S: MetricSystem, B: Bracket<S>>(
    sys: &S,
    b: &B,
    cfg: &BowenConfig,
    x: &PseudoOrbit<S::Point>,
) -> Result<ShadowResult<S::Point>> {
    forward_inner(&Reversed(sys), &Swapped(b), cfg, &x.reversed(), false)
}

fn assemble<S: MetricSystem, B: Bracket<S>>(
    sys: &S,
    b: &B,
    x: &PseudoOrbit<S::Point>,
    minus: ShadowResult<S::Point>,
    plus: ShadowResult<S::Point>,
) -> Result<ShadowResult<S::Point>> {
    let point = b.eval(sys, &minus.point, &plus.point).map_err(|e| match e {
        Error::OutOfDomain { dist, radius } => Error::HalvesTooFar { dist, radius },
        other => other,
    })?;
    let mut stages = minus.stages;
    stages.extend(plus.stages);
    Ok(ShadowResult {
        per_index_error: Some(shadow_error_profile(sys, &point, x)),
        point,
        stages_used: minus.stages_used.max(plus.stages_used),
        tail_bound: minus.tail_bound + plus.tail_bound,
        stages,
        halves: Some((minus.point, plus.point)),
    })
}

/// `Sh(x) = [Sh⁻(x), Sh⁺(x)]`.
pub fn bowen_shadow<S: MetricSystem, B: Bracket<S>>(
    sys: &S,
    b: &B,
    cfg: &BowenConfig,
    x: &PseudoOrbit<S::Point>,
) -> Result<ShadowResult<S::Point>> {
    let plus = forward_map(sys, b, cfg, x)?;
    let minus = backward_map(sys, b, cfg, x)?;
    assemble(sys, b, x, minus, plus)
}

/// The variant whose backward half runs on `σ^{-1}(f∘x)`, so that the
/// connecting orbit of `(p, q)` is sent to `[p, q]`.
pub fn symmetric_shadow<S: MetricSystem, B: Bracket<S>>(
    sys: &S,
    b: &B,
    cfg: &BowenConfig,
    x: &PseudoOrbit<S::Point>,
) -> Result<ShadowResult<S::Point>> {
    let plus = forward_map(sys, b, cfg, x)?;
    let minus = backward_map(sys, b, cfg, &image(sys, x).shift(-1))?;
    assemble(sys, b, x, minus, plus)
}

/// Blocks summed explicitly past the last one in view before a periodic
/// orbit's remainder is bounded geometrically.
const PERIODIC_BLOCKS: i64 = 64;

/// `κ Σ_{l≥1} δ_l^m / 2^{|l-s-1|}` for one direction of time, `s = ⌊i/m⌋`, `i ≥ 0`.
fn one_sided_envelope(js: &Jumps, cfg: &BowenConfig, i: i64) -> BoundedValue {
    let m = cfg.m as i64;
    let s = i.div_euclid(m);
    let kappa = cfg.kappa();
    let (l_max, tail) = if js.is_periodic() {
        let sup_block = cfg.lip.powi(cfg.m as i32) * cfg.m as f64 * js.sup();
        (s + PERIODIC_BLOCKS, kappa * sup_block * 0.5f64.powi(PERIODIC_BLOCKS as i32 - 1))
    } else {
        let last = js.last().max(0);
        ((last + m - 1) / m, 0.0)
    };
    let mut sum = 0.0;
    for l in 1..=l_max {
        let d = block_jumps(js, cfg.m, l, cfg.lip);
        if d != 0.0 {
            sum += d * 0.5f64.powi((l - s - 1).unsigned_abs() as i32);
        }
    }
    BoundedValue { value: kappa * sum, tail_bound: tail }
}

/// Per-index envelope for `d(f^i(Sh x), x_i)`. The half on the same side
/// of 0 as `i` contributes its block sum (negative indices use the
/// time-reversed orbit and the jumps of `f^{-1}`); the other half enters
/// through the bracket as `c μ^{|i|} (E⁺(0) + E⁻(0))`.
pub struct Envelope {
    fwd: Jumps,
    bwd: Jumps,
    cfg: BowenConfig,
    at_zero: BoundedValue,
}

impl Envelope {
    pub fn new<S: MetricSystem>(sys: &S, cfg: &BowenConfig, x: &PseudoOrbit<S::Point>) -> Self {
        let fwd = jumps(sys, x);
        let bwd = jumps(&Reversed(sys), &x.reversed());
        let (a, b) = (one_sided_envelope(&fwd, cfg, 0), one_sided_envelope(&bwd, cfg, 0));
        let at_zero = BoundedValue { value: a.value + b.value, tail_bound: a.tail_bound + b.tail_bound };
        Envelope { fwd, bwd, cfg: *cfg, at_zero }
    }

    fn cross_weight(&self, i: i64) -> f64 {
        self.cfg.c * self.cfg.mu.powi(i.unsigned_abs().min(i32::MAX as u64) as i32)
    }

    pub fn at(&self, i: i64) -> BoundedValue {
        let own = if i >= 0 {
            one_sided_envelope(&self.fwd, &self.cfg, i)
        } else {
            one_sided_envelope(&self.bwd, &self.cfg, -i)
        };
        let w = self.cross_weight(i);
        BoundedValue {
            value: own.value + w * self.at_zero.value,
            tail_bound: own.tail_bound + w * self.at_zero.tail_bound,
        }
    }

    /// The bound a run with truncation tail `tail` must meet at index `i`.
    pub fn certificate(&self, i: i64, tail: f64) -> f64 {
        self.at(i).upper() + tail * (1.0 + self.cross_weight(i))
    }

    /// Upper bounds over `lo..=hi`.
    pub fn profile(&self, lo: i64, hi: i64) -> Profile {
        Profile { lo, values: (lo..=hi).map(|i| self.at(i).upper()).collect() }
    }
}

/// The block-sum error envelope at index `i`.
pub fn envelope_bound<S: MetricSystem>(
    sys: &S,
    x: &PseudoOrbit<S::Point>,
    i: i64,
    cfg: &BowenConfig,
) -> BoundedValue {
    Envelope::new(sys, cfg, x).at(i)
}

/// `δ_j ≤ L d(f^{j-1}(x_0), x_{j-1}) + d(f^j(x_0), x_j) ≤ (L+1) max_k d(f^k(x_0), x_k)`
/// for `1 ≤ j ≤ n`; returns the worst slack of both inequalities.
pub fn jump_from_orbit_slack<S: MetricSystem>(sys: &S, x: &PseudoOrbit<S::Point>, n: i64) -> f64 {
    let js = jumps(sys, x);
    let xs = x.values(sys, 0, n);
    let mut orbit = x.at(sys, 0);
    let mut dev = vec![0.0];
    for k in 1..=n as usize {
        orbit = sys.fwd(&orbit);
        dev.push(sys.dist(&orbit, &xs[k]));
    }
    let top = dev.iter().copied().fold(0.0, f64::max);
    let l = sys.lip_fwd();
    let mut worst = f64::INFINITY;
    for j in 1..=n as usize {
        let dj = js.get(j as i64);
        let mid = l * dev[j - 1] + dev[j];
        worst = worst.min(mid - dj).min((l + 1.0) * top - mid);
    }
    worst
}

/// Default `(γ′)` ladder for self-tuning.
pub const TUNING_LADDER: [f64; 4] = [1e-2, 1e-3, 1e-4, 1e-5];

/// Default ratio `ε′/γ′` on the ladder.
pub const TUNING_GAIN: f64 = 100.0;

/// Whether `d(f^i(Sh x), x_i) ≤ gain·γ′` at every index where the local
/// discrepancy is certified below `γ′`, for every rung. The largest such
/// error per rung is the measured tuning curve.
pub fn check_self_tuning<S: MetricSystem, M: ShadowingMethod<S>>(
    method: &M,
    sys: &S,
    cases: &[PseudoOrbit<S::Point>],
    metric: SeqMetric,
    ladder: &[f64],
    gain: f64,
) -> CheckReport {
    let mut report = CheckReport::new(format!("self-tuning[{}]", method.id()));
    let mut curve = vec![0.0f64; ladder.len()];
    let mut quiet = vec![0usize; ladder.len()];
    let mut failures = 0usize;
    for (case, x) in cases.iter().enumerate() {
        let res = method.apply(sys, x);
        let local = local_discrepancy(sys, x, metric);
        let (res, local) = match (res, local) {
            (Ok(r), Ok(l)) => (r, l),
            (Err(e), _) | (_, Err(e)) => {
                failures += 1;
                report.observe(f64::NEG_INFINITY, || json!({"case": case, "error": e.to_string()}));
                continue;
            }
        };
        let errors = res.per_index_error.unwrap_or_else(|| shadow_error_profile(sys, &res.point, x));
        for (k, g) in ladder.iter().enumerate() {
            for (off, loc) in local.iter().enumerate() {
                if loc.upper() >= *g {
                    continue;
                }
                let i = x.lo() + off as i64;
                let err = errors.get(i).unwrap_or(0.0);
                quiet[k] += 1;
                curve[k] = curve[k].max(err);
                let eps = gain * g;
                report.observe(eps - err, || json!({"case": case, "index": i, "gamma": g, "error": err, "local": loc.upper()}));
            }
        }
    }
    for (k, g) in ladder.iter().enumerate() {
        report.set_metric(&format!("curve_gamma{g:e}"), curve[k]);
        report.set_metric(&format!("quiet_gamma{g:e}"), quiet[k] as f64);
    }
    report.set_metric("gain", gain);
    report.set_metric("failed_runs", failures as f64);
    report.finish(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn choose_m_examples() {
        assert_eq!(choose_m(1.0, 0.5), 1);
        assert_eq!(choose_m(2.0, 0.5), 3);
        assert_eq!(choose_m(1.0, (3.0 - 5f64.sqrt()) / 2.0), 1);
        assert_eq!(choose_m(4.0, 0.5), 5);
    }

    #[test]
    fn kappa_for_unit_c() {
        let cfg = BowenConfig::new(1.0, 0.5, 2.0, 0.1).unwrap();
        assert!((cfg.kappa() - 13.0 / 3.0).abs() < 1e-15);
        cfg.validate().unwrap();
        assert!((2.0 * cfg.delta_cap * cfg.lm() - cfg.gamma).abs() < 1e-15);
    }

    #[test]
    fn tail_is_geometric() {
        let cfg = BowenConfig::new(1.0, 0.5, 2.0, 0.1).unwrap();
        let t0 = cfg.tail(1e-3, 0);
        assert!((t0 - 2e-3 * 0.5 / 0.5).abs() < 1e-18);
        assert!((cfg.tail(1e-3, 3) - t0 / 8.0).abs() < 1e-18);
    }
}
