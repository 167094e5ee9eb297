//! Shadowing methods and the checks that place them in the hierarchy:
//! shadowing, shift- and dynamical invariance, periodicity of shadows,
//! stability under perturbation and limit shadowing.

use serde_json::json;

use crate::bowen::{bowen_shadow, symmetric_shadow, BowenConfig, Envelope, Profile, ShadowResult};
use crate::bracket::Bracket;
use crate::error::{Error, Result};
use crate::orbit::{connect, image, orbit_map, Extension, PseudoOrbit};
use crate::report::CheckReport;
use crate::system::MetricSystem;
use crate::systems::cat::CatMap;
use crate::systems::north_south::{NorthSouth, NsPoint};
use crate::systems::sequence::{shift_canonical_shadow, Base, SequenceSystem};

/// A pseudo-orbit map: sends admissible pseudo-orbits to points and true
/// orbits to their base point.
pub trait ShadowingMethod<S: MetricSystem> {
    fn id(&self) -> String;
    /// Largest admissible `D¹`.
    fn gamma(&self) -> f64;
    fn apply(&self, sys: &S, x: &PseudoOrbit<S::Point>) -> Result<ShadowResult<S::Point>>;
}

impl<S: MetricSystem, M: ShadowingMethod<S> + ?Sized> ShadowingMethod<S> for &M {
    fn id(&self) -> String {
        (**self).id()
    }
    fn gamma(&self) -> f64 {
        (**self).gamma()
    }
    fn apply(&self, sys: &S, x: &PseudoOrbit<S::Point>) -> Result<ShadowResult<S::Point>> {
        (**self).apply(sys, x)
    }
}

/// `Sh(x) = x_0`.
#[derive(Debug, Clone, Copy)]
pub struct Projection {
    pub gamma: f64,
}

impl<S: MetricSystem> ShadowingMethod<S> for Projection {
    fn id(&self) -> String {
        "projection".into()
    }
    fn gamma(&self) -> f64 {
        self.gamma
    }
    fn apply(&self, sys: &S, x: &PseudoOrbit<S::Point>) -> Result<ShadowResult<S::Point>> {
        let p = x.at(sys, 0);
        let mut r = ShadowResult::exact(p);
        r.per_index_error = Some(shadow_error_profile(sys, &r.point, x));
        Ok(r)
    }
}

/// Bowen's shadow for a bracket, plain or symmetric.
#[derive(Debug, Clone)]
pub struct BowenMethod<B> {
    pub bracket: B,
    pub cfg: BowenConfig,
    pub symmetric: bool,
}

impl<S: MetricSystem, B: Bracket<S>> ShadowingMethod<S> for BowenMethod<B> {
    fn id(&self) -> String {
        let kind = if self.symmetric { "symmetric-bowen" } else { "bowen" };
        format!("{kind}({})", self.bracket.name())
    }
    fn gamma(&self) -> f64 {
        match self.cfg.mode {
            crate::bowen::AdmissibilityMode::Strict => self.cfg.delta_cap,
            crate::bowen::AdmissibilityMode::DomainChecked => self.cfg.gamma,
        }
    }
    fn apply(&self, sys: &S, x: &PseudoOrbit<S::Point>) -> Result<ShadowResult<S::Point>> {
        if self.symmetric {
            symmetric_shadow(sys, &self.bracket, &self.cfg, x)
        } else {
            bowen_shadow(sys, &self.bracket, &self.cfg, x)
        }
    }
}

/// The closed-form linear shadow on the cat map.
#[derive(Debug, Clone, Copy)]
pub struct CatOracle;

impl ShadowingMethod<CatMap> for CatOracle {
    fn id(&self) -> String {
        "oracle".into()
    }
    fn gamma(&self) -> f64 {
        crate::systems::cat::CAT_GAMMA
    }
    fn apply(&self, sys: &CatMap, x: &PseudoOrbit<<CatMap as MetricSystem>::Point>) -> Result<ShadowResult<<CatMap as MetricSystem>::Point>> {
        let p = sys.oracle_shadow(x)?;
        let mut r = ShadowResult::exact(p);
        r.per_index_error = Some(shadow_error_profile(sys, &r.point, x));
        Ok(r)
    }
}

/// `(Sh α)_i = (α_i)_0` on a sequence system.
#[derive(Debug, Clone, Copy)]
pub struct ShiftCanonical;

impl<B: Base> ShadowingMethod<SequenceSystem<B>> for ShiftCanonical {
    fn id(&self) -> String {
        "shift-canonical".into()
    }
    fn gamma(&self) -> f64 {
        f64::INFINITY
    }
    fn apply(
        &self,
        sys: &SequenceSystem<B>,
        x: &PseudoOrbit<<SequenceSystem<B> as MetricSystem>::Point>,
    ) -> Result<ShadowResult<<SequenceSystem<B> as MetricSystem>::Point>> {
        let p = shift_canonical_shadow(sys, x);
        let mut r = ShadowResult::exact(p);
        r.per_index_error = Some(shadow_error_profile(sys, &r.point, x));
        Ok(r)
    }
}

/// `d(f^i(p), x_i)` over the window of `x`.
pub fn shadow_error_profile<S: MetricSystem>(sys: &S, p: &S::Point, x: &PseudoOrbit<S::Point>) -> Profile {
    let mut cur = sys.iterate(p, x.lo());
    let mut values = Vec::with_capacity(x.len());
    for (k, xi) in x.entries().iter().enumerate() {
        if k > 0 {
            cur = sys.fwd(&cur);
        }
        values.push(sys.dist(&cur, xi));
    }
    Profile { lo: x.lo(), values }
}

/// `sup_i d(f^i(p), x_i)` over the window.
pub fn shadow_error<S: MetricSystem>(sys: &S, p: &S::Point, x: &PseudoOrbit<S::Point>) -> f64 {
    shadow_error_profile(sys, p, x).sup()
}

/// `Sh(orb(p)) = p` for each sample point.
pub fn check_pseudo_orbit_map<S: MetricSystem, M: ShadowingMethod<S>>(
    method: &M,
    sys: &S,
    points: &[S::Point],
    window: i64,
    tol: f64,
) -> CheckReport {
    let mut report = CheckReport::new(format!("orbit-fixing[{}]", method.id()));
    for p in points {
        let x = match orbit_map(sys, p, -window, window) {
            Ok(x) => x,
            Err(e) => {
                report.observe(f64::NEG_INFINITY, || json!({"error": e.to_string()}));
                continue;
            }
        };
        match method.apply(sys, &x) {
            Ok(r) => {
                let d = sys.dist(&r.point, p);
                report.observe(-d, || json!({"p": format!("{p:?}"), "deviation": d}));
            }
            Err(e) => report.observe(f64::NEG_INFINITY, || json!({"p": format!("{p:?}"), "error": e.to_string()})),
        }
    }
    report.finish(tol)
}

/// `max_i d(f^i(Sh x), Sh(σ^i x))` for `i` in `range`; strict when at most `tol`.
pub fn check_shift_invariance<S: MetricSystem, M: ShadowingMethod<S>>(
    method: &M,
    sys: &S,
    x: &PseudoOrbit<S::Point>,
    range: std::ops::RangeInclusive<i64>,
    tol: f64,
) -> CheckReport {
    let mut report = CheckReport::new(format!("shift-invariance[{}]", method.id()));
    let base = match method.apply(sys, x) {
        Ok(r) => r,
        Err(e) => {
            report.observe(f64::NEG_INFINITY, || json!({"error": e.to_string()}));
            return report.finish(tol);
        }
    };
    let mut worst: f64 = 0.0;
    for i in range {
        let lhs = sys.iterate(&base.point, i);
        match method.apply(sys, &x.shift(i)) {
            Ok(r) => {
                let d = sys.dist(&lhs, &r.point);
                worst = worst.max(d);
                report.observe(-d, || json!({"i": i, "deviation": d, "lhs": format!("{lhs:?}"), "rhs": format!("{:?}", r.point)}));
            }
            Err(e) => report.observe(f64::NEG_INFINITY, || json!({"i": i, "error": e.to_string()})),
        }
    }
    report.set_metric("max_deviation", worst);
    report.finish(tol)
}

/// `d(f(Sh x), Sh(f∘x)) ≤ tol`.
pub fn check_dyn_invariance<S: MetricSystem, M: ShadowingMethod<S>>(
    method: &M,
    sys: &S,
    cases: &[PseudoOrbit<S::Point>],
    tol: f64,
) -> CheckReport {
    let mut report = CheckReport::new(format!("dyn-invariance[{}]", method.id()));
    for (case, x) in cases.iter().enumerate() {
        match (method.apply(sys, x), method.apply(sys, &image(sys, x))) {
            (Ok(a), Ok(b)) => {
                let d = sys.dist(&sys.fwd(&a.point), &b.point);
                report.observe(-d, || json!({"case": case, "deviation": d}));
            }
            (Err(e), _) | (_, Err(e)) => {
                report.observe(f64::NEG_INFINITY, || json!({"case": case, "error": e.to_string()}))
            }
        }
    }
    report.finish(tol)
}

/// For a periodic pseudo-orbit of period `n`, `d(f^n(Sh x), Sh x) ≤ tol`.
pub fn periodic_shadow_check<S: MetricSystem, M: ShadowingMethod<S>>(
    method: &M,
    sys: &S,
    x: &PseudoOrbit<S::Point>,
    tol: f64,
) -> CheckReport {
    let mut report = CheckReport::new(format!("periodic-shadow[{}]", method.id()));
    if x.extension() != Extension::Periodic {
        report.observe(f64::NEG_INFINITY, || json!({"error": "pseudo-orbit is not periodic"}));
        return report.finish(tol);
    }
    match method.apply(sys, x) {
        Ok(r) => {
            let n = x.len() as i64;
            let d = sys.dist(&sys.iterate(&r.point, n), &r.point);
            report.observe(-d, || json!({"period": n, "deviation": d, "shadow": format!("{:?}", r.point)}));
            report.set_metric("period", n as f64);
        }
        Err(e) => report.observe(f64::NEG_INFINITY, || json!({"error": e.to_string()})),
    }
    report.finish(tol)
}

/// Shadowing and the weak shift relation on a ladder of jump sizes: for
/// each rung `γ` with cases of `D¹ ≤ γ`, the sup shadow error and
/// `max_i d(f^i(Sh x), Sh(σ^i x))` are both compared with `gain·γ`.
pub fn check_shadowing_ladder<S: MetricSystem, M: ShadowingMethod<S>>(
    method: &M,
    sys: &S,
    rungs: &[(f64, Vec<PseudoOrbit<S::Point>>)],
    shift_range: i64,
    gain: f64,
) -> CheckReport {
    let mut report = CheckReport::new(format!("shadowing-ladder[{}]", method.id()));
    let mut agree = true;
    for (gamma, cases) in rungs {
        let eps = gain * gamma;
        let (mut shadow_eps, mut shift_eps) = (0.0f64, 0.0f64);
        for (case, x) in cases.iter().enumerate() {
            let Ok(r) = method.apply(sys, x) else {
                report.observe(f64::NEG_INFINITY, || json!({"gamma": gamma, "case": case, "error": "method failed"}));
                continue;
            };
            shadow_eps = shadow_eps.max(shadow_error(sys, &r.point, x));
            for i in -shift_range..=shift_range {
                if let Ok(s) = method.apply(sys, &x.shift(i)) {
                    shift_eps = shift_eps.max(sys.dist(&sys.iterate(&r.point, i), &s.point));
                }
            }
        }
        agree &= (shadow_eps <= eps) == (shift_eps <= eps);
        report.set_metric(&format!("shadow_eps_gamma{gamma:e}"), shadow_eps);
        report.set_metric(&format!("shift_eps_gamma{gamma:e}"), shift_eps);
        let worst = shadow_eps.max(shift_eps);
        report.observe(eps - worst, || json!({"gamma": gamma, "shadow": shadow_eps, "shift": shift_eps}));
    }
    report.set_metric("directions_agree", if agree { 1.0 } else { 0.0 });
    report.finish(0.0)
}

/// Maps `f` over `items` on scoped threads, preserving order.
pub fn parallel_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    let chunk = items.len().div_ceil(threads).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<_>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Options for [`stability_experiment`].
#[derive(Debug, Clone, Copy)]
pub struct StabilityOptions {
    /// Orbits of `g` are stored on `[-window, window]`.
    pub window: i64,
    /// Bound on both sups when no certificate is requested.
    pub tol: f64,
    /// Compare each defect against the summed envelopes of its two runs.
    pub certify: Option<BowenConfig>,
}

/// `h(p) = Sh_f(orb_g(p))` on sample points: reports `sup d(h(p), p)` and
/// the semiconjugacy defect `sup d(f(h(p)), h(g(p)))`.
pub fn stability_experiment<S, G, M>(
    f: &S,
    g: &G,
    method: &M,
    points: &[S::Point],
    opts: StabilityOptions,
) -> CheckReport
where
    S: MetricSystem + Sync,
    G: MetricSystem<Point = S::Point> + Sync,
    M: ShadowingMethod<S> + Sync,
    S::Point: Send + Sync,
{
    let w = opts.window;
    let outcomes = parallel_map(points, |p| -> Result<(f64, f64, f64)> {
        let long = orbit_map(g, p, -w, w + 1)?;
        let x = PseudoOrbit::new(-w, long.entries()[..(2 * w + 1) as usize].to_vec(), Extension::OrbitCapped)?;
        let gx = PseudoOrbit::new(-w, long.entries()[1..].to_vec(), Extension::OrbitCapped)?;
        let d1 = crate::orbit::jumps(f, &x).sup();
        if d1 > method.gamma() {
            return Err(Error::Inadmissible {
                bound: crate::error::Admissibility::JumpSize,
                observed: d1,
                limit: method.gamma(),
            });
        }
        let hp = method.apply(f, &x)?;
        let hgp = method.apply(f, &gx)?;
        let disp = f.dist(&hp.point, p);
        let defect = f.dist(&f.fwd(&hp.point), &hgp.point);
        let cert = match &opts.certify {
            Some(cfg) => {
                Envelope::new(f, cfg, &x).certificate(1, hp.tail_bound)
                    + Envelope::new(f, cfg, &gx).certificate(0, hgp.tail_bound)
            }
            None => opts.tol,
        };
        Ok((disp, defect, cert))
    });
    let mut report = CheckReport::new(format!("stability[{}]", method.id()));
    let (mut sup_disp, mut sup_defect, mut min_cert) = (0.0f64, 0.0f64, f64::INFINITY);
    for (k, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok((disp, defect, cert)) => {
                sup_disp = sup_disp.max(disp);
                sup_defect = sup_defect.max(defect);
                min_cert = min_cert.min(cert);
                report.observe(cert - defect, || json!({"point": k, "defect": defect, "bound": cert, "displacement": disp}));
            }
            Err(e) => report.observe(f64::NEG_INFINITY, || json!({"point": k, "error": e.to_string()})),
        }
    }
    report.set_metric("sup_displacement", sup_disp);
    report.set_metric("sup_defect", sup_defect);
    report.set_metric("min_bound", min_cert);
    report.finish(0.0)
}

/// Required fall of the outer-quarter error relative to the peak.
pub const DECAY_RATIO: f64 = 1e-3;
/// Errors below this count as decayed regardless of the peak.
pub const DECAY_FLOOR: f64 = 1e-12;

/// Per-index error of the shadow of a two-sided-limit pseudo-orbit: below
/// the block-sum envelope when `cfg` is given, and in the outer quarter of
/// the window at most `DECAY_RATIO` times the peak (or below `DECAY_FLOOR`).
pub fn limit_shadow_decay<S: MetricSystem, M: ShadowingMethod<S>>(
    method: &M,
    sys: &S,
    x: &PseudoOrbit<S::Point>,
    cfg: Option<&BowenConfig>,
) -> CheckReport {
    let mut report = CheckReport::new(format!("limit-decay[{}]", method.id()));
    let res = match method.apply(sys, x) {
        Ok(r) => r,
        Err(e) => {
            report.observe(f64::NEG_INFINITY, || json!({"error": e.to_string()}));
            return report.finish(0.0);
        }
    };
    let errors = res.per_index_error.clone().unwrap_or_else(|| shadow_error_profile(sys, &res.point, x));
    let peak = errors.sup();
    if let Some(cfg) = cfg {
        let env = Envelope::new(sys, cfg, x);
        for (k, e) in errors.values.iter().enumerate() {
            let i = errors.lo + k as i64;
            let bound = env.certificate(i, res.tail_bound);
            report.observe(bound - e, || json!({"index": i, "error": e, "envelope": bound}));
        }
    }
    let reach = (-x.lo()).min(x.hi());
    let cut = reach - reach / 4;
    let outer = errors
        .values
        .iter()
        .enumerate()
        .filter(|(k, _)| (errors.lo + *k as i64).abs() >= cut)
        .map(|(_, e)| *e)
        .fold(0.0, f64::max);
    let allowed = (DECAY_RATIO * peak).max(DECAY_FLOOR);
    report.observe(allowed - outer, || json!({"outer_max": outer, "peak": peak, "from_index": cut}));
    report.set_metric("peak_error", peak);
    report.set_metric("outer_error", outer);
    report.finish(0.0)
}

/// Whether both window ends of `x` lie within the plateau balls.
pub fn ns_ends_in_balls(sys: &NorthSouth, x: &PseudoOrbit<NsPoint>) -> bool {
    let inside = |p: &NsPoint| p.dist_south() <= sys.r() || p.dist_north() <= sys.r();
    inside(&x.entries()[0]) && inside(x.entries().last().unwrap())
}

/// Searches connecting orbits `x = con(p, q)` with `p, q` outside both balls
/// and `φ(p) ∈ (0, 1)` for the largest `d(f^u(Sh x), Sh(σ^u x))` relative to
/// the runs' certificates (tails plus the system's roundoff tolerance), and
/// checks `Sh(σ^u x) = f^u(q)`. Passes when the
/// best gap exceeds `factor` times its certificate. Also reports the gap for
/// a control pair with `φ(p) = 1`, where `[p, q] = q`.
pub fn ns_counterexample<M: ShadowingMethod<NorthSouth>>(
    sys: &NorthSouth,
    method: &M,
    candidates: usize,
    factor: f64,
) -> CheckReport {
    let mut report = CheckReport::new(format!("shift-counterexample[{}]", method.id()));
    let u = sys.u() as i64;
    let lu = sys.lip().powi(u as i32);
    let run = |p: NsPoint, q: NsPoint| -> Result<(f64, f64, f64)> {
        let x = connect(sys, &p, &q, -(u + 1), u + 1)?;
        let a = method.apply(sys, &x)?;
        let b = method.apply(sys, &x.shift(u))?;
        let fu_q = sys.iterate(&q, u);
        let gap = sys.dist(&sys.iterate(&a.point, u), &b.point);
        let cert = lu * a.tail_bound + b.tail_bound + sys.tolerance();
        let off = sys.dist(&b.point, &fu_q);
        Ok((gap, cert, off))
    };
    let r = sys.r();
    let step = 0.5 * sys.delta();
    let mut best: Option<(f64, f64, f64, f64, f64)> = None;
    let mut failed = 0usize;
    for k in 0..candidates {
        let t = r + (0.5 - 2.0 * r) * (k as f64 + 0.5) / candidates as f64;
        let p = NsPoint::from_theta(t);
        let phi = sys.phi(&p);
        if !(phi > 0.0 && phi < 1.0) {
            continue;
        }
        let q = p.moved(step);
        if q.dist_south() <= r || q.dist_north() <= r {
            continue;
        }
        match run(p, q) {
            Ok((gap, cert, off)) => {
                let score = gap / cert.max(f64::MIN_POSITIVE);
                if best.map_or(true, |b| score > b.0) {
                    best = Some((score, gap, cert, off, t));
                }
            }
            Err(_) => failed += 1,
        }
    }
    report.set_metric("failed_candidates", failed as f64);
    match best {
        Some((_, gap, cert, off, t)) => {
            report.samples = candidates;
            report.worst_slack = (gap - factor * cert).min(cert - off);
            report.witness = json!({"p_theta": t, "q_offset": step, "gap": gap, "certificate": cert, "sh_shift_minus_fu_q": off, "u": u});
            report.passed = report.worst_slack > 0.0;
            report.set_metric("gap", gap);
            report.set_metric("certificate", cert);
        }
        None => {
            report.worst_slack = f64::NEG_INFINITY;
            report.witness = json!({"error": "no admissible candidate pair"});
            report.passed = false;
        }
    }
    let pc = NsPoint::from_theta(0.5 - 0.5 * r);
    if let Ok((gap, _, _)) = run(pc, pc.moved(step)) {
        report.set_metric("control_gap", gap);
    }
    report
}
