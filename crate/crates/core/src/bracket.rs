//! Brackets on the near-diagonal and numerical checkers for their axioms.

use serde_json::json;

use crate::error::{Error, Result};
use crate::orbit::connect;
use crate::report::CheckReport;
use crate::sampling::Sampler;
use crate::system::{MetricSystem, Reversed, Sampling};
use crate::verify::ShadowingMethod;

/// Constants `(c, μ)` with `d(f^n[p,q], f^n q) ≤ c μ^n d(p,q)` and the
/// time-reversed inequality toward `p`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Hyperbolicity {
    pub c: f64,
    pub mu: f64,
}

/// A partial map `[·,·]` defined on pairs at distance at most `radius`.
pub trait Bracket<S: MetricSystem> {
    fn name(&self) -> String;
    fn radius(&self) -> f64;
    fn eval(&self, sys: &S, p: &S::Point, q: &S::Point) -> Result<S::Point>;
    fn declared(&self) -> Option<Hyperbolicity> {
        None
    }
}

pub fn check_domain<S: MetricSystem>(sys: &S, p: &S::Point, q: &S::Point, radius: f64) -> Result<()> {
    let d = sys.dist(p, q);
    if d <= radius {
        Ok(())
    } else {
        Err(Error::OutOfDomain { dist: d, radius })
    }
}

/// The bracket of the inverse system: `[p, q]' = [q, p]`.
#[derive(Debug, Clone, Copy)]
pub struct Swapped<'b, B>(pub &'b B);

impl<S: MetricSystem, B: Bracket<S>> Bracket<Reversed<'_, S>> for Swapped<'_, B> {
    fn name(&self) -> String {
        format!("{}-swapped", self.0.name())
    }
    fn radius(&self) -> f64 {
        self.0.radius()
    }
    fn eval(&self, sys: &Reversed<'_, S>, p: &S::Point, q: &S::Point) -> Result<S::Point> {
        self.0.eval(sys.0, q, p)
    }
    fn declared(&self) -> Option<Hyperbolicity> {
        self.0.declared()
    }
}

/// `[p, q] = p`.
#[derive(Debug, Clone, Copy)]
pub struct FirstArg {
    pub radius: f64,
}

impl<S: MetricSystem> Bracket<S> for FirstArg {
    fn name(&self) -> String {
        "projection".into()
    }
    fn radius(&self) -> f64 {
        self.radius
    }
    fn eval(&self, sys: &S, p: &S::Point, q: &S::Point) -> Result<S::Point> {
        check_domain(sys, p, q, self.radius)?;
        Ok(p.clone())
    }
}

/// `[p, q] = Sh(con(p, q))` for a shadowing method, with the connecting
/// orbit stored on `[-window, window]`.
pub fn induced_bracket<S: MetricSystem, M: ShadowingMethod<S>>(
    method: &M,
    sys: &S,
    p: &S::Point,
    q: &S::Point,
    window: i64,
) -> Result<S::Point> {
    check_domain(sys, p, q, method.gamma())?;
    let x = connect(sys, p, q, -window.max(1), window.max(0))?;
    Ok(method.apply(sys, &x)?.point)
}

/// The bracket induced by a shadowing method.
#[derive(Debug, Clone)]
pub struct InducedBracket<M> {
    pub method: M,
    pub window: i64,
}

impl<S: MetricSystem, M: ShadowingMethod<S>> Bracket<S> for InducedBracket<M> {
    fn name(&self) -> String {
        format!("induced({})", self.method.id())
    }
    fn radius(&self) -> f64 {
        self.method.gamma()
    }
    fn eval(&self, sys: &S, p: &S::Point, q: &S::Point) -> Result<S::Point> {
        induced_bracket(&self.method, sys, p, q, self.window)
    }
}

fn dbg<P: std::fmt::Debug>(p: &P) -> String {
    format!("{p:?}")
}

/// Perturbation sizes at which continuity is probed.
pub const CONTINUITY_STEPS: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// `[p, p] = p` on samples, plus a measured continuity modulus.
pub fn check_identity_axiom<S: Sampling, B: Bracket<S>>(b: &B, sys: &S, sampler: &Sampler) -> CheckReport {
    let mut report = CheckReport::new(format!("identity[{}]", b.name()));
    for p in sampler.points(sys) {
        match b.eval(sys, &p, &p) {
            Ok(r) => {
                let d = sys.dist(&r, &p);
                report.observe(-d, || json!({"p": dbg(&p), "bracket": dbg(&r)}));
            }
            Err(e) => report.observe(f64::NEG_INFINITY, || json!({"p": dbg(&p), "error": e.to_string()})),
        }
    }
    let pairs = sampler.pairs(sys, 0.5 * b.radius());
    let mut h_seq = crate::sampling::Halton::new(2 * sys.sample_dim(), sampler.seed ^ 0xc0);
    for h in CONTINUITY_STEPS {
        let mut modulus: f64 = 0.0;
        for (p, q) in &pairs {
            let u = h_seq.next_point();
            let p2 = sys.nearby(p, h, &u[..sys.sample_dim()]);
            let q2 = sys.nearby(q, h, &u[sys.sample_dim()..]);
            if let (Ok(a), Ok(c)) = (b.eval(sys, p, q), b.eval(sys, &p2, &q2)) {
                modulus = modulus.max(sys.dist(&a, &c));
            }
        }
        report.set_metric(&format!("modulus_h{h:e}"), modulus);
    }
    report.finish(sys.tolerance())
}

/// `[[p, q], r] = [p, r] = [p, [q, r]]` on triples where both sides are defined.
pub fn check_associativity<S: Sampling, B: Bracket<S>>(b: &B, sys: &S, sampler: &Sampler) -> CheckReport {
    let mut report = CheckReport::new(format!("associativity[{}]", b.name()));
    let mut skipped = 0usize;
    for (p, q, r) in sampler.triples(sys, b.radius()) {
        let Ok(pr) = b.eval(sys, &p, &r) else {
            skipped += 1;
            continue;
        };
        let left = b.eval(sys, &p, &q).and_then(|pq| b.eval(sys, &pq, &r));
        let right = b.eval(sys, &q, &r).and_then(|qr| b.eval(sys, &p, &qr));
        for (side, v) in [("[[p,q],r]", left), ("[p,[q,r]]", right)] {
            match v {
                Ok(v) => {
                    let d = sys.dist(&v, &pr);
                    report.observe(-d, || {
                        json!({"identity": side, "p": dbg(&p), "q": dbg(&q), "r": dbg(&r), "deviation": d})
                    });
                }
                Err(_) => skipped += 1,
            }
        }
    }
    report.set_metric("skipped", skipped as f64);
    report.finish(sys.tolerance())
}

/// Distances `d(f^n[p,q], f^n q)` and `d(f^{-n}[p,q], f^{-n} p)` for `n = 0..=n_max`.
pub fn contraction_profile<S: MetricSystem>(
    sys: &S,
    p: &S::Point,
    q: &S::Point,
    r: &S::Point,
    n_max: usize,
) -> (Vec<f64>, Vec<f64>) {
    let mut fwd = Vec::with_capacity(n_max + 1);
    let mut bwd = Vec::with_capacity(n_max + 1);
    let (mut rf, mut qf) = (r.clone(), q.clone());
    let (mut rb, mut pb) = (r.clone(), p.clone());
    for n in 0..=n_max {
        if n > 0 {
            rf = sys.fwd(&rf);
            qf = sys.fwd(&qf);
            rb = sys.inv(&rb);
            pb = sys.inv(&pb);
        }
        fwd.push(sys.dist(&rf, &qf));
        bwd.push(sys.dist(&rb, &pb));
    }
    (fwd, bwd)
}

/// The `μ` grid used when fitting `(c, μ)`.
pub fn mu_grid() -> Vec<f64> {
    let (a, b) = (0.01f64.ln(), 0.99f64.ln());
    (1..=64).map(|k| (a + (b - a) * k as f64 / 65.0).exp()).collect()
}

/// Hyperbolic contraction on samples.
///
/// With declared constants each sample must satisfy both inequalities.
/// Without them the smallest `c` is fitted for every `μ` on the grid, the pair
/// minimizing `c μ^{n_max}` is reported, and the check passes when that
/// product is at most 1/2.
pub fn check_hyperbolic<S: Sampling, B: Bracket<S>>(
    b: &B,
    sys: &S,
    sampler: &Sampler,
    n_max: usize,
) -> CheckReport {
    assert!(n_max >= 2, "n_max must be at least 2");
    let mut report = CheckReport::new(format!("hyperbolic[{}]", b.name()));
    let mut worst_ratio = vec![0.0f64; n_max + 1];
    let mut exits = 0usize;
    let mut profiles = Vec::new();
    for (p, q) in sampler.pairs(sys, b.radius()) {
        let d = sys.dist(&p, &q);
        if d == 0.0 {
            continue;
        }
        let Ok(r) = b.eval(sys, &p, &q) else {
            exits += 1;
            continue;
        };
        let (fw, bw) = contraction_profile(sys, &p, &q, &r, n_max);
        for n in 0..=n_max {
            worst_ratio[n] = worst_ratio[n].max(fw[n].max(bw[n]) / d);
        }
        profiles.push((p, q, d, fw, bw));
    }
    report.set_metric("domain_exits", exits as f64);

    let (mut best_c, mut best_mu, mut best_val) = (f64::INFINITY, f64::NAN, f64::INFINITY);
    for mu in mu_grid() {
        let c = (0..=n_max).map(|n| worst_ratio[n] / mu.powi(n as i32)).fold(1.0, f64::max);
        let val = c * mu.powi(n_max as i32);
        if val < best_val {
            (best_c, best_mu, best_val) = (c, mu, val);
        }
    }
    report.set_metric("fit_c", best_c);
    report.set_metric("fit_mu", best_mu);
    report.set_metric("fit_c_mu_nmax", best_val);

    match b.declared() {
        Some(h) => {
            report.set_metric("declared_c", h.c);
            report.set_metric("declared_mu", h.mu);
            for (p, q, d, fw, bw) in &profiles {
                for n in 0..=n_max {
                    let bound = h.c * h.mu.powi(n as i32) * d;
                    let obs = fw[n].max(bw[n]);
                    let slack = (bound - obs) / d;
                    report.observe(slack, || json!({"p": dbg(p), "q": dbg(q), "n": n, "observed": obs, "bound": bound}));
                }
            }
            if report.samples == 0 {
                report.worst_slack = 0.0;
            }
            report.finish(1e-9)
        }
        None => {
            report.samples = profiles.len();
            report.worst_slack = 0.5 - best_val;
            report.witness = json!({"fit_c": best_c, "fit_mu": best_mu});
            report.finish(0.0)
        }
    }
}

/// `f([p, q]) = [f(p), f(q)]` where both sides are defined.
pub fn check_f_invariance<S: Sampling, B: Bracket<S>>(b: &B, sys: &S, sampler: &Sampler) -> CheckReport {
    let mut report = CheckReport::new(format!("f-invariance[{}]", b.name()));
    for (p, q) in sampler.pairs(sys, b.radius()) {
        let (fp, fq) = (sys.fwd(&p), sys.fwd(&q));
        let (Ok(r), Ok(s)) = (b.eval(sys, &p, &q), b.eval(sys, &fp, &fq)) else {
            continue;
        };
        let lhs = sys.fwd(&r);
        let d = sys.dist(&lhs, &s);
        report.observe(-d, || json!({"p": dbg(&p), "q": dbg(&q), "deviation": d}));
    }
    report.finish(sys.tolerance())
}

/// Smallest `m ≤ m_max` with both distances below `eps` for every sample
/// and every `n` in `[m, m_max]`; reported as metric `m`.
pub fn check_uniform_contraction<S: Sampling, B: Bracket<S>>(
    b: &B,
    sys: &S,
    eps: f64,
    sampler: &Sampler,
    m_max: usize,
) -> CheckReport {
    assert!(eps > 0.0, "eps must be positive");
    let mut report = CheckReport::new(format!("uniform-contraction[{}]", b.name()));
    let mut worst = vec![0.0f64; m_max + 1];
    let mut worst_at: Vec<serde_json::Value> = vec![serde_json::Value::Null; m_max + 1];
    for (p, q) in sampler.pairs(sys, b.radius()) {
        let Ok(r) = b.eval(sys, &p, &q) else { continue };
        let (fw, bw) = contraction_profile(sys, &p, &q, &r, m_max);
        report.samples += 1;
        for n in 0..=m_max {
            let v = fw[n].max(bw[n]);
            if v > worst[n] {
                worst[n] = v;
                worst_at[n] = json!({"p": dbg(&p), "q": dbg(&q), "n": n, "distance": v});
            }
        }
    }
    let mut m = m_max + 1;
    for n in (0..=m_max).rev() {
        if worst[n] < eps {
            m = n;
        } else {
            break;
        }
    }
    if m <= m_max {
        let tail = worst[m..].iter().copied().fold(0.0, f64::max);
        report.worst_slack = eps - tail;
        report.set_metric("m", m as f64);
        report.passed = true;
    } else {
        report.worst_slack = eps - worst[m_max];
        report.witness = worst_at[m_max].clone();
        report.passed = false;
    }
    report
}

/// Whether the stable/unstable sets are the plain `ε`-sets or also require
/// the distances to tend to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketKind {
    Plain,
    Limit,
}

/// Relative size the last quarter of a limit profile must fall to.
pub const LIMIT_DECAY: f64 = 1e-3;

/// Finite-window membership `[p, q] ∈ W^s_ε(q) ∩ W^u_ε(p)`.
pub fn check_shadowing_bracket<S: Sampling, B: Bracket<S>>(
    b: &B,
    sys: &S,
    eps: f64,
    window: usize,
    sampler: &Sampler,
    kind: BracketKind,
) -> CheckReport {
    assert!(window >= 1, "window must be positive");
    let label = match kind {
        BracketKind::Plain => "shadowing-bracket",
        BracketKind::Limit => "limit-bracket",
    };
    let mut report = CheckReport::new(format!("{label}[{}]", b.name()));
    for (p, q) in sampler.pairs(sys, b.radius()) {
        let Ok(r) = b.eval(sys, &p, &q) else { continue };
        let (fw, bw) = contraction_profile(sys, &p, &q, &r, window);
        let top = fw.iter().chain(&bw).copied().fold(0.0, f64::max);
        let mut slack = eps - top;
        if kind == BracketKind::Limit {
            let from = window - window / 4;
            let tail = fw[from..].iter().chain(&bw[from..]).copied().fold(0.0, f64::max);
            slack = slack.min(LIMIT_DECAY * top - tail);
        }
        report.observe(slack, || json!({"p": dbg(&p), "q": dbg(&q), "max_distance": top}));
    }
    report.finish(sys.tolerance())
}
