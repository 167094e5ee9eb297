//! Standard system configurations and the check suites run by the
//! acceptance harness and the command line tool.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::bowen::{check_self_tuning, AdmissibilityMode, BowenConfig, Envelope, TUNING_GAIN, TUNING_LADDER};
use crate::bracket::{
    check_associativity, check_f_invariance, check_hyperbolic, check_identity_axiom, check_uniform_contraction,
    Bracket,
};
use crate::error::{Error, Result};
use crate::generate::{generate, random_point, Schedule};
use crate::metric::{discrepancy1, discrepancy2, SeqMetric};
use crate::orbit::{orbit_map, Extension, PseudoOrbit};
use crate::report::CheckReport;
use crate::sampling::Sampler;
use crate::system::{MetricSystem, Sampling};
use crate::systems::cat::{CatBracket, CatMap, PerturbedCat};
use crate::systems::north_south::{NorthSouth, NsBracket, NsPoint};
use crate::systems::odometer::Odometer;
use crate::systems::sequence::{
    coordinatewise_shift_sides, shift_canonical_shadow, shift_limit_assembly, shift_mutual_induction, Alphabet, Base,
    CircleBase, Seq, SequenceSystem, ShiftBracket,
};
use crate::verify::{
    check_shift_invariance, parallel_map, shadow_error_profile, stability_experiment, BowenMethod, CatOracle,
    Projection, ShadowingMethod, ShiftCanonical, StabilityOptions,
};

/// The cat map with enough precision for a few hundred iterates.
pub fn cat_system() -> CatMap {
    CatMap::new(CatMap::bits_for_horizon(300))
}

pub fn cat_bowen(cat: &CatMap) -> BowenMethod<CatBracket> {
    let cfg = BowenConfig::for_bracket(cat, &CatBracket).expect("cat bracket declares its constants");
    BowenMethod { bracket: CatBracket, cfg, symmetric: false }
}

pub fn ns_system() -> NorthSouth {
    NorthSouth::new(0.1).expect("valid plateau radius")
}

/// The symmetric method with domain-checked admissibility.
pub fn ns_bowen(ns: &NorthSouth) -> BowenMethod<NsBracket> {
    let b = NsBracket::new(ns);
    let cfg = BowenConfig::for_bracket(ns, &b)
        .expect("ns bracket declares its constants")
        .with_mode(AdmissibilityMode::DomainChecked);
    BowenMethod { bracket: b, cfg, symmetric: true }
}

/// A seeded start in the transition region between the plateaus.
pub fn ns_start(ns: &NorthSouth, seed: u64) -> NsPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7a5);
    let r = ns.r();
    NsPoint::from_theta(r + (0.5 - 2.0 * r) * rng.gen::<f64>())
}

/// One generated pseudo-orbit on `[-half, half]` per seed.
pub fn cases<S, F>(sys: &S, start: F, schedule: Schedule, half: i64, seeds: std::ops::Range<u64>) -> Vec<PseudoOrbit<S::Point>>
where
    S: Sampling + Sync,
    S::Point: Send + Sync,
    F: Fn(u64) -> S::Point + Sync,
{
    let seeds: Vec<u64> = seeds.collect();
    parallel_map(&seeds, |&s| generate(sys, &start(s), schedule, -half, half, s).expect("valid generator input"))
}

pub fn cat_cases(cat: &CatMap, schedule: Schedule, half: i64, seeds: std::ops::Range<u64>) -> Vec<PseudoOrbit<<CatMap as MetricSystem>::Point>> {
    cases(cat, |s| random_point(cat, s), schedule, half, seeds)
}

pub fn ns_cases(ns: &NorthSouth, schedule: Schedule, half: i64, seeds: std::ops::Range<u64>) -> Vec<PseudoOrbit<NsPoint>> {
    cases(ns, |s| ns_start(ns, s), schedule, half, seeds)
}

/// `d(Sh_bowen x, Sh_oracle x) ≤ tol` on every case.
pub fn oracle_agreement(cat: &CatMap, cases: &[PseudoOrbit<<CatMap as MetricSystem>::Point>], tol: f64) -> CheckReport {
    let method = cat_bowen(cat);
    let out = parallel_map(cases, |x| -> Result<f64> {
        let b = method.apply(cat, x)?;
        let o = cat.oracle_shadow(x)?;
        Ok(cat.dist(&b.point, &o))
    });
    let mut report = CheckReport::new("oracle-agreement[cat]");
    let mut worst: f64 = 0.0;
    for (k, o) in out.into_iter().enumerate() {
        match o {
            Ok(d) => {
                worst = worst.max(d);
                report.observe(tol - d, || json!({"case": k, "distance": d}));
            }
            Err(e) => report.observe(f64::NEG_INFINITY, || json!({"case": k, "error": e.to_string()})),
        }
    }
    report.set_metric("max_distance", worst);
    report.finish(0.0)
}

/// Relative and absolute slack allowed on recorded stage bounds.
const STAGE_SLACK: (f64, f64) = (1e-9, 1e-15);

/// Runs `method` on each case and returns two reports: per-index error
/// against the envelope plus tail, and every recorded stage against its
/// bounds. Runs rejected for reasons other than a stage violation are
/// counted but not certified.
pub fn certified_runs<S, B>(
    sys: &S,
    method: &BowenMethod<B>,
    cases: &[PseudoOrbit<S::Point>],
) -> (CheckReport, CheckReport)
where
    S: MetricSystem + Sync,
    S::Point: Send + Sync,
    B: Bracket<S> + Sync,
{
    enum Outcome {
        Accepted { env: (f64, i64), stage: (f64, usize, usize) },
        StageViolation(String),
        Rejected,
    }
    let (rel, abs) = STAGE_SLACK;
    let out = parallel_map(cases, |x| match method.apply(sys, x) {
        Ok(r) => {
            let env = Envelope::new(sys, &method.cfg, x);
            let errors = r.per_index_error.clone().unwrap_or_else(|| shadow_error_profile(sys, &r.point, x));
            let mut worst_env = (f64::INFINITY, 0);
            for (k, e) in errors.values.iter().enumerate() {
                let i = errors.lo + k as i64;
                let slack = env.certificate(i, r.tail_bound) - e;
                if slack < worst_env.0 {
                    worst_env = (slack, i);
                }
            }
            let mut worst_stage = (f64::INFINITY, 0, 0);
            for (k, s) in r.stages.iter().enumerate() {
                let pairs = [(s.gap, s.gap_bound), (s.gap, s.running_sum), (s.step, s.step_bound)];
                for (which, (obs, bound)) in pairs.into_iter().enumerate() {
                    let slack = bound * (1.0 + rel) + abs - obs;
                    if slack < worst_stage.0 {
                        worst_stage = (slack, k, which);
                    }
                }
            }
            Outcome::Accepted { env: worst_env, stage: worst_stage }
        }
        Err(e @ Error::LemmaViolation { .. }) => Outcome::StageViolation(e.to_string()),
        Err(_) => Outcome::Rejected,
    });
    let mut env_report = CheckReport::new(format!("envelope[{}]", method.id()));
    let mut stage_report = CheckReport::new(format!("stage-bounds[{}]", method.id()));
    let (mut accepted, mut rejected) = (0usize, 0usize);
    for (case, o) in out.into_iter().enumerate() {
        match o {
            Outcome::Accepted { env, stage } => {
                accepted += 1;
                env_report.observe(env.0, || json!({"case": case, "index": env.1, "slack": env.0}));
                let names = ["gap", "running-sum", "step"];
                stage_report.observe(stage.0, || {
                    json!({"case": case, "stage_record": stage.1, "bound": names[stage.2], "slack": stage.0})
                });
            }
            Outcome::StageViolation(msg) => {
                stage_report.observe(f64::NEG_INFINITY, || json!({"case": case, "error": msg}));
            }
            Outcome::Rejected => rejected += 1,
        }
    }
    for r in [&mut env_report, &mut stage_report] {
        r.set_metric("accepted", accepted as f64);
        r.set_metric("rejected", rejected as f64);
    }
    let env_report = if accepted == 0 { env_report.metric("no_accepted_runs", 1.0) } else { env_report };
    let passed = accepted > 0;
    let mut env_report = env_report.finish(0.0);
    env_report.passed &= passed;
    let mut stage_report = stage_report.finish(0.0);
    stage_report.passed &= passed;
    (env_report, stage_report)
}

/// Shadow error at index 0 of quiet-window orbits against constant-jump
/// controls with the same seeds; passes when the ratio of mean errors is at
/// most `threshold`. The envelope's ratio is reported as `predicted_ratio`.
pub fn quiet_window_ratio<S, B>(
    sys: &S,
    method: &BowenMethod<B>,
    quiet: &[PseudoOrbit<S::Point>],
    control: &[PseudoOrbit<S::Point>],
    threshold: f64,
) -> CheckReport
where
    S: MetricSystem + Sync,
    S::Point: Send + Sync,
    B: Bracket<S> + Sync,
{
    let pairs: Vec<(&PseudoOrbit<S::Point>, &PseudoOrbit<S::Point>)> = quiet.iter().zip(control).collect();
    let out = parallel_map(&pairs, |(q, c)| -> Result<[f64; 4]> {
        let rq = method.apply(sys, q)?;
        let rc = method.apply(sys, c)?;
        let at0 = |r: &crate::bowen::ShadowResult<S::Point>, x: &PseudoOrbit<S::Point>| {
            r.per_index_error.as_ref().and_then(|p| p.get(0)).unwrap_or_else(|| shadow_error_profile(sys, &r.point, x).get(0).unwrap())
        };
        Ok([
            at0(&rq, q),
            at0(&rc, c),
            Envelope::new(sys, &method.cfg, q).at(0).upper(),
            Envelope::new(sys, &method.cfg, c).at(0).upper(),
        ])
    });
    let mut report = CheckReport::new(format!("quiet-window[{}]", method.id()));
    let mut sums = [0.0f64; 4];
    let mut worst_seed: f64 = 0.0;
    let mut ok = 0usize;
    for (k, o) in out.into_iter().enumerate() {
        match o {
            Ok(v) => {
                ok += 1;
                for j in 0..4 {
                    sums[j] += v[j];
                }
                if v[1] > 0.0 {
                    worst_seed = worst_seed.max(v[0] / v[1]);
                }
            }
            Err(e) => report.observe(f64::NEG_INFINITY, || json!({"case": k, "error": e.to_string()})),
        }
    }
    let ratio = if sums[1] > 0.0 { sums[0] / sums[1] } else { f64::INFINITY };
    let predicted = if sums[3] > 0.0 { sums[2] / sums[3] } else { f64::INFINITY };
    report.observe(threshold - ratio, || json!({"ratio": ratio, "threshold": threshold}));
    report.samples = ok;
    report.set_metric("measured_ratio", ratio);
    report.set_metric("predicted_ratio", predicted);
    report.set_metric("worst_case_ratio", worst_seed);
    report.set_metric("mean_quiet_error", sums[0] / ok.max(1) as f64);
    report.set_metric("mean_control_error", sums[1] / ok.max(1) as f64);
    report.finish(0.0)
}

/// The self-tuning ladder on a mix of schedules.
pub fn self_tuning_suite<S, M>(sys: &S, method: &M, cases: &[PseudoOrbit<S::Point>]) -> CheckReport
where
    S: MetricSystem,
    M: ShadowingMethod<S>,
{
    check_self_tuning(method, sys, cases, SeqMetric::default(), &TUNING_LADDER, TUNING_GAIN)
}

/// Mixed-schedule cases used for self-tuning ladders.
pub fn tuning_cases<S, F>(sys: &S, start: F, delta: f64, half: i64, per_schedule: u64) -> Vec<PseudoOrbit<S::Point>>
where
    S: Sampling + Sync,
    S::Point: Send + Sync,
    F: Fn(u64) -> S::Point + Sync,
{
    let schedules = [
        Schedule::Constant { delta },
        Schedule::QuietWindow { delta, quiet: half / 4 },
        Schedule::GeometricDecay { delta },
        Schedule::OneSpike { delta, index: 3 },
    ];
    let mut out = Vec::new();
    for (k, s) in schedules.into_iter().enumerate() {
        let base = 1000 * k as u64;
        out.extend(cases(sys, &start, s, half, base..base + per_schedule));
    }
    out
}

fn seq_cases<B: Base>(sys: &SequenceSystem<B>, seed: u64, count: usize, half: i64, width: i64) -> Vec<PseudoOrbit<Seq<B::Sym>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let entries = (-half..=half).map(|_| sys.random_seq(&mut rng, width)).collect();
            PseudoOrbit::new(-half, entries, Extension::OrbitCapped).expect("nonempty window")
        })
        .collect()
}

/// Identities of the shift system checked with zero tolerance on a
/// 3-symbol alphabet, and with roundoff tolerance on the circle base.
pub fn shift_identities(seed: u64, count: usize) -> Vec<CheckReport> {
    let sym = SequenceSystem::new(Alphabet { k: 3 }, 8);
    let circ = SequenceSystem::new(CircleBase, 8);
    let mut out = Vec::new();

    let mut inv = CheckReport::new("shift-invariance[shift-3]");
    for x in seq_cases(&sym, seed, count, 16, 8) {
        let r = check_shift_invariance(&ShiftCanonical, &sym, &x, -20..=20, 0.0);
        inv.observe(r.worst_slack, || r.witness.clone());
    }
    out.push(inv.finish(0.0));

    let mut inv_c = CheckReport::new("shift-invariance[shift-circle]");
    for x in seq_cases(&circ, seed, count, 16, 8) {
        let r = check_shift_invariance(&ShiftCanonical, &circ, &x, -20..=20, 0.0);
        inv_c.observe(r.worst_slack, || r.witness.clone());
    }
    out.push(inv_c.finish(0.0));

    let mut ind = CheckReport::new("mutual-induction[shift-3]");
    for (k, x) in seq_cases(&sym, seed ^ 1, count, 40, 6).iter().enumerate() {
        for n in [0usize, 1, 5, 17, 32] {
            match shift_mutual_induction(&sym, x, n) {
                Ok(_) => ind.observe(0.0, || json!(null)),
                Err(e) => ind.observe(-1.0, || json!({"case": k, "n": n, "error": e.to_string()})),
            }
        }
    }
    out.push(ind.finish(0.0));

    let mut asm = CheckReport::new("limit-assembly[shift-3]");
    for (k, x) in seq_cases(&sym, seed ^ 2, count, 40, 6).iter().enumerate() {
        let n = 32usize;
        let canon = shift_canonical_shadow(&sym, x);
        match shift_limit_assembly(&sym, x, n) {
            Ok(z) => {
                let lo = -(n as i64);
                let hi = n as i64;
                let mismatches = (lo..=hi).filter(|&i| sym.get(&z, i) != sym.get(&canon, i)).count();
                asm.observe(-(mismatches as f64), || json!({"case": k, "mismatches": mismatches}));
            }
            Err(e) => asm.observe(-1.0, || json!({"case": k, "error": e.to_string()})),
        }
    }
    out.push(asm.finish(0.0));

    out.push(shift_bracket_laws(&sym, &Sampler::new(seed, count), 0.0));
    out.push(shift_bracket_laws(&circ, &Sampler::new(seed, count), 1e-12));
    out.push(coordinate_shift_witness());
    out.push(coordinate_shift_dichotomy(seed));
    out
}

/// The splice bracket's identity, absorption and metric-splitting laws.
pub fn shift_bracket_laws<B: Base>(sys: &SequenceSystem<B>, sampler: &Sampler, tol: f64) -> CheckReport {
    let mut report = CheckReport::new(format!("splice-laws[{}]", sys.id()));
    for (x, y, z) in sampler.triples(sys, f64::INFINITY) {
        let xy = sys.splice(&x, &y);
        let id = sys.dist(&sys.splice(&x, &x), &x);
        let a1 = sys.dist(&sys.splice(&x, &sys.splice(&y, &z)), &sys.splice(&x, &z));
        let a2 = sys.dist(&sys.splice(&sys.splice(&x, &y), &z), &sys.splice(&x, &z));
        let sum = (sys.dist(&x, &xy) + sys.dist(&xy, &y) - sys.dist(&x, &y)).abs();
        let max = (sys.dist_max(&x, &xy).max(sys.dist_max(&xy, &y)) - sys.dist_max(&x, &y)).abs();
        let worst = id.max(a1).max(a2).max(sum).max(max);
        report.observe(-worst, || json!({"identity": id, "absorb_right": a1, "absorb_left": a2, "sum_split": sum, "max_split": max}));
    }
    report.finish(tol)
}

/// On two symbols, `α` with `(α_0)_1 ≠ (α_1)_0` makes `Sh(σ∘α) ≠ σ(Sh α)`.
pub fn coordinate_shift_witness() -> CheckReport {
    let sys = SequenceSystem::new(Alphabet { k: 2 }, 4);
    let mut entries = vec![Seq::constant(); 5];
    entries[2] = sys.seq(1, vec![1]);
    let alpha = PseudoOrbit::new(-2, entries, Extension::OrbitCapped).expect("nonempty");
    let (lhs, rhs) = coordinatewise_shift_sides(&sys, &alpha);
    let d = sys.dist(&lhs, &rhs);
    let mut report = CheckReport::new("coordinate-shift-witness[shift-2]");
    report.observe(d, || {
        json!({"alpha_0": format!("{:?}", alpha.at(&sys, 0)), "lhs": format!("{lhs:?}"), "rhs": format!("{rhs:?}"), "distance": d})
    });
    report.passed = d > 0.0;
    report
}

/// On a finite alphabet every δ-orbit with `δ < 1` satisfies
/// `Sh(σ∘α) = σ(Sh α)`; on the circle a δ-orbit moving one coordinate by
/// less than δ does not.
pub fn coordinate_shift_dichotomy(seed: u64) -> CheckReport {
    let mut report = CheckReport::new("coordinate-shift-dichotomy");
    let sym = SequenceSystem::new(Alphabet { k: 3 }, 6);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let delta = 0.5;
    for case in 0..50 {
        // a δ-orbit: each σ(α_{i-1}) moved only at coordinates far from 0
        let mut cur = sym.random_seq(&mut rng, 6);
        let mut entries = vec![cur.clone()];
        for _ in 0..16 {
            let image = sym.fwd(&cur);
            cur = sym.nearby(&image, delta, &[rng.gen::<f64>()]);
            entries.push(cur.clone());
        }
        let alpha = PseudoOrbit::new(-8, entries, Extension::OrbitCapped).expect("nonempty");
        let (lhs, rhs) = coordinatewise_shift_sides(&sym, &alpha);
        let d = sym.dist(&lhs, &rhs);
        report.observe(-d, || json!({"base": "shift-3", "case": case, "distance": d}));
    }
    let circ = SequenceSystem::new(CircleBase, 4);
    // constant at the fill point except (α_1)_0
    let mut entries = vec![Seq::constant(); 5];
    entries[3] = circ.seq(0, vec![1e-3]);
    let alpha = PseudoOrbit::new(-2, entries, Extension::OrbitCapped).expect("nonempty");
    let jump = crate::orbit::jumps(&circ, &alpha).sup();
    let (lhs, rhs) = coordinatewise_shift_sides(&circ, &alpha);
    let d = circ.dist(&lhs, &rhs);
    report.observe(d, || json!({"base": "shift-circle", "jump": jump, "distance": d}));
    report.set_metric("circle_gap", d);
    report.set_metric("circle_jump", jump);
    report.finish(0.0)
}

/// Projection shadows of `2^{-j}`-pseudo-orbits of the odometer, checked
/// at every index of every window.
pub fn odometer_exact_hit(digits: u32, js: std::ops::RangeInclusive<i32>, seeds: u64, half: i64) -> Result<CheckReport> {
    let od = Odometer::new(digits)?;
    let method = Projection { gamma: 1.0 };
    let mut report = CheckReport::new(format!("exact-hit[{}]", od.id()));
    for j in js {
        let delta = 0.5f64.powi(j);
        for seed in 0..seeds {
            let start = random_point(&od, seed);
            let x = generate(&od, &start, Schedule::Constant { delta }, -half, half, seed)?;
            let r = method.apply(&od, &x)?;
            for (k, e) in r.per_index_error.as_ref().expect("projection reports errors").values.iter().enumerate() {
                let i = x.lo() + k as i64;
                report.observe(delta - e, || json!({"j": j, "seed": seed, "index": i, "error": e}));
            }
        }
    }
    Ok(report.finish(0.0))
}

/// The stability experiment on a `grid × grid` lattice of the torus with a
/// perturbation of size `eps`: the oracle's defect against `oracle_tol`
/// and Bowen's against its summed envelopes.
pub fn stability_suite(cat: &CatMap, grid: usize, eps: f64, window: i64, oracle_tol: f64) -> Vec<CheckReport> {
    let g = PerturbedCat::new(cat.clone(), eps);
    let pts: Vec<_> = (0..grid * grid)
        .map(|k| cat.point(((k / grid) as f64 + 0.5) / grid as f64, ((k % grid) as f64 + 0.5) / grid as f64))
        .collect();
    let bowen = cat_bowen(cat);
    let oracle = stability_experiment(cat, &g, &CatOracle, &pts, StabilityOptions { window, tol: oracle_tol, certify: None });
    let certified =
        stability_experiment(cat, &g, &bowen, &pts, StabilityOptions { window, tol: 0.0, certify: Some(bowen.cfg) });
    vec![oracle.metric("eps", eps), certified.metric("eps", eps)]
}

/// Inverts an expected failure: passes when `inner` fails, keeping its witness.
pub fn expect_failure(inner: CheckReport) -> CheckReport {
    let mut r = inner.clone();
    r.name = format!("fails:{}", inner.name);
    r.passed = !inner.passed;
    r
}

/// Bracket axioms on the cat map, the north-south map and the shift.
pub fn bracket_matrix(seed: u64, samples: usize) -> Vec<CheckReport> {
    let sampler = Sampler::new(seed, samples);
    let cat = cat_system();
    let ns = ns_system();
    let nb = NsBracket::new(&ns);
    let sym = SequenceSystem::new(Alphabet { k: 3 }, 8);
    vec![
        check_identity_axiom(&CatBracket, &cat, &sampler),
        check_associativity(&CatBracket, &cat, &sampler),
        check_f_invariance(&CatBracket, &cat, &sampler),
        check_hyperbolic(&CatBracket, &cat, &sampler, 30),
        check_uniform_contraction(&CatBracket, &cat, 1e-3, &sampler, 40),
        check_identity_axiom(&nb, &ns, &sampler),
        check_hyperbolic(&nb, &ns, &sampler, 80),
        expect_failure(check_f_invariance(&nb, &ns, &sampler)),
        check_identity_axiom(&ShiftBracket, &sym, &sampler),
        check_associativity(&ShiftBracket, &sym, &sampler),
        check_hyperbolic(&ShiftBracket, &sym, &sampler, 20),
        shift_bracket_laws(&sym, &sampler, 0.0),
    ]
}

/// Laws of `D¹` and `D²` on the given cases and on true orbits: vanishing
/// on orbits, shift invariance, and `D¹ ≤ D²/μ` (twice `D²` at `μ = 1/2`).
pub fn discrepancy_laws<S: MetricSystem + Sampling>(sys: &S, cases: &[PseudoOrbit<S::Point>], orbits: usize) -> Result<CheckReport> {
    let metric = SeqMetric::default();
    let mut report = CheckReport::new(format!("discrepancy-laws[{}]", sys.id()));
    let tol = sys.tolerance() * 4.0;
    for (k, x) in cases.iter().enumerate() {
        let d1 = discrepancy1(sys, x);
        let d2 = discrepancy2(sys, x, metric)?;
        report.observe(d1, || json!({"case": k, "law": "nonnegative", "d1": d1}));
        report.observe(d2.value, || json!({"case": k, "law": "nonnegative", "d2": d2.value}));
        report.observe(d2.upper() - metric.mu * d1, || json!({"case": k, "law": "d1<=d2/mu", "d1": d1, "d2": d2}));
        for shift in [-3i64, 1, 7] {
            let y = x.shift(shift);
            let e1 = (discrepancy1(sys, &y) - d1).abs();
            let e2 = (discrepancy2(sys, &y, metric)?.value - d2.value).abs();
            report.observe(-e1.max(e2), || json!({"case": k, "law": "shift", "shift": shift, "d1_change": e1, "d2_change": e2}));
        }
    }
    for seed in 0..orbits as u64 {
        let x = orbit_map(sys, &random_point(sys, seed), -20, 20)?;
        let d1 = discrepancy1(sys, &x);
        let d2 = discrepancy2(sys, &x, metric)?;
        report.observe(tol - d1, || json!({"orbit": seed, "law": "orbit-d1", "d1": d1}));
        report.observe(tol * 4.0 + d2.tail_bound - d2.value, || json!({"orbit": seed, "law": "orbit-d2", "d2": d2}));
    }
    Ok(report.finish(0.0))
}

/// Mean `D²` on each rung of a decreasing `δ` ladder; passes when strictly decreasing.
pub fn discrepancy_ladder<S, F>(sys: &S, start: F, ladder: &[f64], per_rung: u64, half: i64) -> Result<CheckReport>
where
    S: Sampling + Sync,
    S::Point: Send + Sync,
    F: Fn(u64) -> S::Point + Sync,
{
    let metric = SeqMetric::default();
    let mut report = CheckReport::new(format!("discrepancy-ladder[{}]", sys.id()));
    let mut prev: Option<(f64, f64)> = None;
    for &delta in ladder {
        let xs = cases(sys, &start, Schedule::Constant { delta }, half, 0..per_rung);
        let mut sum = 0.0;
        for x in &xs {
            sum += discrepancy2(sys, x, metric)?.value;
        }
        let mean = sum / per_rung as f64;
        report.set_metric(&format!("mean_d2_delta{delta:e}"), mean);
        if let Some((pd, pm)) = prev {
            report.observe(pm - mean, || json!({"from_delta": pd, "to_delta": delta, "from": pm, "to": mean}));
        }
        prev = Some((delta, mean));
    }
    let mut report = report.finish(0.0);
    report.passed &= report.worst_slack > 0.0;
    Ok(report)
}
