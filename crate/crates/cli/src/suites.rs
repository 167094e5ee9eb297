use anyhow::bail;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use shadowkit::suite::{cases, self_tuning_suite};
use shadowkit::verify::{check_dyn_invariance, check_shadowing_ladder, check_shift_invariance, limit_shadow_decay};
use shadowkit::{connect, discrepancy1, CheckReport, PseudoOrbit, Sampler, Schedule};

use crate::config::{MethodId, RunConfig, Suite};
use crate::systems::{CliSystem, Method};

/// One line of a verification report file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub suite: Suite,
    pub mandatory: bool,
    pub report: CheckReport,
}

/// Folds several reports into one that keeps the worst slack and witness.
fn merge(name: String, reports: Vec<CheckReport>) -> CheckReport {
    let mut out = CheckReport::new(name);
    let (mut passed, mut samples) = (true, 0);
    for r in reports {
        passed &= r.passed;
        samples += r.samples;
        out.observe(r.worst_slack, || r.witness.clone());
    }
    out.passed = passed;
    out.samples = samples;
    out
}

fn generated<S: CliSystem>(sys: &S, cfg: &RunConfig, schedule: Schedule, salt: u64) -> Vec<PseudoOrbit<S::Point>> {
    let base = cfg.seed.wrapping_add(salt);
    cases(sys, |s| sys.start(s), schedule, cfg.window, base..base + cfg.runs)
}

/// Constant, quiet-window, geometric and single-spike schedules at the
/// configured jump size, a quarter of the runs each.
fn tuning<S: CliSystem>(sys: &S, cfg: &RunConfig) -> Vec<PseudoOrbit<S::Point>> {
    let delta = cfg.schedule.delta();
    let per = (cfg.runs / 4).max(1);
    let schedules = [
        Schedule::Constant { delta },
        Schedule::QuietWindow { delta, quiet: cfg.window / 4 },
        Schedule::GeometricDecay { delta },
        Schedule::OneSpike { delta, index: 3 },
    ];
    let mut out = Vec::new();
    for (k, s) in schedules.into_iter().enumerate() {
        let base = cfg.seed.wrapping_add(1000 * (k as u64 + 1));
        out.extend(cases(sys, |s| sys.start(s), s, cfg.window, base..base + per));
    }
    out
}

/// Connecting orbits `con(p, q)` with `d(p, q) ≤ δ/2`.
fn connecting<S: CliSystem>(sys: &S, cfg: &RunConfig) -> anyhow::Result<Vec<PseudoOrbit<S::Point>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xc0);
    (0..cfg.runs)
        .map(|k| {
            let p = sys.start(cfg.seed.wrapping_add(k));
            let u: Vec<f64> = (0..sys.sample_dim()).map(|_| rng.gen()).collect();
            let q = sys.nearby(&p, cfg.schedule.delta() / 2.0, &u);
            Ok(connect(sys, &p, &q, -cfg.window, cfg.window)?)
        })
        .collect()
}

fn mandatory<S: CliSystem>(suite: Suite, sys: &S, method: MethodId) -> bool {
    match suite {
        Suite::ShiftInv | Suite::DynInv => sys.invariant(method),
        Suite::BracketAxioms | Suite::Stability => true,
        _ => method != MethodId::Projection || sys.invariant(method),
    }
}

fn run_one<S: CliSystem>(
    suite: Suite,
    sys: &S,
    cfg: &RunConfig,
    method: &Method<S>,
    given: &Option<Vec<PseudoOrbit<S::Point>>>,
) -> anyhow::Result<Option<Vec<CheckReport>>> {
    let m = &&*method.inner;
    let cases = || given.clone().unwrap_or_else(|| generated(sys, cfg, cfg.schedule, 0));
    let tol = cfg.tolerances.invariance;
    Ok(match suite {
        Suite::All => unreachable!("expanded by the caller"),
        Suite::ShadowError => {
            let cs = cases();
            let gamma = cs.iter().map(|x| discrepancy1(sys, x)).fold(0.0, f64::max);
            Some(vec![check_shadowing_ladder(m, sys, &[(gamma, cs)], 2, cfg.tolerances.gain)])
        }
        Suite::Envelope => method.certify(sys, &cases()),
        Suite::SelfTuning => Some(vec![self_tuning_suite(sys, m, &tuning(sys, cfg))]),
        Suite::ShiftInv => {
            let reports = cases().iter().take(5).map(|x| check_shift_invariance(m, sys, x, -5..=5, tol)).collect();
            Some(vec![merge(format!("shift-invariance[{}]", m.id()), reports)])
        }
        Suite::DynInv => Some(vec![check_dyn_invariance(m, sys, &cases(), tol)]),
        Suite::BracketAxioms => sys.bracket_axioms(&Sampler::new(cfg.seed, 200)),
        Suite::Stability => sys.stability(cfg),
        Suite::LimitDecay => {
            let reports = connecting(sys, cfg)?
                .iter()
                .map(|x| limit_shadow_decay(m, sys, x, method.bowen.as_ref()))
                .collect();
            Some(vec![merge(format!("limit-decay[{}]", m.id()), reports)])
        }
        Suite::Counterexamples => sys.counterexamples(cfg, method)?,
    })
}

/// Runs the configured suite, or every applicable one for `all`.
pub fn run_suites<S: CliSystem>(
    sys: &S,
    cfg: &RunConfig,
    given: Option<Vec<PseudoOrbit<S::Point>>>,
) -> anyhow::Result<Vec<Row>> {
    let method_id = cfg.method_id()?;
    let method = sys.method(method_id, cfg.assert_lemmas)?;
    let selected: Vec<Suite> = if cfg.suite == Suite::All { Suite::EACH.to_vec() } else { vec![cfg.suite] };
    let mut rows = Vec::new();
    for suite in selected {
        match run_one(suite, sys, cfg, &method, &given)? {
            Some(reports) => {
                let mandatory = mandatory(suite, sys, method_id);
                rows.extend(reports.into_iter().map(|report| Row { suite, mandatory, report }));
            }
            None if cfg.suite == Suite::All => {}
            None => bail!("suite {suite} does not apply to system {} with method {method_id}", cfg.system),
        }
    }
    Ok(rows)
}

/// Largest error per rung of the self-tuning ladder, as `(γ′, error)`.
pub fn tuning_curve(rows: &[Row]) -> Vec<(String, f64)> {
    rows.iter()
        .filter(|r| r.suite == Suite::SelfTuning)
        .flat_map(|r| {
            r.report
                .metrics
                .iter()
                .filter_map(|(k, v)| k.strip_prefix("curve_gamma").map(|g| (g.to_string(), *v)))
        })
        .collect()
}

pub fn all_mandatory_passed(rows: &[Row]) -> bool {
    rows.iter().all(|r| r.report.passed || !r.mandatory)
}

pub fn summary_table(rows: &[Row]) -> String {
    let width = rows.iter().map(|r| r.report.name.len()).max().unwrap_or(5).max(5);
    let mut s = format!("{:<16} {:<width$} {:<6} {:>8} {:>12}\n", "suite", "check", "result", "samples", "worst_slack");
    for r in rows {
        let result = match (r.report.passed, r.mandatory) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "info",
        };
        s.push_str(&format!(
            "{:<16} {:<width$} {:<6} {:>8} {:>12.3e}\n",
            r.suite.to_string(),
            r.report.name,
            result,
            r.report.samples,
            r.report.worst_slack
        ));
    }
    let failed = rows.iter().filter(|r| r.mandatory && !r.report.passed).count();
    s.push_str(&format!("{} checks, {} mandatory failures\n", rows.len(), failed));
    s
}

/// JSON lines, one [`Row`] each.
pub fn to_jsonl(rows: &[Row]) -> anyhow::Result<String> {
    let mut s = String::new();
    for r in rows {
        s.push_str(&serde_json::to_string(r)?);
        s.push('\n');
    }
    Ok(s)
}

pub fn from_jsonl(text: &str) -> anyhow::Result<Vec<Row>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(k, l)| serde_json::from_str(l).map_err(|e| anyhow::anyhow!("line {}: {e}", k + 1)))
        .collect()
}
