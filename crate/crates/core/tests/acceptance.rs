//! Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::time::{Duration, Instant};

use shadowkit::report::CheckReport;
use shadowkit::suite::*;
use shadowkit::Schedule;

struct Outcome {
    name: &'static str,
    passed: bool,
    detail: String,
    elapsed: Duration,
}

fn summarize(reports: &[CheckReport]) -> (bool, String) {
    let passed = reports.iter().all(|r| r.passed);
    let detail = reports
        .iter()
        .map(|r| format!("{} {} slack={:.3e}", if r.passed { "ok" } else { "FAILED" }, r.name, r.worst_slack))
        .collect::<Vec<_>>()
        .join("; ");
    (passed, detail)
}

fn metric(r: &CheckReport, key: &str) -> f64 {
    r.metrics.get(key).copied().unwrap_or(f64::NAN)
}

fn run(name: &'static str, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let t = Instant::now();
    let (passed, detail) = f();
    Outcome { name, passed, detail, elapsed: t.elapsed() }
}

fn main() {
    let cat = cat_system();
    let ns = ns_system();
    let ns_method = ns_bowen(&ns);
    let cat_method = cat_bowen(&cat);
    let mut outcomes = Vec::new();

    let mut cat_runs = Vec::new();
    outcomes.push(run("oracle-equivalence", || {
        let t = Instant::now();
        cat_runs = cat_cases(&cat, Schedule::Constant { delta: 1e-5 }, 128, 0..1000);
        let r = oracle_agreement(&cat, &cat_runs, 1e-8);
        let secs = t.elapsed().as_secs_f64();
        let ok = r.passed && r.samples == 1000 && secs < 10.0;
        (ok, format!("runs={} max_distance={:.3e} seconds={secs:.2}", r.samples, metric(&r, "max_distance")))
    }));

    let ns_runs = ns_cases(&ns, Schedule::Constant { delta: 1e-3 }, 128, 0..1000);
    let mut stage_reports = Vec::new();
    outcomes.push(run("envelope-certificate", || {
        let (cat_env, cat_stage) = certified_runs(&cat, &cat_method, &cat_runs);
        let (ns_env, ns_stage) = certified_runs(&ns, &ns_method, &ns_runs);
        stage_reports = vec![cat_stage, ns_stage];
        let (ok, detail) = summarize(&[cat_env.clone(), ns_env.clone()]);
        let accepted = metric(&cat_env, "accepted") + metric(&ns_env, "accepted");
        (ok, format!("{detail}; accepted_runs={accepted}"))
    }));

    // recorded during the certified runs above
    outcomes.push(run("stage-assertions", || summarize(&stage_reports)));

    outcomes.push(run("self-tuning-curve", || {
        let quiet = Schedule::QuietWindow { delta: 1e-3, quiet: 32 };
        let constant = Schedule::Constant { delta: 1e-3 };
        let rc = quiet_window_ratio(
            &cat,
            &cat_method,
            &cat_cases(&cat, quiet, 128, 0..100),
            &cat_cases(&cat, constant, 128, 0..100),
            1e-2,
        );
        let rn = quiet_window_ratio(
            &ns,
            &ns_method,
            &ns_cases(&ns, quiet, 128, 0..100),
            &ns_cases(&ns, constant, 128, 0..100),
            1e-2,
        );
        let (ok, _) = summarize(&[rc.clone(), rn.clone()]);
        let detail = [&rc, &rn]
            .iter()
            .map(|r| {
                format!(
                    "{} measured={:.3e} predicted={:.3e}",
                    r.name,
                    metric(r, "measured_ratio"),
                    metric(r, "predicted_ratio")
                )
            })
            .collect::<Vec<_>>()
            .join("; ");
        (ok, detail)
    }));

    outcomes.push(run("shift-invariance-counterexample", || {
        let cx = shadowkit::verify::ns_counterexample(&ns, &ns_method, 64, 100.0);
        let tuning = self_tuning_suite(&ns, &ns_method, &tuning_cases(&ns, |s| ns_start(&ns, s), 1e-3, 64, 10));
        let (ok, detail) = summarize(&[cx.clone(), tuning]);
        (ok, format!("{detail}; gap={:.3e} certificate={:.3e}", metric(&cx, "gap"), metric(&cx, "certificate")))
    }));

    outcomes.push(run("shift-identities", || summarize(&shift_identities(11, 20))));

    outcomes.push(run("odometer-exact-hit", || match odometer_exact_hit(8, 3..=7, 200, 32) {
        Ok(r) => summarize(&[r]),
        Err(e) => (false, e.to_string()),
    }));

    outcomes.push(run("stability-semiconjugacy", || {
        let reports = stability_suite(&cat, 128, 1e-3, 40, 1e-6);
        let (ok, detail) = summarize(&reports);
        let defects = reports
            .iter()
            .map(|r| format!("{} sup_defect={:.3e}", r.name, metric(r, "sup_defect")))
            .collect::<Vec<_>>()
            .join("; ");
        (ok, format!("{detail}; {defects}"))
    }));

    outcomes.push(run("bracket-axiom-matrix", || summarize(&bracket_matrix(5, 200))));

    outcomes.push(run("discrepancy-laws", || {
        let mut reports = Vec::new();
        let cat_small = &cat_runs[..50];
        let ns_small = &ns_runs[..50];
        let ladder = [1e-2, 1e-3, 1e-4, 1e-5];
        let steps = [
            discrepancy_laws(&cat, cat_small, 20),
            discrepancy_laws(&ns, ns_small, 20),
            discrepancy_ladder(&cat, |s| shadowkit::generate::random_point(&cat, s), &ladder, 20, 64),
            discrepancy_ladder(&ns, |s| ns_start(&ns, s), &ladder, 20, 64),
        ];
        for s in steps {
            match s {
                Ok(r) => reports.push(r),
                Err(e) => return (false, e.to_string()),
            }
        }
        summarize(&reports)
    }));

    let mut failed = 0;
    for o in &outcomes {
        if !o.passed {
            failed += 1;
        }
        println!(
            "{} {} ({:.2}s) {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.elapsed.as_secs_f64(),
            o.detail
        );
    }
    println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
