use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn shadowkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shadowkit"))
        .args(args)
        .env_remove("SHADOWKIT_SEED")
        .output()
        .expect("spawn shadowkit")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn gen(dir: &Path, name: &str, extra: &[&str]) -> std::path::PathBuf {
    let path = dir.join(name);
    let mut args = vec!["gen", "--out", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = shadowkit(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn gen_is_deterministic_and_respects_delta() {
    let dir = tempfile::tempdir().unwrap();
    let a = gen(dir.path(), "a.json", &["--seed", "7", "--window", "16", "--delta", "1e-3"]);
    let b = gen(dir.path(), "b.json", &["--seed", "7", "--window", "16", "--delta", "1e-3"]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let v = json(&a);
    assert_eq!(v["system_id"], "cat");
    assert_eq!((v["lo"].as_i64(), v["hi"].as_i64()), (Some(-16), Some(16)));
    assert!(v["d1"].as_f64().unwrap() <= 1e-3);
}

#[test]
fn seed_comes_from_the_environment() {
    let plain = shadowkit(&["gen", "--window", "4"]);
    let seeded = Command::new(env!("CARGO_BIN_EXE_shadowkit"))
        .args(["gen", "--window", "4"])
        .env("SHADOWKIT_SEED", "11")
        .output()
        .unwrap();
    let flag = shadowkit(&["gen", "--window", "4", "--seed", "11"]);
    assert_ne!(plain.stdout, seeded.stdout);
    assert_eq!(seeded.stdout, flag.stdout);
}

#[test]
fn quiet_window_has_no_jumps_inside() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen(
        dir.path(),
        "q.json",
        &["--window", "20", "--schedule", "quiet-window", "--quiet", "5", "--delta", "1e-3"],
    );
    let v = json(&p);
    let e = v["entries"].as_array().unwrap();
    let lo = v["lo"].as_i64().unwrap();
    let at = |n: i64| {
        let c = e[(n - lo) as usize].as_array().unwrap();
        (c[0].as_f64().unwrap(), c[1].as_f64().unwrap())
    };
    for n in -5..5 {
        let (x, y) = at(n);
        let (u, w) = at(n + 1);
        let (fx, fy) = ((2.0 * x + y).rem_euclid(1.0), (x + y).rem_euclid(1.0));
        let d = |a: f64, b: f64| {
            let t = (a - b).rem_euclid(1.0);
            t.min(1.0 - t)
        };
        assert!(d(fx, u).max(d(fy, w)) < 1e-12, "jump at {n}");
    }
}

#[test]
fn oracle_and_bowen_agree() {
    let dir = tempfile::tempdir().unwrap();
    let orbit = gen(dir.path(), "o.json", &["--window", "40", "--seed", "3"]);
    let o = orbit.to_str().unwrap();
    let bowen = dir.path().join("bowen.json");
    let oracle = dir.path().join("oracle.json");
    let csv = dir.path().join("csv");
    let out = shadowkit(&["shadow", "--orbit", o, "--out", bowen.to_str().unwrap(), "--csv-dir", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(code(&shadowkit(&["shadow", "--orbit", o, "--method", "oracle", "--out", oracle.to_str().unwrap()])), 0);
    let (a, b) = (json(&bowen), json(&oracle));
    for k in 0..2 {
        let (x, y) = (a["point"][k].as_f64().unwrap(), b["point"][k].as_f64().unwrap());
        let t = (x - y).rem_euclid(1.0);
        assert!(t.min(1.0 - t) < 1e-8);
    }
    assert!(a["envelope"].is_object());
    let env = std::fs::read_to_string(csv.join("envelope.csv")).unwrap();
    assert!(env.starts_with("index,value\n-40,"));
    assert_eq!(env.lines().count(), 82);
    assert!(csv.join("per_index_error.csv").exists());
}

#[test]
fn projection_on_odometer_returns_the_anchor() {
    let dir = tempfile::tempdir().unwrap();
    let orbit = gen(dir.path(), "o.json", &["--system", "odometer-6", "--delta", "0.1", "--window", "8"]);
    let out = shadowkit(&["shadow", "--orbit", orbit.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let rec: Value = serde_json::from_slice(&out.stdout).unwrap();
    let anchor = &json(&orbit)["entries"][8];
    assert_eq!(&rec["point"], anchor);
    assert_eq!(rec["method"], "projection");
}

#[test]
fn inadmissible_orbit_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let orbit = gen(dir.path(), "big.json", &["--delta", "0.5", "--window", "8"]);
    let out = shadowkit(&["shadow", "--orbit", orbit.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("inadmissible") && err.contains("--delta"), "{err}");
}

#[test]
fn bad_arguments_exit_with_two() {
    assert_eq!(code(&shadowkit(&["verify", "--system", "torus"])), 2);
    assert_eq!(code(&shadowkit(&["verify", "--system", "cat", "--method", "shift-canonical"])), 2);
    assert_eq!(code(&shadowkit(&["verify", "--system", "odometer-4", "--suite", "envelope"])), 2);
    assert_eq!(code(&shadowkit(&["verify", "--window", "0"])), 2);
}

#[test]
fn verify_writes_jsonl_and_report_reads_it() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("r.jsonl");
    let out = shadowkit(&["verify", "--suite", "bracket-axioms", "--out", out_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(text.lines().count(), 5);
    for line in text.lines() {
        let row: Value = serde_json::from_str(line).unwrap();
        assert_eq!(row["suite"], "bracket-axioms");
        assert_eq!(row["report"]["passed"], true);
    }
    let rep = shadowkit(&["report", out_path.to_str().unwrap()]);
    assert_eq!(code(&rep), 0);
    assert!(String::from_utf8_lossy(&rep.stdout).contains("0 mandatory failures"));

    let failing = text.replacen("\"passed\":true", "\"passed\":false", 1);
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, failing).unwrap();
    assert_eq!(code(&shadowkit(&["report", bad.to_str().unwrap()])), 1);
}

#[test]
fn suites_pass_on_each_system() {
    for (system, suite) in [
        ("shift-3", "all"),
        ("shift-circle", "all"),
        ("ns-circle", "counterexamples"),
        ("odometer-5", "all"),
        ("cat", "limit-decay"),
    ] {
        let out = shadowkit(&["verify", "--system", system, "--suite", suite, "--runs", "4", "--window", "24"]);
        assert_eq!(code(&out), 0, "{system} {suite}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn tuning_curve_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("csv");
    let out = shadowkit(&[
        "verify", "--system", "shift-2", "--suite", "self-tuning", "--runs", "4", "--csv-dir", csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let t = std::fs::read_to_string(csv.join("tuning_curve.csv")).unwrap();
    assert!(t.starts_with("gamma,max_error\n"));
    assert!(t.lines().count() > 2);
}

#[test]
fn config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    let out = shadowkit(&["config", "--system", "ns-circle", "--seed", "9", "--runs", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let first = std::fs::read_to_string(&path).unwrap();
    let v: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["system"], "ns-circle");
    let again = shadowkit(&["config", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&again), 0);
    assert!(again.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), first);

    assert_eq!(code(&shadowkit(&["config", "--config", path.to_str().unwrap(), "--seed", "1"])), 0);
    let v = json(&path);
    assert_eq!(v["seed"], 1);

    std::fs::write(&path, r#"{"schema": 2}"#).unwrap();
    assert_eq!(code(&shadowkit(&["config", "--config", path.to_str().unwrap()])), 2);
    std::fs::write(&path, r#"{"sytem": "cat"}"#).unwrap();
    assert_eq!(code(&shadowkit(&["config", "--config", path.to_str().unwrap()])), 2);
}

#[test]
fn outputs_replace_existing_files_whole() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("o.json");
    std::fs::write(&path, "x".repeat(100_000)).unwrap();
    gen(dir.path(), "o.json", &["--window", "2"]);
    json(&path);
    let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(leftovers.len(), 1);
}

#[test]
fn assert_lemmas_flag_takes_an_optional_value() {
    let on = shadowkit(&["config", "--assert-lemmas"]);
    let off = shadowkit(&["config", "--assert-lemmas=false"]);
    let get = |o: &Output| serde_json::from_slice::<Value>(&o.stdout).unwrap()["assert_lemmas"].clone();
    assert_eq!(get(&on), true);
    assert_eq!(get(&off), false);
}
