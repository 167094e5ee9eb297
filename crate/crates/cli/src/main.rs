//! `shadowkit`: generate pseudo-orbits, shadow them, and run check suites.
//!
//! Exit codes: 0 when every mandatory check passes, 1 when one fails, 2 on
//! configuration or admissibility errors.

mod config;
mod output;
mod suites;
mod systems;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use shadowkit::io::{OrbitFile, ShadowRecord};
use shadowkit::{generate, Envelope, Error, SeqMetric, Schedule};

use config::{MethodId, RunConfig, Suite};
use output::{emit, pretty_json, write_series};
use systems::CliSystem;

#[derive(Parser)]
#[command(name = "shadowkit", version, about = "Shadowing maps for pseudo-orbits and the checks behind them")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a seeded pseudo-orbit and record its discrepancies.
    Gen(Common),
    /// Shadow a pseudo-orbit file.
    Shadow {
        #[command(flatten)]
        common: Common,
        /// Pseudo-orbit written by `gen`.
        #[arg(long)]
        orbit: PathBuf,
    },
    /// Run check suites; JSON lines to --out, a table to standard error.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Check this pseudo-orbit instead of generated ones.
        #[arg(long)]
        orbit: Option<PathBuf>,
    },
    /// The semiconjugacy experiment for a perturbed cat map.
    Stability {
        #[command(flatten)]
        common: Common,
        /// Sample points per side of the lattice.
        #[arg(long)]
        grid: Option<usize>,
        /// Size of the perturbation.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Summarize report files written by `verify` or `stability`.
    Report {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Print the effective configuration.
    Config(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleKind {
    Constant,
    OneSpike,
    GeometricDecay,
    QuietWindow,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// cat, ns-circle, shift-K, shift-circle or odometer-D.
    #[arg(long)]
    system: Option<String>,
    #[arg(long, value_enum)]
    method: Option<MethodId>,
    #[arg(long, env = "SHADOWKIT_SEED")]
    seed: Option<u64>,
    /// Half-width of the stored window.
    #[arg(long)]
    window: Option<i64>,
    /// Jump size of the generator schedule.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_enum)]
    schedule: Option<ScheduleKind>,
    /// Radius of the jump-free window for quiet-window schedules.
    #[arg(long)]
    quiet: Option<i64>,
    /// Index of the jump for one-spike schedules.
    #[arg(long)]
    spike_index: Option<i64>,
    /// Pseudo-orbits per suite.
    #[arg(long)]
    runs: Option<u64>,
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for CSV series.
    #[arg(long)]
    csv_dir: Option<PathBuf>,
    /// Abort on any violated stage bound (on by default).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    assert_lemmas: Option<bool>,
}

impl Common {
    fn resolve(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = &self.system {
            cfg.system = s.clone();
        }
        if self.method.is_some() {
            cfg.method = self.method;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(w) = self.window {
            cfg.window = w;
        }
        if let Some(r) = self.runs {
            cfg.runs = r;
        }
        if let Some(s) = self.suite {
            cfg.suite = s;
        }
        if let Some(a) = self.assert_lemmas {
            cfg.assert_lemmas = a;
        }
        if self.out.is_some() {
            cfg.outputs.out = self.out.clone();
        }
        if self.csv_dir.is_some() {
            cfg.outputs.csv_dir = self.csv_dir.clone();
        }
        cfg.schedule = self.schedule(cfg.schedule);
        cfg.validate()?;
        Ok(cfg)
    }

    fn schedule(&self, current: Schedule) -> Schedule {
        let delta = self.delta.unwrap_or(current.delta());
        let (quiet, index) = match current {
            Schedule::QuietWindow { quiet, .. } => (quiet, 0),
            Schedule::OneSpike { index, .. } => (16, index),
            _ => (16, 0),
        };
        let quiet = self.quiet.unwrap_or(quiet);
        let index = self.spike_index.unwrap_or(index);
        let kind = self.schedule.unwrap_or(match current {
            Schedule::Constant { .. } => ScheduleKind::Constant,
            Schedule::OneSpike { .. } => ScheduleKind::OneSpike,
            Schedule::GeometricDecay { .. } => ScheduleKind::GeometricDecay,
            Schedule::QuietWindow { .. } => ScheduleKind::QuietWindow,
        });
        match kind {
            ScheduleKind::Constant => Schedule::Constant { delta },
            ScheduleKind::OneSpike => Schedule::OneSpike { delta, index },
            ScheduleKind::GeometricDecay => Schedule::GeometricDecay { delta },
            ScheduleKind::QuietWindow => Schedule::QuietWindow { delta, quiet },
        }
    }
}

fn cmd_gen(cfg: &RunConfig) -> anyhow::Result<bool> {
    with_system!(cfg.system_id()?, sys => {
        let x = generate(&sys, &sys.start(cfg.seed), cfg.schedule, -cfg.window, cfg.window, cfg.seed)?;
        let file = OrbitFile::from_orbit(&sys, &x, SeqMetric::default())?;
        emit(cfg.outputs.out.as_deref(), &pretty_json(&file)?)?;
        Ok(true)
    })
}

fn explain(e: Error, method: MethodId) -> anyhow::Error {
    let hint = match &e {
        Error::Inadmissible { .. } => "; lower --delta or use a method with a larger admissible jump size",
        Error::OutOfDomain { .. } | Error::HalvesTooFar { .. } => "; the pseudo-orbit leaves the bracket domain",
        Error::LemmaViolation { .. } => "; a stage bound failed (rerun with --assert-lemmas=false to inspect the result)",
        _ => "",
    };
    anyhow::anyhow!("{method} rejected the pseudo-orbit: {e}{hint}")
}

fn cmd_shadow(common: &Common, orbit: &PathBuf) -> anyhow::Result<bool> {
    let text = std::fs::read_to_string(orbit).with_context(|| format!("reading {}", orbit.display()))?;
    let file: OrbitFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", orbit.display()))?;
    let mut common = common.clone();
    match &common.system {
        Some(s) if *s != file.system_id => bail!("--system {s} does not match the orbit's system {}", file.system_id),
        _ => common.system = Some(file.system_id.clone()),
    }
    let cfg = common.resolve()?;
    let method_id = cfg.method_id()?;
    with_system!(cfg.system_id()?, sys => {
        let x = file.to_orbit(&sys)?;
        let method = sys.method(method_id, cfg.assert_lemmas)?;
        let r = method.inner.apply(&sys, &x).map_err(|e| explain(e, method_id))?;
        let mut record = ShadowRecord::new(&sys, &method.inner.id(), &r);
        if let Some(bcfg) = &method.bowen {
            record.envelope = Some(Envelope::new(&sys, bcfg, &x).profile(x.lo(), x.hi()));
        }
        emit(cfg.outputs.out.as_deref(), &pretty_json(&record)?)?;
        if let Some(dir) = &cfg.outputs.csv_dir {
            for (name, profile) in [("per_index_error.csv", &record.per_index_error), ("envelope.csv", &record.envelope)] {
                if let Some(p) = profile {
                    let rows = p.values.iter().enumerate().map(|(k, v)| ((p.lo + k as i64).to_string(), *v));
                    write_series(dir, name, ("index", "value"), rows)?;
                }
            }
        }
        Ok(true)
    })
}

fn finish_rows(cfg: &RunConfig, rows: &[suites::Row]) -> anyhow::Result<bool> {
    match &cfg.outputs.out {
        Some(p) => output::write_atomic(p, suites::to_jsonl(rows)?.as_bytes())?,
        None => print!("{}", suites::to_jsonl(rows)?),
    }
    eprint!("{}", suites::summary_table(rows));
    if let Some(dir) = &cfg.outputs.csv_dir {
        let curve = suites::tuning_curve(rows);
        if !curve.is_empty() {
            write_series(dir, "tuning_curve.csv", ("gamma", "max_error"), curve)?;
        }
    }
    Ok(suites::all_mandatory_passed(rows))
}

fn cmd_verify(cfg: &RunConfig, orbit: Option<&PathBuf>) -> anyhow::Result<bool> {
    let file = match orbit {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Some(serde_json::from_str::<OrbitFile>(&text).with_context(|| format!("parsing {}", p.display()))?)
        }
        None => None,
    };
    let rows = with_system!(cfg.system_id()?, sys => {
        let given = match &file {
            Some(f) => Some(vec![f.to_orbit(&sys)?]),
            None => None,
        };
        suites::run_suites(&sys, cfg, given)?
    });
    finish_rows(cfg, &rows)
}

fn cmd_report(inputs: &[PathBuf]) -> anyhow::Result<bool> {
    let mut rows = Vec::new();
    for p in inputs {
        let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        rows.extend(suites::from_jsonl(&text).with_context(|| format!("parsing {}", p.display()))?);
    }
    print!("{}", suites::summary_table(&rows));
    Ok(suites::all_mandatory_passed(&rows))
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.cmd {
        Cmd::Gen(c) => cmd_gen(&c.resolve()?),
        Cmd::Shadow { common, orbit } => cmd_shadow(&common, &orbit),
        Cmd::Verify { common, orbit } => cmd_verify(&common.resolve()?, orbit.as_ref()),
        Cmd::Stability { common, grid, eps } => {
            let mut cfg = common.resolve()?;
            if let Some(g) = grid {
                cfg.stability.grid = g;
            }
            if let Some(e) = eps {
                cfg.stability.eps = e;
            }
            cfg.suite = Suite::Stability;
            cfg.validate()?;
            cmd_verify(&cfg, None)
        }
        Cmd::Report { inputs } => cmd_report(&inputs),
        Cmd::Config(c) => {
            let cfg = c.resolve()?;
            emit(cfg.outputs.out.as_deref(), &pretty_json(&cfg)?)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
