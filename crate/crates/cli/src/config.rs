use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use shadowkit::Schedule;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemId {
    Cat,
    NsCircle,
    Shift(u32),
    ShiftCircle,
    Odometer(u32),
}

impl FromStr for SystemId {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let number = |rest: &str, what: &str| -> anyhow::Result<u32> {
            rest.parse().with_context(|| format!("{what} in system id {s:?} is not a positive integer"))
        };
        Ok(match s {
            "cat" => SystemId::Cat,
            "ns-circle" => SystemId::NsCircle,
            "shift-circle" => SystemId::ShiftCircle,
            _ if s.starts_with("shift-") => {
                let k = number(&s[6..], "alphabet size")?;
                if k < 2 {
                    bail!("shift alphabet needs at least 2 symbols, got {k}");
                }
                SystemId::Shift(k)
            }
            _ if s.starts_with("odometer-") => {
                let d = number(&s[9..], "digit count")?;
                if !(1..=62).contains(&d) {
                    bail!("odometer digit count must lie in 1..=62, got {d}");
                }
                SystemId::Odometer(d)
            }
            _ => bail!("unknown system {s:?}; expected cat, ns-circle, shift-K, shift-circle or odometer-D"),
        })
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemId::Cat => write!(f, "cat"),
            SystemId::NsCircle => write!(f, "ns-circle"),
            SystemId::Shift(k) => write!(f, "shift-{k}"),
            SystemId::ShiftCircle => write!(f, "shift-circle"),
            SystemId::Odometer(d) => write!(f, "odometer-{d}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MethodId {
    Bowen,
    SymmetricBowen,
    Projection,
    Oracle,
    ShiftCanonical,
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MethodId::Bowen => "bowen",
            MethodId::SymmetricBowen => "symmetric-bowen",
            MethodId::Projection => "projection",
            MethodId::Oracle => "oracle",
            MethodId::ShiftCanonical => "shift-canonical",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    All,
    ShadowError,
    Envelope,
    SelfTuning,
    ShiftInv,
    DynInv,
    BracketAxioms,
    Stability,
    LimitDecay,
    Counterexamples,
}

impl Suite {
    pub const EACH: [Suite; 9] = [
        Suite::ShadowError,
        Suite::Envelope,
        Suite::SelfTuning,
        Suite::ShiftInv,
        Suite::DynInv,
        Suite::BracketAxioms,
        Suite::Stability,
        Suite::LimitDecay,
        Suite::Counterexamples,
    ];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = serde_json::to_value(self).expect("unit variant");
        f.write_str(v.as_str().expect("string"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Bound on `d(bowen, oracle)` and on the oracle's stability defect.
    pub oracle: f64,
    /// Bound on shift- and dynamical-invariance deviations.
    pub invariance: f64,
    /// `ε/γ` on shadow-error ladders.
    pub gain: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { oracle: 1e-8, invariance: 1e-9, gain: 100.0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    /// Main output file; standard output when absent.
    pub out: Option<PathBuf>,
    /// Directory for CSV series.
    pub csv_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityConfig {
    pub grid: usize,
    pub eps: f64,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig { grid: 16, eps: 1e-3 }
    }
}

/// Everything a run depends on. Missing fields take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    pub system: String,
    /// The system's default method when absent.
    pub method: Option<MethodId>,
    pub schedule: Schedule,
    pub seed: u64,
    /// Pseudo-orbits are stored on `[-window, window]`.
    pub window: i64,
    /// Generated pseudo-orbits per suite.
    pub runs: u64,
    pub suite: Suite,
    pub assert_lemmas: bool,
    pub tolerances: Tolerances,
    pub stability: StabilityConfig,
    pub outputs: Outputs,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema: SCHEMA,
            system: "cat".into(),
            method: None,
            schedule: Schedule::Constant { delta: 1e-4 },
            seed: 0,
            window: 64,
            runs: 20,
            suite: Suite::All,
            assert_lemmas: true,
            tolerances: Tolerances::default(),
            stability: StabilityConfig::default(),
            outputs: Outputs::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.schema != SCHEMA {
            bail!("config schema {} is not supported (expected {SCHEMA})", self.schema);
        }
        self.system_id()?;
        if self.window < 1 {
            bail!("window must be at least 1, got {}", self.window);
        }
        if self.runs == 0 {
            bail!("runs must be at least 1");
        }
        let d = self.schedule.delta();
        if !(d >= 0.0 && d.is_finite()) {
            bail!("schedule delta must be finite and nonnegative, got {d}");
        }
        if self.stability.grid == 0 || !(self.stability.eps >= 0.0) {
            bail!("stability needs grid >= 1 and eps >= 0");
        }
        Ok(())
    }

    pub fn system_id(&self) -> anyhow::Result<SystemId> {
        self.system.parse()
    }

    pub fn method_id(&self) -> anyhow::Result<MethodId> {
        Ok(self.method.unwrap_or(crate::systems::default_method(self.system_id()?)))
    }
}
