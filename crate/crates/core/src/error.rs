use thiserror::Error;

/// Which admissibility condition rejected a configuration or input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Admissibility {
    /// `c μ^m ≤ 1/(2c)` fails for the configured block length.
    BlockContraction,
    /// `2 δ L_m ≤ γ` fails for the measured jump size.
    JumpSize,
}

impl std::fmt::Display for Admissibility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Admissibility::BlockContraction => write!(f, "block contraction c*mu^m <= 1/(2c)"),
            Admissibility::JumpSize => write!(f, "jump size 2*delta*L_m <= gamma"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("window [{lo}, {hi}] does not cover index range [{want_lo}, {want_hi}]")]
    WindowTooSmall { lo: i64, hi: i64, want_lo: i64, want_hi: i64 },

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("pair at distance {dist:e} is outside the bracket domain (radius {radius:e})")]
    OutOfDomain { dist: f64, radius: f64 },

    #[error("inadmissible: {bound} violated (observed {observed:e}, limit {limit:e})")]
    Inadmissible { bound: Admissibility, observed: f64, limit: f64 },

    #[error("{lemma} bound violated at stage {stage}: observed {observed:e} > bound {bound:e}")]
    LemmaViolation { lemma: &'static str, stage: usize, observed: f64, bound: f64 },

    #[error("no convergence after {stages} stages (tail bound {tail:e})")]
    NonConvergence { stages: usize, tail: f64 },

    #[error("half-shadows are {dist:e} apart, beyond bracket radius {radius:e}")]
    HalvesTooFar { dist: f64, radius: f64 },

    #[error("lifted jump at index {index} is ambiguous (size {size:e})")]
    AmbiguousLift { index: i64, size: f64 },

    #[error("antipodal pair has no unique shortest arc")]
    Antipodal,

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown id: {0}")]
    UnknownId(String),
}

pub type Result<T> = std::result::Result<T, Error>;
