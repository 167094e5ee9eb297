//! JSON forms of pseudo-orbits and shadow results.

use serde::{Deserialize, Serialize};

use crate::bowen::{Profile, ShadowResult, StageRecord};
use crate::error::{Error, Result};
use crate::metric::{discrepancy1, discrepancy2, BoundedValue, SeqMetric};
use crate::orbit::{Extension, PseudoOrbit};
use crate::system::Coordinates;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitFile {
    pub system_id: String,
    pub lo: i64,
    pub hi: i64,
    pub extension: Extension,
    pub entries: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d2: Option<BoundedValue>,
}

impl OrbitFile {
    /// Serializable form of `x`, with `D¹` and `D²` measured.
    pub fn from_orbit<S: Coordinates>(sys: &S, x: &PseudoOrbit<S::Point>, metric: SeqMetric) -> Result<Self> {
        Ok(OrbitFile {
            system_id: sys.id(),
            lo: x.lo(),
            hi: x.hi(),
            extension: x.extension(),
            entries: x.entries().iter().map(|p| sys.to_coords(p)).collect(),
            d1: Some(discrepancy1(sys, x)),
            d2: Some(discrepancy2(sys, x, metric)?),
        })
    }

    pub fn to_orbit<S: Coordinates>(&self, sys: &S) -> Result<PseudoOrbit<S::Point>> {
        if self.system_id != sys.id() {
            return Err(Error::UnknownId(format!("orbit is for system {}, not {}", self.system_id, sys.id())));
        }
        if self.hi - self.lo + 1 != self.entries.len() as i64 {
            return Err(Error::InvalidWindow(format!(
                "window [{}, {}] does not match {} entries",
                self.lo,
                self.hi,
                self.entries.len()
            )));
        }
        let pts = self.entries.iter().map(|c| sys.from_coords(c)).collect::<Result<Vec<_>>>()?;
        PseudoOrbit::new(self.lo, pts, self.extension)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadowRecord {
    pub system_id: String,
    pub method: String,
    pub point: Vec<f64>,
    pub stages_used: usize,
    pub tail_bound: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_index_error: Option<Profile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope: Option<Profile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stages: Vec<StageRecord>,
}

impl ShadowRecord {
    pub fn new<S: Coordinates>(sys: &S, method: &str, r: &ShadowResult<S::Point>) -> Self {
        ShadowRecord {
            system_id: sys.id(),
            method: method.to_string(),
            point: sys.to_coords(&r.point),
            stages_used: r.stages_used,
            tail_bound: r.tail_bound,
            per_index_error: r.per_index_error.clone(),
            envelope: None,
            stages: r.stages.clone(),
        }
    }
}
