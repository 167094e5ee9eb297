//! Outcome of a property check.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub samples: usize,
    /// Bound minus observed value at the worst sample; negative means violated.
    #[serde(with = "nonfinite")]
    pub worst_slack: f64,
    pub witness: serde_json::Value,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty", with = "nonfinite_map")]
    pub metrics: BTreeMap<String, f64>,
}

/// Writes infinities and NaN as the strings `inf`, `-inf`, `NaN`.
mod nonfinite {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&v.to_string())
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

mod nonfinite_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Num(#[serde(with = "super::nonfinite")] f64);

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
        m.iter().map(|(k, v)| (k, Num(*v))).collect::<BTreeMap<_, _>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
        Ok(BTreeMap::<String, Num>::deserialize(d)?.into_iter().map(|(k, v)| (k, v.0)).collect())
    }
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            passed: true,
            samples: 0,
            worst_slack: f64::INFINITY,
            witness: serde_json::Value::Null,
            metrics: BTreeMap::new(),
        }
    }

    /// Records one sample; keeps the witness of the smallest slack.
    pub fn observe(&mut self, slack: f64, witness: impl FnOnce() -> serde_json::Value) {
        self.samples += 1;
        if slack < self.worst_slack || (slack.is_nan() && !self.worst_slack.is_nan()) {
            self.worst_slack = slack;
            self.witness = witness();
        }
    }

    /// Sets `passed` from the worst slack.
    pub fn finish(mut self, tolerance: f64) -> Self {
        self.passed = self.worst_slack >= -tolerance;
        self
    }

    pub fn metric(mut self, key: &str, value: f64) -> Self {
        self.metrics.insert(key.to_string(), value);
        self
    }

    pub fn set_metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }

    /// The one-line summary printed by the command line tool.
    pub fn line(&self) -> String {
        format!(
            "{} {} samples={} worst_slack={:.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.samples,
            self.worst_slack
        )
    }
}
