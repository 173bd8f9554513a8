//! Structured outcomes for the numeric and exact property checks.
//!
//! Every report carries its tolerance, sample count, and seed so any number
//! in it can be reproduced from the report alone. Floating values serialize
//! as decimal strings with 17 significant digits so output bytes do not
//! depend on float-printing quirks.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// Residual at or below tolerance.
    Pass,
    /// Residual above tolerance.
    Fail,
    /// The check could not be decided (near-singular data); never a pass.
    Degenerate,
    /// Informational measurement with no hard pass criterion.
    Info,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub verdict: Verdict,
    #[serde(serialize_with = "ser_opt_f64")]
    pub max_residual: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub tolerance: Option<f64>,
    pub samples: usize,
    pub seed: Option<u64>,
    pub metadata: BTreeMap<String, String>,
}

impl CheckReport {
    /// Pass/fail report decided by comparing a residual against a tolerance.
    pub fn from_residual(name: &str, max_residual: f64, tolerance: f64, samples: usize) -> Self {
        let verdict = if max_residual.is_finite() && max_residual <= tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            name: name.to_string(),
            verdict,
            max_residual: Some(max_residual),
            tolerance: Some(tolerance),
            samples,
            seed: None,
            metadata: BTreeMap::new(),
        }
    }

    /// Report for a check that could not be decided.
    pub fn degenerate(name: &str, why: &str) -> Self {
        let mut r = Self {
            name: name.to_string(),
            verdict: Verdict::Degenerate,
            max_residual: None,
            tolerance: None,
            samples: 0,
            seed: None,
            metadata: BTreeMap::new(),
        };
        r.metadata.insert("reason".into(), why.to_string());
        r
    }

    /// Informational report with no pass criterion.
    pub fn info(name: &str) -> Self {
        Self {
            name: name.to_string(),
            verdict: Verdict::Info,
            max_residual: None,
            tolerance: None,
            samples: 0,
            seed: None,
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_note(mut self, key: &str, value: impl Into<String>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn is_pass(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// 17-significant-digit decimal string, stable across platforms.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn ser_opt_f64<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_some(&fmt_f64(*x)),
        None => s.serialize_none(),
    }
}
