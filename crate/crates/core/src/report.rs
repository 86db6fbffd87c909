//! Check records shared by analyses, experiments and the CLI report schema.

use serde::{Deserialize, Serialize};

/// One certified identity: a named residual compared against its threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        CheckRecord {
            name: name.into(),
            residual,
            threshold,
            pass: residual <= threshold,
        }
    }

    /// Records an exact (integer or boolean) comparison as a 0/1 residual.
    pub fn exact(name: impl Into<String>, pass: bool) -> Self {
        CheckRecord {
            name: name.into(),
            residual: if pass { 0.0 } else { 1.0 },
            threshold: 0.0,
            pass,
        }
    }
}

/// Summary of a batch of checks.
pub fn summarize(checks: &[CheckRecord]) -> (usize, usize) {
    let passed = checks.iter().filter(|c| c.pass).count();
    (passed, checks.len() - passed)
}
