use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance policy shared by every routine in the crate.
///
/// All thresholds are dimensionless. `rank_rel` is a per-dimension factor:
/// a singular value counts as nonzero iff it exceeds
/// `rank_rel * max(rows, cols) * sigma_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// Relative rank cutoff factor (scaled by dimension and largest singular value).
    pub rank_rel: f64,
    /// Tolerance for matching spectra computed along independent routes.
    pub spectral_match: f64,
    /// Tolerance for certifying Hermitian idempotents.
    pub idempotent_tol: f64,
    /// Tolerance for unimodularity / unitarity checks.
    pub unit_circle_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            rank_rel: 1e-12,
            spectral_match: 1e-8,
            idempotent_tol: 1e-10,
            unit_circle_tol: 1e-10,
        }
    }
}

impl TolerancePolicy {
    /// Checks the policy invariants: every tolerance strictly positive and below 1e-2.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_rel", self.rank_rel),
            ("spectral_match", self.spectral_match),
            ("idempotent_tol", self.idempotent_tol),
            ("unit_circle_tol", self.unit_circle_tol),
        ] {
            if !(v > 0.0 && v < 1e-2) {
                return Err(Error::Validation(format!(
                    "tolerance {name} = {v:e} must lie strictly inside (0, 1e-2)"
                )));
            }
        }
        Ok(())
    }

    /// Absolute cutoff below which a singular value of an `rows x cols` matrix
    /// with largest singular value `sigma_max` is treated as zero.
    pub fn rank_cutoff(&self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        self.rank_rel * rows.max(cols).max(1) as f64 * sigma_max
    }

    /// Gap under which two eigenvalues of an operator of norm `scale` are clustered.
    pub fn cluster_gap(&self, scale: f64) -> f64 {
        self.spectral_match * scale.max(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_policy_is_valid() {
        TolerancePolicy::default().validate().unwrap();
    }

    #[test]
    fn rejects_nonpositive_and_huge_tolerances() {
        let mut t = TolerancePolicy::default();
        t.spectral_match = 0.0;
        assert!(t.validate().is_err());
        t.spectral_match = 0.5;
        assert!(t.validate().is_err());
    }

    #[test]
    fn rank_cutoff_scales_with_dimension() {
        let t = TolerancePolicy::default();
        assert_eq!(t.rank_cutoff(4, 8, 2.0), 1e-12 * 8.0 * 2.0);
    }
}
