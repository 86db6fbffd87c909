use thiserror::Error;

/// Errors produced by the numerical routines.
///
/// `Validation` covers malformed or out-of-contract inputs. `NumericalFailure`
/// is reserved for internal cross-checks: two independent routes to the same
/// quantity disagreed beyond tolerance, which indicates a bug or a tolerance
/// policy that is too tight for the data, never a silently wrong answer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("numerical cross-check failed: {0}")]
    NumericalFailure(String),

    #[error("iterative factorization did not converge")]
    NonConvergence,

    #[error("rank deficient: smallest singular value {sigma_min:.3e} is below threshold {threshold:.3e}")]
    RankDeficient { sigma_min: f64, threshold: f64 },

    #[error("principal logarithm branch cut: unitary eigenvalue {re:.6}{im:+.6}i lies within {tol:.1e} of -1")]
    BranchCut { re: f64, im: f64, tol: f64 },

    #[error("not a product of two orthogonal projections (residual {residual:.3e})")]
    NotAProduct { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for theorem-consistency violations (as opposed to bad input).
    pub fn is_numerical_failure(&self) -> bool {
        matches!(self, Error::NumericalFailure(_))
    }
}
