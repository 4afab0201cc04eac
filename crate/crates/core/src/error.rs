//! Crate-wide error type.

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix or vector dimensions do not match what the operation requires.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An operator violated a Hermiticity tolerance.
    #[error("operator is not Hermitian: deviation {deviation:.3e} exceeds tolerance {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    /// An operator that must be positive semidefinite has a significantly
    /// negative eigenvalue.
    #[error("operator is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    /// A state or channel violated a normalization constraint.
    #[error("normalization violated: {0}")]
    NotNormalized(String),

    /// A Kraus family does not satisfy the trace-preservation condition.
    #[error("Kraus operators do not preserve trace: deviation {0:.3e}")]
    NotTracePreserving(f64),

    /// A (dims, k) combination violates the Kraus-rank dimension constraint.
    #[error("invalid Kraus rank {k} for d_in={d_in}, d_out={d_out}")]
    InvalidRank { d_in: usize, d_out: usize, k: usize },

    /// Rank of an operator exceeds what the operation supports.
    #[error("rank {rank} exceeds allowed maximum {max}")]
    RankTooLarge { rank: usize, max: usize },

    /// A numeric parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A precondition of the form `-A <= Y <= A` (or similar) failed.
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    /// The interior-point solver did not reach the requested tolerances.
    #[error("SDP solver failed: {message} (best primal {primal:.6e}, dual {dual:.6e})")]
    SolverFailure {
        message: String,
        primal: f64,
        dual: f64,
    },

    /// Requested failure probability is outside the simplified-bound regime.
    #[error(
        "delta {delta:.3e} is not above the regime threshold 4*exp(-{d_tot}); \
         use repetition boosting (run at constant delta and combine estimates) instead"
    )]
    OutOfRegime { delta: f64, d_tot: usize },

    /// A pipeline stage failed; carries the stage name.
    #[error("stage '{stage}' failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    /// File or serialization error in the document formats.
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Tag an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
