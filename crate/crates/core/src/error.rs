use thiserror::Error;

/// Errors shared by the linear-algebra kernel and the scheme solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix is not Hermitian (max asymmetry {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("rank-deficient input: smallest singular value {min_singular:.3e} below tolerance")]
    RankDeficient { min_singular: f64 },

    #[error("time-sharing bounds violated: required energy split exceeds the feasibility region")]
    TimeShareInfeasible,

    #[error("slot energy target {required:.6} exceeds the attainable maximum {attainable:.6}")]
    InfeasibleSlot { required: f64, attainable: f64 },

    #[error("search produced no feasible point for the requested constraints")]
    EmptyFeasibleSet,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
