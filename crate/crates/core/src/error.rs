use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid domain: {0}")]
    Domain(String),

    #[error("constraint {index} is inconsistent with the others (residual {residual:e})")]
    InfeasibleConstraints { index: usize, residual: f64 },

    #[error("constraint matrix has rank {rank} < {rows} rows; reduce rank first")]
    MustReduceRank { rank: usize, rows: usize },

    #[error("no solution for M>N+1 (M={constraints}, N={band_limit})")]
    TooManyConstraints { constraints: usize, band_limit: usize },

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
