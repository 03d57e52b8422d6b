use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("out of scope: {0}")]
    OutOfScope(String),

    /// A level equation could not be solved for the current unknown.
    #[error("level {level} is unsolvable: {reason}; residual = {residual}")]
    UnsolvableLevel {
        level: usize,
        reason: String,
        residual: String,
    },

    #[error("division by non-unit `{0}` in the quotient ring")]
    DivisionByNonUnit(String),

    #[error("depth {depth} exceeds the configured cap {cap}")]
    DepthOverflow { depth: usize, cap: usize },

    #[error("cost guard exceeded: {0}")]
    CostGuard(String),

    #[error("exponent is complex: {0}")]
    ComplexExponent(String),

    #[error("eigensolver failure: {0}")]
    Solver(String),
}

impl Error {
    /// Errors raised by the solvers rather than by bad arguments.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::UnsolvableLevel { .. } | Error::DivisionByNonUnit(_) | Error::Solver(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
