use thiserror::Error;

/// Errors shared across the crate. The CLI maps `Config`, `Domain`,
/// `InvalidSubset` and `Construction` to the usage exit code and the
/// rest to the runtime exit code.
#[derive(Error, Debug)]
pub enum Error {
    #[error("arithmetic overflow in {op}")]
    Overflow { op: &'static str },

    #[error("invalid subset: {0}")]
    InvalidSubset(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("vertex {vertex} out of range for {n_vertices} vertices")]
    VertexOutOfRange { vertex: usize, n_vertices: usize },

    #[error("enumeration budget exceeded: {needed} subset visits > budget {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },

    #[error("calibration infeasible: {0}")]
    CalibrationInfeasible(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
