use thiserror::Error;

/// Errors raised by geometry, quadrature, assembly and evaluation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LeviError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("argument outside its domain: {0}")]
    Domain(String),
    #[error("kernel singularity: {0}")]
    Singularity(String),
    #[error("near-singular evaluation: {0}")]
    NearSingular(String),
    #[error("quadrature construction failed: {0}")]
    Quadrature(String),
    #[error("non-finite integrand at {0}")]
    Evaluation(String),
    #[error("assembly failed in block {block} at row {row}, column {col}: non-finite entry")]
    Assembly {
        block: &'static str,
        row: usize,
        col: usize,
    },
    #[error("singular linear system (pivot {pivot:e} at step {step}, condition estimate {condition:e})")]
    SingularSystem {
        step: usize,
        pivot: f64,
        condition: f64,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("metric error: {0}")]
    Metric(String),
    #[error("node set: {0}")]
    Nodes(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, LeviError>;

impl From<std::io::Error> for LeviError {
    fn from(e: std::io::Error) -> Self {
        LeviError::Io(e.to_string())
    }
}
