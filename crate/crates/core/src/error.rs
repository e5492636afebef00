use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("mesh size {h_target} too coarse: {count} boundary vertices (need at least 3)")]
    MeshTooCoarse { h_target: f64, count: usize },

    #[error("mesh generation failed: {0}")]
    Meshing(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("conjugate gradient stopped after {iterations} iterations with relative residual {residual:.3e}")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("discretization failure: {0}")]
    Discretization(String),

    #[error("{what} = {value} lies outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("degenerate circle fit: {0}")]
    DegenerateFit(String),

    #[error("{kind} file, line {line}: {reason}")]
    Format {
        kind: &'static str,
        line: usize,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
