use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("invalid interaction graph: {0}")]
    InvalidGraph(String),
    #[error("invalid noise specification: {0}")]
    InvalidNoise(String),
    #[error("qubit index out of range: {index} (n_qubits = {n_qubits})")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("control and target coincide: {0}")]
    SameControlTarget(usize),
    #[error("{what}: N = {n} exceeds ceiling {ceiling}")]
    CeilingExceeded { what: &'static str, n: usize, ceiling: usize },
    #[error("graph is disconnected: vertex {from} cannot reach vertex {to}")]
    Disconnected { from: usize, to: usize },
    #[error("matrix not symmetric: |a[{row},{col}] - a[{col},{row}]| = {deviation:e}")]
    NotSymmetric { row: usize, col: usize, deviation: f64 },
    #[error("operator failed the symmetry probe: deviation {0:e}")]
    OperatorNotSymmetric(f64),
    #[error("deflation vectors are not orthonormal: deviation {0:e}")]
    DeflationNotOrthonormal(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("eigen iteration did not converge within {iterations} iterations (best estimate {estimate}, residual {residual:e})")]
    NoConvergence { iterations: usize, estimate: f64, residual: f64 },
    #[error("group order exceeds cap {cap}")]
    GroupCapExceeded { cap: usize },
    #[error("minimum-weight bound requires a complete interaction topology")]
    BoundInapplicable,
    #[error("rank-deficient least-squares design: {0}")]
    RankDeficient(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
