use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("backend mismatch: {0} vs {1}")]
    BackendMismatch(String, String),

    #[error("module mismatch: {0}")]
    ModuleMismatch(String),

    #[error("arity mismatch: expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("gram matrix is not symmetric at ({0}, {1})")]
    GramNotSymmetric(usize, usize),

    #[error("gram matrix is not invertible over the coefficient algebra (det = {0})")]
    GramNotInvertible(String),

    #[error("connection is not metric: {0}")]
    NonMetric(String),

    #[error("invalid connection: {0}")]
    InvalidConnection(String),

    #[error("map is not isometric: {0}")]
    NotIsometric(String),

    #[error("degree error: {0}")]
    Degree(String),

    #[error("malformed table: {0}")]
    MalformedTable(String),

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("not a Courant structure: {0}")]
    NotCourant(String),

    #[error("internal grading: {0}")]
    Grading(String),

    #[error("input series violates the Maurer-Cartan relation at order {0}")]
    InvalidSeries(usize),

    #[error("coefficient-degree truncation {0} is too small to be conclusive")]
    Inconclusive(usize),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unsupported: {0}")]
    Unsupported(String),
}
