use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("element has {len} entries, which is not {dim}x{dim}")]
    BadShape { dim: usize, len: usize },

    #[error("element contains a non-finite entry")]
    NonFinite,

    #[error("matrix is singular (pivot {pivot:e} below threshold {threshold:e})")]
    Singular { pivot: f64, threshold: f64 },

    #[error("element is not in the subalgebra (distance {distance:e})")]
    NotInSubalgebra { distance: f64 },

    #[error("invalid subalgebra: {0}")]
    BadSubalgebra(String),

    #[error("argument norm {norm:e} outside the domain of radius {radius:e}")]
    OutOfDomain { norm: f64, radius: f64 },

    #[error("argument norm {norm:e} outside the certified ball of radius {radius:e}")]
    OutOfCertifiedDomain { norm: f64, radius: f64 },

    #[error("fixed-point iteration did not converge after {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("E(a) is not invertible in B")]
    ExpectationNotInvertible,

    #[error("element is not invertible in B")]
    NotInvertibleInB,

    #[error("operation requires a commutative (scalar or diagonal) subalgebra")]
    NonCommutative,

    #[error("size {n} exceeds the supported maximum {max}")]
    TooLarge { n: usize, max: usize },

    #[error("composition {parts:?} does not sum to {r}")]
    BadComposition { r: usize, parts: Vec<usize> },

    #[error("order {requested} exceeds available order {available}")]
    OrderExceeded { requested: usize, available: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("malformed distribution document: {0}")]
    Format(String),
}
