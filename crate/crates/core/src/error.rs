use crate::C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("iteration did not converge after {iterations} steps (best estimate {best}, residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        best: f64,
        residual: f64,
    },

    #[error("constant has no roots")]
    ConstantPolynomial,

    #[error("leading coefficient underflow ({magnitude:e} relative to coefficient scale)")]
    LeadingCoefficientUnderflow { magnitude: f64 },

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("invalid power series: {0}")]
    InvalidSeries(String),

    #[error("tail bound {achieved:e} at degree cap {max_degree} does not reach eps = {eps:e}")]
    SeriesTailUnreachable {
        achieved: f64,
        eps: f64,
        max_degree: usize,
    },

    #[error("|z| = {modulus} outside the open disk of convergence (radius {radius})")]
    Domain { modulus: f64, radius: f64 },

    #[error("unknown operator kind `{0}`")]
    UnknownKind(String),

    #[error("unbounded sequence rule: {0}")]
    UnboundedSequence(String),

    #[error("unsupported operator: {0}")]
    UnsupportedOperator(String),

    #[error("operator has no finite band: {0}")]
    Unbanded(String),

    #[error("truncation size must be at least 1")]
    EmptyTruncation,

    #[error("contour through zero: min |f| = {min_modulus:e} on circle |z - {center}| = {radius}")]
    ContourThroughZero {
        center: C64,
        radius: f64,
        min_modulus: f64,
    },

    #[error("winding number sampling cap {cap} exceeded")]
    SamplingCapExceeded { cap: usize },

    #[error(
        "root/winding mismatch near radius {radius}: root counts {roots:?} (inner, outer), winding numbers {winding:?}"
    )]
    RootWindingMismatch {
        roots: (usize, usize),
        winding: (i64, i64),
        radius: f64,
    },

    #[error("mismatched provenance: verdict for `{verdict}`, bounds for `{bounds}`")]
    ProvenanceMismatch { verdict: String, bounds: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
