use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BilliardError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("singular configuration: {0}")]
    Singular(String),

    #[error("ray does not reach the scatterer (arccos argument {argument})")]
    NoCollision { argument: f64 },

    #[error("grazing collision (sin theta = {sin_theta:e})")]
    Grazing { sin_theta: f64 },

    #[error("fixed point is not elliptic (trace {trace})")]
    NotElliptic { trace: f64 },

    #[error("linear part is not in elliptic normal form (a01 * b10 = {product})")]
    NonEllipticNormalization { product: f64 },

    #[error("resonant eigenvalue: lambda^{order} = 1 (|lambda^{order} - 1| = {distance:e})")]
    Resonant { order: u32, distance: f64 },

    #[error("derivative extraction disagrees with finite differences: {coefficient} rel. error {relative:e}")]
    Precision { coefficient: String, relative: f64 },

    #[error("trajectory left the chart after {iteration} iterations: {reason}")]
    Escape { iteration: usize, reason: String },
}

pub type Result<T, E = BilliardError> = std::result::Result<T, E>;
