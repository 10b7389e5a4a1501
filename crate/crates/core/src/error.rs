use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix is not Hermitian: max |M - M^H| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("dimension {dim} exceeds the configured cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("eigendecomposition failed (residual {residual:e})")]
    Eigen { residual: f64 },

    #[error("missing exponent for role `{0}`")]
    MissingRole(String),

    #[error("no witness exists: D(k^{s_out}) contains D(k^{s_in})")]
    NoWitness { s_in: String, s_out: String },

    #[error("operation requires {expected}, got {found}")]
    WrongKind {
        expected: &'static str,
        found: &'static str,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
