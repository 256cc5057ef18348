use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("element is not supported on degree-2 monomials (stray weight {residual:e})")]
    NotBivector { residual: f64 },

    #[error("element is not in the spin group: {reason} (residual {residual:e})")]
    NotInGroup { reason: &'static str, residual: f64 },

    #[error(
        "no clean spectral gap: largest singular value counted as zero {zero:e}, \
         smallest counted as nonzero {nonzero:e} (ratio {ratio:e} below {required:e})"
    )]
    NoSpectralGap {
        zero: f64,
        nonzero: f64,
        ratio: f64,
        required: f64,
    },

    #[error("clutching function is singular at sample {index} (smallest singular value {sigma_min:e})")]
    SingularClutching { index: usize, sigma_min: f64 },

    #[error("equator undersampled: phase step {step} rad exceeds pi/2 after {refinements} refinements")]
    Undersampled { step: f64, refinements: u32 },

    #[error("duplicate id `{0}` in merged report")]
    DuplicateId(String),

    #[error("conflicting configuration value for `{0}`")]
    ConfigConflict(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
