use thiserror::Error;

/// Errors produced by the numerics in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The phase variance vanishes, so the parameter leaves no trace in the phase law.
    #[error("zero information: {0}")]
    ZeroInformation(String),

    #[error("resonant divergence: control frequency coincides with a tan(ωτ/2) pole")]
    ResonantDivergence,

    #[error("degenerate detuning: δ_s = ±δ_r makes the effective phase singular")]
    DegenerateDetuning,

    #[error("coherence overflow: |γ| = {gamma} ≥ 1 with dγ = {dgamma}")]
    CoherenceOverflow { gamma: f64, dgamma: f64 },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("size {requested} exceeds the configured maximum {max}")]
    Size { requested: usize, max: usize },

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite, got {value}")))
    }
}
