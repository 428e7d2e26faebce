use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },

    #[error("dispersion pole at omega = {omega:e} rad/s (|D| = {modulus:e} below floor)")]
    Pole { omega: f64, modulus: f64 },

    #[error("near-zero denominator `{quantity}` (|value| = {value:e})")]
    NearZero { quantity: &'static str, value: f64 },

    #[error("gain medium: Im K0 = {0:e} <= 0, absorption length undefined")]
    GainMedium(f64),

    #[error("wavenumber |k| = {k:e} is below the floor {floor:e} (k = 0 singularity)")]
    BelowKFloor { k: f64, floor: f64 },

    #[error("grid: {0}")]
    Grid(String),

    #[error("grid resolution: spectral tail fraction {tail:e} exceeds {limit:e}")]
    Resolution { tail: f64, limit: f64 },

    #[error("step size violation: {0}")]
    StepSize(String),

    #[error("linearization out of validity: |<sigma21>| = {0} exceeds 1/2")]
    CoherenceBound(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn nonzero(quantity: &'static str, value: f64, floor: f64) -> Result<()> {
    if value.abs() <= floor || !value.is_finite() {
        Err(Error::NearZero { quantity, value: value.abs() })
    } else {
        Ok(())
    }
}
