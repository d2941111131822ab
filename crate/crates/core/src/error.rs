use thiserror::Error;

use crate::schmidt::SynthesisResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not hermitian (max |M - M†| = {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("matrix is not unitary (max |U†U - 1| = {deviation:e})")]
    NonUnitary { deviation: f64 },

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical domain violation: {0}")]
    Domain(String),

    #[error("synthesis failed: residual fidelity {residual_fidelity:.3e} below threshold")]
    SynthesisFailed {
        residual_fidelity: f64,
        best: Box<SynthesisResult>,
    },

    #[error("constants registry: {0}")]
    Registry(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
