use thiserror::Error;

/// Errors produced by the numerical engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("jet dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("derivative order exhausted: need {needed}, have {available}")]
    OrderExhausted { needed: u8, available: u8 },

    #[error("sampling exhausted after {attempts} rejected draws")]
    SamplingExhausted { attempts: usize },

    #[error("operation not available for this ambient space: {0}")]
    WrongAmbient(&'static str),

    #[error("degenerate frame: Gram-Schmidt pivot norm {norm:e} below threshold")]
    DegenerateFrame { norm: f64 },

    #[error("singular co-frame: condition number {condition:e}")]
    SingularCoframe { condition: f64 },

    #[error("basis mismatch: {0}")]
    BasisMismatch(&'static str),

    #[error("invalid form degree {degree} for basis of dimension {dim}")]
    InvalidDegree { degree: usize, dim: usize },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
