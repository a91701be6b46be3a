use crate::cplx::Complex;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("finite-difference oracle failed: f is not finite at stencil point {point}")]
    Oracle { point: Complex },

    #[error("{id}: singularity at {z} (locus {locus})")]
    Singularity { id: String, z: Complex, locus: String },

    #[error("{id}: overflow evaluating at {z}")]
    Overflow { id: String, z: Complex },

    #[error("{id} is not differentiable")]
    NonDifferentiable { id: String },

    #[error("{id}: {z} lies on a non-differentiable kink (locus {locus})")]
    Kink { id: String, z: Complex, locus: String },

    #[error("unknown activation id `{0}`")]
    UnknownActivation(String),

    #[error("invalid parameter for {id}: {message}")]
    InvalidParameter { id: String, message: String },

    #[error("layer {layer}, unit {unit}: {source}")]
    AtUnit {
        layer: usize,
        unit: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("algorithm {algorithm} cannot be used with activation {id}: {reason}")]
    AlgorithmMismatch { algorithm: String, id: String, reason: String },

    #[error("assumption violated by {id} at {z}: {reason}")]
    AssumptionViolation { id: String, z: Complex, reason: String },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Strips `AtUnit` wrappers to reach the underlying cause.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtUnit { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for errors that mark a sample as unusable rather than a broken run.
    pub fn is_skippable(&self) -> bool {
        matches!(self.root(), Error::Singularity { .. } | Error::Kink { .. })
    }

    pub(crate) fn at_unit(self, layer: usize, unit: usize) -> Error {
        Error::AtUnit { layer, unit, source: Box::new(self) }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
