use std::fmt;

use irs_core::coxeter::CoxeterError;
use irs_core::envelope::EnvelopeError;
use irs_core::irs::EngineError;
use irs_core::polygon::ComplexError;
use irs_core::shift::MeasureError;

use crate::io::FormatError;

/// Failure of a pipeline, sorted by the exit code it maps to.
#[derive(Debug)]
pub enum PipelineError {
    /// Bad arguments or inputs (exit 1).
    Usage(String),
    /// A resource cap was hit (exit 2).
    ResourceCap(String),
    /// A checked invariant does not hold (exit 3).
    Verification(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Usage(_) => 1,
            PipelineError::ResourceCap(_) => 2,
            PipelineError::Verification(_) => 3,
        }
    }
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::Usage(s) => write!(f, "error: {s}"),
            PipelineError::ResourceCap(s) => write!(f, "resource cap: {s}"),
            PipelineError::Verification(s) => write!(f, "verification failed: {s}"),
        }
    }
}

impl std::error::Error for PipelineError {}

impl From<FormatError> for PipelineError {
    fn from(e: FormatError) -> Self {
        PipelineError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for PipelineError {
    fn from(e: std::io::Error) -> Self {
        PipelineError::Usage(e.to_string())
    }
}

impl From<MeasureError> for PipelineError {
    fn from(e: MeasureError) -> Self {
        PipelineError::Usage(e.to_string())
    }
}

impl From<CoxeterError> for PipelineError {
    fn from(e: CoxeterError) -> Self {
        match e {
            CoxeterError::ResourceCap { .. } => PipelineError::ResourceCap(e.to_string()),
            _ => PipelineError::Usage(e.to_string()),
        }
    }
}

impl From<EnvelopeError> for PipelineError {
    fn from(e: EnvelopeError) -> Self {
        PipelineError::ResourceCap(e.to_string())
    }
}

impl From<ComplexError> for PipelineError {
    fn from(e: ComplexError) -> Self {
        match e {
            ComplexError::Unrecognized | ComplexError::EmptyWord => PipelineError::Usage(e.to_string()),
            _ => PipelineError::Verification(e.to_string()),
        }
    }
}

impl From<EngineError> for PipelineError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Margin { .. } => PipelineError::Usage(e.to_string()),
            EngineError::Complex(c) => c.into(),
        }
    }
}
