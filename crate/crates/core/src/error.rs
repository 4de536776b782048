use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LabError {
    #[error("descriptor mismatch: {left} vs {right}")]
    DescriptorMismatch { left: String, right: String },

    #[error("matrix is singular")]
    Singular,

    #[error("element is not in the group: membership residual {residual:e}")]
    NotInGroup { residual: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("vector is not tangent to the group: projection residual {residual:e}")]
    NotTangent { residual: f64 },

    #[error("algebra basis is not invariant under conjugation: residual {residual:e}")]
    NonInvariantBasis { residual: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("retraction basin violated (membership residual {residual:e}); refine the step")]
    RetractionBasin { residual: f64 },

    #[error("flow diverged at epsilon = {eps}")]
    FlowDiverged { eps: f64 },

    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),

    #[error("invalid deformation: {0}")]
    InvalidDeformation(String),

    #[error("inconsistent transgression: complement component {residual:e} above tolerance")]
    InconsistentTransgression { residual: f64 },

    #[error("pre-image rejected at epsilon = {eps}: residual {residual:e}")]
    RejectedPreimage { eps: f64, residual: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
