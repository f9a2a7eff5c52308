use std::fmt;

use thiserror::Error;

/// Stages of the lifting pipeline, used to tag errors raised while lifting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftStage {
    QReduction,
    ImplementK,
    CoboundaryE,
    CoboundaryF,
    NormalizeCommutator,
}

impl fmt::Display for LiftStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LiftStage::QReduction => "q-reduction",
            LiftStage::ImplementK => "implement-k",
            LiftStage::CoboundaryE => "coboundary-e",
            LiftStage::CoboundaryF => "coboundary-f",
            LiftStage::NormalizeCommutator => "normalize-commutator",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown Cartan type `{label}` (supported: {})", supported.join(", "))]
    UnknownCartanType {
        label: String,
        supported: Vec<&'static str>,
    },

    #[error("invalid Cartan datum: {0}")]
    InvalidCartan(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("incompatible representations: {0}")]
    Incompatible(String),

    #[error("partition incompatible with representation: {0}")]
    IncompatiblePartition(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("not a module action: coboundary residual {residual:e} exceeds {tol:e}")]
    NotAModuleAction { residual: f64, tol: f64 },

    #[error("inconsistent action: {0}")]
    InconsistentAction(String),

    #[error("positivity violation: {0}")]
    PositivityViolation(String),

    #[error("internal failure: {0}")]
    Internal(String),

    #[error("{stage} failed at node {node}: {source}")]
    Stage {
        stage: LiftStage,
        node: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at(self, stage: LiftStage, node: usize) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                node,
                source: Box::new(e),
            },
        }
    }

    /// The lifting stage that produced this error, if any.
    pub fn stage(&self) -> Option<LiftStage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
