use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure categories. Front ends map these onto exit codes and
/// HTTP statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorClass {
    Usage,
    Data,
    Model,
    Convergence,
    Internal,
}

impl ErrorClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorClass::Usage => "usage",
            ErrorClass::Data => "data",
            ErrorClass::Model => "model",
            ErrorClass::Convergence => "convergence",
            ErrorClass::Internal => "internal",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop ({0}, {0}) is not allowed")]
    SelfLoop(usize),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("term parse error: {0}")]
    TermParse(String),
    #[error("missing node attribute `{0}`")]
    MissingAttribute(String),
    #[error("parameter vector has length {got}, model has {expected} terms")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid control setting: {0}")]
    InvalidControl(String),
    #[error("degenerate chain: {0}")]
    Degenerate(String),
    #[error("observed density {0} has no finite logit")]
    BoundaryDensity(f64),
    #[error("complete separation: change statistic of `{0}` perfectly predicts ties")]
    Separation(String),
    #[error("information matrix is singular (term `{0}`)")]
    SingularInformation(String),
    #[error("no convergence after {iterations} iterations (last update {last_update:.3e})")]
    NonConvergence { iterations: usize, last_update: f64 },
    #[error("observed statistics lie outside the convex hull of the simulated statistics (term `{0}`)")]
    OutsideConvexHull(String),
    #[error("bridge {index} has exploding importance-weight variance (effective sample fraction {ess:.4})")]
    BridgeVariance { index: usize, ess: f64 },
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("cancelled")]
    Cancelled,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidControl(_) | Error::TermParse(_) => ErrorClass::Usage,
            Error::NodeOutOfRange { .. }
            | Error::SelfLoop(_)
            | Error::Parse { .. }
            | Error::InvalidInput(_)
            | Error::SchemaVersion { .. }
            | Error::Schema(_)
            | Error::BoundaryDensity(_)
            | Error::MissingAttribute(_)
            | Error::Io(_) => ErrorClass::Data,
            Error::InvalidModel(_) | Error::DimensionMismatch { .. } | Error::ModelMismatch(_) => {
                ErrorClass::Model
            }
            Error::Degenerate(_)
            | Error::Separation(_)
            | Error::SingularInformation(_)
            | Error::NonConvergence { .. }
            | Error::OutsideConvexHull(_)
            | Error::BridgeVariance { .. } => ErrorClass::Convergence,
            Error::Cancelled => ErrorClass::Internal,
        }
    }

    /// Stable kebab-case name of the variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NodeOutOfRange { .. } => "node-out-of-range",
            Error::SelfLoop(_) => "self-loop",
            Error::InvalidModel(_) => "invalid-model",
            Error::TermParse(_) => "term-parse",
            Error::MissingAttribute(_) => "missing-attribute",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::InvalidControl(_) => "invalid-control",
            Error::Degenerate(_) => "degenerate",
            Error::BoundaryDensity(_) => "boundary-density",
            Error::Separation(_) => "separation",
            Error::SingularInformation(_) => "singular-information",
            Error::NonConvergence { .. } => "non-convergence",
            Error::OutsideConvexHull(_) => "outside-convex-hull",
            Error::BridgeVariance { .. } => "bridge-variance",
            Error::ModelMismatch(_) => "model-mismatch",
            Error::Parse { .. } => "parse",
            Error::InvalidInput(_) => "invalid-input",
            Error::SchemaVersion { .. } => "schema-version",
            Error::Schema(_) => "schema",
            Error::Cancelled => "cancelled",
            Error::Io(_) => "io",
        }
    }
}
