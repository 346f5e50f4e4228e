use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size mismatch: expected {expected} values, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid direction: {0}")]
    InvalidDirection(String),

    #[error("invalid coefficient field: {0}")]
    InvalidField(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("invalid solver options: {0}")]
    InvalidOptions(String),

    #[error("right-hand side is not mean-free: sum {sum:e} exceeds {allowed:e}")]
    Incompatible { sum: f64, allowed: f64 },

    #[error("solver did not converge in {iterations} iterations (relative residual {residual:e}, target {target:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        target: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("lattice too large for exhaustive enumeration: {edges} edges (limit {limit})")]
    TooLarge { edges: usize, limit: usize },

    #[error("geometry violation: {0}")]
    Geometry(String),

    #[error("field dump: {0}")]
    Format(String),

    #[error("field dump: bad magic {found:?}, expected {expected:?}")]
    BadMagic { expected: String, found: String },

    #[error("field dump: unsupported version {found} (supported: {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },

    #[error("field dump: truncated or oversized payload, expected {expected} bytes, found {actual}")]
    Truncated { expected: u64, actual: u64 },

    #[error("invalid configuration:\n{}", format_issues(.0))]
    Config(Vec<ConfigIssue>),

    #[error("report: {0}")]
    Report(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One configuration problem, located either by source position (syntax) or
/// by a JSON field path (semantics).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConfigIssue {
    pub path: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

impl std::fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            _ => write!(f, "{}: {}", self.path, self.message),
        }
    }
}

fn format_issues(issues: &[ConfigIssue]) -> String {
    issues.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n")
}

impl Error {
    /// Stable short name of the variant, used in structured error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SizeMismatch { .. } => "size_mismatch",
            Error::InvalidLattice(_) => "invalid_lattice",
            Error::InvalidDirection(_) => "invalid_direction",
            Error::InvalidField(_) => "invalid_field",
            Error::InvalidEnsemble(_) => "invalid_ensemble",
            Error::InvalidOptions(_) => "invalid_options",
            Error::Incompatible { .. } => "incompatible",
            Error::NotConverged { .. } => "not_converged",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::TooLarge { .. } => "too_large",
            Error::Geometry(_) => "geometry",
            Error::Format(_) => "format",
            Error::BadMagic { .. } => "bad_magic",
            Error::UnsupportedVersion { .. } => "unsupported_version",
            Error::Truncated { .. } => "truncated",
            Error::Config(_) => "config",
            Error::Report(_) => "report",
            Error::Io(_) => "io",
        }
    }
}
