use serde::Serialize;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("configuration: {0}")]
    Config(String),

    #[error("theorem hypotheses violated: {}", .0.join("; "))]
    Hypotheses(Vec<String>),

    #[error("reading {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] einlab_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success = 0,
    ChecksFailed = 1,
    ConfigError = 2,
    SolverFailed = 3,
}

impl Outcome {
    pub fn code(self) -> i32 {
        self as i32
    }
}

impl LabError {
    pub fn kind(&self) -> &'static str {
        match self {
            LabError::Config(_) => "config",
            LabError::Hypotheses(_) => "hypotheses",
            LabError::Read { .. } => "read",
            LabError::Core(_) => "core",
            LabError::Io(_) => "io",
            LabError::Json(_) => "json",
            LabError::Csv(_) => "csv",
        }
    }

    /// Everything that stops a run before or outside the solver is reported
    /// as a configuration problem.
    pub fn outcome(&self) -> Outcome {
        Outcome::ConfigError
    }
}

/// Machine-readable error record printed on failure.
#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub error: ErrorBody,
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
}

impl From<&LabError> for ErrorReport {
    fn from(err: &LabError) -> Self {
        let violations = match err {
            LabError::Hypotheses(v) => v.clone(),
            _ => Vec::new(),
        };
        ErrorReport {
            error: ErrorBody {
                kind: err.kind().into(),
                message: err.to_string(),
                exit_code: err.outcome().code(),
                violations,
            },
        }
    }
}
