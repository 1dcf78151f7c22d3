use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("topology error: {0}")]
    Topology(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("state error: {0}")]
    State(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    LinearSolver {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("fixed-point iteration did not converge after {iterations} iterations (last update {last_update:e})")]
    Convergence {
        iterations: usize,
        last_update: f64,
        history: Vec<f64>,
    },

    #[error("growth phase {phase}, iteration {iteration}: {source}")]
    Growth {
        phase: u8,
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Topology(_) => "topology",
            Error::Validation(_) => "validation",
            Error::Domain(_) => "domain",
            Error::State(_) => "state",
            Error::Singular(_) => "singular",
            Error::LinearSolver { .. } => "linear_solver",
            Error::Convergence { .. } => "convergence",
            Error::Growth { source, .. } => source.kind(),
            Error::Config(_) => "config",
            Error::Io(e) if e.to_string().starts_with("input not found") => "input_not_found",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
