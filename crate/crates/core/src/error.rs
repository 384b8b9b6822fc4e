use thiserror::Error;

/// Errors produced by the models, estimators and simulation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of a model or estimator.
    #[error("domain error: {0}")]
    Domain(String),

    /// A position is not inside any corridor or room.
    #[error("placement error: ({x}, {y}) is outside every corridor and room")]
    Placement { x: f64, y: f64 },

    /// The corridor graph has no path between two points.
    #[error("no route between ({0}, {1}) and ({2}, {3})")]
    NoRoute(f64, f64, f64, f64),

    /// A route falls outside the validity range of a model.
    #[error("out of model: {0}")]
    OutOfModel(String),

    /// Inputs do not share the expected shape.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A regression design matrix is singular.
    #[error("rank deficient design: {0}")]
    Rank(String),

    /// Invalid configuration or scene content.
    #[error("config error: {0}")]
    Config(String),

    /// A scene invariant does not hold; the message names the offending item.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// Scene text could not be parsed.
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Placement { .. } => "placement",
            Error::NoRoute(..) => "no-route",
            Error::OutOfModel(_) => "out-of-model",
            Error::Dimension(_) => "dimension",
            Error::Rank(_) => "rank",
            Error::Config(_) => "config",
            Error::Invariant(_) => "invariant",
            Error::Syntax { .. } => "syntax",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
