use thiserror::Error;

/// Errors raised by the library. Every variant names the module that
/// raised it so that CLI messages point at the violated precondition.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{module}: invalid argument: {msg}")]
    Argument { module: &'static str, msg: String },

    #[error("{module}: outside domain: {msg}")]
    Domain { module: &'static str, msg: String },

    #[error("{module}: insufficient stencil at node ({i}, {j})")]
    InsufficientStencil { module: &'static str, i: usize, j: usize },

    #[error("{module}: numerical failure: {msg}")]
    Numeric { module: &'static str, msg: String },

    #[error("{module}: singular point: {msg}")]
    Singular { module: &'static str, msg: String },

    #[error("{module}: unsupported: {msg}")]
    Unsupported { module: &'static str, msg: String },

    #[error("radialfamily: admissibility violated: 4c + y^2 rho(y)^2 = {value:e} < 0 at y = {y}")]
    Admissibility { y: f64, value: f64 },

    #[error("radialfamily: turning point near t = {t}; the profile stops being a graph over s")]
    TurningPoint { t: f64 },

    #[error("radialfamily: no admissible c reproduces r = {r}; attainable r lies in [{lo}, {hi})")]
    NoSolution { r: f64, lo: f64, hi: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Argument { module, msg: msg.into() }
    }

    pub(crate) fn domain(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { module, msg: msg.into() }
    }

    pub(crate) fn numeric(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Numeric { module, msg: msg.into() }
    }

    pub(crate) fn singular(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Singular { module, msg: msg.into() }
    }

    pub(crate) fn unsupported(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Unsupported { module, msg: msg.into() }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
