use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parameter {theta} outside model interval [{lo}, {hi}]")]
    ParameterDomain { theta: f64, lo: f64, hi: f64 },

    #[error("observation {x} outside support of model `{model}`")]
    SupportDomain { x: f64, model: String },

    #[error("derivative order {0} not in 1..=4")]
    DerivativeOrder(usize),

    #[error("sample of size {n} too small, need at least {required}")]
    InsufficientData { n: usize, required: usize },

    #[error("MLE iteration did not converge after {iterations} iterations")]
    NotConverged { iterations: usize },

    #[error("MLE lies on the {0} boundary of the parameter interval")]
    BoundaryMaximizer(crate::inference::Boundary),

    #[error("non-positive curvature at the MLE (b² = {b_squared})")]
    NonPositiveCurvature { b_squared: f64 },

    #[error("score values are degenerate (all α_j equal)")]
    DegenerateScore,

    #[error("prior density vanishes at θ̂ = {theta}")]
    PriorSupport { theta: f64 },

    #[error("numerical degeneracy: {0}")]
    Numerical(String),

    #[error("no closed-form posterior for model `{model}` with prior `{prior}`")]
    UnsupportedConjugacy { model: String, prior: String },

    #[error("invalid identifier `{id}`: {reason}")]
    Parse { id: String, reason: String },

    #[error("invalid usage: {0}")]
    Usage(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad input rather than numerical trouble.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::Usage(_) | Error::UnsupportedConjugacy { .. }
        )
    }
}
