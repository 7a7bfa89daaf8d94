use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument {0} lies outside [-1, 1]")]
    Domain(f64),

    #[error("root refinement did not converge for node {index} of {order}")]
    NoConvergence { index: usize, order: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("function `{id}` returned a non-finite value at {at}")]
    Evaluation { id: String, at: f64 },

    #[error("`{0}` has no analytic derivative")]
    MissingDerivative(String),

    #[error("unresolved oscillation of the derivative near {near}")]
    UnresolvedOscillation { near: f64 },

    #[error("map is constant on an interval near {near}; the pushforward has no density")]
    FlatSegment { near: f64 },

    #[error("derivative changes sign inside branch [{lo}, {hi}]")]
    BranchNotMonotone { lo: f64, hi: f64 },

    #[error("unknown function `{0}`")]
    UnknownFunction(String),

    #[error("unknown density `{0}`")]
    UnknownDensity(String),

    #[error("L1 estimators disagree: trapezoid {trapezoid} vs min-form {min_form}")]
    EstimatorDisagreement { trapezoid: f64, min_form: f64 },

    #[error("degree {degree}, stage {stage}: {source}")]
    Stage {
        degree: usize,
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
