use std::path::PathBuf;

/// Errors produced by the simulator, the policies and the experiment harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty instance")]
    EmptyInstance,

    #[error("invalid progress bar: {0}")]
    InvalidBar(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible rates: {0}")]
    InfeasibleRates(String),

    #[error("stalled policy at t={0}")]
    StalledPolicy(f64),

    #[error("clairvoyance required")]
    ClairvoyanceRequired,

    #[error("single-signal policy: every bar needs exactly one intermediate level (found {0})")]
    SingleSignal(usize),

    #[error("policy needs {policy} machine(s) but the instance has {instance}")]
    MachineMismatch { policy: usize, instance: usize },

    #[error("need two jobs to sample pairs")]
    NeedTwoJobs,

    #[error("candidate {0} has no computable delay oracle")]
    NoDelayOracle(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
