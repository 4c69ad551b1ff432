use std::path::PathBuf;

use belltensor_core::sdp::SdpStatus;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] belltensor_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: invalid JSON: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("invalid {what} '{input}': {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },

    #[error("malformed {what}: {reason}")]
    Format { what: &'static str, reason: String },

    #[error("could not build the worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl Error {
    /// True when the failure comes from a numerical solver rather than from
    /// the inputs.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::Core(belltensor_core::Error::Solver { .. } | belltensor_core::Error::NoConvergence { .. })
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(what: &'static str, input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            what,
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}

pub fn status_name(status: SdpStatus) -> &'static str {
    match status {
        SdpStatus::Optimal => "optimal",
        SdpStatus::Infeasible => "infeasible",
        SdpStatus::MaxIterations => "max_iterations",
    }
}
