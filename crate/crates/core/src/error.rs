use std::path::PathBuf;

use crate::{NodeId, TargetId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid measurement variance {0}: must be positive")]
    InvalidMeasurement(f64),

    #[error("singular innovation covariance")]
    NumericalFailure,

    #[error("target {target} already classified by node {node}")]
    DoubleClassification { node: NodeId, target: TargetId },

    #[error("invalid variance {sigma} for node {node}, target {target}")]
    InvalidState {
        node: NodeId,
        target: TargetId,
        sigma: f64,
    },

    #[error("report from node {0} which was not selected")]
    UnselectedReport(NodeId),

    #[error("duplicate report from node {0}")]
    DuplicateReport(NodeId),

    #[error("config: {key}: {reason}")]
    Config { key: String, reason: String },

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("unknown selection strategy `{0}`")]
    UnknownStrategy(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(key: &str, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
