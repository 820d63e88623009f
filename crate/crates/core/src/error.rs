use std::path::PathBuf;

use thiserror::Error;

use crate::topology::TopologyKind;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("empty fleet: all sensor counts are zero")]
    EmptyFleet,

    #[error(
        "coverage deficit: best covered fraction {best:.4} after {attempts} deployment attempts (need >= {required:.4})"
    )]
    CoverageDeficit {
        best: f64,
        attempts: usize,
        required: f64,
    },

    #[error("k-means needs 1 <= k <= point count, got k={k} for {points} points")]
    InvalidClusterCount { k: usize, points: usize },

    #[error("routing cycle detected while tracing node {0}; plan invariants violated")]
    RoutingCycle(usize),

    #[error("cannot aggregate an empty window")]
    EmptyAggregation,

    #[error("training data is empty")]
    EmptyTrainingSet,

    #[error("training data must contain both classes")]
    SingleClassTraining,

    #[error("feature count mismatch: model expects {expected}, got {got}")]
    FeatureCountMismatch { expected: usize, got: usize },

    #[error("cannot score an empty instance list")]
    EmptyEvaluation,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("calibration failed: {0}")]
    CalibrationFailed(String),

    #[error("malformed dataset CSV: {0}")]
    DatasetCsv(String),

    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{topology} / t={t} / seed={seed}: {source}")]
    InRun {
        topology: TopologyKind,
        t: u32,
        seed: u32,
        #[source]
        source: Box<SimError>,
    },
}

impl SimError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SimError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn in_run(self, topology: TopologyKind, t: u32, seed: u32) -> Self {
        SimError::InRun {
            topology,
            t,
            seed,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
