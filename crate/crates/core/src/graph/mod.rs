//! DAG kernel: structure, d-separation, active-path classification,
//! ground-truth partition labels and adjustment-set validity.

mod dag;
mod dsep;
pub mod io;
mod partition;
mod paths;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dag::{Dag, NodeId, NodeSet};
pub use dsep::{d_separated, d_separated_by_name, reachable};
pub use partition::{
    classify_path_types, ground_truth_partition, is_valid_adjustment_set, PathType, PathTypePair,
};
pub use paths::{
    enumerate_active_paths, enumerate_active_paths_with_limit, path_is_active, simple_paths,
    DEFAULT_PATH_NODE_LIMIT,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid node name {0:?}")]
    InvalidName(String),
    #[error("duplicate node {0}")]
    DuplicateNode(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("self loop on {0}")]
    SelfLoop(String),
    #[error("exposure and outcome must differ")]
    ExposureIsOutcome,
    #[error("graph contains a directed cycle")]
    Cycle,
    #[error("outcome is an ancestor of the exposure")]
    OutcomeCausesExposure,
    #[error("query endpoints coincide at {0}")]
    SameEndpoints(String),
    #[error("{0} is both an endpoint and in the conditioning set")]
    EndpointConditioned(String),
    #[error("path enumeration limited to {limit} nodes, graph has {nodes}")]
    TooManyNodes { nodes: usize, limit: usize },
    #[error("{0} is the exposure or outcome, not a candidate")]
    NotACandidate(String),
    #[error("path types {pair} of {node} form an impossible combination")]
    ImpossibleCombination { node: String, pair: PathTypePair },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing #{0} directive")]
    MissingDirective(&'static str),
}

/// Causal partition of a covariate relative to the exposure/outcome pair.
///
/// `Z1`..`Z8` are ground-truth classes. `ZPost`, `Z57` and
/// `NotIdentifiable` only appear in discovery output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PartitionLabel {
    /// Confounder.
    Z1,
    /// Collider.
    Z2,
    /// Mediator.
    Z3,
    /// Outcome-only cause.
    Z4,
    /// Instrument.
    Z5,
    /// Outcome descendant.
    Z6,
    /// Exposure-only descendant.
    Z7,
    /// Isolated.
    Z8,
    /// Any of Z2, Z3, Z6.
    ZPost,
    /// Either Z5 or Z7.
    Z57,
    NotIdentifiable,
}

impl PartitionLabel {
    pub const GROUND_TRUTH: [PartitionLabel; 8] = [
        Self::Z1,
        Self::Z2,
        Self::Z3,
        Self::Z4,
        Self::Z5,
        Self::Z6,
        Self::Z7,
        Self::Z8,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Z1 => "Z1",
            Self::Z2 => "Z2",
            Self::Z3 => "Z3",
            Self::Z4 => "Z4",
            Self::Z5 => "Z5",
            Self::Z6 => "Z6",
            Self::Z7 => "Z7",
            Self::Z8 => "Z8",
            Self::ZPost => "ZPost",
            Self::Z57 => "Z57",
            Self::NotIdentifiable => "NotIdentifiable",
        }
    }

    pub fn is_ground_truth(self) -> bool {
        Self::GROUND_TRUTH.contains(&self)
    }

    /// Whether a predicted label is consistent with a ground-truth one.
    /// `ZPost` covers every post-treatment class.
    pub fn agrees_with(self, truth: PartitionLabel) -> bool {
        self == truth
            || (self == Self::ZPost && matches!(truth, Self::Z2 | Self::Z3 | Self::Z6))
    }
}

impl fmt::Display for PartitionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PartitionLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::GROUND_TRUTH
            .into_iter()
            .chain([Self::ZPost, Self::Z57, Self::NotIdentifiable])
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown partition label {s:?}"))
    }
}
