//! Named benchmark graphs, structural-equation processes, seeded sampling
//! and latent masking.

mod graphs;
mod scm;

use std::sync::OnceLock;

use thiserror::Error;

use crate::data::{DataError, Dataset};
use crate::graph::GraphError;
use crate::Scalar;

pub use graphs::{named_graph, named_graph_ids, scaling_graph};
pub use scm::{sample, sample_on, total_effect, EdgeOverride, EdgeWeights, Mechanism, NodeEquation, Noise, ScmSpec};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("unknown graph {0}")]
    UnknownGraph(String),
    #[error("no process {process} for graph {graph}")]
    UnknownProcess { graph: String, process: String },
    #[error("invalid process: {0}")]
    InvalidSpec(String),
    #[error("invalid noise distribution {0}")]
    Distribution(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Data(#[from] DataError),
}

const PRESET_JSON: &str = include_str!("../../presets/processes.json");

/// Every shipped process, parsed once.
pub fn presets() -> &'static [ScmSpec] {
    static CELL: OnceLock<Vec<ScmSpec>> = OnceLock::new();
    CELL.get_or_init(|| serde_json::from_str(PRESET_JSON).expect("shipped presets parse"))
}

pub fn preset(graph: &str, process: &str) -> Result<ScmSpec, SynthError> {
    presets()
        .iter()
        .find(|s| s.graph == graph && s.process == process)
        .cloned()
        .ok_or_else(|| SynthError::UnknownProcess {
            graph: graph.to_string(),
            process: process.to_string(),
        })
}

/// Drops unobserved columns. The exposure and outcome cannot be hidden.
pub fn mask_latents<T: Scalar, S: AsRef<str>>(data: &Dataset<T>, hidden: &[S]) -> Result<Dataset<T>, SynthError> {
    Ok(data.without_columns(hidden)?)
}
