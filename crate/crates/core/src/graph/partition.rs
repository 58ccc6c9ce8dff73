//! Active-path types and ground-truth partition lookup.
//!
//! A marginally active path is collider-free, so it has a unique source.
//! Its class is decided by that source: the candidate itself (directed
//! away from the candidate), the target (directed into the candidate), or
//! some third node (confounded). Existence of each class reduces to
//! reachability, which is what is computed here; path enumeration is only
//! used by the tests to cross-check.

use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{d_separated, Dag, GraphError, NodeId, NodeSet, PartitionLabel};

/// Set of active-path classes linking a candidate to one endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PathType {
    /// No active path.
    Type1,
    /// Only directed paths from the candidate.
    Type2,
    /// Only directed paths into the candidate.
    Type3,
    /// Only confounded paths.
    Type4,
    /// Directed from the candidate plus confounded.
    Type5,
    /// Directed into the candidate plus confounded.
    Type6,
}

impl PathType {
    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathTypePair {
    pub rel_x: PathType,
    pub rel_y: PathType,
}

impl fmt::Display for PathTypePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} to exposure, {:?} to outcome)", self.rel_x, self.rel_y)
    }
}

use PartitionLabel::*;

/// Rows: relation to the outcome. Columns: relation to the exposure.
/// `None` marks combinations that cannot arise in an acyclic graph.
const GRID: [[Option<PartitionLabel>; 6]; 6] = [
    [Some(Z8), Some(Z5), Some(Z7), Some(Z5), Some(Z5), Some(Z7)],
    [Some(Z4), Some(Z1), Some(Z3), Some(Z1), Some(Z1), Some(Z3)],
    [Some(Z6), None, Some(Z2), Some(Z2), None, Some(Z2)],
    [Some(Z4), Some(Z1), Some(Z2), Some(Z2), Some(Z1), Some(Z2)],
    [Some(Z4), Some(Z1), Some(Z3), Some(Z1), Some(Z1), Some(Z3)],
    [Some(Z6), None, Some(Z2), Some(Z2), None, Some(Z2)],
];

impl PathTypePair {
    pub fn label(self) -> Option<PartitionLabel> {
        GRID[self.rel_y.index()][self.rel_x.index()]
    }
}

/// Classes of marginally active paths between `z` and `target` in the
/// graph with `excluded` deleted.
fn relation(g: &Dag, z: NodeId, target: NodeId, excluded: NodeId) -> PathType {
    let from_z = g.descendants_avoiding(z, &[excluded]).contains(&target);
    let into_z = g.descendants_avoiding(target, &[excluded]).contains(&z);
    // Two directed paths sharing a source can always be trimmed to a
    // common-source pair that is disjoint, so ancestor overlap suffices.
    let up_from_z = g.ancestors_avoiding(z, &[target, excluded]);
    let up_from_t = g.ancestors_avoiding(target, &[z, excluded]);
    let confounded = up_from_z.intersection(&up_from_t).next().is_some();
    match (from_z, into_z, confounded) {
        (false, false, false) => PathType::Type1,
        (true, false, false) => PathType::Type2,
        (false, true, false) => PathType::Type3,
        (false, false, true) => PathType::Type4,
        (true, false, true) => PathType::Type5,
        (false, true, true) => PathType::Type6,
        (true, true, _) => unreachable!("directed paths both ways imply a cycle"),
    }
}

/// Path-type pair of candidate `z`: its relation to the exposure ignoring
/// the outcome, and to the outcome ignoring the exposure.
pub fn classify_path_types(g: &Dag, z: NodeId) -> Result<PathTypePair, GraphError> {
    if z.0 >= g.len() {
        return Err(GraphError::UnknownNode(z.to_string()));
    }
    let (x, y) = (g.exposure(), g.outcome());
    if z == x || z == y {
        return Err(GraphError::NotACandidate(g.name(z).to_string()));
    }
    Ok(PathTypePair {
        rel_x: relation(g, z, x, y),
        rel_y: relation(g, z, y, x),
    })
}

/// Ground-truth label for every candidate, in node order.
pub fn ground_truth_partition(g: &Dag) -> Result<IndexMap<String, PartitionLabel>, GraphError> {
    g.candidates()
        .into_iter()
        .map(|z| {
            let pair = classify_path_types(g, z)?;
            let label = pair.label().ok_or_else(|| GraphError::ImpossibleCombination {
                node: g.name(z).to_string(),
                pair,
            })?;
            Ok((g.name(z).to_string(), label))
        })
        .collect()
}

/// Backdoor criterion: no exposure descendants, and the set separates
/// exposure from outcome once the exposure's out-edges are removed.
pub fn is_valid_adjustment_set(g: &Dag, set: &NodeSet) -> Result<bool, GraphError> {
    let (x, y) = (g.exposure(), g.outcome());
    for &v in set {
        if v.0 >= g.len() {
            return Err(GraphError::UnknownNode(v.to_string()));
        }
        if v == x || v == y {
            return Err(GraphError::EndpointConditioned(g.name(v).to_string()));
        }
    }
    if g.descendants(x).iter().any(|d| set.contains(d)) {
        return Ok(false);
    }
    d_separated(&g.without_out_edges(x), x, y, set)
}
