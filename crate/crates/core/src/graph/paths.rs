//! Exhaustive simple-path enumeration. Exponential; kept for small graphs
//! and as a reference for the reachability-based routines.

use super::{Dag, GraphError, NodeId, NodeSet};

pub const DEFAULT_PATH_NODE_LIMIT: usize = 24;

/// All simple undirected paths from `a` to `b`, in lexicographic order of
/// their node-index sequences.
pub fn simple_paths(g: &Dag, a: NodeId, b: NodeId, limit: usize) -> Result<Vec<Vec<NodeId>>, GraphError> {
    if g.len() > limit {
        return Err(GraphError::TooManyNodes {
            nodes: g.len(),
            limit,
        });
    }
    for v in [a, b] {
        if v.0 >= g.len() {
            return Err(GraphError::UnknownNode(v.to_string()));
        }
    }
    if a == b {
        return Err(GraphError::SameEndpoints(g.name(a).to_string()));
    }
    let neighbours: Vec<Vec<NodeId>> = g
        .nodes()
        .map(|v| {
            let mut n: Vec<NodeId> = g.parents(v).iter().chain(g.children(v)).copied().collect();
            n.sort();
            n
        })
        .collect();
    let mut out = Vec::new();
    let mut path = vec![a];
    let mut on_path = vec![false; g.len()];
    on_path[a.0] = true;
    extend(&neighbours, b, &mut path, &mut on_path, &mut out);
    Ok(out)
}

fn extend(
    neighbours: &[Vec<NodeId>],
    target: NodeId,
    path: &mut Vec<NodeId>,
    on_path: &mut [bool],
    out: &mut Vec<Vec<NodeId>>,
) {
    let last = *path.last().expect("path is never empty");
    for &w in &neighbours[last.0] {
        if on_path[w.0] {
            continue;
        }
        path.push(w);
        if w == target {
            out.push(path.clone());
        } else {
            on_path[w.0] = true;
            extend(neighbours, target, path, on_path, out);
            on_path[w.0] = false;
        }
        path.pop();
    }
}

/// Per-path activity check: every interior non-collider lies outside
/// `cond`, every interior collider is in `cond` or has a descendant there.
pub fn path_is_active(g: &Dag, path: &[NodeId], cond: &NodeSet) -> bool {
    path.windows(3).all(|w| {
        let (prev, mid, next) = (w[0], w[1], w[2]);
        let collider = g.has_edge(prev, mid) && g.has_edge(next, mid);
        if collider {
            cond.contains(&mid) || g.descendants(mid).iter().any(|d| cond.contains(d))
        } else {
            !cond.contains(&mid)
        }
    })
}

/// Marginally active simple paths between `a` and `b`, with the default
/// node-count guard.
pub fn enumerate_active_paths(g: &Dag, a: NodeId, b: NodeId) -> Result<Vec<Vec<NodeId>>, GraphError> {
    enumerate_active_paths_with_limit(g, a, b, DEFAULT_PATH_NODE_LIMIT)
}

pub fn enumerate_active_paths_with_limit(
    g: &Dag,
    a: NodeId,
    b: NodeId,
    limit: usize,
) -> Result<Vec<Vec<NodeId>>, GraphError> {
    let empty = NodeSet::new();
    Ok(simple_paths(g, a, b, limit)?
        .into_iter()
        .filter(|p| path_is_active(g, p, &empty))
        .collect())
}
