//! Random graph generation and brute-force graph oracles shared by the
//! integration tests. Nothing here calls the library's reachability code,
//! so the oracles stay independent of what they check.

#![allow(dead_code)]

use std::collections::BTreeSet;

use ldp_core::graph::{d_separated, Dag, NodeId};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Erdős–Rényi DAG over `n` nodes in a shuffled insertion order. The
/// exposure sits at topological position n/3 and the outcome at 2n/3;
/// graphs where they come out marginally independent are redrawn.
pub fn random_dag(n: usize, p: f64, seed: u64) -> Dag {
    assert!(n >= 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (xi, yi) = (n / 3, (2 * n / 3).max(n / 3 + 1));
    let name = |i: usize| match i {
        _ if i == xi => "X".to_string(),
        _ if i == yi => "Y".to_string(),
        _ => format!("V{i}"),
    };
    loop {
        let mut edges = Vec::new();
        for j in 0..n {
            for i in 0..j {
                if rng.random_bool(p) {
                    edges.push((name(i), name(j)));
                }
            }
        }
        let mut nodes: Vec<String> = (0..n).map(name).collect();
        nodes.shuffle(&mut rng);
        let g = Dag::new(&nodes, &edges, "X", "Y").expect("forward edges are acyclic");
        if !d_separated(&g, g.exposure(), g.outcome(), &BTreeSet::new()).unwrap() {
            return g;
        }
    }
}

/// Adds a root that only causes the outcome, a root that only causes the
/// exposure, and a direct exposure -> outcome edge. The edge keeps the
/// instrument dependent on the outcome; without a causal effect it would be
/// invisible to any test.
pub fn with_planted_anchors(g: &Dag) -> Dag {
    let mut nodes = g.names().to_vec();
    nodes.push("P4".into());
    nodes.push("I5".into());
    let mut edges: Vec<(String, String)> = g
        .edges()
        .map(|(a, b)| (g.name(a).to_string(), g.name(b).to_string()))
        .collect();
    edges.push(("P4".into(), "Y".into()));
    edges.push(("I5".into(), "X".into()));
    if !g.has_edge(g.exposure(), g.outcome()) {
        edges.push(("X".into(), "Y".into()));
    }
    Dag::new(&nodes, &edges, "X", "Y").unwrap()
}

pub fn dag_strategy(sizes: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Dag> {
    (sizes, prop_oneof![Just(0.2), Just(0.3)], any::<u64>()).prop_map(|(n, p, seed)| random_dag(n, p, seed))
}

pub fn neighbours(g: &Dag, v: NodeId) -> Vec<NodeId> {
    let mut out: Vec<NodeId> = g.parents(v).iter().chain(g.children(v)).copied().collect();
    out.sort();
    out
}

/// Every simple path from `a` to `b` avoiding `removed`.
pub fn all_paths(g: &Dag, a: NodeId, b: NodeId, removed: &[NodeId]) -> Vec<Vec<NodeId>> {
    fn walk(g: &Dag, b: NodeId, removed: &[NodeId], path: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
        let last = *path.last().unwrap();
        if last == b {
            out.push(path.clone());
            return;
        }
        for w in neighbours(g, last) {
            if removed.contains(&w) || path.contains(&w) {
                continue;
            }
            path.push(w);
            walk(g, b, removed, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    if !removed.contains(&a) {
        walk(g, b, removed, &mut vec![a], &mut out);
    }
    out
}

pub fn descendants(g: &Dag, v: NodeId) -> BTreeSet<NodeId> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        for &c in g.children(u) {
            if seen.insert(c) {
                stack.push(c);
            }
        }
    }
    seen
}

pub fn is_collider(g: &Dag, prev: NodeId, v: NodeId, next: NodeId) -> bool {
    g.has_edge(prev, v) && g.has_edge(next, v)
}

/// Per-path activity relative to `cond`.
pub fn path_active(g: &Dag, path: &[NodeId], cond: &BTreeSet<NodeId>) -> bool {
    path.windows(3).all(|w| {
        let v = w[1];
        if is_collider(g, w[0], v, w[2]) {
            cond.contains(&v) || descendants(g, v).iter().any(|d| cond.contains(d))
        } else {
            !cond.contains(&v)
        }
    })
}

pub fn dsep_brute(g: &Dag, a: NodeId, b: NodeId, cond: &BTreeSet<NodeId>) -> bool {
    !all_paths(g, a, b, &[]).iter().any(|p| path_active(g, p, cond))
}

/// Collider-free paths that start with an edge into the exposure.
pub fn open_backdoor_paths(g: &Dag) -> Vec<Vec<NodeId>> {
    let (x, y) = (g.exposure(), g.outcome());
    all_paths(g, x, y, &[])
        .into_iter()
        .filter(|p| g.has_edge(p[1], x) && path_active(g, p, &BTreeSet::new()))
        .collect()
}

/// Backdoor criterion by enumeration: no exposure descendants, and every
/// path entering the exposure is blocked.
pub fn backdoor_valid_brute(g: &Dag, set: &BTreeSet<NodeId>) -> bool {
    let (x, y) = (g.exposure(), g.outcome());
    if descendants(g, x).iter().any(|d| set.contains(d)) {
        return false;
    }
    all_paths(g, x, y, &[])
        .iter()
        .filter(|p| g.has_edge(p[1], x))
        .all(|p| !path_active(g, p, set))
}

/// Which classes of collider-free path join `z` to `target` once `excluded`
/// is deleted: (directed from z, directed into z, through a third source).
pub fn path_classes_brute(g: &Dag, z: NodeId, target: NodeId, excluded: NodeId) -> (bool, bool, bool) {
    let mut classes = (false, false, false);
    for p in all_paths(g, z, target, &[excluded]) {
        if !path_active(g, &p, &BTreeSet::new()) {
            continue;
        }
        let forward = p.windows(2).all(|w| g.has_edge(w[0], w[1]));
        let backward = p.windows(2).all(|w| g.has_edge(w[1], w[0]));
        match (forward, backward) {
            (true, _) => classes.0 = true,
            (_, true) => classes.1 = true,
            _ => classes.2 = true,
        }
    }
    classes
}

/// Random subset of `pool`, each member kept with probability `p`.
pub fn random_subset<T: Clone>(pool: &[T], p: f64, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pool.iter().filter(|_| rng.random_bool(p)).cloned().collect()
}
