use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::GraphError;

/// Index of a node in a [`Dag`]. Indices follow insertion order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Node set ordered by insertion order of the owning graph.
pub type NodeSet = BTreeSet<NodeId>;

/// Directed acyclic graph over named variables with a designated
/// exposure/outcome pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    names: Vec<String>,
    lookup: HashMap<String, NodeId>,
    parents: Vec<Vec<NodeId>>,
    children: Vec<Vec<NodeId>>,
    exposure: NodeId,
    outcome: NodeId,
}

impl Dag {
    /// Builds a graph from an explicit node list and edge list.
    ///
    /// Fails on duplicate names, unknown endpoints, self loops, cycles, and
    /// when the outcome is an ancestor of the exposure.
    pub fn new<S: AsRef<str>>(
        nodes: &[S],
        edges: &[(S, S)],
        exposure: &str,
        outcome: &str,
    ) -> Result<Self, GraphError> {
        let mut names = Vec::with_capacity(nodes.len());
        let mut lookup = HashMap::with_capacity(nodes.len());
        for name in nodes {
            let name = name.as_ref();
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(GraphError::InvalidName(name.to_string()));
            }
            if lookup.insert(name.to_string(), NodeId(names.len())).is_some() {
                return Err(GraphError::DuplicateNode(name.to_string()));
            }
            names.push(name.to_string());
        }
        let mut parents = vec![Vec::new(); names.len()];
        let mut children = vec![Vec::new(); names.len()];
        for (p, c) in edges {
            let (p, c) = (p.as_ref(), c.as_ref());
            let pi = *lookup
                .get(p)
                .ok_or_else(|| GraphError::UnknownNode(p.to_string()))?;
            let ci = *lookup
                .get(c)
                .ok_or_else(|| GraphError::UnknownNode(c.to_string()))?;
            if pi == ci {
                return Err(GraphError::SelfLoop(p.to_string()));
            }
            if children[pi.0].contains(&ci) {
                continue;
            }
            children[pi.0].push(ci);
            parents[ci.0].push(pi);
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort();
        }
        let exposure = *lookup
            .get(exposure)
            .ok_or_else(|| GraphError::UnknownNode(exposure.to_string()))?;
        let outcome = *lookup
            .get(outcome)
            .ok_or_else(|| GraphError::UnknownNode(outcome.to_string()))?;
        if exposure == outcome {
            return Err(GraphError::ExposureIsOutcome);
        }
        let dag = Dag {
            names,
            lookup,
            parents,
            children,
            exposure,
            outcome,
        };
        if dag.topological_order().is_none() {
            return Err(GraphError::Cycle);
        }
        if dag.descendants(outcome).contains(&exposure) {
            return Err(GraphError::OutcomeCausesExposure);
        }
        Ok(dag)
    }

    /// Builds a graph whose node order is the order of first appearance in
    /// the edge list.
    pub fn from_edges(edges: &[(&str, &str)], exposure: &str, outcome: &str) -> Result<Self, GraphError> {
        let mut nodes: Vec<&str> = Vec::new();
        for name in edges.iter().flat_map(|(p, c)| [*p, *c]).chain([exposure, outcome]) {
            if !nodes.contains(&name) {
                nodes.push(name);
            }
        }
        Self::new(&nodes, edges, exposure, outcome)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn exposure(&self) -> NodeId {
        self.exposure
    }

    pub fn outcome(&self) -> NodeId {
        self.outcome
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.names.len()).map(NodeId)
    }

    /// All nodes other than the exposure and outcome, in insertion order.
    pub fn candidates(&self) -> Vec<NodeId> {
        self.nodes()
            .filter(|&v| v != self.exposure && v != self.outcome)
            .collect()
    }

    pub fn candidate_names(&self) -> Vec<String> {
        self.candidates().into_iter().map(|v| self.name(v).to_string()).collect()
    }

    pub fn name(&self, v: NodeId) -> &str {
        &self.names[v.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id(&self, name: &str) -> Result<NodeId, GraphError> {
        self.lookup
            .get(name)
            .copied()
            .ok_or_else(|| GraphError::UnknownNode(name.to_string()))
    }

    pub fn ids<S: AsRef<str>>(&self, names: impl IntoIterator<Item = S>) -> Result<NodeSet, GraphError> {
        names.into_iter().map(|n| self.id(n.as_ref())).collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.lookup.contains_key(name)
    }

    pub fn parents(&self, v: NodeId) -> &[NodeId] {
        &self.parents[v.0]
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v.0]
    }

    pub fn has_edge(&self, from: NodeId, to: NodeId) -> bool {
        self.children[from.0].binary_search(&to).is_ok()
    }

    /// Edges as `(parent, child)` pairs, grouped by parent in node order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes()
            .flat_map(move |p| self.children[p.0].iter().map(move |&c| (p, c)))
    }

    pub fn edge_count(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    /// Kahn's algorithm; ties broken by insertion order.
    pub fn topological_order(&self) -> Option<Vec<NodeId>> {
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<NodeId> = self.nodes().filter(|v| indegree[v.0] == 0).collect();
        let mut order = Vec::with_capacity(self.len());
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &c in &self.children[v.0] {
                indegree[c.0] -= 1;
                if indegree[c.0] == 0 {
                    ready.insert(c);
                }
            }
        }
        (order.len() == self.len()).then_some(order)
    }

    fn closure<'a>(&'a self, start: NodeId, step: impl Fn(NodeId) -> &'a [NodeId], skip: &[NodeId]) -> NodeSet {
        let mut seen = NodeSet::new();
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in step(v) {
                if w == start || skip.contains(&w) {
                    continue;
                }
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Strict descendants of `v`.
    pub fn descendants(&self, v: NodeId) -> NodeSet {
        self.closure(v, |u| self.children(u), &[])
    }

    /// Strict ancestors of `v`.
    pub fn ancestors(&self, v: NodeId) -> NodeSet {
        self.closure(v, |u| self.parents(u), &[])
    }

    /// Strict descendants of `v` in the graph with `removed` deleted.
    pub fn descendants_avoiding(&self, v: NodeId, removed: &[NodeId]) -> NodeSet {
        self.closure(v, |u| self.children(u), removed)
    }

    /// Strict ancestors of `v` in the graph with `removed` deleted.
    pub fn ancestors_avoiding(&self, v: NodeId, removed: &[NodeId]) -> NodeSet {
        self.closure(v, |u| self.parents(u), removed)
    }

    /// Ancestors of any node in `set`, including the members themselves.
    pub fn ancestral_closure(&self, set: &NodeSet) -> NodeSet {
        let mut out = set.clone();
        for &v in set {
            out.extend(self.ancestors(v));
        }
        out
    }

    /// Copy of the graph with every edge leaving `v` deleted.
    pub fn without_out_edges(&self, v: NodeId) -> Dag {
        let mut g = self.clone();
        for c in std::mem::take(&mut g.children[v.0]) {
            g.parents[c.0].retain(|&p| p != v);
        }
        g
    }

    pub fn names_of<'a>(&'a self, set: impl IntoIterator<Item = &'a NodeId>) -> Vec<String> {
        set.into_iter().map(|&v| self.name(v).to_string()).collect()
    }
}
