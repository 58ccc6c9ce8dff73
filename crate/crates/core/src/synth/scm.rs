use std::collections::HashMap;

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, Exp, Hypergeometric, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::graph::{Dag, NodeId};
use crate::Scalar;

use super::{named_graph, SynthError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mechanism {
    Linear,
    Quadratic,
    CubeRoot,
}

impl Mechanism {
    fn apply(self, s: f64) -> f64 {
        match self {
            Mechanism::Linear => s,
            Mechanism::Quadratic => s * s,
            Mechanism::CubeRoot => s.cbrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Noise {
    Bernoulli { p: f64 },
    Hypergeometric { population: u64, successes: u64, draws: u64 },
    Gaussian { sigma: f64 },
    Uniform { low: f64, high: f64 },
    Exponential { rate: f64 },
}

impl Noise {
    pub fn is_discrete(self) -> bool {
        matches!(self, Noise::Bernoulli { .. } | Noise::Hypergeometric { .. })
    }
}

enum Sampler {
    Bernoulli(Bernoulli),
    Hypergeometric(Hypergeometric),
    Gaussian(Normal<f64>),
    Uniform(Uniform<f64>),
    Exponential(Exp<f64>),
}

impl Sampler {
    fn new(noise: Noise) -> Result<Self, SynthError> {
        let bad = |e: &dyn std::fmt::Display| SynthError::Distribution(format!("{noise:?}: {e}"));
        Ok(match noise {
            Noise::Bernoulli { p } => Sampler::Bernoulli(Bernoulli::new(p).map_err(|e| bad(&e))?),
            Noise::Hypergeometric {
                population,
                successes,
                draws,
            } => Sampler::Hypergeometric(
                Hypergeometric::new(population, successes, draws).map_err(|e| bad(&e))?,
            ),
            Noise::Gaussian { sigma } => Sampler::Gaussian(Normal::new(0.0, sigma).map_err(|e| bad(&e))?),
            Noise::Uniform { low, high } => Sampler::Uniform(Uniform::new(low, high).map_err(|e| bad(&e))?),
            Noise::Exponential { rate } => Sampler::Exponential(Exp::new(rate).map_err(|e| bad(&e))?),
        })
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Bernoulli(d) => f64::from(u8::from(d.sample(rng))),
            Sampler::Hypergeometric(d) => d.sample(rng) as f64,
            Sampler::Gaussian(d) => d.sample(rng),
            Sampler::Uniform(d) => d.sample(rng),
            Sampler::Exponential(d) => d.sample(rng),
        }
    }
}

/// Structural equation of one node: `c * f(sum of weighted parents)`,
/// floored when discretizing, plus noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeEquation {
    pub mechanism: Mechanism,
    pub coefficient: f64,
    pub noise: Noise,
}

/// How edge weights inside the parent sum are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EdgeWeights {
    Unit,
    /// Drawn once per edge and seed from `[low, high)`.
    Uniform { low: f64, high: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeOverride {
    pub parent: String,
    pub child: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScmSpec {
    pub graph: String,
    pub process: String,
    pub equation: NodeEquation,
    /// Per-node replacements for `equation`.
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub node_equations: IndexMap<String, NodeEquation>,
    pub edge_weights: EdgeWeights,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edge_overrides: Vec<EdgeOverride>,
    pub discretize: bool,
}

impl ScmSpec {
    pub fn id(&self) -> String {
        format!("{}/{}", self.graph, self.process)
    }

    pub fn dag(&self) -> Result<Dag, SynthError> {
        named_graph(&self.graph)
    }

    pub fn equation_for(&self, node: &str) -> NodeEquation {
        self.node_equations.get(node).copied().unwrap_or(self.equation)
    }

    /// Checks internal consistency against the graph.
    pub fn validate(&self, dag: &Dag) -> Result<(), SynthError> {
        for name in self.node_equations.keys() {
            if !dag.contains(name) {
                return Err(SynthError::InvalidSpec(format!("equation for unknown node {name}")));
            }
        }
        for v in dag.nodes() {
            let eq = self.equation_for(dag.name(v));
            if eq.noise.is_discrete() != self.discretize {
                return Err(SynthError::InvalidSpec(format!(
                    "node {}: discrete noise requires discretize and continuous noise forbids it",
                    dag.name(v)
                )));
            }
            if !eq.coefficient.is_finite() {
                return Err(SynthError::InvalidSpec(format!("node {}: non-finite coefficient", dag.name(v))));
            }
            Sampler::new(eq.noise)?;
        }
        for o in &self.edge_overrides {
            let (p, c) = (dag.id(&o.parent)?, dag.id(&o.child)?);
            if !dag.has_edge(p, c) {
                return Err(SynthError::InvalidSpec(format!("override for missing edge {} -> {}", o.parent, o.child)));
            }
        }
        if let EdgeWeights::Uniform { low, high } = self.edge_weights {
            if !(low < high && low.is_finite() && high.is_finite()) {
                return Err(SynthError::InvalidSpec(format!("empty weight range [{low}, {high})")));
            }
        }
        Ok(())
    }

    /// Weight of every edge for a given seed.
    pub fn edge_weight_map(&self, dag: &Dag, seed: u64) -> Result<HashMap<(NodeId, NodeId), f64>, SynthError> {
        let mut out = HashMap::new();
        for (p, c) in dag.edges() {
            let w = match self.edge_weights {
                EdgeWeights::Unit => 1.0,
                EdgeWeights::Uniform { low, high } => {
                    let key = format!("edge:{}->{}", dag.name(p), dag.name(c));
                    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, &key));
                    rng.random_range(low..high)
                }
            };
            out.insert((p, c), w);
        }
        for o in &self.edge_overrides {
            out.insert((dag.id(&o.parent)?, dag.id(&o.child)?), o.weight);
        }
        Ok(out)
    }
}

/// FNV-1a over the key, folded with the global seed. Stable across
/// platforms and releases, unlike the std hasher.
pub(crate) fn stream_seed(seed: u64, key: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    for b in key.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Draws `n` rows. Every node has its own random stream keyed by its name
/// and `seed`, so rows do not depend on node insertion order.
pub fn sample<T: Scalar>(spec: &ScmSpec, n: usize, seed: u64) -> Result<Dataset<T>, SynthError> {
    sample_on(spec, &spec.dag()?, n, seed)
}

/// Like [`sample`] but over an explicit graph carrying the same node names
/// as `spec.dag()`, in any insertion order. Columns follow `dag`.
pub fn sample_on<T: Scalar>(spec: &ScmSpec, dag: &Dag, n: usize, seed: u64) -> Result<Dataset<T>, SynthError> {
    if n == 0 {
        return Err(SynthError::InvalidSpec("sample size must be at least 1".into()));
    }
    spec.validate(dag)?;
    let weights = spec.edge_weight_map(dag, seed)?;
    let order = dag.topological_order().expect("validated acyclic");
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); dag.len()];
    for v in order {
        let eq = spec.equation_for(dag.name(v));
        let noise = Sampler::new(eq.noise)?;
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, dag.name(v)));
        // Summed in name order so rounding is independent of insertion order.
        let mut parents = dag.parents(v).to_vec();
        parents.sort_by(|a, b| dag.name(*a).cmp(dag.name(*b)));
        let mut col = Vec::with_capacity(n);
        for row in 0..n {
            let eps = noise.draw(&mut rng);
            if parents.is_empty() {
                col.push(eps);
                continue;
            }
            let s: f64 = parents.iter().map(|&p| weights[&(p, v)] * cols[p.0][row]).sum();
            let mut m = eq.coefficient * eq.mechanism.apply(s);
            if spec.discretize {
                m = m.floor();
            }
            col.push(m + eps);
        }
        cols[v.0] = col;
    }
    let values = cols
        .into_iter()
        .map(|c| c.into_iter().map(T::from_f64_lossy).collect())
        .collect();
    let data = Dataset::new(dag.names().to_vec(), values)?
        .with_provenance(spec.id(), Some(seed))
        .with_roles(dag.name(dag.exposure()), dag.name(dag.outcome()))?;
    Ok(data)
}

/// Total causal effect of the exposure on the outcome for a linear
/// continuous process: the sum over directed paths of weight products.
pub fn total_effect(spec: &ScmSpec, seed: u64) -> Result<f64, SynthError> {
    let dag = spec.dag()?;
    spec.validate(&dag)?;
    if spec.discretize {
        return Err(SynthError::InvalidSpec("total effect needs a continuous process".into()));
    }
    let weights = spec.edge_weight_map(&dag, seed)?;
    let mut effect = vec![0.0; dag.len()];
    effect[dag.exposure().0] = 1.0;
    for v in dag.topological_order().expect("validated acyclic") {
        if v == dag.exposure() {
            continue;
        }
        let eq = spec.equation_for(dag.name(v));
        let through: f64 = dag.parents(v).iter().map(|&p| effect[p.0] * weights[&(p, v)]).sum();
        if through != 0.0 && eq.mechanism != Mechanism::Linear {
            return Err(SynthError::InvalidSpec("total effect needs linear mechanisms".into()));
        }
        effect[v.0] = eq.coefficient * through;
    }
    Ok(effect[dag.outcome().0])
}
