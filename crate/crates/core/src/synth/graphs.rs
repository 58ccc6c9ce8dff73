use crate::graph::Dag;

use super::SynthError;

struct GraphDef {
    id: &'static str,
    nodes: &'static [&'static str],
    edges: &'static [(&'static str, &'static str)],
}

const TEN_NODES: &[&str] = &["X", "Y", "Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8"];

const TEN_EDGES: &[(&str, &str)] = &[
    ("X", "Y"),
    ("Y", "Z6"),
    ("Y", "Z2"),
    ("X", "Z2"),
    ("X", "Z7"),
    ("Z5", "X"),
    ("Z4", "Y"),
    ("Z1", "X"),
    ("Z1", "Y"),
    ("Z3", "Y"),
    ("X", "Z3"),
];

const DEFS: &[GraphDef] = &[
    GraphDef {
        id: "ten_node",
        nodes: TEN_NODES,
        edges: TEN_EDGES,
    },
    GraphDef {
        id: "ten_node_no_direct",
        nodes: TEN_NODES,
        edges: &[
            ("Y", "Z6"),
            ("Y", "Z2"),
            ("X", "Z2"),
            ("X", "Z7"),
            ("Z5", "X"),
            ("Z4", "Y"),
            ("Z1", "X"),
            ("Z1", "Y"),
            ("Z3", "Y"),
            ("X", "Z3"),
        ],
    },
    GraphDef {
        id: "m_structure_13",
        nodes: &["X", "Y", "Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "M1", "M2", "M3"],
        edges: &[
            ("X", "Y"),
            ("Y", "Z6"),
            ("Y", "Z2"),
            ("X", "Z2"),
            ("X", "Z7"),
            ("Z5", "X"),
            ("Z4", "Y"),
            ("Z1", "X"),
            ("Z1", "Y"),
            ("Z3", "Y"),
            ("X", "Z3"),
            ("M2", "M3"),
            ("M1", "X"),
            ("M2", "Y"),
            ("M1", "M3"),
        ],
    },
    GraphDef {
        id: "butterfly_13",
        nodes: &["X", "Y", "Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "B1", "B2", "B3"],
        edges: &[
            ("X", "Y"),
            ("Y", "Z6"),
            ("Y", "Z2"),
            ("X", "Z2"),
            ("X", "Z7"),
            ("Z5", "X"),
            ("Z4", "Y"),
            ("Z1", "X"),
            ("Z1", "Y"),
            ("Z3", "Y"),
            ("X", "Z3"),
            ("B2", "B3"),
            ("B1", "X"),
            ("B2", "Y"),
            ("B1", "B3"),
            ("B3", "X"),
            ("B3", "Y"),
        ],
    },
    GraphDef {
        id: "seventeen_node",
        nodes: &[
            "X", "Y", "Z1", "Z2", "Z3_1", "Z3_2", "Z4", "Z5", "Z6", "Z7", "Z8", "M1", "M2", "M3", "B1", "B2",
            "B3",
        ],
        edges: &[
            ("X", "Y"),
            ("Z1", "X"),
            ("Z1", "Y"),
            ("B3", "Y"),
            ("B3", "X"),
            ("B1", "X"),
            ("B2", "B3"),
            ("X", "Z2"),
            ("Y", "Z2"),
            ("X", "Z3_1"),
            ("Z3_1", "Z3_2"),
            ("Z3_2", "Y"),
            ("Z4", "Y"),
            ("X", "Z7"),
            ("M1", "X"),
            ("M2", "Y"),
            ("M2", "M3"),
            ("M1", "M3"),
            ("B2", "Y"),
            ("B1", "B3"),
            ("Y", "Z6"),
            ("Z5", "X"),
        ],
    },
    GraphDef {
        id: "complex_backdoor",
        nodes: &[
            "X", "Y", "Z1_1", "Z1_2", "Z1_3", "Z1_4", "Z1_5", "Z1_6", "Z2_1", "Z2_2", "Z3", "Z4", "Z5", "Z6",
            "Z7", "Z8",
        ],
        edges: &[
            ("X", "Z7"),
            ("Z1_2", "X"),
            ("Z1_3", "Y"),
            ("Z1_4", "Z1_3"),
            ("Z4", "Y"),
            ("Z5", "X"),
            ("Z1_5", "Z1_2"),
            ("Z1_6", "Z1_3"),
            ("Z5", "Z1_2"),
            ("Z4", "Z1_3"),
            ("Z1_4", "Z1_2"),
            ("Z1_5", "Z1_4"),
            ("Z1_6", "Z1_4"),
            ("Z1_1", "Y"),
            ("Z1_1", "X"),
            ("X", "Y"),
            ("X", "Z3"),
            ("X", "Z2_1"),
            ("Y", "Z2_1"),
            ("Y", "Z6"),
            ("Z3", "Y"),
            ("Z1_5", "Z2_2"),
            ("Z1_6", "Z2_2"),
        ],
    },
    GraphDef {
        id: "latent_18",
        nodes: &[
            "X", "Y", "Z1", "Z2", "Z3", "Z4a", "Z4b", "Z5a", "Z5b", "Z6", "Z7", "Z8", "M1", "M2", "M3", "B1",
            "B2", "B3",
        ],
        edges: &[
            ("X", "Y"),
            ("Z1", "Y"),
            ("Z1", "X"),
            ("B3", "X"),
            ("B3", "Y"),
            ("B2", "Y"),
            ("B1", "X"),
            ("B1", "B3"),
            ("B2", "B3"),
            ("Z4a", "Y"),
            ("Z4a", "Z4b"),
            ("Z5a", "X"),
            ("Z5a", "Z5b"),
            ("X", "Z7"),
            ("Y", "Z6"),
            ("X", "Z3"),
            ("Z3", "Y"),
            ("X", "Z2"),
            ("Y", "Z2"),
            ("M2", "M3"),
            ("M1", "M3"),
            ("Z6", "Z2"),
            ("M1", "X"),
            ("M2", "Y"),
        ],
    },
];

/// Identifiers accepted by [`named_graph`], besides `scaling_<k>`.
pub fn named_graph_ids() -> Vec<&'static str> {
    DEFS.iter().map(|d| d.id).collect()
}

/// Built-in graphs. `scaling_<k>` returns [`scaling_graph`] for that k.
pub fn named_graph(id: &str) -> Result<Dag, SynthError> {
    if let Some(k) = id.strip_prefix("scaling_") {
        let k: usize = k.parse().map_err(|_| SynthError::UnknownGraph(id.to_string()))?;
        return scaling_graph(k);
    }
    let def = DEFS
        .iter()
        .find(|d| d.id == id)
        .ok_or_else(|| SynthError::UnknownGraph(id.to_string()))?;
    Ok(Dag::new(def.nodes, def.edges, "X", "Y")?)
}

/// Ten-node layout with every covariate replaced by `k` copies, each wired
/// to the exposure and outcome the same way. Copies are named
/// `Z<partition>_<i>` and ordered partition by partition.
pub fn scaling_graph(k: usize) -> Result<Dag, SynthError> {
    if k == 0 {
        return Err(SynthError::InvalidSpec("scaling graph needs k >= 1".into()));
    }
    let mut nodes = vec!["X".to_string(), "Y".to_string()];
    let mut edges = vec![("X".to_string(), "Y".to_string())];
    for part in 1..=8 {
        for i in 1..=k {
            let z = format!("Z{part}_{i}");
            nodes.push(z.clone());
            let base = format!("Z{part}");
            for &(p, c) in TEN_EDGES {
                if p == base {
                    edges.push((z.clone(), c.to_string()));
                } else if c == base {
                    edges.push((p.to_string(), z.clone()));
                }
            }
        }
    }
    Ok(Dag::new(&nodes, &edges, "X", "Y")?)
}
