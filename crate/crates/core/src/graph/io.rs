//! Edge-list text format.
//!
//! ```text
//! #node Z8
//! #exposure X
//! #outcome Y
//! Z1 X
//! X Y
//! ```
//!
//! One `parent child` pair per line. `#node` declares a node that may have
//! no edges. Other lines starting with `#` and blank lines are ignored.
//! Node order is order of first mention.

use std::fmt::Write as _;
use std::path::Path;

use super::{Dag, GraphError};

pub fn parse_edge_list(text: &str) -> Result<Dag, GraphError> {
    let mut nodes: Vec<String> = Vec::new();
    let mut edges: Vec<(String, String)> = Vec::new();
    let mut exposure = None;
    let mut outcome = None;
    let mention = |nodes: &mut Vec<String>, name: &str| {
        if !nodes.iter().any(|n| n == name) {
            nodes.push(name.to_string());
        }
    };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let mut parts = rest.split_whitespace();
            let (key, value) = (parts.next(), parts.next());
            let slot = match key {
                Some("exposure") => &mut exposure,
                Some("outcome") => &mut outcome,
                Some("node") => {
                    let name = value.ok_or_else(|| GraphError::Parse {
                        line: lineno,
                        message: "#node needs a name".into(),
                    })?;
                    mention(&mut nodes, name);
                    continue;
                }
                _ => continue,
            };
            let name = value.ok_or_else(|| GraphError::Parse {
                line: lineno,
                message: format!("#{} needs a name", key.unwrap_or_default()),
            })?;
            if parts.next().is_some() {
                return Err(GraphError::Parse {
                    line: lineno,
                    message: "trailing tokens after directive".into(),
                });
            }
            mention(&mut nodes, name);
            *slot = Some(name.to_string());
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let [p, c] = tokens[..] else {
            return Err(GraphError::Parse {
                line: lineno,
                message: format!("expected `parent child`, found {} tokens", tokens.len()),
            });
        };
        mention(&mut nodes, p);
        mention(&mut nodes, c);
        edges.push((p.to_string(), c.to_string()));
    }
    let exposure = exposure.ok_or(GraphError::MissingDirective("exposure"))?;
    let outcome = outcome.ok_or(GraphError::MissingDirective("outcome"))?;
    Dag::new(&nodes, &edges, &exposure, &outcome)
}

/// Serializes so that [`parse_edge_list`] reproduces the same graph,
/// including node order.
pub fn to_edge_list(g: &Dag) -> String {
    let mut out = String::new();
    for v in g.nodes() {
        let _ = writeln!(out, "#node {}", g.name(v));
    }
    let _ = writeln!(out, "#exposure {}", g.name(g.exposure()));
    let _ = writeln!(out, "#outcome {}", g.name(g.outcome()));
    for (p, c) in g.edges() {
        let _ = writeln!(out, "{} {}", g.name(p), g.name(c));
    }
    out
}

#[derive(Debug, thiserror::Error)]
pub enum EdgeListFileError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Graph { path: String, source: GraphError },
}

pub fn read_edge_list(path: &Path) -> Result<Dag, EdgeListFileError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| EdgeListFileError::Io {
        path: shown.clone(),
        source,
    })?;
    parse_edge_list(&text).map_err(|source| EdgeListFileError::Graph { path: shown, source })
}

pub fn write_edge_list(g: &Dag, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, to_edge_list(g))
}
