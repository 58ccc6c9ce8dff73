//! d-separation by ball-passing reachability over `(node, direction)` states.

use std::collections::VecDeque;

use super::{Dag, GraphError, NodeId, NodeSet};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Arrival {
    /// Reached from a child, moving against edge direction.
    FromChild,
    /// Reached from a parent, moving along edge direction.
    FromParent,
}

/// Every node reachable from `source` along a path that is active given
/// `cond`. Conditioned nodes are never reported.
pub fn reachable(g: &Dag, source: NodeId, cond: &NodeSet) -> NodeSet {
    let conditioned_or_ancestor = g.ancestral_closure(cond);
    let n = g.len();
    let mut seen_up = vec![false; n];
    let mut seen_down = vec![false; n];
    let mut out = NodeSet::new();
    let mut queue = VecDeque::from([(source, Arrival::FromChild)]);
    while let Some((v, arrival)) = queue.pop_front() {
        let seen = match arrival {
            Arrival::FromChild => &mut seen_up[v.0],
            Arrival::FromParent => &mut seen_down[v.0],
        };
        if *seen {
            continue;
        }
        *seen = true;
        let observed = cond.contains(&v);
        if !observed && v != source {
            out.insert(v);
        }
        match arrival {
            Arrival::FromChild if !observed => {
                queue.extend(g.parents(v).iter().map(|&p| (p, Arrival::FromChild)));
                queue.extend(g.children(v).iter().map(|&c| (c, Arrival::FromParent)));
            }
            Arrival::FromChild => {}
            Arrival::FromParent => {
                if !observed {
                    queue.extend(g.children(v).iter().map(|&c| (c, Arrival::FromParent)));
                }
                if conditioned_or_ancestor.contains(&v) {
                    queue.extend(g.parents(v).iter().map(|&p| (p, Arrival::FromChild)));
                }
            }
        }
    }
    out
}

/// True iff no path between `a` and `b` is active relative to `cond`.
pub fn d_separated(g: &Dag, a: NodeId, b: NodeId, cond: &NodeSet) -> Result<bool, GraphError> {
    for v in [a, b].iter().chain(cond) {
        if v.0 >= g.len() {
            return Err(GraphError::UnknownNode(v.to_string()));
        }
    }
    if a == b {
        return Err(GraphError::SameEndpoints(g.name(a).to_string()));
    }
    if cond.contains(&a) || cond.contains(&b) {
        let inside = if cond.contains(&a) { a } else { b };
        return Err(GraphError::EndpointConditioned(g.name(inside).to_string()));
    }
    Ok(!reachable(g, a, cond).contains(&b))
}

/// Name-based convenience wrapper around [`d_separated`].
pub fn d_separated_by_name<S: AsRef<str>>(g: &Dag, a: &str, b: &str, cond: &[S]) -> Result<bool, GraphError> {
    let cond = g.ids(cond.iter().map(AsRef::as_ref))?;
    d_separated(g, g.id(a)?, g.id(b)?, &cond)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> Dag {
        Dag::from_edges(&[("A", "B"), ("B", "C")], "A", "C").unwrap()
    }

    fn collider() -> Dag {
        Dag::from_edges(&[("A", "B"), ("C", "B")], "A", "C").unwrap()
    }

    #[test]
    fn mediator_blocks_chain() {
        let g = chain();
        assert!(d_separated_by_name(&g, "A", "C", &["B"]).unwrap());
        assert!(!d_separated_by_name::<&str>(&g, "A", "C", &[]).unwrap());
    }

    #[test]
    fn collider_activation() {
        let g = collider();
        assert!(d_separated_by_name::<&str>(&g, "A", "C", &[]).unwrap());
        assert!(!d_separated_by_name(&g, "A", "C", &["B"]).unwrap());
    }

    #[test]
    fn descendant_of_collider_activates() {
        let g = Dag::from_edges(&[("A", "B"), ("C", "B"), ("B", "D")], "A", "C").unwrap();
        assert!(!d_separated_by_name(&g, "A", "C", &["D"]).unwrap());
    }

    #[test]
    fn rejects_bad_queries() {
        let g = chain();
        assert!(matches!(
            d_separated_by_name::<&str>(&g, "A", "Q", &[]),
            Err(GraphError::UnknownNode(_))
        ));
        assert!(matches!(
            d_separated_by_name(&g, "A", "C", &["A"]),
            Err(GraphError::EndpointConditioned(_))
        ));
        assert!(matches!(
            d_separated_by_name::<&str>(&g, "A", "A", &[]),
            Err(GraphError::SameEndpoints(_))
        ));
    }
}
