mod common;

use std::collections::BTreeSet;

use ldp_core::graph::{
    classify_path_types, d_separated, d_separated_by_name, enumerate_active_paths, ground_truth_partition,
    is_valid_adjustment_set, io, Dag, NodeId, PartitionLabel, PathType,
};
use ldp_core::synth::named_graph;
use proptest::prelude::*;

use common::*;

fn cond_from_mask(g: &Dag, mask: u64, skip: &[NodeId]) -> BTreeSet<NodeId> {
    g.nodes()
        .filter(|v| !skip.contains(v) && mask >> v.0 & 1 == 1)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn dsep_matches_path_enumeration(g in dag_strategy(4..=12), picks in prop::collection::vec((any::<usize>(), any::<usize>(), any::<u64>()), 4)) {
        for (i, j, mask) in picks {
            let a = NodeId(i % g.len());
            let b = NodeId(j % g.len());
            if a == b {
                continue;
            }
            let cond = cond_from_mask(&g, mask, &[a, b]);
            let fast = d_separated(&g, a, b, &cond).unwrap();
            prop_assert_eq!(fast, dsep_brute(&g, a, b, &cond), "{} vs {} given {:?}", g.name(a), g.name(b), g.names_of(&cond));
            prop_assert_eq!(fast, d_separated(&g, b, a, &cond).unwrap());
        }
    }

    #[test]
    fn partition_is_exhaustive_and_exclusive(g in dag_strategy(4..=12)) {
        let truth = ground_truth_partition(&g).unwrap();
        prop_assert_eq!(truth.len(), g.len() - 2);
        for z in g.candidates() {
            let pair = classify_path_types(&g, z).unwrap();
            let label = pair.label();
            prop_assert!(label.is_some(), "{} landed on an empty cell {}", g.name(z), pair);
            prop_assert!(label.unwrap().is_ground_truth());
            prop_assert_eq!(truth[g.name(z)], label.unwrap());
            for (rel, target, excluded) in [(pair.rel_x, g.exposure(), g.outcome()), (pair.rel_y, g.outcome(), g.exposure())] {
                let expected = match path_classes_brute(&g, z, target, excluded) {
                    (false, false, false) => PathType::Type1,
                    (true, false, false) => PathType::Type2,
                    (false, true, false) => PathType::Type3,
                    (false, false, true) => PathType::Type4,
                    (true, false, true) => PathType::Type5,
                    (false, true, true) => PathType::Type6,
                    other => panic!("directed both ways: {other:?}"),
                };
                prop_assert_eq!(rel, expected, "{} toward {}", g.name(z), g.name(target));
            }
        }
    }

    #[test]
    fn true_confounders_form_a_valid_set(g in dag_strategy(4..=12)) {
        let truth = ground_truth_partition(&g).unwrap();
        let z1 = g.ids(truth.iter().filter(|(_, &l)| l == PartitionLabel::Z1).map(|(n, _)| n)).unwrap();
        prop_assert!(is_valid_adjustment_set(&g, &z1).unwrap());
        prop_assert!(backdoor_valid_brute(&g, &z1));
    }

    #[test]
    fn validity_matches_backdoor_enumeration(g in dag_strategy(4..=10), mask in any::<u64>()) {
        let set = cond_from_mask(&g, mask, &[g.exposure(), g.outcome()]);
        prop_assert_eq!(is_valid_adjustment_set(&g, &set).unwrap(), backdoor_valid_brute(&g, &set));
    }

    #[test]
    fn descendant_closure_matches_walk(g in dag_strategy(3..=12)) {
        for v in g.nodes() {
            prop_assert_eq!(g.descendants(v), descendants(&g, v));
            prop_assert!(!g.descendants(v).contains(&v));
            for a in g.ancestors(v) {
                prop_assert!(descendants(&g, a).contains(&v));
            }
        }
    }

    #[test]
    fn edge_list_round_trips(g in dag_strategy(3..=12)) {
        let back = io::parse_edge_list(&io::to_edge_list(&g)).unwrap();
        prop_assert_eq!(back, g);
    }
}

fn names(g: &Dag, set: &BTreeSet<NodeId>) -> Vec<String> {
    let mut v = g.names_of(set);
    v.sort();
    v
}

#[test]
fn chain_and_collider() {
    let chain = Dag::from_edges(&[("A", "B"), ("B", "C")], "A", "C").unwrap();
    assert!(d_separated_by_name(&chain, "A", "C", &["B"]).unwrap());
    assert_eq!(names(&chain, &chain.descendants(chain.id("A").unwrap())), ["B", "C"]);
    assert!(chain.descendants(chain.id("C").unwrap()).is_empty());

    let collider = Dag::from_edges(&[("A", "B"), ("C", "B")], "A", "C").unwrap();
    assert!(d_separated_by_name::<&str>(&collider, "A", "C", &[]).unwrap());
    assert!(!d_separated_by_name(&collider, "A", "C", &["B"]).unwrap());
    assert!(d_separated_by_name(&collider, "A", "A", &["B"]).is_err());
    assert!(d_separated_by_name(&collider, "A", "C", &["A"]).is_err());
    assert!(d_separated_by_name(&collider, "A", "Q", &["B"]).is_err());
}

#[test]
fn ten_node_examples() {
    let g = named_graph("ten_node").unwrap();
    assert!(d_separated_by_name(&g, "Z5", "Y", &["X", "Z1"]).unwrap());
    assert_eq!(names(&g, &g.descendants(g.exposure())), ["Y", "Z2", "Z3", "Z6", "Z7"]);

    let z1 = g.ids(["Z1"]).unwrap();
    assert!(is_valid_adjustment_set(&g, &z1).unwrap());
    assert!(!is_valid_adjustment_set(&g, &g.ids(["Z3"]).unwrap()).unwrap());

    // Active paths between the exposure and outcome, frozen from brute force.
    let brute: BTreeSet<Vec<String>> = all_paths(&g, g.exposure(), g.outcome(), &[])
        .into_iter()
        .filter(|p| path_active(&g, p, &BTreeSet::new()))
        .map(|p| p.iter().map(|&v| g.name(v).to_string()).collect())
        .collect();
    let expected: BTreeSet<Vec<String>> = [vec!["X", "Y"], vec!["X", "Z1", "Y"], vec!["X", "Z3", "Y"]]
        .into_iter()
        .map(|p| p.into_iter().map(String::from).collect())
        .collect();
    assert_eq!(brute, expected);
    let found: BTreeSet<Vec<String>> = enumerate_active_paths(&g, g.exposure(), g.outcome())
        .unwrap()
        .into_iter()
        .map(|p| p.iter().map(|&v| g.name(v).to_string()).collect())
        .collect();
    assert_eq!(found, expected);
}

#[test]
fn m_structure_examples() {
    let g = named_graph("m_structure_13").unwrap();
    let m3 = classify_path_types(&g, g.id("M3").unwrap()).unwrap();
    assert_eq!((m3.rel_x, m3.rel_y), (PathType::Type4, PathType::Type4));
    assert_eq!(m3.label(), Some(PartitionLabel::Z2));
    // Conditioning on the M-collider opens X <- M1 -> M3 <- M2 -> Y.
    let set = g.ids(["Z1", "M3"]).unwrap();
    assert!(!is_valid_adjustment_set(&g, &set).unwrap());
    assert!(!backdoor_valid_brute(&g, &set));
}

#[test]
fn isolated_node_is_z8() {
    let g = Dag::new(&["X", "Y", "W"], &[("X", "Y")], "X", "Y").unwrap();
    assert_eq!(ground_truth_partition(&g).unwrap()["W"], PartitionLabel::Z8);
}
