use ldp_core::citest::{ChiSquare, CiQuery, CiTest, FisherZ};
use ldp_core::data::Dataset;
use ldp_core::eval::{aggregate, ate_estimate, partition_accuracy, z1_precision_recall, ReplicateRecord};
use ldp_core::graph::{ground_truth_partition, Dag, PartitionLabel};
use ldp_core::synth::{mask_latents, named_graph, named_graph_ids, preset, presets, sample, sample_on, total_effect};
use ldp_core::Dataset64;
use PartitionLabel::*;

fn exposure_outcome_independent(data: &Dataset64, discrete: bool) -> bool {
    let q = CiQuery::marginal("X", "Y").unwrap();
    if discrete {
        ChiSquare::new(data, 0.001).unwrap().test(&q).unwrap().independent
    } else {
        FisherZ::new(data, 0.001).unwrap().test(&q).unwrap().independent
    }
}

#[test]
fn every_preset_makes_exposure_and_outcome_dependent() {
    let failing: Vec<String> = presets()
        .iter()
        .filter(|s| {
            let d: Dataset64 = sample(s, 10_000, 2024).unwrap();
            exposure_outcome_independent(&d, s.discretize)
        })
        .map(|s| s.id())
        .collect();
    assert!(failing.is_empty(), "X and Y test independent under {failing:?}");
}

#[test]
fn every_graph_has_a_process() {
    for id in named_graph_ids() {
        assert!(presets().iter().any(|s| s.graph == id), "{id}");
    }
    for s in presets() {
        assert!(named_graph_ids().contains(&s.graph.as_str()), "{}", s.id());
    }
}

#[test]
fn insertion_order_does_not_change_samples() {
    for (graph, process) in [("latent_18", "linear_bernoulli"), ("seventeen_node", "linear_gaussian")] {
        let spec = preset(graph, process).unwrap();
        let g = spec.dag().unwrap();
        let mut order = g.names().to_vec();
        order.reverse();
        let edges: Vec<(String, String)> = g.edges().map(|(a, b)| (g.name(a).into(), g.name(b).into())).collect();
        let shuffled = Dag::new(&order, &edges, "X", "Y").unwrap();
        let a: Dataset64 = sample(&spec, 500, 9).unwrap();
        let b: Dataset64 = sample_on(&spec, &shuffled, 500, 9).unwrap();
        assert_eq!(b.columns(), order.as_slice());
        for c in g.names() {
            let (x, y) = (a.column(c).unwrap(), b.column(c).unwrap());
            assert!(x.iter().zip(y).all(|(p, q)| p.to_bits() == q.to_bits()), "{graph}: {c}");
        }
    }
}

#[test]
fn sampling_is_deterministic_per_seed() {
    let spec = preset("ten_node", "quadratic_hypergeometric").unwrap();
    let a: Dataset64 = sample(&spec, 2000, 5).unwrap();
    assert_eq!(a, sample(&spec, 2000, 5).unwrap());
    assert_ne!(a, sample(&spec, 2000, 6).unwrap());
    assert_eq!(a.seed(), Some(5));
}

#[test]
fn bernoulli_roots_are_fair_coins() {
    let d: Dataset64 = sample(&preset("ten_node", "linear_bernoulli").unwrap(), 10_000, 1).unwrap();
    for root in ["Z1", "Z4", "Z5", "Z8"] {
        let col = d.column(root).unwrap();
        assert!(col.iter().all(|&v| v == 0.0 || v == 1.0));
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        assert!((mean - 0.5).abs() < 0.02, "{root}: {mean}");
    }
}

#[test]
fn csv_round_trip_is_exact() {
    let d: Dataset64 = sample(&preset("ten_node", "linear_gaussian").unwrap(), 300, 3).unwrap();
    let mut buf = Vec::new();
    d.write_csv(&mut buf).unwrap();
    let back = Dataset64::read_csv(buf.as_slice()).unwrap();
    assert_eq!(back.columns(), d.columns());
    for j in 0..d.n_cols() {
        assert_eq!(back.column_at(j), d.column_at(j));
    }
}

#[test]
fn masking_drops_columns_but_not_roles() {
    let d: Dataset64 = sample(&preset("latent_18", "linear_bernoulli").unwrap(), 50, 1).unwrap();
    assert_eq!(mask_latents::<f64, &str>(&d, &[]).unwrap(), d);
    let masked = mask_latents(&d, &["Z5a"]).unwrap();
    assert_eq!(masked.n_cols() - 2, 15);
    assert!(masked.index("Z5a").is_err());
    assert!(mask_latents(&d, &["Y"]).is_err());
}

#[test]
fn named_graph_partitions_match_their_figures() {
    let expect = |id: &str, pairs: &[(&str, PartitionLabel)]| {
        let truth = ground_truth_partition(&named_graph(id).unwrap()).unwrap();
        for &(name, label) in pairs {
            assert_eq!(truth[name], label, "{id}: {name}");
        }
    };
    let ten = [("Z1", Z1), ("Z2", Z2), ("Z3", Z3), ("Z4", Z4), ("Z5", Z5), ("Z6", Z6), ("Z7", Z7), ("Z8", Z8)];
    expect("ten_node", &ten);
    expect("ten_node_no_direct", &ten);
    expect("m_structure_13", &[("M1", Z5), ("M2", Z4), ("M3", Z2)]);
    expect("butterfly_13", &[("B1", Z1), ("B2", Z1), ("B3", Z1)]);
    expect(
        "seventeen_node",
        &[("M1", Z5), ("M2", Z4), ("M3", Z2), ("B1", Z1), ("B2", Z1), ("B3", Z1), ("Z1", Z1), ("Z3_1", Z3), ("Z3_2", Z3)],
    );
    expect(
        "complex_backdoor",
        &[("Z1_1", Z1), ("Z1_2", Z1), ("Z1_3", Z1), ("Z2_2", Z2), ("Z4", Z4), ("Z5", Z5)],
    );
    expect(
        "latent_18",
        &[("B1", Z1), ("B2", Z1), ("B3", Z1), ("Z1", Z1), ("M1", Z5), ("Z5a", Z5), ("Z5b", Z5), ("M2", Z4), ("Z4a", Z4), ("M3", Z2)],
    );
    // Confounders of the seventeen-node graph are exactly {Z1, B1, B2, B3}.
    let truth = ground_truth_partition(&named_graph("seventeen_node").unwrap()).unwrap();
    let mut z1: Vec<&str> = truth.iter().filter(|(_, &l)| l == Z1).map(|(k, _)| k.as_str()).collect();
    z1.sort();
    assert_eq!(z1, ["B1", "B2", "B3", "Z1"]);
}

#[test]
fn regression_adjustment_recovers_the_total_effect() {
    let spec = preset("ten_node", "linear_gaussian_ate").unwrap();
    assert!((total_effect(&spec, 0).unwrap() - 3.75).abs() < 1e-12);
    let d: Dataset64 = sample(&spec, 100_000, 77).unwrap();
    let adjusted = ate_estimate(&d, "X", "Y", &["Z1"]).unwrap();
    assert!((adjusted - 3.75).abs() <= 0.02, "{adjusted}");
    // Leaving the confounder out biases the estimate.
    let naive = ate_estimate::<f64, &str>(&d, "X", "Y", &[]).unwrap();
    assert!((naive - 3.75).abs() > 0.1, "{naive}");
    // Adding a pure prognostic variable keeps it unbiased.
    let wider = ate_estimate(&d, "X", "Y", &["Z1", "Z4", "Z5"]).unwrap();
    assert!((wider - 3.75).abs() <= 0.02, "{wider}");
}

#[test]
fn single_precision_estimates_track_double() {
    let spec = preset("ten_node", "linear_gaussian_ate").unwrap();
    let wide: Dataset64 = sample(&spec, 5000, 4).unwrap();
    let narrow: Dataset<f32> = sample(&spec, 5000, 4).unwrap();
    let a = ate_estimate(&wide, "X", "Y", &["Z1"]).unwrap();
    let b = ate_estimate(&narrow, "X", "Y", &["Z1"]).unwrap();
    assert!((a - f64::from(b)).abs() < 1e-3, "{a} vs {b}");
}

#[test]
fn unrelated_outcome_has_no_effect() {
    let d: Dataset64 = sample(&preset("ten_node", "linear_gaussian").unwrap(), 20_000, 8).unwrap();
    let est = ate_estimate(&d, "Z8", "Z4", &["Z1"]).unwrap();
    assert!(est.abs() < 0.05, "{est}");
}

#[test]
fn collinear_adjustment_is_rejected() {
    let x: Vec<f64> = (0..50).map(|i| f64::from(i % 7)).collect();
    let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
    let d = Dataset64::new(vec!["X".into(), "Y".into(), "C".into()], vec![x.clone(), y, x]).unwrap();
    assert!(ate_estimate(&d, "X", "Y", &["C"]).is_err());
}

#[test]
fn scores_stay_in_the_unit_interval() {
    let g = named_graph("m_structure_13").unwrap();
    let truth = ground_truth_partition(&g).unwrap();
    let mut shifted = truth.clone();
    for (i, l) in shifted.values_mut().enumerate() {
        *l = [Z1, Z4, Z5, ZPost, Z8, NotIdentifiable][i % 6];
    }
    let acc = partition_accuracy(&shifted, &truth).unwrap();
    assert!((0.0..=1.0).contains(&acc));
    for set in [vec![], vec!["Z1"], vec!["Z1", "M3", "Z4"], vec!["Z8"]] {
        let (p, r) = z1_precision_recall(&set, &truth);
        assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&r));
    }
    assert_eq!(z1_precision_recall(&["Z1", "Z4", "Z5"], &ground_truth_partition(&named_graph("ten_node").unwrap()).unwrap()), (1.0 / 3.0, 1.0));
}

#[test]
fn identical_replicates_give_zero_width_intervals() {
    let rec = ReplicateRecord {
        replicate: 0,
        seed: 1,
        partition_accuracy: 0.75,
        z1_precision: 1.0,
        z1_recall: 0.5,
        z5_passed: true,
        vas_valid: true,
        ate: Some(3.7),
        true_effect: Some(3.75),
        tests_executed: 50,
        cache_hits: 10,
        runtime_ms: None,
    };
    let report = aggregate(&vec![rec; 100]).unwrap();
    assert_eq!(report.replicates, 100);
    assert_eq!(report.ci95.partition_accuracy.low, report.ci95.partition_accuracy.high);
    assert!((report.ate_mse.unwrap() - 0.0025).abs() < 1e-12);
    assert!(report.ci95.ate_mse.unwrap().low <= report.ate_mse.unwrap());
    assert!(aggregate(&[]).is_err());
}
