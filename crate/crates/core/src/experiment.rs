//! Replicated benchmark runs and oracle test-count scaling.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::citest::{ChiSquare, CiError, CiTest, FisherZ, OracleTester};
use crate::data::Dataset;
use crate::eval::{aggregate, ate_estimate, partition_accuracy, z1_precision_recall, EvalError, MetricsReport, ReplicateRecord};
use crate::graph::{ground_truth_partition, is_valid_adjustment_set, Dag, GraphError};
use crate::ldp::{run_ldp, select_covariates, Criterion, LdpError};
use crate::synth::{mask_latents, named_graph, preset, sample, scaling_graph, total_effect, ScmSpec, SynthError};

pub const CONFIG_SCHEMA: u32 = 1;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Test(#[from] CiError),
    #[error(transparent)]
    Ldp(#[from] LdpError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    Oracle,
    FisherZ,
    ChiSquare,
}

fn default_alpha() -> f64 {
    0.01
}

/// One benchmark configuration. `process_id` and `n` are ignored by the
/// oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub graph_id: String,
    #[serde(default)]
    pub process_id: Option<String>,
    #[serde(default)]
    pub n: usize,
    pub replicates: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub test: TestKind,
    #[serde(default)]
    pub hidden: Vec<String>,
    pub seed: u64,
    #[serde(default)]
    pub criterion: Criterion,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks the config against the named graph and process.
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::Config(m));
        if self.schema != CONFIG_SCHEMA {
            return bad(format!("schema {} is not supported, expected {CONFIG_SCHEMA}", self.schema));
        }
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        let g = named_graph(&self.graph_id)?;
        let candidates = g.candidate_names();
        for h in &self.hidden {
            if !candidates.contains(h) {
                return bad(format!("hidden variable {h} is not a candidate of {}", self.graph_id));
            }
        }
        if self.test == TestKind::Oracle {
            return Ok(());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha {} outside (0, 1)", self.alpha));
        }
        if self.n == 0 {
            return bad("n must be at least 1 for data-driven tests".into());
        }
        let Some(process) = &self.process_id else {
            return bad("process_id is required for data-driven tests".into());
        };
        let spec = preset(&self.graph_id, process)?;
        if self.test == TestKind::ChiSquare && !spec.discretize {
            return bad(format!("chi_square needs a discrete process, {} is continuous", spec.id()));
        }
        Ok(())
    }

    fn replicate_seed(&self, i: usize) -> u64 {
        self.seed.wrapping_add(i as u64)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; 0 means one per available core.
    pub workers: usize,
    /// Record wall time. Off by default so outputs are byte-stable.
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub records: Vec<ReplicateRecord>,
    pub report: MetricsReport,
}

struct Setup {
    graph: Dag,
    spec: Option<ScmSpec>,
    observed: Vec<String>,
    truth: indexmap::IndexMap<String, crate::graph::PartitionLabel>,
}

pub fn run_experiment(cfg: &ExperimentConfig, opts: RunOptions) -> Result<ExperimentOutput, ExperimentError> {
    cfg.validate()?;
    let graph = named_graph(&cfg.graph_id)?;
    let observed: Vec<String> = graph
        .candidate_names()
        .into_iter()
        .filter(|c| !cfg.hidden.contains(c))
        .collect();
    let full_truth = ground_truth_partition(&graph)?;
    let truth = observed.iter().map(|c| (c.clone(), full_truth[c])).collect();
    let spec = match (cfg.test, &cfg.process_id) {
        (TestKind::Oracle, _) | (_, None) => None,
        (_, Some(p)) => Some(preset(&cfg.graph_id, p)?),
    };
    let setup = Setup {
        graph,
        spec,
        observed,
        truth,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))?;
    let records = pool.install(|| {
        (0..cfg.replicates)
            .into_par_iter()
            .map(|i| run_replicate(cfg, &setup, i, opts.timing))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let report = aggregate(&records)?;
    Ok(ExperimentOutput { records, report })
}

fn run_replicate(cfg: &ExperimentConfig, setup: &Setup, i: usize, timing: bool) -> Result<ReplicateRecord, ExperimentError> {
    let seed = cfg.replicate_seed(i);
    let x = setup.graph.name(setup.graph.exposure()).to_string();
    let y = setup.graph.name(setup.graph.outcome()).to_string();
    let mut data: Option<Dataset<f64>> = None;
    let tester: Box<dyn CiTest> = match cfg.test {
        TestKind::Oracle => Box::new(OracleTester::new(setup.graph.clone())),
        kind => {
            let spec = setup.spec.as_ref().expect("validated process");
            let full: Dataset<f64> = sample(spec, cfg.n, seed)?;
            let d = mask_latents(&full, &cfg.hidden)?;
            let t: Box<dyn CiTest> = if kind == TestKind::FisherZ {
                Box::new(FisherZ::new(&d, cfg.alpha)?)
            } else {
                Box::new(ChiSquare::new(&d, cfg.alpha)?)
            };
            data = Some(d);
            t
        }
    };
    let start = Instant::now();
    let result = run_ldp(tester.as_ref(), &setup.observed, &x, &y)?;
    let runtime_ms = timing.then(|| start.elapsed().as_secs_f64() * 1e3);

    let selected = select_covariates(&result, cfg.criterion);
    let (z1_precision, z1_recall) = z1_precision_recall(&selected, &setup.truth);
    let vas_valid = result.z5_criterion_passed && is_valid_adjustment_set(&setup.graph, &setup.graph.ids(&selected)?)?;
    let true_effect = setup.spec.as_ref().and_then(|s| total_effect(s, seed).ok());
    let ate = match (&data, true_effect) {
        (Some(d), Some(_)) => Some(ate_estimate(d, &x, &y, &selected)?),
        _ => None,
    };
    Ok(ReplicateRecord {
        replicate: i,
        seed,
        partition_accuracy: partition_accuracy(&result.labels, &setup.truth)?,
        z1_precision,
        z1_recall,
        z5_passed: result.z5_criterion_passed,
        vas_valid,
        ate,
        true_effect,
        tests_executed: result.counters.executed,
        cache_hits: result.counters.cache_hits,
        runtime_ms,
    })
}

/// Column order of experiment CSV files. Replicate rows leave the interval
/// columns blank; the final `aggregate` row leaves `replicate` and `seed`
/// blank.
pub const EXPERIMENT_COLUMNS: &[&str] = &[
    "row",
    "replicate",
    "seed",
    "graph",
    "process",
    "test",
    "n",
    "alpha",
    "hidden",
    "criterion",
    "partition_accuracy",
    "partition_accuracy_lo",
    "partition_accuracy_hi",
    "z1_precision",
    "z1_precision_lo",
    "z1_precision_hi",
    "z1_recall",
    "z1_recall_lo",
    "z1_recall_hi",
    "z5_pass",
    "z5_pass_lo",
    "z5_pass_hi",
    "vas_valid",
    "vas_valid_lo",
    "vas_valid_hi",
    "ate",
    "ate_lo",
    "ate_hi",
    "ate_sq_error",
    "ate_sq_error_lo",
    "ate_sq_error_hi",
    "tests_executed",
    "tests_executed_lo",
    "tests_executed_hi",
    "runtime_ms",
    "runtime_ms_lo",
    "runtime_ms_hi",
];

fn num(v: f64) -> String {
    format!("{v}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn bit(b: bool) -> String {
    if b { "1" } else { "0" }.into()
}

pub fn write_experiment_csv<W: Write>(cfg: &ExperimentConfig, out: &ExperimentOutput, writer: W) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(EXPERIMENT_COLUMNS)?;
    let (n, alpha) = if cfg.test == TestKind::Oracle {
        (String::new(), String::new())
    } else {
        (cfg.n.to_string(), num(cfg.alpha))
    };
    let test = serde_json::to_value(cfg.test).expect("enum serializes");
    let criterion = serde_json::to_value(cfg.criterion).expect("enum serializes");
    let config_cols = [
        cfg.graph_id.clone(),
        cfg.process_id.clone().unwrap_or_default(),
        test.as_str().unwrap_or_default().to_string(),
        n,
        alpha,
        cfg.hidden.join(";"),
        criterion.as_str().unwrap_or_default().to_string(),
    ];
    let blank = String::new;
    for r in &out.records {
        let mut row = vec!["replicate".to_string(), r.replicate.to_string(), r.seed.to_string()];
        row.extend(config_cols.iter().cloned());
        for v in [
            num(r.partition_accuracy),
            num(r.z1_precision),
            num(r.z1_recall),
            bit(r.z5_passed),
            bit(r.vas_valid),
            opt(r.ate),
            opt(r.ate_squared_error()),
            r.tests_executed.to_string(),
            opt(r.runtime_ms),
        ] {
            row.extend([v, blank(), blank()]);
        }
        w.write_record(&row)?;
    }
    let m = &out.report;
    let c = &m.ci95;
    let mut row = vec!["aggregate".to_string(), blank(), blank()];
    row.extend(config_cols.iter().cloned());
    let cells = [
        (Some(m.partition_accuracy), Some(c.partition_accuracy)),
        (Some(m.z1_precision), Some(c.z1_precision)),
        (Some(m.z1_recall), Some(c.z1_recall)),
        (Some(m.z5_pass_rate), Some(c.z5_pass_rate)),
        (Some(m.vas_valid_fraction), Some(c.vas_valid_fraction)),
        (m.ate_mean, c.ate_mean),
        (m.ate_mse, c.ate_mse),
        (Some(m.tests_mean), Some(c.tests_mean)),
        (m.runtime_ms_mean, c.runtime_ms_mean),
    ];
    for (v, ci) in cells {
        row.extend([opt(v), opt(ci.map(|i| i.low)), opt(ci.map(|i| i.high))]);
    }
    w.write_record(&row)?;
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// One row of the scaling run: `k` copies per partition, `8k` covariates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub k: usize,
    pub covariates: usize,
    pub tests_executed: u64,
    pub ratio: f64,
    pub runtime_ms: Option<f64>,
}

pub const MAX_SCALING_K: usize = 10;

/// Oracle runs on the replicated ten-node layout for k = 1..=max_k.
pub fn run_scaling(max_k: usize, timing: bool) -> Result<Vec<ScalingRow>, ExperimentError> {
    if !(1..=MAX_SCALING_K).contains(&max_k) {
        return Err(ExperimentError::Config(format!("max k must be in 1..={MAX_SCALING_K}, got {max_k}")));
    }
    (1..=max_k)
        .map(|k| {
            let g = scaling_graph(k)?;
            let candidates = g.candidate_names();
            let tester = OracleTester::new(g.clone());
            let start = Instant::now();
            let r = run_ldp(&tester, &candidates, g.name(g.exposure()), g.name(g.outcome()))?;
            let runtime_ms = timing.then(|| start.elapsed().as_secs_f64() * 1e3);
            let z = candidates.len();
            Ok(ScalingRow {
                k,
                covariates: z,
                tests_executed: r.counters.executed,
                ratio: r.counters.executed as f64 / (z * z) as f64,
                runtime_ms,
            })
        })
        .collect()
}

pub const SCALING_COLUMNS: &[&str] = &["k", "covariates", "tests_executed", "ratio", "runtime_ms"];

pub fn write_scaling_csv<W: Write>(rows: &[ScalingRow], writer: W) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SCALING_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.k.to_string(),
            r.covariates.to_string(),
            r.tests_executed.to_string(),
            format!("{:.6}", r.ratio),
            r.runtime_ms.map(|t| format!("{t:.3}")).unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
