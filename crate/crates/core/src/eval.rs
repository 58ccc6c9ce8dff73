//! Scoring of discovered partitions and adjustment sets, regression
//! adjustment for the average treatment effect, and replicate summaries.

use std::collections::BTreeSet;

use indexmap::IndexMap;
use nalgebra::{DMatrix, DVector};
use num_traits::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{DataError, Dataset};
use crate::graph::PartitionLabel;
use crate::Scalar;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("label maps disagree on variables: missing {missing:?}, unexpected {unexpected:?}")]
    KeyMismatch {
        missing: Vec<String>,
        unexpected: Vec<String>,
    },
    #[error("design matrix for {0} is rank deficient")]
    RankDeficient(String),
    #[error("regression needs more rows than its {columns} columns, got {rows}")]
    TooFewRows { rows: usize, columns: usize },
    #[error("nothing to aggregate")]
    NoReplicates,
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Fraction of variables whose predicted label agrees with the truth. A
/// post-treatment prediction counts for Z2, Z3 and Z6.
pub fn partition_accuracy(
    pred: &IndexMap<String, PartitionLabel>,
    truth: &IndexMap<String, PartitionLabel>,
) -> Result<f64, EvalError> {
    let missing: Vec<String> = truth.keys().filter(|k| !pred.contains_key(*k)).cloned().collect();
    let unexpected: Vec<String> = pred.keys().filter(|k| !truth.contains_key(*k)).cloned().collect();
    if !missing.is_empty() || !unexpected.is_empty() {
        return Err(EvalError::KeyMismatch { missing, unexpected });
    }
    if truth.is_empty() {
        return Ok(1.0);
    }
    let hits = truth.iter().filter(|(k, &t)| pred[*k].agrees_with(t)).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Precision and recall of an adjustment set against the true Z1 members
/// of `truth`. An empty side scores 1 when the other side is empty too and
/// 0 otherwise.
pub fn z1_precision_recall<S: AsRef<str>>(adjustment: &[S], truth: &IndexMap<String, PartitionLabel>) -> (f64, f64) {
    let adj: BTreeSet<&str> = adjustment.iter().map(AsRef::as_ref).collect();
    let z1: BTreeSet<&str> = truth
        .iter()
        .filter(|(_, &l)| l == PartitionLabel::Z1)
        .map(|(k, _)| k.as_str())
        .collect();
    let hits = adj.intersection(&z1).count() as f64;
    let ratio = |denom: usize| {
        if denom == 0 {
            if adj.is_empty() && z1.is_empty() { 1.0 } else { 0.0 }
        } else {
            hits / denom as f64
        }
    };
    (ratio(adj.len()), ratio(z1.len()))
}

/// Coefficient on `x` in the least-squares regression of `y` on `x`, the
/// adjustment columns and an intercept.
pub fn ate_estimate<T: Scalar, S: AsRef<str>>(data: &Dataset<T>, x: &str, y: &str, adjustment: &[S]) -> Result<T, EvalError> {
    let mut cols = vec![data.column(x)?];
    for a in adjustment {
        cols.push(data.column(a.as_ref())?);
    }
    let response = data.column(y)?;
    let (n, p) = (data.n_rows(), cols.len() + 1);
    if n <= p {
        return Err(EvalError::TooFewRows { rows: n, columns: p });
    }
    let design = DMatrix::from_fn(n, p, |i, j| if j == 0 { T::one() } else { cols[j - 1][i] });
    let qr = design.qr();
    let r = qr.r();
    let sv = r.singular_values();
    let max = sv.iter().copied().fold(T::zero(), Float::max);
    let tol = max * T::from_f64_lossy(n as f64) * Float::epsilon();
    if max == T::zero() || sv.iter().any(|&s| s <= tol) {
        return Err(EvalError::RankDeficient(format!("{y} ~ {x} + {}", names(adjustment))));
    }
    let qty = qr.q().transpose() * DVector::from_column_slice(response);
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| EvalError::RankDeficient(format!("{y} ~ {x} + {}", names(adjustment))))?;
    Ok(beta[1])
}

fn names<S: AsRef<str>>(set: &[S]) -> String {
    if set.is_empty() {
        return "1".into();
    }
    set.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" + ")
}

/// Scores of one replicate. Optional fields are absent when the run had no
/// data or no continuous target to compare against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub replicate: usize,
    pub seed: u64,
    pub partition_accuracy: f64,
    pub z1_precision: f64,
    pub z1_recall: f64,
    pub z5_passed: bool,
    pub vas_valid: bool,
    pub ate: Option<f64>,
    pub true_effect: Option<f64>,
    pub tests_executed: u64,
    pub cache_hits: u64,
    pub runtime_ms: Option<f64>,
}

impl ReplicateRecord {
    pub fn ate_squared_error(&self) -> Option<f64> {
        Some((self.ate? - self.true_effect?).powi(2))
    }
}

/// Normal-approximation 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ci95 {
    pub partition_accuracy: Interval,
    pub z1_precision: Interval,
    pub z1_recall: Interval,
    pub z5_pass_rate: Interval,
    pub vas_valid_fraction: Interval,
    pub ate_mean: Option<Interval>,
    pub ate_mse: Option<Interval>,
    pub tests_mean: Interval,
    pub runtime_ms_mean: Option<Interval>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub replicates: usize,
    pub partition_accuracy: f64,
    pub z1_precision: f64,
    pub z1_recall: f64,
    pub z5_pass_rate: f64,
    pub vas_valid_fraction: f64,
    pub ate_mean: Option<f64>,
    pub ate_mse: Option<f64>,
    pub tests_mean: f64,
    pub runtime_ms_mean: Option<f64>,
    pub ci95: Ci95,
}

/// Mean and interval, or `None` if any replicate lacks the value.
fn summarize(values: impl Iterator<Item = Option<f64>>, fraction: bool) -> Option<(f64, Interval)> {
    let v: Vec<f64> = values.collect::<Option<_>>()?;
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let half = if v.len() < 2 {
        0.0
    } else {
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        1.96 * (var / n).sqrt()
    };
    let (mut low, mut high) = (mean - half, mean + half);
    if fraction {
        low = low.max(0.0);
        high = high.min(1.0);
    }
    Some((mean, Interval { low, high }))
}

pub fn aggregate(records: &[ReplicateRecord]) -> Result<MetricsReport, EvalError> {
    if records.is_empty() {
        return Err(EvalError::NoReplicates);
    }
    let frac = |f: fn(&ReplicateRecord) -> f64| summarize(records.iter().map(|r| Some(f(r))), true).expect("all present");
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    let acc = frac(|r| r.partition_accuracy);
    let prec = frac(|r| r.z1_precision);
    let rec = frac(|r| r.z1_recall);
    let z5 = summarize(records.iter().map(|r| Some(flag(r.z5_passed))), true).expect("all present");
    let valid = summarize(records.iter().map(|r| Some(flag(r.vas_valid))), true).expect("all present");
    let ate = summarize(records.iter().map(|r| r.ate), false);
    let mse = summarize(records.iter().map(ReplicateRecord::ate_squared_error), false);
    let tests = summarize(records.iter().map(|r| Some(r.tests_executed as f64)), false).expect("all present");
    let runtime = summarize(records.iter().map(|r| r.runtime_ms), false);
    Ok(MetricsReport {
        replicates: records.len(),
        partition_accuracy: acc.0,
        z1_precision: prec.0,
        z1_recall: rec.0,
        z5_pass_rate: z5.0,
        vas_valid_fraction: valid.0,
        ate_mean: ate.map(|a| a.0),
        ate_mse: mse.map(|m| m.0),
        tests_mean: tests.0,
        runtime_ms_mean: runtime.map(|t| t.0),
        ci95: Ci95 {
            partition_accuracy: acc.1,
            z1_precision: prec.1,
            z1_recall: rec.1,
            z5_pass_rate: z5.1,
            vas_valid_fraction: valid.1,
            ate_mean: ate.map(|a| a.1),
            ate_mse: mse.map(|m| m.1),
            tests_mean: tests.1,
            runtime_ms_mean: runtime.map(|t| t.1),
        },
    })
}
