//! Local discovery by partitioning: labels each candidate covariate by its
//! causal relation to the exposure/outcome pair and emits an adjustment
//! set when one is identifiable.

use std::collections::HashSet;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::citest::{Cached, CiError, CiOutcome, CiQuery, CiTest, TestCounters};
use crate::graph::PartitionLabel;

pub const WARN_NO_INSTRUMENT: &str =
    "C2 unverifiable: no instrument (Z5) was discovered, so the adjustment set cannot be checked";
pub const WARN_NOT_IDENTIFIABLE: &str =
    "VAS not identifiable: no discovered instrument is independent of the outcome given the exposure and Z1";
pub const WARN_NO_PROGNOSTIC: &str =
    "C1 unverifiable: no Z4 was discovered, so post-treatment screening was skipped";

#[derive(Debug, Error)]
pub enum LdpError {
    #[error("exposure and outcome are both {0}")]
    SameEndpoints(String),
    #[error("candidate {0} is the exposure or outcome")]
    EndpointCandidate(String),
    #[error("candidate {0} listed twice")]
    DuplicateCandidate(String),
    #[error(transparent)]
    Test(#[from] CiError),
}

/// One answered query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub step: u8,
    pub subject: String,
    pub query: CiQuery,
    pub outcome: CiOutcome,
    pub cached: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LdpResult {
    pub labels: IndexMap<String, PartitionLabel>,
    pub vas: Option<Vec<String>>,
    pub z5_criterion_passed: bool,
    pub counters: TestCounters,
    pub warnings: Vec<String>,
    pub trace: Vec<TraceEntry>,
}

impl LdpResult {
    pub fn with_label(&self, label: PartitionLabel) -> Vec<String> {
        self.labels
            .iter()
            .filter(|(_, &l)| l == label)
            .map(|(n, _)| n.clone())
            .collect()
    }

    /// Executed tests attributed to one step.
    pub fn executed_in_step(&self, step: u8) -> usize {
        self.trace.iter().filter(|t| t.step == step && !t.cached).count()
    }

    pub fn inconclusive_tests(&self) -> usize {
        self.trace.iter().filter(|t| !t.cached && t.outcome.inconclusive).count()
    }
}

#[derive(Serialize)]
struct ResultJson<'a> {
    labels: &'a IndexMap<String, PartitionLabel>,
    vas: &'a Option<Vec<String>>,
    z5_criterion: bool,
    tests_executed: u64,
    cache_hits: u64,
    warnings: &'a [String],
}

impl Serialize for LdpResult {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ResultJson {
            labels: &self.labels,
            vas: &self.vas,
            z5_criterion: self.z5_criterion_passed,
            tests_executed: self.counters.executed,
            cache_hits: self.counters.cache_hits,
            warnings: &self.warnings,
        }
        .serialize(s)
    }
}

/// Covariate selection rule applied to a finished result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    #[default]
    CommonCause,
    DisjunctiveCause,
    Outcome,
}

pub fn select_covariates(result: &LdpResult, criterion: Criterion) -> Vec<String> {
    use PartitionLabel::*;
    let keep: &[PartitionLabel] = match criterion {
        Criterion::CommonCause => &[Z1],
        Criterion::DisjunctiveCause => &[Z1, Z4, Z5],
        Criterion::Outcome => &[Z1, Z4],
    };
    result
        .labels
        .iter()
        .filter(|(_, l)| keep.contains(l))
        .map(|(n, _)| n.clone())
        .collect()
}

struct Session<'t, T: CiTest + ?Sized> {
    tester: Cached<&'t T>,
    names: Vec<String>,
    x: String,
    y: String,
    trace: Vec<TraceEntry>,
}

impl<T: CiTest + ?Sized> Session<'_, T> {
    fn independent(&mut self, step: u8, subject: usize, a: &str, b: &str, cond: &[&str]) -> Result<bool, LdpError> {
        let query = CiQuery::new(a, b, cond)?;
        let (outcome, cached) = self.tester.test_traced(&query)?;
        self.trace.push(TraceEntry {
            step,
            subject: self.names[subject].clone(),
            query,
            outcome,
            cached,
        });
        Ok(outcome.independent)
    }

    fn with_x(&self, vars: impl IntoIterator<Item = usize>) -> Vec<String> {
        std::iter::once(self.x.clone())
            .chain(vars.into_iter().map(|i| self.names[i].clone()))
            .collect()
    }
}

/// Runs the eight discovery steps against `tester`.
///
/// Each run wraps the tester in its own cache, so the reported counters
/// cover this run only. Within an existential condition every partner is
/// tested; inside each two-test conjunction or disjunction the second test
/// is skipped once the first decides it.
pub fn run_ldp<T, S>(tester: &T, candidates: &[S], x: &str, y: &str) -> Result<LdpResult, LdpError>
where
    T: CiTest + ?Sized,
    S: AsRef<str>,
{
    use PartitionLabel::*;
    if x == y {
        return Err(LdpError::SameEndpoints(x.to_string()));
    }
    let names: Vec<String> = candidates.iter().map(|c| c.as_ref().to_string()).collect();
    let mut seen = HashSet::new();
    for n in &names {
        if n == x || n == y {
            return Err(LdpError::EndpointCandidate(n.clone()));
        }
        if !seen.insert(n.as_str()) {
            return Err(LdpError::DuplicateCandidate(n.clone()));
        }
    }
    let mut s = Session {
        tester: Cached::new(tester),
        names,
        x: x.to_string(),
        y: y.to_string(),
        trace: Vec::new(),
    };
    let (x, y) = (s.x.clone(), s.y.clone());
    let n = s.names.len();
    let mut label: Vec<Option<PartitionLabel>> = vec![None; n];

    // Steps 1-3.
    let (mut z4, mut z57) = (Vec::new(), Vec::new());
    for i in 0..n {
        let z = s.names[i].clone();
        let x_z = s.independent(1, i, &x, &z, &[])?;
        let y_z = s.independent(1, i, &y, &z, &[])?;
        let x_z_given_y = s.independent(2, i, &x, &z, &[&y])?;
        let y_z_given_x = s.independent(3, i, &y, &z, &[&x])?;
        if x_z && y_z {
            label[i] = Some(Z8);
        } else if x_z && !x_z_given_y {
            label[i] = Some(Z4);
            z4.push(i);
        } else if !y_z && y_z_given_x {
            label[i] = Some(Z57);
            z57.push(i);
        }
    }
    let mut remaining: Vec<usize> = (0..n).filter(|&i| label[i].is_none()).collect();

    // Step 4: anything tied to a Z4 in the wrong way is post-treatment.
    for &i in &remaining {
        let mut post = false;
        for &f in &z4 {
            let (zi, zf) = (s.names[i].clone(), s.names[f].clone());
            let hit = !s.independent(4, i, &zi, &zf, &[])? || s.independent(4, i, &zi, &zf, &[&x, &y])?;
            post |= hit;
        }
        if post {
            label[i] = Some(ZPost);
        }
    }
    remaining.retain(|&i| label[i].is_none());

    // Step 5: candidates screened off from the outcome by the exposure and
    // the other survivors.
    let mut mix = Vec::new();
    let snapshot = remaining.clone();
    for &i in &snapshot {
        let zi = s.names[i].clone();
        if s.independent(5, i, &y, &zi, &[])? {
            continue;
        }
        let cond = s.with_x(snapshot.iter().copied().filter(|&j| j != i));
        let cond: Vec<&str> = cond.iter().map(String::as_str).collect();
        if s.independent(5, i, &y, &zi, &cond)? {
            mix.push(i);
        }
    }
    remaining.retain(|i| !mix.contains(i));

    // Step 6: v-structure probe through the exposure.
    mix.extend(z57.iter().copied());
    let mut z15: Vec<usize> = Vec::new();
    let mut z1: Vec<usize> = Vec::new();
    if !mix.is_empty() && !remaining.is_empty() {
        for &i in &remaining {
            let zi = s.names[i].clone();
            let mut found = false;
            for &m in &mix {
                let zm = s.names[m].clone();
                if s.independent(6, i, &zm, &zi, &[])? && !s.independent(6, i, &zm, &zi, &[&x])? {
                    found = true;
                    if !z15.contains(&m) {
                        z15.push(m);
                    }
                }
            }
            label[i] = Some(if found { Z1 } else { ZPost });
            if found {
                z1.push(i);
            }
        }
        mix.retain(|m| !z15.contains(m));
        for &m in &mix {
            let zm = s.names[m].clone();
            let mut found = false;
            for &f in &z15 {
                let zf = s.names[f].clone();
                found |= s.independent(6, m, &zf, &zm, &[])?;
            }
            if z57.contains(&m) {
                continue;
            }
            label[m] = Some(if found { Z1 } else { ZPost });
            if found {
                z1.push(m);
            }
        }
    }
    if !z15.is_empty() || !z1.is_empty() {
        for &m in &z57 {
            if !z15.contains(&m) {
                label[m] = Some(Z7);
            }
        }
    }

    // Step 7: split Z1 from Z5 using marginal results already cached.
    if !z15.is_empty() && !z1.is_empty() {
        let known = z1.clone();
        for &f in &z15 {
            let zf = s.names[f].clone();
            let mut linked = false;
            for &k in &known {
                let zk = s.names[k].clone();
                linked |= !s.independent(7, f, &zf, &zk, &[])?;
            }
            label[f] = Some(if linked { Z1 } else { Z5 });
            if linked {
                z1.push(f);
            }
        }
    }

    // Step 8: instrument criterion.
    let mut warnings = Vec::new();
    if z4.is_empty() {
        warnings.push(WARN_NO_PROGNOSTIC.to_string());
    }
    let final_z1: Vec<usize> = (0..n).filter(|&i| label[i] == Some(Z1)).collect();
    let z5: Vec<usize> = (0..n).filter(|&i| label[i] == Some(Z5)).collect();
    let mut passed = false;
    if z5.is_empty() {
        warnings.push(WARN_NO_INSTRUMENT.to_string());
    } else {
        let cond = s.with_x(final_z1.iter().copied());
        let cond: Vec<&str> = cond.iter().map(String::as_str).collect();
        for &f in &z5 {
            let zf = s.names[f].clone();
            passed |= s.independent(8, f, &zf, &y, &cond)?;
        }
        if !passed {
            warnings.push(WARN_NOT_IDENTIFIABLE.to_string());
        }
    }
    let vas = passed.then(|| final_z1.iter().map(|&i| s.names[i].clone()).collect());

    let counters = s.tester.counters();
    let inconclusive = s.trace.iter().filter(|t| !t.cached && t.outcome.inconclusive).count();
    if inconclusive > 0 {
        warnings.push(format!("{inconclusive} inconclusive tests were treated as dependent"));
    }
    let labels = s
        .names
        .iter()
        .zip(&label)
        .map(|(n, l)| (n.clone(), l.unwrap_or(NotIdentifiable)))
        .collect();
    Ok(LdpResult {
        labels,
        vas,
        z5_criterion_passed: passed,
        counters,
        warnings,
        trace: s.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::citest::OracleTester;
    use crate::graph::Dag;

    fn figure_two() -> Dag {
        let edges = [
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
        let nodes = ["X", "Y", "Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8"];
        Dag::new(&nodes, &edges, "X", "Y").unwrap()
    }

    fn run(g: &Dag) -> LdpResult {
        let t = OracleTester::new(g.clone());
        run_ldp(&t, &g.candidate_names(), g.name(g.exposure()), g.name(g.outcome())).unwrap()
    }

    #[test]
    fn figure_two_oracle() {
        let r = run(&figure_two());
        let got: Vec<(&str, &str)> = r.labels.iter().map(|(n, l)| (n.as_str(), l.as_str())).collect();
        assert_eq!(
            got,
            [
                ("Z1", "Z1"),
                ("Z2", "ZPost"),
                ("Z3", "ZPost"),
                ("Z4", "Z4"),
                ("Z5", "Z5"),
                ("Z6", "ZPost"),
                ("Z7", "Z7"),
                ("Z8", "Z8"),
            ]
        );
        assert_eq!(r.vas, Some(vec!["Z1".to_string()]));
        assert!(r.z5_criterion_passed);
        assert_eq!(r.executed_in_step(7), 0);
        assert!(r.warnings.is_empty());
        assert_eq!(r.counters.executed, 50);
    }

    #[test]
    fn selection_criteria() {
        let r = run(&figure_two());
        assert_eq!(select_covariates(&r, Criterion::CommonCause), ["Z1"]);
        assert_eq!(select_covariates(&r, Criterion::DisjunctiveCause), ["Z1", "Z4", "Z5"]);
        assert_eq!(select_covariates(&r, Criterion::Outcome), ["Z1", "Z4"]);
    }

    #[test]
    fn isolated_candidate_only() {
        let g = Dag::new(&["X", "Y", "W"], &[("X", "Y")], "X", "Y").unwrap();
        let r = run(&g);
        assert_eq!(r.labels["W"], PartitionLabel::Z8);
        assert!(r.vas.is_none() && !r.z5_criterion_passed);
        assert!(r.warnings.iter().any(|w| w == WARN_NO_INSTRUMENT));
        assert!(select_covariates(&r, Criterion::CommonCause).is_empty());
    }

    #[test]
    fn empty_candidates() {
        let g = Dag::from_edges(&[("X", "Y")], "X", "Y").unwrap();
        let r = run(&g);
        assert!(r.labels.is_empty() && r.vas.is_none());
        assert_eq!(r.counters.executed, 0);
    }

    #[test]
    fn json_shape() {
        let r = run(&figure_two());
        let v = serde_json::to_value(&r).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, ["labels", "vas", "z5_criterion", "tests_executed", "cache_hits", "warnings"]);
        assert_eq!(v["vas"], serde_json::json!(["Z1"]));
        assert_eq!(v["labels"]["Z2"], "ZPost");
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = figure_two();
        let t = OracleTester::new(g);
        assert!(matches!(run_ldp(&t, &["Z1", "X"], "X", "Y"), Err(LdpError::EndpointCandidate(_))));
        assert!(matches!(run_ldp(&t, &["Z1", "Z1"], "X", "Y"), Err(LdpError::DuplicateCandidate(_))));
        assert!(matches!(run_ldp(&t, &["Q"], "X", "Y"), Err(LdpError::Test(_))));
    }
}
