//! Conditional-independence testers: a d-separation oracle, Fisher-z,
//! stratified chi-square, and a caching wrapper that counts executions.

mod cache;
mod chisq;
mod fisher;
mod oracle;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::DataError;
use crate::graph::GraphError;

pub use cache::Cached;
pub use chisq::ChiSquare;
pub use fisher::FisherZ;
pub use oracle::OracleTester;

#[derive(Debug, Error)]
pub enum CiError {
    #[error("query tests {0} against itself")]
    SameVariable(String),
    #[error("{0} is both tested and conditioned on")]
    EndpointConditioned(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("significance level {0} must lie strictly between 0 and 1")]
    InvalidAlpha(f64),
    #[error("{n} samples are too few to condition on {cond} variables")]
    InsufficientSamples { n: usize, cond: usize },
    #[error("column {column} holds non-integer value {value}")]
    NotCategorical { column: String, value: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Independence query `a _||_ b | cond` in canonical form: the pair is
/// stored sorted and the conditioning set sorted and deduplicated, so
/// symmetric queries compare and hash equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CiQuery {
    a: String,
    b: String,
    cond: Vec<String>,
}

impl CiQuery {
    pub fn new<S: AsRef<str>>(a: &str, b: &str, cond: &[S]) -> Result<Self, CiError> {
        if a == b {
            return Err(CiError::SameVariable(a.to_string()));
        }
        let mut cond: Vec<String> = cond.iter().map(|c| c.as_ref().to_string()).collect();
        cond.sort();
        cond.dedup();
        for v in [a, b] {
            if cond.binary_search_by(|c| c.as_str().cmp(v)).is_ok() {
                return Err(CiError::EndpointConditioned(v.to_string()));
            }
        }
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        Ok(CiQuery {
            a: a.to_string(),
            b: b.to_string(),
            cond,
        })
    }

    pub fn marginal(a: &str, b: &str) -> Result<Self, CiError> {
        Self::new::<&str>(a, b, &[])
    }

    pub fn a(&self) -> &str {
        &self.a
    }

    pub fn b(&self) -> &str {
        &self.b
    }

    pub fn cond(&self) -> &[String] {
        &self.cond
    }

    /// Every variable the query touches, endpoints first.
    pub fn variables(&self) -> impl Iterator<Item = &str> {
        [self.a.as_str(), self.b.as_str()]
            .into_iter()
            .chain(self.cond.iter().map(String::as_str))
    }
}

impl fmt::Display for CiQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} _||_ {}", self.a, self.b)?;
        if !self.cond.is_empty() {
            write!(f, " | {}", self.cond.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CiOutcome {
    pub independent: bool,
    pub p_value: Option<f64>,
    pub statistic: Option<f64>,
    /// Set when the test could not be evaluated; such outcomes report
    /// dependence.
    pub inconclusive: bool,
}

impl CiOutcome {
    pub fn exact(independent: bool) -> Self {
        CiOutcome {
            independent,
            p_value: None,
            statistic: None,
            inconclusive: false,
        }
    }

    pub fn from_p_value(p_value: f64, statistic: f64, alpha: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        CiOutcome {
            independent: p_value > alpha,
            p_value: Some(p_value),
            statistic: Some(statistic),
            inconclusive: false,
        }
    }

    pub fn inconclusive() -> Self {
        CiOutcome {
            independent: false,
            p_value: None,
            statistic: None,
            inconclusive: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCounters {
    pub executed: u64,
    pub cache_hits: u64,
}

impl TestCounters {
    pub fn total(&self) -> u64 {
        self.executed + self.cache_hits
    }
}

pub trait CiTest: Send + Sync {
    fn test(&self, q: &CiQuery) -> Result<CiOutcome, CiError>;
}

impl<T: CiTest + ?Sized> CiTest for &T {
    fn test(&self, q: &CiQuery) -> Result<CiOutcome, CiError> {
        (**self).test(q)
    }
}

impl<T: CiTest + ?Sized> CiTest for Box<T> {
    fn test(&self, q: &CiQuery) -> Result<CiOutcome, CiError> {
        (**self).test(q)
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<f64, CiError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(alpha)
    } else {
        Err(CiError::InvalidAlpha(alpha))
    }
}
