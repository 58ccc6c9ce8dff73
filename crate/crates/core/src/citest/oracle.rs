use crate::graph::{d_separated, Dag, NodeSet};

use super::{CiError, CiOutcome, CiQuery, CiTest};

/// Answers queries exactly from d-separation in a known graph.
#[derive(Debug, Clone)]
pub struct OracleTester {
    dag: Dag,
}

impl OracleTester {
    pub fn new(dag: Dag) -> Self {
        OracleTester { dag }
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }
}

impl CiTest for OracleTester {
    fn test(&self, q: &CiQuery) -> Result<CiOutcome, CiError> {
        let id = |name: &str| {
            self.dag
                .id(name)
                .map_err(|_| CiError::UnknownVariable(name.to_string()))
        };
        let cond = q.cond().iter().map(|c| id(c)).collect::<Result<NodeSet, _>>()?;
        let sep = d_separated(&self.dag, id(q.a())?, id(q.b())?, &cond)?;
        Ok(CiOutcome::exact(sep))
    }
}
