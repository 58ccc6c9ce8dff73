use std::collections::HashMap;
use std::sync::Mutex;

use super::{CiError, CiOutcome, CiQuery, CiTest, TestCounters};

#[derive(Default)]
struct State {
    results: HashMap<CiQuery, CiOutcome>,
    counters: TestCounters,
}

/// Memoizes another tester on canonical queries and counts executions
/// separately from cache hits. Safe to share between threads.
pub struct Cached<T> {
    inner: T,
    state: Mutex<State>,
}

impl<T: CiTest> Cached<T> {
    pub fn new(inner: T) -> Self {
        Cached {
            inner,
            state: Mutex::new(State::default()),
        }
    }

    pub fn counters(&self) -> TestCounters {
        self.lock().counters
    }

    /// Looks up a query without running it or touching the counters.
    pub fn peek(&self, q: &CiQuery) -> Option<CiOutcome> {
        self.lock().results.get(q).copied()
    }

    /// Like [`CiTest::test`] but also reports whether the answer came from
    /// the cache.
    pub fn test_traced(&self, q: &CiQuery) -> Result<(CiOutcome, bool), CiError> {
        {
            let mut st = self.lock();
            if let Some(&hit) = st.results.get(q) {
                st.counters.cache_hits += 1;
                return Ok((hit, true));
            }
        }
        let outcome = self.inner.test(q)?;
        let mut st = self.lock();
        st.counters.executed += 1;
        st.results.insert(q.clone(), outcome);
        Ok((outcome, false))
    }

    pub fn into_inner(self) -> T {
        self.inner
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, State> {
        self.state.lock().unwrap_or_else(|e| e.into_inner())
    }
}

impl<T: CiTest> CiTest for Cached<T> {
    fn test(&self, q: &CiQuery) -> Result<CiOutcome, CiError> {
        self.test_traced(q).map(|(o, _)| o)
    }
}
