use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strategies::StrategyId;

/// Counters recorded while a strategy runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instrumentation {
    /// Candidate evaluations: additional-coverage recomputations for the
    /// greedy family, fitness evaluations for the search strategy.
    pub recompute_count: u64,
    /// Selections made among two or more equally ranked candidates.
    pub tie_count: u64,
    /// Times the covered set was cleared because no candidate added coverage.
    pub restart_count: u64,
    /// Wall-clock time of the prioritization loop.
    pub elapsed_ns: u64,
}

/// A prioritized test order plus how it was produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ordering {
    pub strategy: StrategyId,
    pub seed: u64,
    pub permutation: Vec<usize>,
    #[serde(flatten)]
    pub instrumentation: Instrumentation,
}

impl Ordering {
    pub fn new(strategy: StrategyId, seed: u64, permutation: Vec<usize>) -> Self {
        Ordering {
            strategy,
            seed,
            permutation,
            instrumentation: Instrumentation::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.permutation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutation.is_empty()
    }

    /// Checks that the permutation is a bijection on `0..len`.
    pub fn validate(&self) -> Result<()> {
        let n = self.permutation.len();
        let mut seen = vec![false; n];
        for &t in &self.permutation {
            match seen.get_mut(t) {
                Some(s) if !*s => *s = true,
                Some(_) => {
                    return Err(Error::Invariant(format!("test {t} appears twice in ordering")))
                }
                None => {
                    return Err(Error::Invariant(format!(
                        "test index {t} out of range for ordering of {n} tests"
                    )))
                }
            }
        }
        Ok(())
    }

    /// One JSON-lines record, without a trailing newline.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("ordering serializes")
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        let o: Ordering = serde_json::from_str(line)?;
        o.validate().map_err(|e| match e {
            Error::Invariant(msg) => Error::InvalidMatrix(msg),
            other => other,
        })?;
        Ok(o)
    }
}
