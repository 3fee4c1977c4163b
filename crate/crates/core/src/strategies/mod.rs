//! Prioritization strategies.
//!
//! Every strategy is a pure function of `(matrix, seed[, parameters])`. All
//! randomness comes from a [`ChaCha8Rng`] seeded with
//! [`SeedableRng::seed_from_u64`], so a fixed input always reproduces the
//! same [`Ordering`].

mod additional;
mod art;
mod lexicographical;
mod ocp;
mod search;
mod total;
mod unified;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coverage::{CoverageMatrix, Ordering};
use crate::error::{Error, Result};

pub use additional::{additional_greedy, additional_greedy_observed};
pub use art::{art_based, art_based_observed, jaccard_distance};
pub use lexicographical::{lexicographical_greedy, lexicographical_greedy_observed};
pub use ocp::{ocp, ocp_observed};
pub use search::{pmx, search_based, search_based_observed};
pub use total::{total_greedy, total_greedy_observed};
pub use unified::{unified_greedy, unified_greedy_observed, UNIFIED_TIE_TOLERANCE};

/// Generator used for every random decision a strategy makes.
pub type StrategyRng = ChaCha8Rng;

pub fn strategy_rng(seed: u64) -> StrategyRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyId {
    Total,
    Additional,
    Unified,
    Lexicographical,
    Art,
    Search,
    Ocp,
}

impl StrategyId {
    pub const ALL: [StrategyId; 7] = [
        StrategyId::Total,
        StrategyId::Additional,
        StrategyId::Unified,
        StrategyId::Lexicographical,
        StrategyId::Art,
        StrategyId::Search,
        StrategyId::Ocp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyId::Total => "total",
            StrategyId::Additional => "additional",
            StrategyId::Unified => "unified",
            StrategyId::Lexicographical => "lexicographical",
            StrategyId::Art => "art",
            StrategyId::Search => "search",
            StrategyId::Ocp => "ocp",
        }
    }
}

impl fmt::Display for StrategyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StrategyId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownStrategy(s.to_string()))
    }
}

/// Genetic algorithm parameters for [`search_based`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub tournament_size: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population: 50,
            generations: 100,
            crossover_rate: 0.8,
            mutation_rate: 0.1,
            tournament_size: 2,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::InvalidConfig("GA population must be at least 2".into()));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) || !(0.0..=1.0).contains(&self.mutation_rate)
        {
            return Err(Error::InvalidConfig("GA rates must lie in [0, 1]".into()));
        }
        if self.tournament_size == 0 || self.tournament_size > self.population {
            return Err(Error::InvalidConfig(
                "GA tournament size must be in 1..=population".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    /// Fraction by which a unit's weight shrinks once a selected test covers it.
    pub unified_ratio: f64,
    pub art_candidate_size: usize,
    pub ga: GaConfig,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig {
            unified_ratio: 0.5,
            art_candidate_size: 10,
            ga: GaConfig::default(),
        }
    }
}

impl StrategyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.unified_ratio) {
            return Err(Error::InvalidConfig(format!(
                "unified ratio {} outside [0, 1]",
                self.unified_ratio
            )));
        }
        if self.art_candidate_size == 0 {
            return Err(Error::InvalidConfig("ART candidate size must be positive".into()));
        }
        self.ga.validate()
    }
}

/// Hooks for watching a strategy make its choices. Used by tests and
/// diagnostics; the plain entry points run with [`NoObserver`].
pub trait StepObserver {
    /// Scores of every candidate scanned before a selection.
    fn candidate_scores(&mut self, _scores: &[(usize, f64)]) {}
    /// The covered set was cleared.
    fn restart(&mut self) {}
    /// `test` was appended to the ordering. `score` is its priority when the
    /// strategy computed one for this step.
    fn selected(&mut self, _test: usize, _score: Option<f64>) {}
    /// Whether [`candidate_scores`](Self::candidate_scores) should be called.
    fn wants_scores(&self) -> bool {
        false
    }
}

pub struct NoObserver;

impl StepObserver for NoObserver {}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceEvent {
    Scores(Vec<(usize, f64)>),
    Restart,
    Selected { test: usize, score: Option<f64> },
}

/// Records every observer callback in order.
#[derive(Debug, Clone, Default)]
pub struct StepTrace {
    pub events: Vec<TraceEvent>,
}

impl StepObserver for StepTrace {
    fn candidate_scores(&mut self, scores: &[(usize, f64)]) {
        self.events.push(TraceEvent::Scores(scores.to_vec()));
    }

    fn restart(&mut self) {
        self.events.push(TraceEvent::Restart);
    }

    fn selected(&mut self, test: usize, score: Option<f64>) {
        self.events.push(TraceEvent::Selected { test, score });
    }

    fn wants_scores(&self) -> bool {
        true
    }
}

impl StepTrace {
    pub fn selections(&self) -> Vec<usize> {
        self.events
            .iter()
            .filter_map(|e| match e {
                TraceEvent::Selected { test, .. } => Some(*test),
                _ => None,
            })
            .collect()
    }
}

/// Uniform choice among `ties`, counting a tie when there is more than one.
pub(crate) fn break_tie(rng: &mut StrategyRng, ties: &[usize], tie_count: &mut u64) -> usize {
    debug_assert!(!ties.is_empty());
    if ties.len() > 1 {
        *tie_count += 1;
        ties[rng.gen_range(0..ties.len())]
    } else {
        ties[0]
    }
}

/// Runs `id` on `matrix` and stamps strategy, seed, and elapsed time.
pub fn run_strategy(
    id: StrategyId,
    matrix: &CoverageMatrix,
    config: &StrategyConfig,
    seed: u64,
) -> Result<Ordering> {
    config.validate()?;
    let start = Instant::now();
    let mut ordering = match id {
        StrategyId::Total => total_greedy(matrix, seed),
        StrategyId::Additional => additional_greedy(matrix, seed),
        StrategyId::Unified => unified_greedy(matrix, seed, config.unified_ratio),
        StrategyId::Lexicographical => lexicographical_greedy(matrix, seed),
        StrategyId::Art => art_based(matrix, seed, config.art_candidate_size),
        StrategyId::Search => search_based(matrix, seed, &config.ga),
        StrategyId::Ocp => ocp(matrix, seed),
    };
    let elapsed = start.elapsed();
    ordering.strategy = id;
    ordering.seed = seed;
    ordering.instrumentation.elapsed_ns = u64::try_from(elapsed.as_nanos()).unwrap_or(u64::MAX);
    ordering.validate()?;
    Ok(ordering)
}

/// Runs `id` by name; see [`run_strategy`].
pub fn run_strategy_named(
    id: &str,
    matrix: &CoverageMatrix,
    config: &StrategyConfig,
    seed: u64,
) -> Result<Ordering> {
    run_strategy(id.parse()?, matrix, config, seed)
}
