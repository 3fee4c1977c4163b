//! Additional-greedy prioritization by partition ordering.
//!
//! A candidate's additional coverage can only shrink while the covered set
//! grows, so the value computed for it at an earlier step is an upper bound on
//! its value now. Candidates are kept in partitions keyed by that stored
//! bound. Each step refreshes partitions from the highest bound downwards and
//! stops as soon as the best refreshed value is at least the bound of every
//! partition not yet refreshed: nothing left unexamined can beat it.
//!
//! Ties on the refreshed value go to the candidate that came from the higher
//! partition (it covered more at its previous evaluation); among candidates
//! from the same partition the choice is uniformly random.

use std::collections::BTreeMap;

use super::{break_tie, strategy_rng, NoObserver, StepObserver};
use crate::coverage::{BitRow, CoverageMatrix, Ordering};
use crate::strategies::StrategyId;

/// Unselected candidates grouped by their stored priority bound.
#[derive(Debug, Clone)]
struct PartitionState {
    levels: BTreeMap<usize, Vec<usize>>,
    len: usize,
}

impl PartitionState {
    fn new(tests: impl IntoIterator<Item = usize>, bound: usize) -> Self {
        let members: Vec<usize> = tests.into_iter().collect();
        let len = members.len();
        let mut levels = BTreeMap::new();
        if len > 0 {
            levels.insert(bound, members);
        }
        PartitionState { levels, len }
    }

    fn len(&self) -> usize {
        self.len
    }

    fn top_level(&self) -> Option<usize> {
        self.levels.keys().next_back().copied()
    }

    fn take_level(&mut self, level: usize) -> Vec<usize> {
        let members = self.levels.remove(&level).unwrap_or_default();
        self.len -= members.len();
        members
    }

    fn insert(&mut self, test: usize, level: usize) {
        self.levels.entry(level).or_default().push(test);
        self.len += 1;
    }

    fn sole_member(&self) -> Option<usize> {
        match self.levels.values().next() {
            Some(v) if self.len == 1 => v.first().copied(),
            _ => None,
        }
    }

    /// Moves every candidate back to `bound`, in ascending test order.
    fn reset(&mut self, bound: usize) {
        let mut all: Vec<usize> = std::mem::take(&mut self.levels).into_values().flatten().collect();
        all.sort_unstable();
        *self = PartitionState::new(all, bound);
    }
}

struct Refreshed {
    test: usize,
    gain: usize,
    prior: usize,
}

pub fn ocp(matrix: &CoverageMatrix, seed: u64) -> Ordering {
    ocp_observed(matrix, seed, &mut NoObserver)
}

pub fn ocp_observed<O: StepObserver>(
    matrix: &CoverageMatrix,
    seed: u64,
    observer: &mut O,
) -> Ordering {
    let n = matrix.test_count();
    let m = matrix.unit_count();
    let mut rng = strategy_rng(seed);
    let mut covered = BitRow::new(m);
    let mut partitions = PartitionState::new(0..n, m);
    let mut order = Vec::with_capacity(n);
    let mut refreshed: Vec<Refreshed> = Vec::new();
    let mut ties = Vec::new();
    let (mut recomputes, mut tie_count, mut restarts) = (0u64, 0u64, 0u64);

    while partitions.len() > 0 {
        // the last candidate is forced
        if let Some(last) = partitions.sole_member() {
            partitions.take_level(partitions.top_level().expect("non-empty"));
            order.push(last);
            observer.selected(last, None);
            break;
        }

        let top = partitions.top_level().expect("non-empty");
        if top == 0 && !covered.is_empty() {
            // every bound is 0: nothing adds coverage
            covered.clear_all();
            partitions.reset(m);
            restarts += 1;
            observer.restart();
            continue;
        }

        refreshed.clear();
        let mut best = 0usize;
        let mut level = Some(top);
        while let Some(bound) = level {
            for test in partitions.take_level(bound) {
                let gain = matrix.row(test).count_and_not(&covered);
                recomputes += 1;
                best = best.max(gain);
                refreshed.push(Refreshed {
                    test,
                    gain,
                    prior: bound,
                });
            }
            level = partitions.top_level().filter(|&next| best < next);
        }

        if best == 0 && !covered.is_empty() {
            for r in &refreshed {
                partitions.insert(r.test, 0);
            }
            covered.clear_all();
            partitions.reset(m);
            restarts += 1;
            observer.restart();
            continue;
        }

        let prior = refreshed
            .iter()
            .filter(|r| r.gain == best)
            .map(|r| r.prior)
            .max()
            .expect("some candidate attains the best gain");
        ties.clear();
        ties.extend(
            refreshed
                .iter()
                .filter(|r| r.gain == best && r.prior == prior)
                .map(|r| r.test),
        );
        let pick = break_tie(&mut rng, &ties, &mut tie_count);
        for r in refreshed.iter().filter(|r| r.test != pick) {
            partitions.insert(r.test, r.gain);
        }
        covered.or_assign(matrix.row(pick));
        order.push(pick);
        observer.selected(pick, Some(best as f64));
    }

    let mut ordering = Ordering::new(StrategyId::Ocp, seed, order);
    ordering.instrumentation.recompute_count = recomputes;
    ordering.instrumentation.tie_count = tie_count;
    ordering.instrumentation.restart_count = restarts;
    ordering
}
