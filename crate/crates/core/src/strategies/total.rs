use rand::seq::SliceRandom;

use super::{strategy_rng, NoObserver, StepObserver};
use crate::coverage::{CoverageMatrix, Ordering};
use crate::strategies::StrategyId;

/// Orders tests by descending number of covered units, shuffling each run of
/// equal counts.
pub fn total_greedy(matrix: &CoverageMatrix, seed: u64) -> Ordering {
    total_greedy_observed(matrix, seed, &mut NoObserver)
}

pub fn total_greedy_observed<O: StepObserver>(
    matrix: &CoverageMatrix,
    seed: u64,
    observer: &mut O,
) -> Ordering {
    let mut rng = strategy_rng(seed);
    let counts: Vec<usize> = matrix.rows().iter().map(|r| r.count_ones()).collect();
    let mut order: Vec<usize> = (0..matrix.test_count()).collect();
    order.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));

    let mut tie_count = 0u64;
    let mut start = 0;
    while start < order.len() {
        let c = counts[order[start]];
        let end = start + order[start..].iter().take_while(|&&t| counts[t] == c).count();
        let run = &mut order[start..end];
        run.shuffle(&mut rng);
        // every pick but the last in a run of equal counts faces a tie
        tie_count += (run.len() - 1) as u64;
        start = end;
    }
    for &t in &order {
        observer.selected(t, Some(counts[t] as f64));
    }

    let mut ordering = Ordering::new(StrategyId::Total, seed, order);
    ordering.instrumentation.recompute_count = counts.len() as u64;
    ordering.instrumentation.tie_count = tie_count;
    ordering
}
