use super::{break_tie, strategy_rng, NoObserver, StepObserver};
use crate::coverage::{CoverageMatrix, Ordering};
use crate::strategies::StrategyId;

/// `sig[c]` = number of units covered by `row` that selected tests have
/// covered exactly `c` times so far.
pub(crate) fn signature(
    row: impl Iterator<Item = usize>,
    counts: &[u32],
    max_count: u32,
    sig: &mut Vec<u32>,
) {
    sig.clear();
    sig.resize(max_count as usize + 1, 0);
    for j in row {
        sig[counts[j] as usize] += 1;
    }
}

/// Lexicographical greedy: prefer the test covering the most units no
/// selected test covers yet, break ties by units covered once, then twice,
/// and so on.
pub fn lexicographical_greedy(matrix: &CoverageMatrix, seed: u64) -> Ordering {
    lexicographical_greedy_observed(matrix, seed, &mut NoObserver)
}

pub fn lexicographical_greedy_observed<O: StepObserver>(
    matrix: &CoverageMatrix,
    seed: u64,
    observer: &mut O,
) -> Ordering {
    let n = matrix.test_count();
    let mut rng = strategy_rng(seed);
    let mut counts = vec![0u32; matrix.unit_count()];
    let mut max_count = 0u32;
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    let mut best: Vec<u32> = Vec::new();
    let mut sig: Vec<u32> = Vec::new();
    let mut ties = Vec::new();
    let (mut recomputes, mut tie_count) = (0u64, 0u64);

    while !remaining.is_empty() {
        ties.clear();
        best.clear();
        for &t in &remaining {
            signature(matrix.row(t).ones(), &counts, max_count, &mut sig);
            recomputes += 1;
            match sig.cmp(&best) {
                std::cmp::Ordering::Greater => {
                    std::mem::swap(&mut best, &mut sig);
                    ties.clear();
                    ties.push(t);
                }
                std::cmp::Ordering::Equal => ties.push(t),
                std::cmp::Ordering::Less => {}
            }
        }
        let pick = break_tie(&mut rng, &ties, &mut tie_count);
        for j in matrix.row(pick).ones() {
            counts[j] += 1;
            max_count = max_count.max(counts[j]);
        }
        let pos = remaining.iter().position(|&t| t == pick).expect("pick is a candidate");
        remaining.remove(pos);
        order.push(pick);
        observer.selected(pick, Some(best[0] as f64));
    }

    let mut ordering = Ordering::new(StrategyId::Lexicographical, seed, order);
    ordering.instrumentation.recompute_count = recomputes;
    ordering.instrumentation.tie_count = tie_count;
    ordering
}
