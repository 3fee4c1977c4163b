use super::{break_tie, strategy_rng, NoObserver, StepObserver};
use crate::coverage::{BitRow, CoverageMatrix, Ordering};
use crate::strategies::StrategyId;

/// Classic additional-greedy: every step rescans all candidates for the one
/// covering the most not-yet-covered units. When no candidate adds coverage
/// the covered set is cleared and the scan repeats on the remainder.
pub fn additional_greedy(matrix: &CoverageMatrix, seed: u64) -> Ordering {
    additional_greedy_observed(matrix, seed, &mut NoObserver)
}

pub fn additional_greedy_observed<O: StepObserver>(
    matrix: &CoverageMatrix,
    seed: u64,
    observer: &mut O,
) -> Ordering {
    let n = matrix.test_count();
    let mut rng = strategy_rng(seed);
    let mut covered = BitRow::new(matrix.unit_count());
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    let mut ties = Vec::new();
    let mut scores = Vec::new();
    let (mut recomputes, mut tie_count, mut restarts) = (0u64, 0u64, 0u64);

    while !remaining.is_empty() {
        let mut best = 0usize;
        ties.clear();
        scores.clear();
        for &t in &remaining {
            let gain = matrix.row(t).count_and_not(&covered);
            recomputes += 1;
            if observer.wants_scores() {
                scores.push((t, gain as f64));
            }
            if gain > best {
                best = gain;
                ties.clear();
            }
            if gain == best {
                ties.push(t);
            }
        }
        if observer.wants_scores() {
            observer.candidate_scores(&scores);
        }
        if best == 0 && !covered.is_empty() {
            covered.clear_all();
            restarts += 1;
            observer.restart();
            continue;
        }
        let pick = break_tie(&mut rng, &ties, &mut tie_count);
        covered.or_assign(matrix.row(pick));
        let pos = remaining.iter().position(|&t| t == pick).expect("pick is a candidate");
        remaining.remove(pos);
        order.push(pick);
        observer.selected(pick, Some(best as f64));
    }

    let mut ordering = Ordering::new(StrategyId::Additional, seed, order);
    ordering.instrumentation.recompute_count = recomputes;
    ordering.instrumentation.tie_count = tie_count;
    ordering.instrumentation.restart_count = restarts;
    ordering
}
