use super::{break_tie, strategy_rng, NoObserver, StepObserver};
use crate::coverage::{CoverageMatrix, Ordering};
use crate::strategies::StrategyId;

/// Scores within this distance of the best are treated as tied.
pub const UNIFIED_TIE_TOLERANCE: f64 = 1e-12;

/// Unified greedy: every unit carries a weight (initially 1) standing in for
/// the chance that it still hides an undetected fault. A test scores the sum
/// of the weights it covers; after a test is selected each unit it covers has
/// its weight multiplied by `1 - ratio`.
///
/// `ratio = 0` degenerates to total-greedy scores, `ratio = 1` to
/// additional-greedy scores without restarts.
pub fn unified_greedy(matrix: &CoverageMatrix, seed: u64, ratio: f64) -> Ordering {
    unified_greedy_observed(matrix, seed, ratio, &mut NoObserver)
}

pub fn unified_greedy_observed<O: StepObserver>(
    matrix: &CoverageMatrix,
    seed: u64,
    ratio: f64,
    observer: &mut O,
) -> Ordering {
    assert!((0.0..=1.0).contains(&ratio), "unified ratio {ratio} outside [0, 1]");
    let n = matrix.test_count();
    let keep = 1.0 - ratio;
    let mut rng = strategy_rng(seed);
    let mut weights = vec![1.0f64; matrix.unit_count()];
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    let mut scores: Vec<(usize, f64)> = Vec::with_capacity(n);
    let mut ties = Vec::new();
    let (mut recomputes, mut tie_count) = (0u64, 0u64);

    while !remaining.is_empty() {
        scores.clear();
        scores.extend(
            remaining
                .iter()
                .map(|&t| (t, matrix.row(t).ones().map(|j| weights[j]).sum::<f64>())),
        );
        recomputes += scores.len() as u64;
        if observer.wants_scores() {
            observer.candidate_scores(&scores);
        }
        let best = scores.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        ties.clear();
        ties.extend(
            scores
                .iter()
                .filter(|s| best - s.1 <= UNIFIED_TIE_TOLERANCE)
                .map(|s| s.0),
        );
        let pick = break_tie(&mut rng, &ties, &mut tie_count);
        for j in matrix.row(pick).ones() {
            weights[j] *= keep;
        }
        let pos = remaining.iter().position(|&t| t == pick).expect("pick is a candidate");
        remaining.remove(pos);
        order.push(pick);
        observer.selected(pick, Some(best));
    }

    let mut ordering = Ordering::new(StrategyId::Unified, seed, order);
    ordering.instrumentation.recompute_count = recomputes;
    ordering.instrumentation.tie_count = tie_count;
    ordering
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::fixtures::m0;
    use crate::strategies::{StepTrace, TraceEvent};

    #[test]
    fn ratio_one_on_m0_follows_additional_picks() {
        for seed in 0..50 {
            let p = unified_greedy(&m0(), seed, 1.0).permutation;
            assert!(p == vec![1, 2, 3, 0] || p == vec![1, 3, 2, 0], "{p:?}");
        }
    }

    #[test]
    fn half_ratio_hand_trace() {
        // a {0,1}, b {1,2}, c {2,3}: initial scores 2,2,2.
        let m = CoverageMatrix::with_default_names(4, vec![vec![0, 1], vec![1, 2], vec![2, 3]])
            .unwrap();
        let mut trace = StepTrace::default();
        let o = unified_greedy_observed(&m, 3, 0.5, &mut trace);
        let steps: Vec<Vec<(usize, f64)>> = trace
            .events
            .iter()
            .filter_map(|e| match e {
                TraceEvent::Scores(s) => Some(s.clone()),
                _ => None,
            })
            .collect();
        assert_eq!(steps[0], vec![(0, 2.0), (1, 2.0), (2, 2.0)]);
        assert!(o.instrumentation.tie_count >= 1);
        assert_eq!(o.instrumentation.recompute_count, 3 + 2 + 1);
    }
}
