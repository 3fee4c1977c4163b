use rand::seq::index;
use rand::Rng;

use super::{break_tie, strategy_rng, NoObserver, StepObserver};
use crate::coverage::{BitRow, CoverageMatrix, Ordering};
use crate::strategies::StrategyId;

/// `1 - |a ∩ b| / |a ∪ b|`, and 0 when both rows are empty.
pub fn jaccard_distance(a: &BitRow, b: &BitRow) -> f64 {
    let union = a.count_or(b);
    if union == 0 {
        0.0
    } else {
        1.0 - a.count_and(b) as f64 / union as f64
    }
}

/// Adaptive random prioritization. The first test is random; afterwards a
/// random candidate set of up to `candidate_size` unselected tests is drawn
/// and the candidate farthest (max-min Jaccard distance) from the selected
/// tests wins.
pub fn art_based(matrix: &CoverageMatrix, seed: u64, candidate_size: usize) -> Ordering {
    art_based_observed(matrix, seed, candidate_size, &mut NoObserver)
}

pub fn art_based_observed<O: StepObserver>(
    matrix: &CoverageMatrix,
    seed: u64,
    candidate_size: usize,
    observer: &mut O,
) -> Ordering {
    assert!(candidate_size >= 1, "candidate size must be positive");
    let n = matrix.test_count();
    let mut rng = strategy_rng(seed);
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    // min distance of each test to order[..checked[t]]
    let mut min_dist = vec![f64::INFINITY; n];
    let mut checked = vec![0usize; n];
    let mut ties = Vec::new();
    let mut scores = Vec::new();
    let (mut recomputes, mut tie_count) = (0u64, 0u64);

    let first = remaining.swap_remove(rng.gen_range(0..n));
    order.push(first);
    observer.selected(first, None);

    while !remaining.is_empty() {
        let k = candidate_size.min(remaining.len());
        let mut pool: Vec<usize> = index::sample(&mut rng, remaining.len(), k).into_vec();
        pool.sort_unstable();
        let mut best = f64::NEG_INFINITY;
        ties.clear();
        scores.clear();
        for &slot in &pool {
            let t = remaining[slot];
            for &s in &order[checked[t]..] {
                min_dist[t] = min_dist[t].min(jaccard_distance(matrix.row(t), matrix.row(s)));
                recomputes += 1;
            }
            checked[t] = order.len();
            let d = min_dist[t];
            if observer.wants_scores() {
                scores.push((t, d));
            }
            if d > best {
                best = d;
                ties.clear();
            }
            if d == best {
                ties.push(slot);
            }
        }
        if observer.wants_scores() {
            observer.candidate_scores(&scores);
        }
        let slot = break_tie(&mut rng, &ties, &mut tie_count);
        let pick = remaining.swap_remove(slot);
        order.push(pick);
        observer.selected(pick, Some(best));
    }

    let mut ordering = Ordering::new(StrategyId::Art, seed, order);
    ordering.instrumentation.recompute_count = recomputes;
    ordering.instrumentation.tie_count = tie_count;
    ordering
}
