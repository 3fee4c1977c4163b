//! Brute-force oracles shared by the integration tests. Everything here works
//! on plain `Vec<bool>` rows and recomputes from scratch, independent of the
//! packed-bit paths the strategies use.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use testorder::strategies::TraceEvent;
use testorder::CoverageMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_bools(rng: &mut ChaCha8Rng, n: usize, m: usize, density: f64) -> Vec<Vec<bool>> {
    (0..n)
        .map(|_| (0..m).map(|_| rng.gen_bool(density)).collect())
        .collect()
}

pub fn to_matrix(rows: &[Vec<bool>]) -> CoverageMatrix {
    let m = rows[0].len();
    let covers = rows
        .iter()
        .map(|r| (0..m).filter(|&j| r[j]).collect())
        .collect();
    CoverageMatrix::with_default_names(m, covers).unwrap()
}

pub fn to_bools(matrix: &CoverageMatrix) -> Vec<Vec<bool>> {
    (0..matrix.test_count())
        .map(|t| (0..matrix.unit_count()).map(|u| matrix.covers(t, u)).collect())
        .collect()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, m: usize, density: f64) -> (CoverageMatrix, Vec<Vec<bool>>) {
    let rows = random_bools(rng, n, m, density);
    (to_matrix(&rows), rows)
}

/// The 200-instance family: n <= 50, m <= 100, densities cycling 0.05/0.2/0.5.
pub fn instance_family(count: usize, seed: u64) -> Vec<(CoverageMatrix, Vec<Vec<bool>>, f64)> {
    let mut r = rng(seed);
    let densities = [0.05, 0.2, 0.5];
    (0..count)
        .map(|i| {
            let n = r.gen_range(2..=50);
            let m = r.gen_range(1..=100);
            let d = densities[i % densities.len()];
            let (mat, rows) = random_matrix(&mut r, n, m, d);
            (mat, rows, d)
        })
        .collect()
}

pub fn additional_gain(row: &[bool], covered: &[bool]) -> usize {
    row.iter().zip(covered).filter(|(&r, &c)| r && !c).count()
}

pub fn popcount(row: &[bool]) -> usize {
    row.iter().filter(|&&b| b).count()
}

#[derive(Debug, Default)]
pub struct ReplayReport {
    /// Selections whose gain was below the brute-force maximum.
    pub optimality_violations: Vec<String>,
    /// Candidates whose gain rose between consecutive selections.
    pub monotonicity_violations: Vec<String>,
    /// Restarts that happened while some candidate still added coverage.
    pub premature_restarts: usize,
    pub selections: usize,
}

/// Replays an additional-greedy style trace, recomputing every candidate's
/// additional coverage from scratch before each selection.
pub fn replay_additional(rows: &[Vec<bool>], events: &[TraceEvent]) -> ReplayReport {
    let n = rows.len();
    let m = rows[0].len();
    let mut covered = vec![false; m];
    let mut selected = vec![false; n];
    let mut last_gain: Vec<Option<usize>> = vec![None; n];
    let mut report = ReplayReport::default();
    for event in events {
        match event {
            TraceEvent::Scores(_) => {}
            TraceEvent::Restart => {
                let max = (0..n)
                    .filter(|&t| !selected[t])
                    .map(|t| additional_gain(&rows[t], &covered))
                    .max()
                    .unwrap_or(0);
                if max > 0 {
                    report.premature_restarts += 1;
                }
                covered.iter_mut().for_each(|c| *c = false);
                last_gain.iter_mut().for_each(|g| *g = None);
            }
            TraceEvent::Selected { test, .. } => {
                let gains: Vec<(usize, usize)> = (0..n)
                    .filter(|&t| !selected[t])
                    .map(|t| (t, additional_gain(&rows[t], &covered)))
                    .collect();
                let max = gains.iter().map(|g| g.1).max().unwrap();
                let mine = additional_gain(&rows[*test], &covered);
                if mine != max {
                    report.optimality_violations.push(format!(
                        "step {}: picked t{test} with gain {mine}, max {max}",
                        report.selections
                    ));
                }
                for &(t, g) in &gains {
                    if let Some(prev) = last_gain[t] {
                        if g > prev {
                            report.monotonicity_violations.push(format!(
                                "step {}: t{t} rose from {prev} to {g}",
                                report.selections
                            ));
                        }
                    }
                    last_gain[t] = Some(g);
                }
                selected[*test] = true;
                for (c, &r) in covered.iter_mut().zip(&rows[*test]) {
                    *c |= r;
                }
                report.selections += 1;
            }
        }
    }
    report
}

pub fn scores_per_step(events: &[TraceEvent]) -> Vec<Vec<(usize, f64)>> {
    events
        .iter()
        .filter_map(|e| match e {
            TraceEvent::Scores(s) => Some(s.clone()),
            _ => None,
        })
        .collect()
}

/// 1-based position of the first row in `perm` with column `j` set, or
/// `n + 1`.
pub fn first_position(rows: &[Vec<bool>], perm: &[usize], j: usize) -> usize {
    perm.iter()
        .position(|&t| rows[t][j])
        .map(|p| p + 1)
        .unwrap_or(perm.len() + 1)
}

/// APFD/APSC by scanning positions column by column.
pub fn apfd_scan(rows: &[Vec<bool>], perm: &[usize]) -> f64 {
    let n = perm.len() as f64;
    let m = rows[0].len();
    let sum: usize = (0..m).map(|j| first_position(rows, perm, j)).sum();
    1.0 - sum as f64 / (n * m as f64) + 1.0 / (2.0 * n)
}

pub fn jaccard(a: &[bool], b: &[bool]) -> f64 {
    let inter = a.iter().zip(b).filter(|(&x, &y)| x && y).count();
    let union = a.iter().zip(b).filter(|(&x, &y)| x || y).count();
    if union == 0 {
        0.0
    } else {
        1.0 - inter as f64 / union as f64
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Pairwise-count Â12.
pub fn a12_pairwise(a: &[f64], b: &[f64]) -> f64 {
    let mut wins = 0.0;
    for &x in a {
        for &y in b {
            if x > y {
                wins += 1.0;
            } else if x == y {
                wins += 0.5;
            }
        }
    }
    wins / (a.len() * b.len()) as f64
}

/// Exact two-sided Mann–Whitney p-value by enumerating every way of
/// assigning the pooled (tie-free) values to two groups of the given sizes.
pub fn mwu_exact_enumeration(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let total = pooled.len();
    let na = a.len();
    let u_of = |group: &[usize]| -> f64 {
        let xs: Vec<f64> = group.iter().map(|&i| pooled[i]).collect();
        let ys: Vec<f64> = (0..total).filter(|i| !group.contains(i)).map(|i| pooled[i]).collect();
        xs.iter()
            .map(|&x| ys.iter().filter(|&&y| x > y).count() as f64)
            .sum()
    };
    let observed = u_of(&(0..na).collect::<Vec<_>>());
    let (mut le, mut ge, mut count) = (0u64, 0u64, 0u64);
    for mask in 0u32..(1 << total) {
        if mask.count_ones() as usize != na {
            continue;
        }
        let group: Vec<usize> = (0..total).filter(|&i| mask >> i & 1 == 1).collect();
        let u = u_of(&group);
        count += 1;
        if u <= observed {
            le += 1;
        }
        if u >= observed {
            ge += 1;
        }
    }
    (2.0 * le.min(ge) as f64 / count as f64).min(1.0)
}
