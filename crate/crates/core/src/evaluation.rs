//! Effectiveness and efficiency metrics over orderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::coverage::{BitRow, CoverageMatrix, KillMatrix, Ordering};
use crate::error::{Error, Result};
use crate::strategies::StrategyId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApfdRecord {
    pub strategy: StrategyId,
    pub seed: u64,
    pub apfd: f64,
    pub n: usize,
    pub m_faults: usize,
}

/// Sum over columns of the 1-based position of the first row in
/// `permutation` with that column set; unset columns count `n + 1`.
fn first_hit_position_sum(permutation: &[usize], rows: &[BitRow], width: usize) -> u64 {
    let n = permutation.len() as u64;
    let mut seen = BitRow::new(width);
    let mut found = 0usize;
    let mut sum = 0u64;
    for (pos, &t) in permutation.iter().enumerate() {
        if found == width {
            break;
        }
        let fresh = rows[t].count_and_not(&seen);
        if fresh > 0 {
            sum += (pos as u64 + 1) * fresh as u64;
            found += fresh;
            seen.or_assign(&rows[t]);
        }
    }
    sum + (width - found) as u64 * (n + 1)
}

fn check_universe(ordering: &Ordering, tests: usize, what: &str) -> Result<()> {
    if ordering.len() != tests {
        return Err(Error::UniverseMismatch(format!(
            "ordering has {} tests but the {what} has {tests}",
            ordering.len()
        )));
    }
    if let Some(&t) = ordering.permutation.iter().find(|&&t| t >= tests) {
        return Err(Error::UniverseMismatch(format!(
            "test index {t} is not in the {what} ({tests} tests)"
        )));
    }
    ordering
        .validate()
        .map_err(|e| Error::UniverseMismatch(e.to_string()))
}

/// Average percentage of faults detected:
/// `1 - sum(TF_i) / (n * m) + 1 / (2n)` with `TF_i` the 1-based position of
/// the first test killing fault `i`.
pub fn apfd(ordering: &Ordering, kills: &KillMatrix) -> Result<ApfdRecord> {
    check_universe(ordering, kills.test_count(), "kill matrix")?;
    let n = ordering.len();
    let m = kills.fault_count();
    let sum = first_hit_position_sum(&ordering.permutation, kills.rows(), m);
    if sum > (n * m) as u64 {
        return Err(Error::UndetectedFault {
            fault: (0..m)
                .find(|&f| kills.killers(f).is_empty())
                .unwrap_or_default(),
        });
    }
    let value = 1.0 - sum as f64 / (n as f64 * m as f64) + 1.0 / (2.0 * n as f64);
    Ok(ApfdRecord {
        strategy: ordering.strategy,
        seed: ordering.seed,
        apfd: value,
        n,
        m_faults: m,
    })
}

/// APSC of a raw permutation; the caller guarantees it is a permutation of
/// the matrix's tests.
pub fn apsc_of_permutation(permutation: &[usize], matrix: &CoverageMatrix) -> f64 {
    let n = permutation.len() as f64;
    let m = matrix.unit_count();
    let sum = first_hit_position_sum(permutation, matrix.rows(), m);
    1.0 - sum as f64 / (n * m as f64) + 1.0 / (2.0 * n)
}

/// Average percentage of statement coverage, the coverage analogue of APFD.
/// Units no test covers count as found at position `n + 1`, so the value can
/// drop below zero on degenerate input.
pub fn apsc(ordering: &Ordering, matrix: &CoverageMatrix) -> Result<f64> {
    check_universe(ordering, matrix.test_count(), "coverage matrix")?;
    Ok(apsc_of_permutation(&ordering.permutation, matrix))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyRow {
    pub strategy: StrategyId,
    pub runs: usize,
    pub mean_elapsed_ns: f64,
    pub median_elapsed_ns: f64,
    pub mean_recompute_count: f64,
    pub mean_tie_count: f64,
    pub mean_restart_count: f64,
}

/// `1 - mean(a) / mean(b)` for elapsed time and recompute count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Improvement {
    pub strategy: StrategyId,
    pub baseline: StrategyId,
    pub elapsed: f64,
    pub recompute: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyTable {
    pub rows: Vec<EfficiencyRow>,
    pub improvements: Vec<Improvement>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len().is_multiple_of(2) {
        (v[mid - 1] + v[mid]) / 2.0
    } else {
        v[mid]
    }
}

pub fn improvement_ratio(candidate: f64, baseline: f64) -> f64 {
    1.0 - candidate / baseline
}

/// Per-strategy means and medians of the run counters, plus the improvement
/// of every strategy over every other.
pub fn summarize_efficiency(orderings: &[Ordering]) -> EfficiencyTable {
    let mut by_strategy: BTreeMap<StrategyId, Vec<&Ordering>> = BTreeMap::new();
    for o in orderings {
        by_strategy.entry(o.strategy).or_default().push(o);
    }
    let rows: Vec<EfficiencyRow> = by_strategy
        .iter()
        .map(|(&strategy, runs)| {
            let col = |f: fn(&Ordering) -> u64| runs.iter().map(|o| f(o) as f64).collect::<Vec<_>>();
            let elapsed = col(|o| o.instrumentation.elapsed_ns);
            EfficiencyRow {
                strategy,
                runs: runs.len(),
                mean_elapsed_ns: mean(&elapsed),
                median_elapsed_ns: median(&elapsed),
                mean_recompute_count: mean(&col(|o| o.instrumentation.recompute_count)),
                mean_tie_count: mean(&col(|o| o.instrumentation.tie_count)),
                mean_restart_count: mean(&col(|o| o.instrumentation.restart_count)),
            }
        })
        .collect();
    let mut improvements = Vec::new();
    for a in &rows {
        for b in &rows {
            if a.strategy != b.strategy {
                improvements.push(Improvement {
                    strategy: a.strategy,
                    baseline: b.strategy,
                    elapsed: improvement_ratio(a.mean_elapsed_ns, b.mean_elapsed_ns),
                    recompute: improvement_ratio(a.mean_recompute_count, b.mean_recompute_count),
                });
            }
        }
    }
    EfficiencyTable { rows, improvements }
}

impl EfficiencyTable {
    pub fn row(&self, strategy: StrategyId) -> Option<&EfficiencyRow> {
        self.rows.iter().find(|r| r.strategy == strategy)
    }

    pub fn improvement(&self, strategy: StrategyId, baseline: StrategyId) -> Option<&Improvement> {
        self.improvements
            .iter()
            .find(|i| i.strategy == strategy && i.baseline == baseline)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "strategy,runs,mean_elapsed_ns,median_elapsed_ns,mean_recompute_count,mean_tie_count,mean_restart_count\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:.1},{:.1},{:.3},{:.3},{:.3}",
                r.strategy,
                r.runs,
                r.mean_elapsed_ns,
                r.median_elapsed_ns,
                r.mean_recompute_count,
                r.mean_tie_count,
                r.mean_restart_count
            );
        }
        out
    }

    pub fn to_pretty(&self) -> String {
        let mut out = format!(
            "{:<16} {:>5} {:>14} {:>14} {:>14} {:>9} {:>9}\n",
            "strategy", "runs", "mean ms", "median ms", "recomputes", "ties", "restarts"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<16} {:>5} {:>14.3} {:>14.3} {:>14.1} {:>9.2} {:>9.2}",
                r.strategy.as_str(),
                r.runs,
                r.mean_elapsed_ns / 1e6,
                r.median_elapsed_ns / 1e6,
                r.mean_recompute_count,
                r.mean_tie_count,
                r.mean_restart_count
            );
        }
        if !self.improvements.is_empty() {
            out.push_str("\nimprovement (1 - candidate/baseline)\n");
            for i in &self.improvements {
                let _ = writeln!(
                    out,
                    "{:<16} vs {:<16} time {:>7.1}%  recomputes {:>7.1}%",
                    i.strategy.as_str(),
                    i.baseline.as_str(),
                    i.elapsed * 100.0,
                    i.recompute * 100.0
                );
            }
        }
        out
    }
}
