//! Rank statistics for comparing two strategies' APFD samples: the two-sided
//! Mann–Whitney U test and the Vargha–Delaney Â12 effect size.

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::evaluation::ApfdRecord;

/// Combined size at or below which tie-free samples use the exact null
/// distribution of U.
pub const EXACT_MAX_COMBINED: usize = 20;

pub const DEFAULT_ALPHA: f64 = 0.05;

struct RankSums {
    /// Sum of the midranks of sample `a` in the pooled sample.
    rank_sum_a: f64,
    /// `sum(t^3 - t)` over tie groups.
    tie_term: f64,
    has_ties: bool,
}

fn rank_sums(a: &[f64], b: &[f64]) -> Result<RankSums> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::NanSample);
    }
    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&x| (x, true))
        .chain(b.iter().map(|&x| (x, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i + 1;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        // ranks i+1..=j share their mean
        let midrank = (i + 1 + j) as f64 / 2.0;
        let in_a = pooled[i..j].iter().filter(|p| p.1).count();
        rank_sum_a += midrank * in_a as f64;
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    Ok(RankSums {
        rank_sum_a,
        tie_term,
        has_ties: tie_term > 0.0,
    })
}

fn u_statistic(sums: &RankSums, na: usize) -> f64 {
    sums.rank_sum_a - (na * (na + 1)) as f64 / 2.0
}

/// Number of ways to draw `na` of the ranks `1..=na+nb` for each achievable U.
fn exact_u_counts(na: usize, nb: usize) -> Vec<f64> {
    let total = na + nb;
    let max_sum = total * (total + 1) / 2;
    // ways[k][s]: subsets of size k with rank sum s
    let mut ways = vec![vec![0f64; max_sum + 1]; na + 1];
    ways[0][0] = 1.0;
    for rank in 1..=total {
        for k in (1..=na.min(rank)).rev() {
            for s in (rank..=max_sum).rev() {
                ways[k][s] += ways[k - 1][s - rank];
            }
        }
    }
    let offset = na * (na + 1) / 2;
    ways[na][offset..=offset + na * nb].to_vec()
}

/// Two-sided p-value of the Mann–Whitney U test.
///
/// Tie-free samples with combined size at most [`EXACT_MAX_COMBINED`] use the
/// exact permutation distribution. Otherwise the normal approximation with
/// midrank tie correction and a 0.5 continuity correction is used.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<f64> {
    let sums = rank_sums(a, b)?;
    let (na, nb) = (a.len(), b.len());
    let u = u_statistic(&sums, na);

    if na + nb <= EXACT_MAX_COMBINED && !sums.has_ties {
        let counts = exact_u_counts(na, nb);
        let total: f64 = counts.iter().sum();
        let u = u.round() as usize;
        let lower: f64 = counts[..=u].iter().sum();
        let upper: f64 = counts[u..].iter().sum();
        return Ok((2.0 * lower.min(upper) / total).min(1.0));
    }

    let (na, nb) = (na as f64, nb as f64);
    let n = na + nb;
    let mean = na * nb / 2.0;
    let variance = na * nb / 12.0 * ((n + 1.0) - sums.tie_term / (n * (n - 1.0)));
    if variance <= 0.0 {
        return Ok(1.0);
    }
    let z = ((u - mean).abs() - 0.5).max(0.0) / variance.sqrt();
    Ok(erfc(z / std::f64::consts::SQRT_2).min(1.0))
}

/// Vargha–Delaney Â12: probability that a draw from `a` exceeds a draw from
/// `b`, ties counting one half. Computed from rank sums.
pub fn vargha_delaney_a12(a: &[f64], b: &[f64]) -> Result<f64> {
    let sums = rank_sums(a, b)?;
    Ok(u_statistic(&sums, a.len()) / (a.len() * b.len()) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Better,
    Worse,
    NoDifference,
}

impl Verdict {
    pub fn symbol(self) -> &'static str {
        match self {
            Verdict::Better => "BETTER",
            Verdict::Worse => "WORSE",
            Verdict::NoDifference => "NODIFF",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatSummary {
    pub p_value: f64,
    pub a12: f64,
    pub verdict: Verdict,
    pub alpha: f64,
    pub sample_sizes: (usize, usize),
}

impl StatSummary {
    /// Table cell such as `BETTER (0.88)`.
    pub fn cell(&self) -> String {
        format!("{} ({:.2})", self.verdict, self.a12)
    }
}

pub fn verdict(p_value: f64, a12: f64, alpha: f64) -> Verdict {
    if p_value < alpha && a12 > 0.5 {
        Verdict::Better
    } else if p_value < alpha && a12 < 0.5 {
        Verdict::Worse
    } else {
        Verdict::NoDifference
    }
}

/// Compares raw samples, orienting Â12 as `A12(a, b)`.
pub fn compare_samples(a: &[f64], b: &[f64], alpha: f64) -> Result<StatSummary> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidConfig(format!("alpha {alpha} outside [0, 1]")));
    }
    let p_value = mann_whitney_u(a, b)?;
    let a12 = vargha_delaney_a12(a, b)?;
    Ok(StatSummary {
        p_value,
        a12,
        verdict: verdict(p_value, a12, alpha),
        alpha,
        sample_sizes: (a.len(), b.len()),
    })
}

/// Compares the APFD values of two sets of runs.
pub fn compare(a: &[ApfdRecord], b: &[ApfdRecord], alpha: f64) -> Result<StatSummary> {
    let xs: Vec<f64> = a.iter().map(|r| r.apfd).collect();
    let ys: Vec<f64> = b.iter().map(|r| r.apfd).collect();
    compare_samples(&xs, &ys, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_complete_separation() {
        let p = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert!((p - 0.1).abs() < 1e-15, "{p}");
        let p = mann_whitney_u(&[4.0, 5.0, 6.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!((p - 0.1).abs() < 1e-15, "{p}");
    }

    #[test]
    fn exact_counts_sum_to_binomial() {
        let c = exact_u_counts(3, 3);
        assert_eq!(c.len(), 10);
        assert_eq!(c.iter().sum::<f64>(), 20.0);
        assert_eq!(c[0], 1.0);
        assert_eq!(c[9], 1.0);
    }

    #[test]
    fn identical_samples() {
        let a: Vec<f64> = (1..=10).map(f64::from).collect();
        assert!(mann_whitney_u(&a, &a).unwrap() >= 0.99);
        assert_eq!(vargha_delaney_a12(&a, &a).unwrap(), 0.5);
        let c = [0.7; 30];
        assert_eq!(mann_whitney_u(&c, &c).unwrap(), 1.0);
    }

    #[test]
    fn a12_dominance_and_errors() {
        assert_eq!(vargha_delaney_a12(&[4.0, 5.0, 6.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(vargha_delaney_a12(&[1.0], &[1.0, 2.0]).unwrap(), 0.25);
        assert!(matches!(vargha_delaney_a12(&[], &[1.0]), Err(Error::EmptySample)));
        assert!(matches!(mann_whitney_u(&[1.0], &[]), Err(Error::EmptySample)));
        assert!(matches!(mann_whitney_u(&[f64::NAN], &[1.0]), Err(Error::NanSample)));
    }

    #[test]
    fn verdict_rules() {
        assert_eq!(verdict(0.01, 0.9, 0.05), Verdict::Better);
        assert_eq!(verdict(0.01, 0.1, 0.05), Verdict::Worse);
        assert_eq!(verdict(0.01, 0.5, 0.05), Verdict::NoDifference);
        assert_eq!(verdict(0.2, 0.9, 0.05), Verdict::NoDifference);
        let s = compare_samples(&[1.0, 2.0], &[1.0, 2.0], 0.05).unwrap();
        assert_eq!(s.cell(), "NODIFF (0.50)");
    }
}
