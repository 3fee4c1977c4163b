mod common;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use testorder::stats::{compare, compare_samples, mann_whitney_u, vargha_delaney_a12, Verdict};
use testorder::{ApfdRecord, StrategyId};

use common::*;

#[test]
fn exact_p_matches_enumeration() {
    let a = [1.0, 2.0, 3.0];
    let b = [4.0, 5.0, 6.0];
    let oracle = mwu_exact_enumeration(&a, &b);
    assert!((oracle - 0.1).abs() < 1e-15);
    assert!((mann_whitney_u(&a, &b).unwrap() - oracle).abs() < 1e-15);

    let mut r = rng(1);
    for _ in 0..30 {
        let na = r.gen_range(1..8);
        let nb = r.gen_range(1..8);
        let a: Vec<f64> = (0..na).map(|_| r.gen::<f64>()).collect();
        let b: Vec<f64> = (0..nb).map(|_| r.gen::<f64>() + 0.2).collect();
        let p = mann_whitney_u(&a, &b).unwrap();
        assert!((p - mwu_exact_enumeration(&a, &b)).abs() < 1e-12, "{a:?} {b:?}");
    }
}

#[test]
fn a12_rank_sum_equals_pairwise() {
    let mut r = rng(2);
    for _ in 0..100 {
        // coarse values to force plenty of ties
        let a: Vec<f64> = (0..40).map(|_| r.gen_range(0..20) as f64 / 4.0).collect();
        let b: Vec<f64> = (0..40).map(|_| r.gen_range(0..20) as f64 / 4.0).collect();
        assert_eq!(vargha_delaney_a12(&a, &b).unwrap(), a12_pairwise(&a, &b));
        assert_eq!(vargha_delaney_a12(&a, &b).unwrap() + vargha_delaney_a12(&b, &a).unwrap(), 1.0);
    }
}

#[test]
fn symmetry_and_monotone_invariance() {
    let mut r = rng(3);
    for _ in 0..50 {
        let a: Vec<f64> = (0..25).map(|_| r.gen::<f64>()).collect();
        let b: Vec<f64> = (0..30).map(|_| r.gen::<f64>() * 1.2).collect();
        let p_ab = mann_whitney_u(&a, &b).unwrap();
        let p_ba = mann_whitney_u(&b, &a).unwrap();
        assert!((p_ab - p_ba).abs() < 1e-12);
        let f = |x: &f64| (3.0 * x).exp() + 1.0;
        let fa: Vec<f64> = a.iter().map(f).collect();
        let fb: Vec<f64> = b.iter().map(f).collect();
        assert_eq!(vargha_delaney_a12(&a, &b).unwrap(), vargha_delaney_a12(&fa, &fb).unwrap());
    }
}

#[test]
fn null_rejection_rate_is_calibrated() {
    let mut r = rng(4);
    let normal = Normal::new(0.7, 0.05).unwrap();
    let sims = 500;
    let mut rejected = 0;
    for _ in 0..sims {
        let a: Vec<f64> = (0..30).map(|_| normal.sample(&mut r)).collect();
        let b: Vec<f64> = (0..30).map(|_| normal.sample(&mut r)).collect();
        if mann_whitney_u(&a, &b).unwrap() < 0.05 {
            rejected += 1;
        }
    }
    let rate = rejected as f64 / sims as f64;
    assert!((0.03..=0.07).contains(&rate), "rejection rate {rate}");
}

fn records(values: impl IntoIterator<Item = f64>) -> Vec<ApfdRecord> {
    values
        .into_iter()
        .enumerate()
        .map(|(i, apfd)| ApfdRecord { strategy: StrategyId::Ocp, seed: i as u64, apfd, n: 10, m_faults: 3 })
        .collect()
}

#[test]
fn verdicts_on_constructed_samples() {
    let mut r = rng(5);
    let same = records((0..100).map(|i| 0.5 + i as f64 / 1000.0));
    assert_eq!(compare(&same, &same, 0.05).unwrap().verdict, Verdict::NoDifference);

    let high = records((0..1000).map(|_| 0.9 + r.gen_range(-0.01..0.01)));
    let low = records((0..1000).map(|_| 0.4 + r.gen_range(-0.01..0.01)));
    let s = compare(&high, &low, 0.05).unwrap();
    assert_eq!(s.verdict, Verdict::Better);
    assert!(s.a12 > 0.999);
    assert_eq!(s.sample_sizes, (1000, 1000));
    assert_eq!(compare(&low, &high, 0.05).unwrap().verdict, Verdict::Worse);

    let shifted = records((0..200).map(|_| r.gen::<f64>() * 0.5));
    let base = records((0..200).map(|_| 0.2 + r.gen::<f64>() * 0.5));
    assert_eq!(compare(&shifted, &base, 0.05).unwrap().verdict, Verdict::Worse);

    assert!(compare_samples(&[1.0], &[2.0], 2.0).is_err());
}
