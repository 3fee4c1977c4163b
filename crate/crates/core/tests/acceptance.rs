//! Acceptance criteria. Runs without the libtest harness so every criterion
//! prints one PASS/FAIL line; exits non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use testorder::evaluation::{apfd, apsc_of_permutation};
use testorder::harness::{self, ExperimentPlan, SynthSpec};
use testorder::stats::{mann_whitney_u, vargha_delaney_a12};
use testorder::strategies::{
    additional_greedy, additional_greedy_observed, ocp, ocp_observed, search_based,
    unified_greedy_observed, GaConfig, StepTrace,
};
use testorder::{CoverageMatrix, KillMatrix, StrategyId};

use common::*;

type Outcome = Result<String, String>;

fn m0() -> CoverageMatrix {
    CoverageMatrix::new(
        vec!["t1".into(), "t2".into(), "t3".into(), "t4".into()],
        6,
        vec![vec![0, 2], vec![0, 2, 3, 5], vec![1, 2], vec![0, 3, 4]],
    )
    .unwrap()
}

fn m0_kills() -> KillMatrix {
    KillMatrix::new(
        vec!["t1".into(), "t2".into(), "t3".into(), "t4".into()],
        1,
        vec![vec![], vec![], vec![], vec![0]],
    )
    .unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden_motivating_example() -> Outcome {
    let kills = m0_kills();
    let o = ocp(&m0(), 0);
    ensure(o.permutation == vec![1, 3, 2, 0], || format!("OCP gave {:?}", o.permutation))?;
    let value = apfd(&o, &kills).map_err(|e| e.to_string())?.apfd;
    ensure(value == 0.625, || format!("OCP APFD {value}"))?;

    let allowed: BTreeSet<Vec<usize>> = [vec![1, 2, 3, 0], vec![1, 3, 2, 0]].into_iter().collect();
    let mut seen = BTreeSet::new();
    let mut values = BTreeSet::new();
    for seed in 0..1000 {
        let a = additional_greedy(&m0(), seed);
        ensure(allowed.contains(&a.permutation), || {
            format!("additional seed {seed} gave {:?}", a.permutation)
        })?;
        let v = apfd(&a, &kills).map_err(|e| e.to_string())?.apfd;
        ensure(v == 0.375 || v == 0.625, || format!("additional APFD {v}"))?;
        values.insert(v.to_bits());
        seen.insert(a.permutation);
    }
    Ok(format!(
        "OCP <t2,t4,t3,t1> APFD 0.625; additional over 1000 seeds: {} orderings, {} APFD values",
        seen.len(),
        values.len()
    ))
}

const FAMILY_SEED: u64 = 0xacce_55ed;

fn ocp_step_optimality() -> Outcome {
    let mut violations = 0;
    let mut steps = 0;
    for (i, (m, rows, _)) in instance_family(200, FAMILY_SEED).into_iter().enumerate() {
        let mut trace = StepTrace::default();
        ocp_observed(&m, i as u64, &mut trace);
        let report = replay_additional(&rows, &trace.events);
        violations += report.optimality_violations.len() + report.premature_restarts;
        steps += report.selections;
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok(format!("200 instances, {steps} selections, 0 violations"))
}

fn laziness_bound() -> Outcome {
    let (mut ocp_total, mut add_total, mut strict_needed) = (0u64, 0u64, 0);
    for (i, (m, rows, _)) in instance_family(200, FAMILY_SEED).into_iter().enumerate() {
        let o = ocp(&m, i as u64).instrumentation.recompute_count;
        let a = additional_greedy(&m, i as u64).instrumentation.recompute_count;
        ensure(o <= a, || format!("instance {i}: ocp {o} > additional {a}"))?;
        let counts: BTreeSet<usize> = rows.iter().map(|r| popcount(r)).collect();
        if counts.len() > 1 {
            strict_needed += 1;
            ensure(o < a, || format!("instance {i}: ocp {o} == additional {a}"))?;
        }
        ocp_total += o;
        add_total += a;
    }
    Ok(format!(
        "strict on {strict_needed} instances with distinct popcounts; total recomputes {ocp_total} vs {add_total}"
    ))
}

fn desk_scale_efficiency() -> Outcome {
    let spec = SynthSpec::new(2000, 10000, 0.02, 30, 7);
    let (matrix, _) = harness::synthesize(&spec).map_err(|e| e.to_string())?;
    let mut plan = ExperimentPlan::new("synth");
    plan.strategies = vec![StrategyId::Ocp, StrategyId::Additional];
    plan.repeats = 20;
    plan.base_seed = 7;
    let (table, _) = harness::bench_matrix(&matrix, &plan, harness::DEFAULT_WARMUP).map_err(|e| e.to_string())?;
    let o = table.row(StrategyId::Ocp).unwrap();
    let a = table.row(StrategyId::Additional).unwrap();
    let ratio = o.mean_recompute_count / a.mean_recompute_count;
    let detail = format!(
        "mean time ocp {:.1} ms vs additional {:.1} ms ({:.1}% less); recompute ratio {ratio:.4}",
        o.mean_elapsed_ns / 1e6,
        a.mean_elapsed_ns / 1e6,
        100.0 * (1.0 - o.mean_elapsed_ns / a.mean_elapsed_ns)
    );
    ensure(o.mean_elapsed_ns < a.mean_elapsed_ns && ratio <= 0.5, || detail.clone())?;
    Ok(detail)
}

fn monotonicity() -> Outcome {
    let mut r = rng(55);
    let mut violations = 0;
    for i in 0..100 {
        let n = r.gen_range(2..=40);
        let m = r.gen_range(1..=80);
        let d = [0.05, 0.2, 0.5][i % 3];
        let (mat, rows) = random_matrix(&mut r, n, m, d);
        let mut t1 = StepTrace::default();
        additional_greedy_observed(&mat, i as u64, &mut t1);
        let mut t2 = StepTrace::default();
        ocp_observed(&mat, i as u64, &mut t2);
        violations += replay_additional(&rows, &t1.events).monotonicity_violations.len();
        violations += replay_additional(&rows, &t2.events).monotonicity_violations.len();
    }
    ensure(violations == 0, || format!("{violations} increases"))?;
    Ok("100 instances, additional and OCP, 0 increases".into())
}

fn unified_endpoints() -> Outcome {
    const TOL: f64 = 1e-12;
    let mut r = rng(66);
    let mut compared = 0;
    for i in 0..50 {
        let n = r.gen_range(2..=30);
        let m = r.gen_range(1..=60);
        let (mat, rows) = random_matrix(&mut r, n, m, 0.2);
        let mut zero = StepTrace::default();
        unified_greedy_observed(&mat, i, 0.0, &mut zero);
        for scan in scores_per_step(&zero.events) {
            for (t, s) in scan {
                ensure((s - popcount(&rows[t]) as f64).abs() <= TOL, || {
                    format!("instance {i}: ratio 0 score {s} vs total {}", popcount(&rows[t]))
                })?;
                compared += 1;
            }
        }
        let mut one = StepTrace::default();
        unified_greedy_observed(&mat, i, 1.0, &mut one);
        let mut covered = vec![false; m];
        for (scan, pick) in scores_per_step(&one.events).iter().zip(one.selections()) {
            for &(t, s) in scan {
                let g = additional_gain(&rows[t], &covered) as f64;
                ensure((s - g).abs() <= TOL, || format!("instance {i}: ratio 1 score {s} vs additional {g}"))?;
                compared += 1;
            }
            for (c, &b) in covered.iter_mut().zip(&rows[pick]) {
                *c |= b;
            }
        }
    }
    Ok(format!("{compared} scores within 1e-12"))
}

fn statistics() -> Outcome {
    let mut r = rng(77);
    let same: Vec<f64> = (0..40).map(|_| r.gen::<f64>()).collect();
    let a12 = vargha_delaney_a12(&same, &same).map_err(|e| e.to_string())?;
    ensure(a12 == 0.5, || format!("A12(identical) = {a12}"))?;

    for i in 0..100 {
        let a: Vec<f64> = (0..40).map(|_| r.gen_range(0..25) as f64 / 25.0).collect();
        let b: Vec<f64> = (0..40).map(|_| r.gen_range(0..25) as f64 / 25.0).collect();
        let fast = vargha_delaney_a12(&a, &b).unwrap();
        let slow = a12_pairwise(&a, &b);
        ensure(fast == slow, || format!("pair {i}: rank-sum {fast} vs pairwise {slow}"))?;
    }

    let normal = Normal::new(0.7, 0.05).unwrap();
    let mut rejected = 0;
    for _ in 0..500 {
        let a: Vec<f64> = (0..30).map(|_| normal.sample(&mut r)).collect();
        let b: Vec<f64> = (0..30).map(|_| normal.sample(&mut r)).collect();
        if mann_whitney_u(&a, &b).unwrap() < 0.05 {
            rejected += 1;
        }
    }
    let rate = rejected as f64 / 500.0;
    ensure((0.03..=0.07).contains(&rate), || format!("null rejection rate {rate}"))?;

    let (a, b) = ([1.0, 2.0, 3.0], [4.0, 5.0, 6.0]);
    let enumerated = mwu_exact_enumeration(&a, &b);
    let p = mann_whitney_u(&a, &b).unwrap();
    ensure((enumerated - 0.1).abs() < 1e-15 && (p - enumerated).abs() < 1e-15, || {
        format!("exact p {p}, enumeration {enumerated}")
    })?;
    Ok(format!("A12 checks exact; null rejection rate {rate:.3}; exact p {p}"))
}

fn ga_sanity() -> Outcome {
    let mut r = rng(88);
    let (m, rows) = random_matrix(&mut r, 5, 8, 0.3);
    let optimum = permutations(5)
        .iter()
        .map(|p| apfd_scan(&rows, p))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut worst = f64::INFINITY;
    for seed in 0..10 {
        let o = search_based(&m, seed, &GaConfig::default());
        let got = apsc_of_permutation(&o.permutation, &m);
        worst = worst.min(got / optimum);
        ensure(got >= 0.95 * optimum, || format!("seed {seed}: APSC {got} < 0.95 x {optimum}"))?;
    }
    Ok(format!("10/10 seeds; worst APSC/optimum {worst:.4} (optimum {optimum:.4})"))
}

fn mask_timing(jsonl: &str) -> String {
    jsonl
        .lines()
        .map(|line| match line.find("\"elapsed_ns\":") {
            Some(at) => {
                let start = at + "\"elapsed_ns\":".len();
                let end = start + line[start..].find(|c: char| !c.is_ascii_digit()).unwrap_or(line.len() - start);
                format!("{}0{}", &line[..start], &line[end..])
            }
            None => line.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn prioritize_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (cov, kill) = harness::synthesize(&SynthSpec::new(60, 120, 0.1, 10, 9)).map_err(|e| e.to_string())?;
    let (cov_path, _) =
        harness::write_synth(dir.path(), &cov, &kill, testorder::MatrixFormat::Tsv).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let out = Command::new(env!("CARGO_BIN_EXE_testorder"))
            .args(["prioritize", "--coverage", cov_path.to_str().unwrap(), "--repeats", "5", "--seed", "11"])
            .args(["--ga-population", "10", "--ga-generations", "10"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
        outputs.push(String::from_utf8(out.stdout).map_err(|e| e.to_string())?);
    }
    let (a, b) = (mask_timing(&outputs[0]), mask_timing(&outputs[1]));
    ensure(a.as_bytes() == b.as_bytes(), || "masked outputs differ".into())?;
    let records = a.lines().count();
    ensure(records == 35, || format!("{records} records, expected 35"))?;
    Ok(format!("{records} records byte-identical across two runs (timing masked)"))
}

struct Criterion {
    id: &'static str,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: "AC1", name: "golden motivating example", limit: Duration::from_secs(1), run: golden_motivating_example },
        Criterion { id: "AC2", name: "OCP step-optimality", limit: Duration::from_secs(30), run: ocp_step_optimality },
        Criterion { id: "AC3", name: "laziness bound", limit: Duration::from_secs(30), run: laziness_bound },
        Criterion { id: "AC4", name: "efficiency at desk scale", limit: Duration::from_secs(300), run: desk_scale_efficiency },
        Criterion { id: "AC5", name: "additional-coverage monotonicity", limit: Duration::from_secs(60), run: monotonicity },
        Criterion { id: "AC6", name: "unified endpoints", limit: Duration::from_secs(60), run: unified_endpoints },
        Criterion { id: "AC7", name: "statistics correctness", limit: Duration::from_secs(60), run: statistics },
        Criterion { id: "AC8", name: "GA sanity", limit: Duration::from_secs(60), run: ga_sanity },
        Criterion { id: "AC9", name: "prioritize determinism", limit: Duration::from_secs(60), run: prioritize_determinism },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > c.limit => Err(format!("{detail}; took {took:?}, limit {:?}", c.limit)),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("[PASS] {} {}: {detail} ({took:.2?})", c.id, c.name),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {} {}: {detail} ({took:.2?})", c.id, c.name);
            }
        }
    }
    println!("\nacceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
