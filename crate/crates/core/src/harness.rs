//! Experiment runner behind the command line tool: synthetic instances,
//! repeated seeded prioritization, APFD evaluation, statistical comparison
//! and timing benchmarks.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coverage::{
    parse_coverage, parse_kill, write_coverage, write_kill, CoverageMatrix, KillMatrix,
    MatrixFormat, Ordering,
};
use crate::error::{Error, Result};
use crate::evaluation::{apfd, summarize_efficiency, ApfdRecord, EfficiencyTable};
use crate::stats::{compare, StatSummary};
use crate::strategies::{run_strategy, strategy_rng, StrategyConfig, StrategyId};

/// FNV-1a, 64-bit.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Seed of run `run` of `strategy`: `base ^ fnv1a64(name) ^ run`.
pub fn run_seed(base_seed: u64, strategy: StrategyId, run: u64) -> u64 {
    base_seed ^ fnv1a64(strategy.as_str().as_bytes()) ^ run
}

pub fn open_reader(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

fn create_writer(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

/// Parse errors from a file get the path prepended.
fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { location, message } => Error::Parse {
            location,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

pub fn load_coverage(path: &Path, format: MatrixFormat) -> Result<CoverageMatrix> {
    in_file(path, parse_coverage(open_reader(path)?, format))
}

pub fn load_kill(path: &Path, format: MatrixFormat) -> Result<KillMatrix> {
    in_file(path, parse_kill(open_reader(path)?, format))
}

#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub coverage: PathBuf,
    pub kill: Option<PathBuf>,
    pub format: MatrixFormat,
    pub strategies: Vec<StrategyId>,
    pub repeats: usize,
    pub base_seed: u64,
    pub config: StrategyConfig,
    pub out: Option<PathBuf>,
}

impl ExperimentPlan {
    pub fn new(coverage: impl Into<PathBuf>) -> Self {
        ExperimentPlan {
            coverage: coverage.into(),
            kill: None,
            format: MatrixFormat::Tsv,
            strategies: StrategyId::ALL.to_vec(),
            repeats: 1000,
            base_seed: 0,
            config: StrategyConfig::default(),
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::InvalidConfig("repeats must be at least 1".into()));
        }
        if self.strategies.is_empty() {
            return Err(Error::InvalidConfig("no strategies selected".into()));
        }
        self.config.validate()
    }
}

/// Runs every strategy `repeats` times on `matrix`. Output is ordered by
/// strategy (plan order) then run index, whatever order runs finish in.
pub fn prioritize_matrix(matrix: &CoverageMatrix, plan: &ExperimentPlan) -> Result<Vec<Ordering>> {
    plan.validate()?;
    let jobs: Vec<(StrategyId, u64)> = plan
        .strategies
        .iter()
        .flat_map(|&s| (0..plan.repeats as u64).map(move |r| (s, r)))
        .collect();
    jobs.par_iter()
        .map(|&(s, r)| run_strategy(s, matrix, &plan.config, run_seed(plan.base_seed, s, r)))
        .collect()
}

pub fn prioritize(plan: &ExperimentPlan) -> Result<Vec<Ordering>> {
    let matrix = load_coverage(&plan.coverage, plan.format)?;
    prioritize_matrix(&matrix, plan)
}

pub fn write_orderings<W: Write>(out: &mut W, orderings: &[Ordering]) -> std::io::Result<()> {
    for o in orderings {
        writeln!(out, "{}", o.to_json_line())?;
    }
    Ok(())
}

pub fn write_orderings_file(path: &Path, orderings: &[Ordering]) -> Result<()> {
    let mut w = create_writer(path)?;
    write_orderings(&mut w, orderings)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_orderings<R: BufRead>(source: R) -> Result<Vec<Ordering>> {
    let mut out = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let location = crate::error::Location::Line(i + 1);
        let line = line.map_err(|e| Error::parse(location, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(Ordering::from_json_line(&line).map_err(|e| Error::parse(location, e.to_string()))?);
    }
    Ok(out)
}

pub fn load_orderings(path: &Path) -> Result<Vec<Ordering>> {
    in_file(path, read_orderings(open_reader(path)?))
}

/// One APFD record per ordering.
pub fn evaluate(orderings: &[Ordering], kills: &KillMatrix) -> Result<Vec<ApfdRecord>> {
    orderings
        .iter()
        .enumerate()
        .map(|(i, o)| {
            apfd(o, kills).map_err(|e| match e {
                Error::UniverseMismatch(msg) => Error::UniverseMismatch(format!("ordering {}: {msg}", i + 1)),
                other => other,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ApfdCsvRow {
    strategy: StrategyId,
    seed: u64,
    apfd: f64,
}

pub fn write_apfd_csv<W: Write>(out: W, records: &[ApfdRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(ApfdCsvRow {
            strategy: r.strategy,
            seed: r.seed,
            apfd: r.apfd,
        })
        .map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::io("<apfd csv>", e))
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::parse(crate::error::Location::Line(line), e.to_string())
}

/// Reads `strategy,seed,apfd` rows, grouped by strategy.
pub fn read_apfd_csv<R: std::io::Read>(source: R) -> Result<BTreeMap<StrategyId, Vec<ApfdRecord>>> {
    let mut groups: BTreeMap<StrategyId, Vec<ApfdRecord>> = BTreeMap::new();
    for row in csv::Reader::from_reader(source).deserialize::<ApfdCsvRow>() {
        let row = row.map_err(csv_error)?;
        groups.entry(row.strategy).or_default().push(ApfdRecord {
            strategy: row.strategy,
            seed: row.seed,
            apfd: row.apfd,
            n: 0,
            m_faults: 0,
        });
    }
    Ok(groups)
}

pub fn load_apfd_csv(path: &Path) -> Result<BTreeMap<StrategyId, Vec<ApfdRecord>>> {
    in_file(path, read_apfd_csv(open_reader(path)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub a: StrategyId,
    pub b: StrategyId,
    pub summary: StatSummary,
}

/// Compares every strategy of `a` with every strategy of `b`, skipping a
/// strategy against itself when both sides come from the same data.
pub fn compare_groups(
    a: &BTreeMap<StrategyId, Vec<ApfdRecord>>,
    b: &BTreeMap<StrategyId, Vec<ApfdRecord>>,
    alpha: f64,
    skip_self: bool,
) -> Result<Vec<ComparisonRow>> {
    let mut rows = Vec::new();
    for (&sa, ra) in a {
        for (&sb, rb) in b {
            if skip_self && sa == sb {
                continue;
            }
            rows.push(ComparisonRow {
                a: sa,
                b: sb,
                summary: compare(ra, rb, alpha)?,
            });
        }
    }
    Ok(rows)
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("a,b,n_a,n_b,p_value,a12,verdict,cell\n");
    for r in rows {
        let s = &r.summary;
        out.push_str(&format!(
            "{},{},{},{},{:.6},{:.4},{},{}\n",
            r.a,
            r.b,
            s.sample_sizes.0,
            s.sample_sizes.1,
            s.p_value,
            s.a12,
            s.verdict,
            s.cell()
        ));
    }
    out
}

pub fn comparison_text(rows: &[ComparisonRow]) -> String {
    rows.iter()
        .map(|r| {
            format!(
                "{:<16} vs {:<16} {:<14} p={:.4}\n",
                r.a.as_str(),
                r.b.as_str(),
                r.summary.cell(),
                r.summary.p_value
            )
        })
        .collect()
}

/// Parameters of a synthetic subject.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub tests: usize,
    pub units: usize,
    pub density: f64,
    pub faults: usize,
    /// Chance that a test reaching a fault's unit kills it.
    pub fault_coupling: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(tests: usize, units: usize, density: f64, faults: usize, seed: u64) -> Self {
        SynthSpec {
            tests,
            units,
            density,
            faults,
            fault_coupling: 0.5,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tests == 0 || self.units == 0 || self.faults == 0 {
            return Err(Error::InvalidConfig("tests, units and faults must be positive".into()));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::InvalidConfig(format!("density {} outside (0, 1]", self.density)));
        }
        if !(self.fault_coupling > 0.0 && self.fault_coupling <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "fault coupling {} outside (0, 1]",
                self.fault_coupling
            )));
        }
        Ok(())
    }
}

/// Attempts at placing a fault before a random test is made its killer.
const FAULT_PLACEMENT_ATTEMPTS: usize = 64;

/// Random coverage plus a kill matrix whose faults sit in code units. Each
/// unit is covered independently with probability `density`. A fault lives in
/// a random unit and each test covering that unit kills it with probability
/// `fault_coupling`; placement is redrawn until the fault has a killer.
pub fn synthesize(spec: &SynthSpec) -> Result<(CoverageMatrix, KillMatrix)> {
    spec.validate()?;
    let mut rng = strategy_rng(spec.seed);
    let names: Vec<String> = (0..spec.tests).map(|i| format!("t{i}")).collect();
    let covers: Vec<Vec<usize>> = (0..spec.tests)
        .map(|_| (0..spec.units).filter(|_| rng.gen_bool(spec.density)).collect())
        .collect();
    let coverage = CoverageMatrix::new(names.clone(), spec.units, covers)?;

    let mut kills: Vec<Vec<usize>> = vec![Vec::new(); spec.tests];
    for fault in 0..spec.faults {
        let mut killers = Vec::new();
        for _ in 0..FAULT_PLACEMENT_ATTEMPTS {
            let unit = rng.gen_range(0..spec.units);
            killers = (0..spec.tests)
                .filter(|&t| coverage.covers(t, unit) && rng.gen_bool(spec.fault_coupling))
                .collect();
            if !killers.is_empty() {
                break;
            }
        }
        if killers.is_empty() {
            killers.push(rng.gen_range(0..spec.tests));
        }
        for t in killers {
            kills[t].push(fault);
        }
    }
    let kill = KillMatrix::new(names, spec.faults, kills)?;
    Ok((coverage, kill))
}

/// Writes `coverage.{cov,json}` and `faults.{kill,json}` under `dir` and
/// returns their paths.
pub fn write_synth(
    dir: &Path,
    coverage: &CoverageMatrix,
    kill: &KillMatrix,
    format: MatrixFormat,
) -> Result<(PathBuf, PathBuf)> {
    let (cov_name, kill_name) = match format {
        MatrixFormat::Tsv => ("coverage.cov", "faults.kill"),
        MatrixFormat::Json => ("coverage.json", "faults.json"),
    };
    let cov_path = dir.join(cov_name);
    let kill_path = dir.join(kill_name);
    let mut w = create_writer(&cov_path)?;
    write_coverage(&mut w, coverage, format)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(&cov_path, e))?;
    let mut w = create_writer(&kill_path)?;
    write_kill(&mut w, kill, format)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(&kill_path, e))?;
    Ok((cov_path, kill_path))
}

pub const DEFAULT_WARMUP: usize = 3;

/// Times each strategy serially: `warmup` discarded runs, then
/// `plan.repeats` measured runs.
pub fn bench_matrix(
    matrix: &CoverageMatrix,
    plan: &ExperimentPlan,
    warmup: usize,
) -> Result<(EfficiencyTable, Vec<Ordering>)> {
    plan.validate()?;
    let mut runs = Vec::with_capacity(plan.strategies.len() * plan.repeats);
    for &s in &plan.strategies {
        for w in 0..warmup as u64 {
            run_strategy(s, matrix, &plan.config, run_seed(plan.base_seed, s, u64::MAX - w))?;
        }
        for r in 0..plan.repeats as u64 {
            runs.push(run_strategy(s, matrix, &plan.config, run_seed(plan.base_seed, s, r))?);
        }
    }
    Ok((summarize_efficiency(&runs), runs))
}
