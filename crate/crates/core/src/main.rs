use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use testorder::coverage::{aggregate_rows, GroupMap, MatrixFormat};
use testorder::harness::{self, ExperimentPlan, SynthSpec};
use testorder::stats::DEFAULT_ALPHA;
use testorder::{Error, Result, StrategyConfig, StrategyId};

#[derive(Parser)]
#[command(name = "testorder", version, about = "Coverage-based regression test prioritization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prioritize a coverage matrix and write orderings as JSON lines.
    Prioritize(PrioritizeArgs),
    /// Compute APFD for each ordering against a kill matrix.
    Evaluate(EvaluateArgs),
    /// Mann-Whitney U and Vargha-Delaney A12 verdicts between APFD samples.
    Compare(CompareArgs),
    /// Generate a synthetic coverage matrix and kill matrix.
    Synth(SynthArgs),
    /// Time strategies and report an efficiency table.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Tsv,
    Json,
}

impl From<FormatArg> for MatrixFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Tsv => MatrixFormat::Tsv,
            FormatArg::Json => MatrixFormat::Json,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    coverage: PathBuf,
    #[arg(long, value_enum, default_value = "tsv")]
    format: FormatArg,
    /// Strategy to run; repeat the flag for several. Defaults to all seven.
    #[arg(long = "strategy")]
    strategies: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Group map (`<group>\t<test> ...`) to prioritize at group granularity.
    #[arg(long)]
    groups: Option<PathBuf>,
    /// JSON file holding a full strategy configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    unified_ratio: Option<f64>,
    #[arg(long)]
    art_candidates: Option<usize>,
    #[arg(long)]
    ga_population: Option<usize>,
    #[arg(long)]
    ga_generations: Option<usize>,
}

#[derive(Args)]
struct PrioritizeArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, default_value_t = 1000)]
    repeats: usize,
    /// Write 0 for elapsed_ns so output is byte-reproducible.
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    orderings: PathBuf,
    #[arg(long)]
    kill: PathBuf,
    #[arg(long, value_enum, default_value = "tsv")]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// APFD CSV (`strategy,seed,apfd`).
    #[arg(long)]
    a: PathBuf,
    /// Second APFD CSV; when omitted every strategy in `--a` is compared with every other.
    #[arg(long)]
    b: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Write the verdict table as CSV here; the text table always goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    tests: usize,
    #[arg(long)]
    units: usize,
    #[arg(long, default_value_t = 0.05)]
    density: f64,
    #[arg(long, default_value_t = 30)]
    faults: usize,
    #[arg(long, default_value_t = 0.5)]
    coupling: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "tsv")]
    format: FormatArg,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, default_value_t = 20)]
    repeats: usize,
    #[arg(long, default_value_t = harness::DEFAULT_WARMUP)]
    warmup: usize,
    /// Write the efficiency table as CSV here; the text table always goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build_plan(run: &RunArgs, repeats: usize) -> Result<ExperimentPlan> {
    let mut config = match &run.config {
        Some(path) => serde_json::from_reader(harness::open_reader(path)?)?,
        None => StrategyConfig::default(),
    };
    if let Some(r) = run.unified_ratio {
        config.unified_ratio = r;
    }
    if let Some(k) = run.art_candidates {
        config.art_candidate_size = k;
    }
    if let Some(p) = run.ga_population {
        config.ga.population = p;
    }
    if let Some(g) = run.ga_generations {
        config.ga.generations = g;
    }
    let strategies = if run.strategies.is_empty() {
        StrategyId::ALL.to_vec()
    } else {
        run.strategies
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<_>>>()?
    };
    let mut plan = ExperimentPlan::new(&run.coverage);
    plan.format = run.format.into();
    plan.strategies = strategies;
    plan.repeats = repeats;
    plan.base_seed = run.seed.unwrap_or(0);
    plan.config = config;
    plan.validate()?;
    Ok(plan)
}

fn load_plan_matrix(run: &RunArgs, plan: &ExperimentPlan) -> Result<testorder::CoverageMatrix> {
    let matrix = harness::load_coverage(&plan.coverage, plan.format)?;
    match &run.groups {
        Some(path) => {
            let groups = GroupMap::parse_tsv(harness::open_reader(path)?, &matrix)?;
            aggregate_rows(&matrix, &groups)
        }
        None => Ok(matrix),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Prioritize(args) => {
            let plan = build_plan(&args.run, args.repeats)?;
            let matrix = load_plan_matrix(&args.run, &plan)?;
            let mut orderings = harness::prioritize_matrix(&matrix, &plan)?;
            if args.no_timing {
                orderings.iter_mut().for_each(|o| o.instrumentation.elapsed_ns = 0);
            }
            match &args.out {
                Some(path) => harness::write_orderings_file(path, &orderings),
                None => harness::write_orderings(&mut std::io::stdout().lock(), &orderings)
                    .map_err(|e| Error::io("<stdout>", e)),
            }
        }
        Command::Evaluate(args) => {
            let orderings = harness::load_orderings(&args.orderings)?;
            let kills = harness::load_kill(&args.kill, args.format.into())?;
            let records = harness::evaluate(&orderings, &kills)?;
            let mut buf = Vec::new();
            harness::write_apfd_csv(&mut buf, &records)?;
            emit(&args.out, &String::from_utf8_lossy(&buf))
        }
        Command::Compare(args) => {
            let a = harness::load_apfd_csv(&args.a)?;
            let rows = match &args.b {
                Some(b) => harness::compare_groups(&a, &harness::load_apfd_csv(b)?, args.alpha, false)?,
                None => harness::compare_groups(&a, &a, args.alpha, true)?,
            };
            print!("{}", harness::comparison_text(&rows));
            if let Some(path) = &args.out {
                emit(&Some(path.clone()), &harness::comparison_csv(&rows))?;
            }
            Ok(())
        }
        Command::Synth(args) => {
            let spec = SynthSpec {
                tests: args.tests,
                units: args.units,
                density: args.density,
                faults: args.faults,
                fault_coupling: args.coupling,
                seed: args.seed,
            };
            let (coverage, kill) = harness::synthesize(&spec)?;
            let (c, k) = harness::write_synth(&args.out, &coverage, &kill, args.format.into())?;
            println!("{}\n{}", c.display(), k.display());
            Ok(())
        }
        Command::Bench(args) => {
            let plan = build_plan(&args.run, args.repeats)?;
            let matrix = load_plan_matrix(&args.run, &plan)?;
            let (table, _) = harness::bench_matrix(&matrix, &plan, args.warmup)?;
            print!("{}", table.to_pretty());
            if let Some(path) = &args.out {
                emit(&Some(path.clone()), &table.to_csv())?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
