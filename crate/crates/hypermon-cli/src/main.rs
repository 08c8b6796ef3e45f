//! `hypermon`: check HyperLTL formulas over trace logs and structures,
//! monitor growing logs, and generate ground-truth-labeled QBF instances.
//!
//! Exit codes for `check`: 0 when the formula holds, 1 when it does not,
//! 2 on any error. Verdicts are JSON on stdout; diagnostics go to stderr.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hypermon::{
    build_tree, check, check_parallel, check_selfcomp, check_structure, classify_frame,
    enumerate_traces, minimize_to_dag, parse_formula, parse_letter, parse_trace_file,
    random_qbf, reduce_qbf_acyclic, reduce_qbf_tree, CheckOptions, EmptySetPolicy, FiniteTrace,
    HyperFormula, KripkeStructure, LogMode, ReductionOutput, Session, TraceLog, Verdict,
};

#[derive(Parser)]
#[command(
    name = "hypermon",
    version,
    about = "HyperLTL model checking and monitoring over trace logs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a formula against a structure or trace file.
    Check(CheckArgs),
    /// Monitor a policy over a stream of trace batches.
    Monitor(MonitorArgs),
    /// Generate a QBF reduction instance with known ground truth.
    #[command(name = "gen-qbf")]
    GenQbf(GenQbfArgs),
    /// Minimize, self-compose, or classify a structure.
    Transform(TransformArgs),
    /// Run a timing report over generated instances.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    /// Recursive enumeration over the quantifier prefix.
    Enum,
    /// Path search through the self-composition (alternation-free only).
    Selfcomp,
    /// Data-parallel tuple evaluation.
    Parallel,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmptySetFlag {
    Error,
    Vacuous,
}

impl From<EmptySetFlag> for EmptySetPolicy {
    fn from(flag: EmptySetFlag) -> Self {
        match flag {
            EmptySetFlag::Error => EmptySetPolicy::Error,
            EmptySetFlag::Vacuous => EmptySetPolicy::Vacuous,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeFlag {
    Tree,
    Dag,
}

#[derive(Args)]
struct CheckArgs {
    /// Structure JSON (.json) or trace file (one trace per line).
    input: PathBuf,
    /// Formula file; `#` lines are comments.
    formula: PathBuf,
    #[arg(long, value_enum, default_value = "enum")]
    engine: Engine,
    /// Worker threads for --engine=parallel.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long = "empty-set", value_enum, default_value = "error")]
    empty_set: EmptySetFlag,
    /// Minimize a trace-file log into a DAG before checking.
    #[arg(long)]
    dag: bool,
    /// Prepend this letter to every trace of a trace-file input, shifting
    /// all temporal operators by one step.
    #[arg(long = "prepend-letter")]
    prepend_letter: Option<String>,
}

#[derive(Args)]
struct MonitorArgs {
    /// Policy formula file.
    formula: PathBuf,
    /// Batch stream; `-` or absent reads stdin. Batches are trace lines
    /// separated by `---` lines.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "tree")]
    mode: ModeFlag,
    #[arg(long = "empty-set", value_enum, default_value = "error")]
    empty_set: EmptySetFlag,
}

#[derive(Args)]
struct GenQbfArgs {
    #[arg(long, value_enum)]
    reduction: ReductionFlag,
    /// Instance seed; falls back to HYPERMON_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    vars: usize,
    #[arg(long)]
    clauses: usize,
    #[arg(long, default_value_t = 0)]
    alternations: usize,
    /// Output directory for structure.json, formula.txt, manifest.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReductionFlag {
    Acyclic,
    Tree,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct TransformOp {
    /// Merge states with equal label and suffix-trace set.
    #[arg(long)]
    minimize: bool,
    /// Build the n-fold self-composition.
    #[arg(long, value_name = "N")]
    selfcomp: Option<usize>,
    /// Report the frame class.
    #[arg(long)]
    classify: bool,
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    op: TransformOp,
    /// Structure JSON (.json) or trace file.
    input: PathBuf,
    #[arg(long = "prepend-letter")]
    prepend_letter: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchSuite {
    Qbf,
    Random,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    suite: BenchSuite,
    /// Suite seed; falls back to HYPERMON_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() {
    // Die quietly on closed pipes (e.g. `hypermon bench | head`) instead
    // of panicking on the failed write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Check(args) => cmd_check(args),
        Command::Monitor(args) => cmd_monitor(args),
        Command::GenQbf(args) => cmd_gen_qbf(args),
        Command::Transform(args) => cmd_transform(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

/// Reads a formula file, ignoring `#` comment lines.
fn load_formula(path: &Path) -> Result<HyperFormula> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading formula file {}", path.display()))?;
    let joined: Vec<&str> = text
        .lines()
        .filter(|line| !line.trim_start().starts_with('#'))
        .collect();
    parse_formula(&joined.join(" ")).map_err(|e| anyhow!("{e}"))
}

/// A loaded input: a structure, a trace log built from a file, or an
/// empty trace file (resolved by the empty-set policy).
enum Input {
    Structure(KripkeStructure),
    Log(Box<TraceLog>),
    EmptyTraces,
}

impl Input {
    fn structure(&self) -> Result<&KripkeStructure> {
        match self {
            Input::Structure(k) => Ok(k),
            Input::Log(log) => Ok(log.structure()),
            Input::EmptyTraces => bail!("the trace file is empty"),
        }
    }
}

fn load_input(path: &Path, dag: bool, prepend: Option<&str>) -> Result<Input> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading input file {}", path.display()))?;
    if path.extension().and_then(|e| e.to_str()) == Some("json") {
        if prepend.is_some() {
            bail!("--prepend-letter applies to trace-file inputs only");
        }
        let k = KripkeStructure::from_json_str(&text)?;
        return Ok(Input::Structure(k));
    }
    let mut traces = parse_trace_file(&text)?;
    if traces.is_empty() {
        return Ok(Input::EmptyTraces);
    }
    if let Some(letter_text) = prepend {
        let letter = parse_letter(letter_text)?;
        traces = traces
            .into_iter()
            .map(|t| {
                let mut letters = vec![letter.clone()];
                letters.extend(t.letters().iter().cloned());
                FiniteTrace::new(letters).expect("non-empty")
            })
            .collect();
    }
    let mut log = build_tree(&traces)?;
    if dag {
        log = minimize_to_dag(&log);
    }
    Ok(Input::Log(Box::new(log)))
}

fn cmd_check(args: CheckArgs) -> Result<i32> {
    let formula = load_formula(&args.formula)?;
    let input = load_input(&args.input, args.dag, args.prepend_letter.as_deref())?;
    let opts = CheckOptions {
        empty_set: args.empty_set.into(),
    };

    let verdict = match (&input, args.engine) {
        (Input::EmptyTraces, _) => check(&[], &formula, None, &opts)?,
        (Input::Structure(k), Engine::Enum) => check_structure(k, &formula, None, &opts)?,
        (Input::Log(log), Engine::Enum) => check(log.traces(), &formula, None, &opts)?,
        (_, Engine::Selfcomp) => check_selfcomp(input.structure()?, &formula)?,
        (_, Engine::Parallel) => {
            let traces: Vec<FiniteTrace> = match &input {
                Input::Structure(k) => enumerate_traces(k)?.collect(),
                Input::Log(log) => log.traces().to_vec(),
                Input::EmptyTraces => unreachable!(),
            };
            check_parallel(&traces, &formula, args.workers, None, &opts)?
        }
    };

    println!("{}", verdict.to_json_string());
    Ok(if verdict.holds { 0 } else { 1 })
}

fn cmd_monitor(args: MonitorArgs) -> Result<i32> {
    let formula = load_formula(&args.formula)?;
    let mode = match args.mode {
        ModeFlag::Tree => LogMode::Tree,
        ModeFlag::Dag => LogMode::Dag,
    };
    let mut session = Session::new(formula, mode, args.empty_set.into());

    let reader: Box<dyn BufRead> = match &args.input {
        Some(path) if path.as_os_str() != "-" => Box::new(std::io::BufReader::new(
            std::fs::File::open(path)
                .with_context(|| format!("opening batch stream {}", path.display()))?,
        )),
        _ => Box::new(std::io::stdin().lock()),
    };

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut pending: Vec<String> = Vec::new();
    let mut flush_batch = |pending: &mut Vec<String>, session: &mut Session| -> Result<()> {
        if pending.is_empty() {
            return Ok(());
        }
        let text = pending.join("\n");
        pending.clear();
        let traces = parse_trace_file(&text)?;
        let batch = hypermon::Batch::new(traces, None)?;
        let record = session.ingest(&batch)?.clone();
        let verdict: Verdict = session.batch_verdict(&record);
        writeln!(out, "{}", verdict.to_json_string())?;
        Ok(())
    };

    for line in reader.lines() {
        let line = line.context("reading batch stream")?;
        if line.trim() == "---" {
            flush_batch(&mut pending, &mut session)?;
        } else if !line.trim().is_empty() && !line.trim_start().starts_with('#') {
            pending.push(line);
        }
    }
    flush_batch(&mut pending, &mut session)?;
    Ok(0)
}

fn seed_or_env(seed: Option<u64>) -> u64 {
    seed.or_else(|| {
        std::env::var("HYPERMON_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(0)
}

fn cmd_gen_qbf(args: GenQbfArgs) -> Result<i32> {
    let seed = seed_or_env(args.seed);
    let qbf = random_qbf(seed, args.vars, args.clauses, args.alternations)?;
    let (output, reduction_name): (ReductionOutput, &str) = match args.reduction {
        ReductionFlag::Acyclic => (reduce_qbf_acyclic(&qbf)?, "acyclic"),
        ReductionFlag::Tree => (reduce_qbf_tree(&qbf)?, "tree"),
    };

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let write = |name: &str, contents: String| -> Result<()> {
        let path = args.out.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
    };
    write("structure.json", output.structure.to_json_string() + "\n")?;
    write(
        "formula.txt",
        hypermon::format_formula(&output.formula) + "\n",
    )?;
    let manifest = serde_json::json!({
        "seed": seed,
        "n": args.vars,
        "m": args.clauses,
        "alternations": args.alternations,
        "ground_truth": output.ground_truth,
        "reduction": reduction_name,
    });
    write(
        "manifest.json",
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    eprintln!(
        "wrote {} instance ({} states, ground truth {}) to {}",
        reduction_name,
        output.structure.state_count(),
        output.ground_truth,
        args.out.display()
    );
    Ok(0)
}

fn cmd_transform(args: TransformArgs) -> Result<i32> {
    let input = load_input(&args.input, false, args.prepend_letter.as_deref())?;
    if args.op.classify {
        let class = classify_frame(input.structure()?)?;
        println!("{}", serde_json::to_string(&class)?);
        return Ok(0);
    }
    if let Some(n) = args.op.selfcomp {
        let product = hypermon::self_composition(input.structure()?, n)?;
        println!("{}", product.to_json_string());
        return Ok(0);
    }
    // --minimize: structures are re-ingested as trace logs first.
    let log = match input {
        Input::Log(log) => *log,
        Input::Structure(k) => {
            let traces: Vec<FiniteTrace> = enumerate_traces(&k)?.collect();
            build_tree(&traces)?
        }
        Input::EmptyTraces => bail!("the trace file is empty"),
    };
    let dag = minimize_to_dag(&log);
    println!("{}", dag.structure().to_json_string());
    Ok(0)
}

fn cmd_bench(args: BenchArgs) -> Result<i32> {
    let seed = seed_or_env(args.seed);
    println!(
        "{:>6} {:>7} {:>12} {:>8} {:>12} {:>10}",
        "states", "traces", "alternations", "frame", "time_ms", "tuples"
    );
    match args.suite {
        BenchSuite::Qbf => {
            for n in 3..=6usize {
                let m = n - 1;
                for alt in 0..=2usize.min(n - 1) {
                    let qbf = random_qbf(seed.wrapping_add((n * 10 + alt) as u64), n, m, alt)?;
                    let out = reduce_qbf_acyclic(&qbf)?;
                    let traces: Vec<FiniteTrace> = enumerate_traces(&out.structure)?.collect();
                    let started = Instant::now();
                    let verdict = check(&traces, &out.formula, None, &CheckOptions::default())?;
                    let elapsed = started.elapsed();
                    anyhow::ensure!(
                        verdict.holds == out.ground_truth,
                        "bench instance disagreed with its ground truth"
                    );
                    println!(
                        "{:>6} {:>7} {:>12} {:>8} {:>12.2} {:>10}",
                        out.structure.state_count(),
                        traces.len(),
                        alt,
                        "acyclic",
                        elapsed.as_secs_f64() * 1e3,
                        verdict.stats.tuples_evaluated
                    );
                }
            }
        }
        BenchSuite::Random => {
            let mut rng = hypermon::rng::SplitMix64::new(seed);
            let props = hypermon::gen::props(3);
            for round in 0..8usize {
                let batch = hypermon::gen::random_batch(&mut rng, &props, 8, 6);
                let log = build_tree(&batch)?;
                let formula = if round % 2 == 0 {
                    hypermon::gen::random_alternation_free_formula(&mut rng, 3, &props, 3)
                } else {
                    hypermon::gen::random_single_alternation_pair(&mut rng, &props, 3)
                };
                let started = Instant::now();
                let verdict = check(log.traces(), &formula, None, &CheckOptions::default())?;
                let elapsed = started.elapsed();
                println!(
                    "{:>6} {:>7} {:>12} {:>8} {:>12.2} {:>10}",
                    log.structure().state_count(),
                    log.traces().len(),
                    formula.classify().alternation_depth,
                    "tree",
                    elapsed.as_secs_f64() * 1e3,
                    verdict.stats.tuples_evaluated
                );
            }
        }
    }
    Ok(0)
}
