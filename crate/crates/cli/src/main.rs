use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stp_core::corpus::{generate_benchmark, load_unproved_dataset, Benchmark, BenchmarkSpec, Corpus, DatasetStatement, Source};
use stp_core::kernel::{Kernel, MAX_ORACLE_DEPTH};
use stp_core::policy::PolicyModel;
use stp_core::reporting::{emit_report, ReportFormat};
use stp_core::selfplay::artifacts::to_jsonl;
use stp_core::selfplay::{sft_examples, Engine, Method, Run, RunConfig, SelfPlayError};

const SEED_ENV: &str = "STP_SEED";

#[derive(Parser)]
#[command(name = "stp", version, about = "Self-play conjecturing and proving over a toy rewrite system")]
struct Cli {
    /// Run configuration (flat JSON object of RunConfig fields).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed; STP_SEED takes precedence.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seed corpus and a proofless dataset.
    GenCorpus {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        files: usize,
        #[arg(long, default_value_t = 50)]
        per_file: usize,
        #[arg(long, default_value = "1-5", value_parser = parse_range)]
        corpus_steps: (usize, usize),
        #[arg(long, default_value_t = 2000)]
        dataset_size: usize,
        #[arg(long, default_value = "1-6", value_parser = parse_range)]
        dataset_steps: (usize, usize),
    },
    /// Extract SFT datasets from a corpus and build the base model.
    Sft {
        #[arg(long)]
        corpus: PathBuf,
        /// Output directory for model.txt and the two SFT datasets.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the self-play loop.
    Run(RunArgs),
    /// Run a baseline loop.
    Baseline {
        #[arg(long, value_enum)]
        method: BaselineMethod,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Check a proof; exits 2 if it is rejected.
    Verify {
        #[arg(long)]
        statement: String,
        #[arg(long)]
        proof: String,
    },
    /// Breadth-first proof search.
    Oracle {
        #[arg(long)]
        statement: String,
        #[arg(long)]
        depth: usize,
    },
    /// Re-train a model from the SFT counts on the run's selected proofs.
    RetrainFinal {
        #[arg(long)]
        run_dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Export a run's per-iteration report.
    Report {
        #[arg(long)]
        run_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    run_dir: PathBuf,
    /// Directory holding corpus/, dataset.txt and difficulty.txt.
    #[arg(long, conflicts_with_all = ["corpus", "dataset"])]
    benchmark: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Extra statements tagged `valid` for per-source matching weights.
    #[arg(long)]
    valid: Option<PathBuf>,
    /// Total iterations the run should reach.
    #[arg(long)]
    iters: usize,
    /// Continue an existing run directory.
    #[arg(long)]
    resume: bool,
    /// Record wall-clock time per iteration in the report.
    #[arg(long)]
    elapsed: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineMethod {
    ExpertVanilla,
    ExpertOpt,
    Parallel,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

enum Failure {
    Usage(String),
    Rejected,
    Config(String),
}

impl From<SelfPlayError> for Failure {
    fn from(e: SelfPlayError) -> Self {
        match e {
            SelfPlayError::Config(e) => Failure::Config(e.to_string()),
            e => Failure::Usage(e.to_string()),
        }
    }
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once('-').ok_or("expected MIN-MAX")?;
    let a = a.trim().parse().map_err(|_| format!("bad bound `{a}`"))?;
    let b = b.trim().parse().map_err(|_| format!("bad bound `{b}`"))?;
    Ok((a, b))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Rejected) => ExitCode::from(2),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(3)
        }
    }
}

/// File values, then `--seed`, then `STP_SEED`.
fn load_config(path: Option<&Path>, seed: Option<u64>) -> Result<RunConfig, Failure> {
    let mut config = match path {
        Some(p) => RunConfig::load(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?,
        None => RunConfig::default(),
    };
    if let Some(s) = seed {
        config.seed = s;
    }
    if let Ok(v) = std::env::var(SEED_ENV) {
        config.seed = v.trim().parse().map_err(|_| Failure::Config(format!("{SEED_ENV}={v} is not an unsigned integer")))?;
    }
    config.validate().map_err(|e| Failure::Config(e.to_string()))?;
    Ok(config)
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let kernel = Kernel::standard();
    match cli.command {
        Command::GenCorpus { out, files, per_file, corpus_steps, dataset_size, dataset_steps } => {
            let config = load_config(cli.config.as_deref(), cli.seed)?;
            let spec = BenchmarkSpec { files, per_file, corpus_steps, dataset_size, dataset_steps };
            let bench = generate_benchmark(kernel, config.seed, spec).map_err(usage)?;
            bench.write_dir(&out).map_err(usage)?;
            println!("{} theorems in {} files, {} dataset statements", bench.corpus.len(), files, bench.dataset.len());
            Ok(())
        }
        Command::Sft { corpus, out } => {
            let config = load_config(cli.config.as_deref(), cli.seed)?;
            let corpus = Corpus::read_dir(kernel, &corpus).map_err(usage)?;
            let examples = sft_examples(&corpus, config.sft_per_pair_cap, config.seed);
            let model = PolicyModel::trained(config.ngram_order, config.smoothing, &kernel.library, &examples);
            fs::create_dir_all(&out).map_err(usage)?;
            let (prover, conjecturer): (Vec<_>, Vec<_>) =
                examples.into_iter().partition(|e| e.prompt.role == stp_core::policy::Role::Prover);
            fs::write(out.join("prover_sft.jsonl"), to_jsonl(&prover)).map_err(usage)?;
            fs::write(out.join("conjecturer_sft.jsonl"), to_jsonl(&conjecturer)).map_err(usage)?;
            model.save(&out.join("model.txt")).map_err(usage)?;
            println!("{} prover and {} conjecturer examples", prover.len(), conjecturer.len());
            Ok(())
        }
        Command::Run(args) => drive(kernel, Method::Stp, &args, cli.config.as_deref(), cli.seed),
        Command::Baseline { method, run } => {
            let method = match method {
                BaselineMethod::ExpertVanilla => Method::ExpertVanilla,
                BaselineMethod::ExpertOpt => Method::ExpertOptimized,
                BaselineMethod::Parallel => Method::Parallel,
            };
            drive(kernel, method, &run, cli.config.as_deref(), cli.seed)
        }
        Command::Verify { statement, proof } => {
            let config = load_config(cli.config.as_deref(), cli.seed)?;
            let statement = kernel.parse_statement(&statement).map_err(|e| usage(format!("statement: {e}")))?;
            let proof = match kernel.parse_proof(&proof) {
                Ok(p) => p,
                Err(e) => {
                    println!("rejected: proof does not parse: {e}");
                    return Err(Failure::Rejected);
                }
            };
            let outcome = kernel.verify(&statement, &proof, config.step_budget);
            println!("{} (cost {})", outcome.verdict, outcome.cost);
            if outcome.is_verified() {
                Ok(())
            } else {
                Err(Failure::Rejected)
            }
        }
        Command::Oracle { statement, depth } => {
            if depth > MAX_ORACLE_DEPTH {
                return Err(usage(format!("depth must be at most {MAX_ORACLE_DEPTH}")));
            }
            let statement = kernel.parse_statement(&statement).map_err(|e| usage(format!("statement: {e}")))?;
            match kernel.brute_force_prove(&statement, depth).map_err(usage)? {
                Some(proof) => println!("{}", proof.canonical_text()),
                None => println!("no proof within depth {depth}"),
            }
            Ok(())
        }
        Command::RetrainFinal { run_dir, out } => {
            let run = Run::open(kernel, &run_dir)?;
            run.engine.final_retrain(&run.state).save(&out).map_err(usage)?;
            println!("retrained on the history of {} iterations", run.state.iteration);
            Ok(())
        }
        Command::Report { run_dir, format, out } => {
            let format = match format {
                Format::Csv => ReportFormat::Csv,
                Format::Jsonl => ReportFormat::Jsonl,
            };
            let text = emit_report(&run_dir, format).map_err(usage)?;
            match out {
                Some(path) => fs::write(path, text).map_err(usage),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
    }
}

fn load_inputs(kernel: &Kernel, args: &RunArgs) -> Result<(Corpus, Vec<DatasetStatement>), Failure> {
    let (corpus, mut dataset) = match (&args.benchmark, &args.corpus, &args.dataset) {
        (Some(dir), _, _) => {
            let bench = Benchmark::read_dir(kernel, dir).map_err(usage)?;
            let dataset = bench.dataset.into_iter().map(|(statement, _)| DatasetStatement { statement, source: Source::Main }).collect();
            (bench.corpus, dataset)
        }
        (None, Some(corpus), Some(dataset)) => (
            Corpus::read_dir(kernel, corpus).map_err(usage)?,
            load_unproved_dataset(kernel, dataset, Source::Main).map_err(usage)?,
        ),
        _ => return Err(usage("give --benchmark, or both --corpus and --dataset")),
    };
    if let Some(valid) = &args.valid {
        let seen: std::collections::HashSet<String> = dataset.iter().map(|d| d.statement.canonical_text()).collect();
        let extra = load_unproved_dataset(kernel, valid, Source::Valid).map_err(usage)?;
        dataset.extend(extra.into_iter().filter(|d| !seen.contains(&d.statement.canonical_text())));
    }
    Ok((corpus, dataset))
}

fn drive(kernel: &Kernel, method: Method, args: &RunArgs, config: Option<&Path>, seed: Option<u64>) -> Result<(), Failure> {
    let mut run = if args.resume {
        let run = Run::open(kernel, &args.run_dir)?;
        if run.state.method != method {
            return Err(usage(format!("{} holds a {} run", args.run_dir.display(), run.state.method)));
        }
        if config.is_some() || seed.is_some() || std::env::var(SEED_ENV).is_ok() {
            let wanted = load_config(config, seed)?;
            if wanted != run.engine.config {
                return Err(Failure::Config("configuration differs from the one stored in the run directory".into()));
            }
        }
        run
    } else {
        let config = load_config(config, seed)?;
        let (corpus, dataset) = load_inputs(kernel, args)?;
        let engine = Engine::new(kernel, config, &corpus, dataset)?;
        Run::create(engine, method, &corpus, &args.run_dir)?
    };
    run.record_elapsed = args.elapsed;
    let reports = run.run_until(args.iters)?;
    match reports.last() {
        Some(r) => println!(
            "{} iteration {}: {} of {} statements proved ({:.4})",
            r.method, r.iteration, r.proved_total, r.dataset_size, r.cumulative_pass_rate
        ),
        None => println!("{} already at iteration {}", method, run.state.iteration),
    }
    Ok(())
}
