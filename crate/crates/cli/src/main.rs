use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use damln::fs::{
    generate_fs, make_evidence, pr_auc, run_experiment, write_gnuplot, BenchError,
    ExperimentConfig, FsParams,
};
use damln::grounder::{
    ground_network, Aggregator, GroundError, GroundOptions, Mode, DEFAULT_MEMORY_BUDGET,
};
use damln::inference::{
    exact_marginals, gibbs_marginals, ExactParams, GibbsParams, InferenceError, DEFAULT_EXACT_CAP,
};
use damln::io::{
    parse_database_with, parse_literals, parse_marginals, parse_model, write_marginals,
    write_results, DbOptions, Model, Settings,
};
use damln::learning::{learn_weights, LearnConfig, LearnError, Optimizer, TrainingSet};
use damln::logic::GroundAtom;

const LOG_ENV: &str = "DAMLN_LOG";

#[derive(Debug, Parser)]
#[command(name = "damln", version, about = "Domain-aware Markov logic networks")]
#[command(after_help = "Log verbosity is read from DAMLN_LOG (default: info).")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Learn formula weights by penalized pseudo-likelihood
    Learn(LearnArgs),
    /// Compute marginal probabilities of query predicates
    Infer(InferArgs),
    /// Generate a Friends & Smokers world
    GenerateFs(GenerateArgs),
    /// Score marginals against held-out truth (PR-AUC)
    Eval(EvalArgs),
    /// Run the domain-size generalization experiment
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
struct LearnArgs {
    /// Input model file
    #[arg(long)]
    model: PathBuf,
    /// Training databases, comma-separated
    #[arg(long, value_delimiter = ',', required = true)]
    db: Vec<PathBuf>,
    /// Output model file with learned weights
    #[arg(long)]
    out: PathBuf,
    /// Weight semantics (default: the model's #mode, else damln)
    #[arg(long)]
    mode: Option<Mode>,
    /// Scaling-factor aggregator (default: the model's #aggregator, else max)
    #[arg(long)]
    aggregator: Option<Aggregator>,
    /// Standard deviation of the Gaussian weight prior
    #[arg(long, default_value_t = 10.0)]
    prior_std: f64,
    /// Iteration limit
    #[arg(long, default_value_t = 100)]
    max_iterations: usize,
    /// Stop when the gradient infinity-norm falls to this value
    #[arg(long, default_value_t = 1e-4)]
    tolerance: f64,
    /// Optimizer: cg or ascent
    #[arg(long, default_value_t = Optimizer::ConjugateGradient)]
    optimizer: Optimizer,
    /// Divide each database's pseudo-likelihood by its atom count
    #[arg(long)]
    per_db_normalize: bool,
    /// Reject database constants not declared in the model
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Args)]
struct InferArgs {
    /// Model file
    #[arg(long)]
    model: PathBuf,
    /// Evidence database (unlisted atoms of non-query predicates are false)
    #[arg(long)]
    evidence: Option<PathBuf>,
    /// Query predicates, comma-separated
    #[arg(long, value_delimiter = ',', required = true)]
    query: Vec<String>,
    /// Output marginals CSV
    #[arg(long)]
    out: PathBuf,
    /// Exact inference by enumeration instead of Gibbs sampling
    #[arg(long)]
    exact: bool,
    /// Largest number of free atoms accepted by --exact
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    exact_cap: usize,
    /// Gibbs samples per chain
    #[arg(long, default_value_t = GibbsParams::default().samples)]
    samples: usize,
    /// Gibbs burn-in sweeps per chain
    #[arg(long, default_value_t = GibbsParams::default().burn_in)]
    burn_in: usize,
    /// Number of Gibbs chains
    #[arg(long, default_value_t = GibbsParams::default().chains)]
    chains: usize,
    /// Random seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the model's #mode
    #[arg(long)]
    mode: Option<Mode>,
    /// Override the model's #aggregator
    #[arg(long)]
    aggregator: Option<Aggregator>,
    /// Grounding memory budget in bytes
    #[arg(long, default_value_t = DEFAULT_MEMORY_BUDGET)]
    memory_budget: u64,
    /// Reject evidence constants not declared in the model
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Number of persons
    #[arg(long)]
    size: usize,
    /// Random seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output database with the complete world
    #[arg(long)]
    out: PathBuf,
    /// Fraction of Smokes literals moved into the evidence
    #[arg(long, default_value_t = 0.5)]
    evidence_frac: f64,
    /// Write the evidence split here
    #[arg(long)]
    evidence_out: Option<PathBuf>,
    /// Write the held-out truth here
    #[arg(long)]
    truth_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Marginals CSV written by `infer`
    #[arg(long)]
    marginals: PathBuf,
    /// Held-out truth database
    #[arg(long)]
    truth: PathBuf,
    /// Output CSV of `metric,value` rows
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// Experiment configuration (TOML key = value lines)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output results CSV
    #[arg(long)]
    out: PathBuf,
    /// Also write mean AUC per test size as a gnuplot data file
    #[arg(long)]
    gnuplot: Option<PathBuf>,
}

/// Failure with the process exit status it maps to.
#[derive(Debug)]
struct Failure {
    code: u8,
    error: anyhow::Error,
}

const DATA: u8 = 2;
const RESOURCE: u8 = 3;

impl Failure {
    fn data(error: impl Into<anyhow::Error>) -> Failure {
        Failure {
            code: DATA,
            error: error.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Failure {
        Failure { code: DATA, error }
    }
}

fn ground_code(e: &GroundError) -> u8 {
    match e {
        GroundError::MemoryBudgetExceeded { .. } => RESOURCE,
        _ => DATA,
    }
}

fn inference_code(e: &InferenceError) -> u8 {
    match e {
        InferenceError::TooManyAtoms { .. } => RESOURCE,
        _ => DATA,
    }
}

fn learn_code(e: &LearnError) -> u8 {
    match e {
        LearnError::Ground(g) => ground_code(g),
        _ => DATA,
    }
}

fn bench_code(e: &BenchError) -> u8 {
    match e {
        BenchError::Learn(l) => learn_code(l),
        BenchError::Ground(g) => ground_code(g),
        BenchError::Inference(i) => inference_code(i),
        _ => DATA,
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn create(path: &Path) -> anyhow::Result<BufWriter<fs::File>> {
    let file =
        fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn load_model(path: &Path) -> anyhow::Result<Model> {
    parse_model(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn settings(model: &Model, mode: Option<Mode>, aggregator: Option<Aggregator>) -> Settings {
    Settings {
        mode: mode.unwrap_or(model.settings.mode),
        aggregator: aggregator.unwrap_or(model.settings.aggregator),
    }
}

fn cmd_learn(args: &LearnArgs) -> Result<(), Failure> {
    let model = load_model(&args.model)?;
    let s = settings(&model, args.mode, args.aggregator);
    let model = model.with_settings(s);
    let opts = DbOptions {
        strict: args.strict,
    };
    let mut dbs = Vec::with_capacity(args.db.len());
    for path in &args.db {
        let db = parse_database_with(&read(path)?, &model, opts)
            .with_context(|| format!("in {}", path.display()))?;
        dbs.push(db);
    }
    let cfg = LearnConfig {
        prior_std: args.prior_std,
        max_iterations: args.max_iterations,
        tolerance: args.tolerance,
        optimizer: args.optimizer,
        mode: s.mode,
        aggregator: s.aggregator,
        per_db_normalize: args.per_db_normalize,
    };
    let ts = TrainingSet::new(&model, dbs).map_err(|e| Failure {
        code: learn_code(&e),
        error: e.into(),
    })?;
    let result = learn_weights(&model, &ts, &cfg).map_err(|e| Failure {
        code: learn_code(&e),
        error: e.into(),
    })?;
    log::info!(
        "pseudo-log-likelihood {:.6} after {} iterations (converged: {})",
        result.objective,
        result.trace.len() - 1,
        result.converged
    );
    write_text(&args.out, &model.with_weights(&result.weights).to_string())?;
    Ok(())
}

fn cmd_infer(args: &InferArgs) -> Result<(), Failure> {
    let model = load_model(&args.model)?;
    let model = model.with_settings(settings(&model, args.mode, args.aggregator));
    let queries: BTreeSet<String> = args.query.iter().map(|q| q.trim().to_string()).collect();
    for q in &queries {
        if model.signature.predicate(q).is_none() {
            return Err(Failure::data(anyhow!("unknown query predicate `{q}`")));
        }
    }
    let mut evidence = match &args.evidence {
        Some(path) => parse_database_with(
            &read(path)?,
            &model,
            DbOptions {
                strict: args.strict,
            },
        )
        .with_context(|| format!("in {}", path.display()))?,
        None => Default::default(),
    };
    for p in model.signature.predicates() {
        if !queries.contains(&p.name) {
            evidence.closed_world.insert(p.name.clone());
        }
    }
    let sig = evidence.signature(&model).map_err(Failure::data)?;
    let opts = GroundOptions {
        memory_budget: args.memory_budget,
        ..Default::default()
    };
    let net = ground_network(&model, &sig, &evidence, &queries, &opts).map_err(|e| Failure {
        code: ground_code(&e),
        error: e.into(),
    })?;
    log::info!(
        "{} ground atoms, {} free, {} ground features",
        net.num_atoms(),
        net.free_atoms().len(),
        net.features().len()
    );
    let marginals = if args.exact {
        exact_marginals(
            &net,
            &ExactParams {
                max_atoms: args.exact_cap,
            },
        )
        .map(|r| r.marginals)
    } else {
        gibbs_marginals(
            &net,
            &GibbsParams {
                chains: args.chains,
                burn_in: args.burn_in,
                samples: args.samples,
                seed: args.seed,
            },
        )
    }
    .map_err(|e| Failure {
        code: inference_code(&e),
        error: e.into(),
    })?;
    let mut sink = create(&args.out)?;
    write_marginals(&marginals, &mut sink).map_err(Failure::data)?;
    sink.flush().map_err(Failure::data)?;
    Ok(())
}

fn cmd_generate_fs(args: &GenerateArgs) -> Result<(), Failure> {
    if !(0.0..=1.0).contains(&args.evidence_frac) {
        return Err(Failure::data(anyhow!("--evidence-frac must lie in [0, 1]")));
    }
    let world = generate_fs(args.size, &FsParams::default(), args.seed).map_err(Failure::data)?;
    write_text(&args.out, &world.database.to_string())?;
    if args.evidence_out.is_some() || args.truth_out.is_some() {
        let (evidence, truth) = make_evidence(&world.database, args.evidence_frac, args.seed);
        if let Some(path) = &args.evidence_out {
            write_text(path, &evidence.to_string())?;
        }
        if let Some(path) = &args.truth_out {
            write_text(path, &truth.to_string())?;
        }
    }
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> Result<(), Failure> {
    let marginals = parse_marginals(&read(&args.marginals)?)
        .with_context(|| format!("in {}", args.marginals.display()))?;
    let mut labels: BTreeMap<String, BTreeMap<GroundAtom, bool>> = BTreeMap::new();
    let mut all = BTreeMap::new();
    for (atom, value, _) in parse_literals(&read(&args.truth)?)
        .with_context(|| format!("in {}", args.truth.display()))?
    {
        labels
            .entry(atom.predicate.clone())
            .or_default()
            .insert(atom.clone(), value);
        all.insert(atom, value);
    }
    let mut rows = vec![("auc_all".to_string(), &all)];
    rows.extend(labels.iter().map(|(p, l)| (format!("auc_{p}"), l)));
    let mut out = csv::Writer::from_writer(create(&args.out)?);
    out.write_record(["metric", "value"])
        .map_err(Failure::data)?;
    for (name, labels) in rows {
        let auc = match pr_auc(&marginals, labels) {
            Ok(v) => format!("{v:.6}"),
            Err(BenchError::NoPositives) => "nan".into(),
            Err(e) => return Err(Failure::data(e)),
        };
        log::info!("{name}: {auc}");
        out.write_record([name, auc]).map_err(Failure::data)?;
    }
    out.flush().map_err(Failure::data)?;
    Ok(())
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<(), Failure> {
    let cfg = match &args.config {
        Some(path) => ExperimentConfig::from_toml(&read(path)?)
            .map_err(|e| Failure::data(anyhow!("{}: {e}", path.display())))?,
        None => ExperimentConfig::default(),
    };
    log::info!("experiment: {cfg:?}");
    let rows = run_experiment(&cfg).map_err(|e| Failure {
        code: bench_code(&e),
        error: e.into(),
    })?;
    let mut sink = create(&args.out)?;
    write_results(&rows, &mut sink).map_err(Failure::data)?;
    sink.flush().map_err(Failure::data)?;
    if let Some(path) = &args.gnuplot {
        let mut sink = create(path)?;
        write_gnuplot(&rows, &mut sink).map_err(Failure::data)?;
        sink.flush().map_err(Failure::data)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "info"))
        .format_timestamp(None)
        .init();
    log::info!("{:?}", cli.command);

    let result = match &cli.command {
        Command::Learn(a) => cmd_learn(a),
        Command::Infer(a) => cmd_infer(a),
        Command::GenerateFs(a) => cmd_generate_fs(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Experiment(a) => cmd_experiment(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
