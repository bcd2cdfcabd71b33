//! Command-line pipeline: ingest scored pairs, run column generation and
//! integerization, write clusters, statistics and metrics.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::ccrelax::compare_tightness;
use crate::colgen::{integerize, run_cg, CgConfig, CgResult, Integerization, IterationStats};
use crate::error::SolverError;
use crate::instance::Instance;
use crate::io::{self as fmt, IdTable, IngestError};
use crate::master::{DoiConfig, DoiMode};
use crate::metrics::{self, LabeledPartition, Report};
use crate::pricing::{PricingConfig, PricingStrategy};
use crate::synth::generate_synthetic;

#[derive(Debug, Parser)]
#[command(name = "erpack", version, about = "Entity resolution by set packing and column generation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster the observations of a pair file.
    Solve(SolveArgs),
    /// Write a planted-partition instance and its truth labels.
    Synth(SynthArgs),
    /// Compare the packing LP bound with the correlation-clustering LP.
    CcrelaxCompare(InputArgs),
    /// Score a label file against ground truth.
    Metrics(MetricsArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Scored pairs `id1,id2,p`.
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    /// Raw pair costs `id1,id2,theta`.
    #[arg(long)]
    pub theta: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[command(flatten)]
    pub source: Source,
    /// `theta = bias - p` for scored pairs.
    #[arg(long, default_value_t = 0.5)]
    pub bias: f64,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Ground-truth labels `id,label`; enables metrics.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Cluster labels output; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Line-delimited JSON statistics.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    #[arg(long, default_value = "flexible")]
    pub doi: DoiMode,
    /// Rungs per observation besides the top one (flexible mode only).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    #[arg(long, default_value = "hybrid")]
    pub pricing: PricingStrategy,
    /// Columns per pricing sweep.
    #[arg(long, default_value_t = 50)]
    pub max_cols: usize,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub clusters: usize,
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output for the pair costs.
    #[arg(long)]
    pub theta: PathBuf,
    /// Output for the planted labels.
    #[arg(long)]
    pub truth: PathBuf,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Predicted labels `id,label`.
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Pairs,
    Theta,
}

/// Everything one `solve` run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub format: InputFormat,
    pub truth: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub stats: Option<PathBuf>,
    pub bias: f64,
    pub cg: CgConfig,
}

impl RunConfig {
    pub fn from_args(args: &SolveArgs) -> Result<Self, CliError> {
        let (input, format) = source_path(&args.input.source);
        if args.k.is_some() && args.doi != DoiMode::Flexible {
            return Err(CliError::Usage("--k only applies to --doi flexible".into()));
        }
        let mut doi = DoiConfig::new(args.doi);
        doi.epsilon = args.epsilon;
        if let Some(k) = args.k {
            doi.k = k;
        }
        let pricing = PricingConfig {
            strategy: args.pricing,
            max_new_columns: args.max_cols,
            seed: args.seed,
            threads: args.threads,
            ..Default::default()
        };
        let cg = CgConfig::new(doi, pricing);
        cg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        if !args.input.bias.is_finite() {
            return Err(CliError::Usage("--bias must be finite".into()));
        }
        Ok(RunConfig {
            input,
            format,
            truth: args.truth.clone(),
            out: args.out.clone(),
            stats: args.stats.clone(),
            bias: args.input.bias,
            cg,
        })
    }
}

fn source_path(source: &Source) -> (PathBuf, InputFormat) {
    match (&source.pairs, &source.theta) {
        (Some(p), _) => (p.clone(), InputFormat::Pairs),
        (None, Some(t)) => (t.clone(), InputFormat::Theta),
        (None, None) => unreachable!("clap requires one source"),
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("{path}: {source}")]
    Write { path: String, source: io::Error },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(_) => 1,
            _ => 2,
        }
    }
}

/// Final record of the statistics stream.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub observations: usize,
    pub pairs: usize,
    pub lp_objective: f64,
    pub ilp_objective: f64,
    pub iterations: usize,
    pub columns: usize,
    pub clusters: usize,
    pub lp_integral: bool,
    pub bnb_nodes: usize,
    pub proven_optimal: bool,
    pub exact_pricing: bool,
    pub repairs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Report>,
}

#[derive(Serialize)]
#[serde(tag = "record", rename_all = "lowercase")]
enum StatsRecord<'a> {
    Iteration(&'a IterationStats),
    Summary(&'a Summary),
}

pub struct RunOutput {
    pub ids: IdTable,
    pub cg: CgResult,
    pub integer: Integerization,
    pub summary: Summary,
}

pub fn load(path: &Path, format: InputFormat, bias: f64) -> Result<(Instance, IdTable), IngestError> {
    match format {
        InputFormat::Pairs => fmt::ingest_pairs(path, bias),
        InputFormat::Theta => fmt::ingest_theta(path),
    }
}

/// Ingest, column generation, integerization and optional scoring. Writes
/// nothing.
pub fn execute(config: &RunConfig) -> Result<RunOutput, CliError> {
    let (instance, ids) = load(&config.input, config.format, config.bias)?;
    let truth = match &config.truth {
        Some(path) => Some(fmt::ingest_truth(path, &ids)?),
        None => None,
    };
    let cg = run_cg(&instance, &config.cg)?;
    let integer = integerize(&instance, &cg.pool, &config.cg.doi)?;
    let metrics = match truth {
        Some(truth) => {
            let pred = LabeledPartition::from_labels(&integer.clustering.labels());
            Some(metrics::report(&pred, &truth).expect("both partitions cover the id table"))
        }
        None => None,
    };
    let summary = Summary {
        observations: instance.n_observations(),
        pairs: instance.n_pairs(),
        lp_objective: cg.lp_objective,
        ilp_objective: integer.clustering.total_cost,
        iterations: cg.iterations,
        columns: cg.columns_generated,
        clusters: integer.clustering.n_clusters(),
        lp_integral: integer.lp_integral,
        bnb_nodes: integer.bnb_nodes,
        proven_optimal: integer.proven_optimal,
        exact_pricing: cg.exact,
        repairs: integer.repairs,
        metrics,
    };
    Ok(RunOutput { ids, cg, integer, summary })
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|source| write_err(path, source))
}

fn write_err(path: &Path, source: io::Error) -> CliError {
    CliError::Write { path: path.display().to_string(), source }
}

/// Runs the pipeline and writes the cluster file, the statistics stream and
/// a human-readable summary on `log`.
pub fn run(config: &RunConfig, log: &mut dyn Write) -> Result<Summary, CliError> {
    let output = execute(config)?;
    let clusters_path = config.out.as_deref().unwrap_or(Path::new("<stdout>"));
    let written = match &config.out {
        Some(path) => {
            let mut w = create(path)?;
            fmt::write_clusters(&mut w, &output.integer.clustering, &output.ids).and_then(|_| w.flush())
        }
        None => fmt::write_clusters(io::stdout().lock(), &output.integer.clustering, &output.ids),
    };
    written.map_err(|e| write_err(clusters_path, e))?;
    if let Some(path) = &config.stats {
        let mut w = create(path)?;
        write_stats(&mut w, &output.cg.stats, &output.summary).map_err(|e| write_err(path, e))?;
    }
    print_summary(log, &output.summary).map_err(|e| write_err(Path::new("<log>"), e))?;
    Ok(output.summary)
}

pub fn write_stats<W: Write>(w: &mut W, iterations: &[IterationStats], summary: &Summary) -> io::Result<()> {
    for it in iterations {
        serde_json::to_writer(&mut *w, &StatsRecord::Iteration(it))?;
        writeln!(w)?;
    }
    serde_json::to_writer(&mut *w, &StatsRecord::Summary(summary))?;
    writeln!(w)?;
    w.flush()
}

fn print_summary(log: &mut dyn Write, s: &Summary) -> io::Result<()> {
    writeln!(log, "observations  {} ({} pairs)", s.observations, s.pairs)?;
    writeln!(log, "iterations    {} ({} columns)", s.iterations, s.columns)?;
    writeln!(log, "lp bound      {:.6}", s.lp_objective)?;
    let note = if s.lp_integral {
        "integral root"
    } else if s.proven_optimal {
        "branch and bound"
    } else {
        "node limit hit"
    };
    writeln!(log, "clustering    {:.6} ({} clusters, {note})", s.ilp_objective, s.clusters)?;
    if !s.exact_pricing {
        writeln!(log, "warning: pricing was not exact on every neighborhood, the bound may be loose")?;
    }
    if let Some(m) = &s.metrics {
        writeln!(
            log,
            "pairwise      P {:.4}  R {:.4}  F1 {:.4}",
            m.pairwise.precision, m.pairwise.recall, m.pairwise.f1
        )?;
        writeln!(
            log,
            "v-measure     {:.4}  ARI {:.4}  FM {:.4}",
            m.v.v_measure, m.adjusted_rand, m.fowlkes_mallows
        )?;
    }
    Ok(())
}

fn synth(args: &SynthArgs, log: &mut dyn Write) -> Result<(), CliError> {
    let s = generate_synthetic(args.n, args.clusters, args.noise, args.seed)?;
    let ids = IdTable::numbered(args.n);
    let mut w = create(&args.theta)?;
    fmt::write_theta(&mut w, &s.instance, &ids)
        .and_then(|_| w.flush())
        .map_err(|e| write_err(&args.theta, e))?;
    let mut w = create(&args.truth)?;
    fmt::write_labels(&mut w, &s.truth, &ids)
        .and_then(|_| w.flush())
        .map_err(|e| write_err(&args.truth, e))?;
    writeln!(log, "{} observations, {} pairs", args.n, s.instance.n_pairs())
        .map_err(|e| write_err(Path::new("<log>"), e))
}

fn ccrelax(args: &InputArgs) -> Result<(), CliError> {
    let (path, format) = source_path(&args.source);
    let (instance, _) = load(&path, format, args.bias)?;
    let t = compare_tightness(&instance)?;
    println!("{}", serde_json::to_string(&t).expect("plain numbers serialize"));
    Ok(())
}

fn score(args: &MetricsArgs) -> Result<(), CliError> {
    let (ids, pred) = fmt::ingest_labels(&args.pred)?;
    let truth = fmt::ingest_truth(&args.truth, &ids)?;
    let report = metrics::report(&pred, &truth).expect("truth covers the predicted ids");
    println!("{}", serde_json::to_string(&report).expect("plain numbers serialize"));
    Ok(())
}

pub fn dispatch(cli: &Cli, log: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Solve(args) => run(&RunConfig::from_args(args)?, log).map(|_| ()),
        Command::Synth(args) => synth(args, log),
        Command::CcrelaxCompare(args) => ccrelax(args),
        Command::Metrics(args) => score(args),
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut log = io::stderr();
    match dispatch(&cli, &mut log) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(log, "error: {e}");
            e.exit_code()
        }
    }
}
