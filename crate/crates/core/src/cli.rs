//! `graphcrop` command line: augment, stats, crop, diffusion, verify.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data, parse or
//! I/O error, 3 verification failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::augment::{self, AugmentConfig, Augmenter, Method, RngStream};
use crate::dataset::{self, Dataset};
use crate::diffusion::{self, DiffusionConfig, Metric, Normalization};
use crate::error::{Error, Result};
use crate::verify::{self, Suite, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

/// Environment variable bounding the worker thread count.
pub const THREADS_ENV: &str = "GRAPHCROP_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "graphcrop",
    version,
    about = "Subgraph-cropping augmentation for graph classification"
)]
pub struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Augment every graph for a number of epochs and write the result.
    Augment(AugmentArgs),
    /// Print graph count and mean node/edge counts.
    Stats(DataArgs),
    /// Crop one graph and print kept ids, scores and induced edges as JSON.
    Crop(CropArgs),
    /// Print one column of connectivity scores as JSON.
    Diffusion(DiffusionArgs),
    /// Run the built-in oracle and property suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tu,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Graphcrop,
    Uninode,
    Dropedge,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Graphcrop => Method::GraphCrop,
            MethodArg::Uninode => Method::UniNode,
            MethodArg::Dropedge => Method::DropEdge,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Ppr,
    Heat,
    Sp,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Ppr => Metric::Ppr,
            MetricArg::Heat => Metric::Heat,
            MetricArg::Sp => Metric::ShortestPath,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormalizationArg {
    Sym,
    Rw,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// TU dataset directory, or a .jsonl file.
    #[arg(long)]
    pub data: PathBuf,

    /// Dataset name (file prefix); defaults to the directory or file stem.
    #[arg(long)]
    pub name: Option<String>,

    /// Use node degrees as node labels for graphs without labels.
    #[arg(long)]
    pub degree_labels: bool,
}

impl DataArgs {
    fn load(&self) -> Result<Dataset> {
        let name = match &self.name {
            Some(n) => n.clone(),
            None => self
                .data
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| Error::Usage("cannot infer --name from --data".into()))?
                .to_string(),
        };
        let d = Dataset::load(&self.data, &name)?;
        Ok(if self.degree_labels {
            dataset::synthesize_degree_labels(&d, false)
        } else {
            d
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct DiffusionFlags {
    /// Connectivity metric.
    #[arg(long, value_enum, default_value = "ppr")]
    pub metric: MetricArg,

    /// PPR teleport probability (not fixed by the method; 0.15 is the usual choice).
    #[arg(long, default_value_t = DiffusionConfig::DEFAULT_ALPHA)]
    pub alpha: f64,

    /// Heat-kernel diffusion time.
    #[arg(long = "t", default_value_t = DiffusionConfig::DEFAULT_T)]
    pub t: f64,

    /// Operator normalization [default: sym for ppr, rw for heat].
    #[arg(long, value_enum)]
    pub normalization: Option<NormalizationArg>,

    /// Truncation depth of diffusion series.
    #[arg(long, default_value_t = DiffusionConfig::DEFAULT_DEPTH)]
    pub series_depth: usize,

    /// Term tolerance for iterative PPR on large graphs.
    #[arg(long, default_value_t = DiffusionConfig::DEFAULT_TOL)]
    pub residual_tol: f64,
}

impl DiffusionFlags {
    fn config(&self) -> Result<DiffusionConfig> {
        let mut cfg = DiffusionConfig::for_metric(self.metric.into());
        cfg.alpha = self.alpha;
        cfg.t = self.t;
        cfg.series_depth = self.series_depth;
        cfg.residual_tol = self.residual_tol;
        if let Some(n) = self.normalization {
            cfg.normalization = match n {
                NormalizationArg::Sym => Normalization::Symmetric,
                NormalizationArg::Rw => Normalization::RandomWalk,
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct AugmentFlags {
    #[arg(long, value_enum, default_value = "graphcrop")]
    pub method: MethodArg,

    /// Probability of augmenting each graph in each epoch.
    #[arg(long = "p", default_value_t = 0.5)]
    pub p: f64,

    /// Fraction of nodes kept by graphcrop and uninode.
    #[arg(long, default_value_t = 0.7)]
    pub rho: f64,

    /// Per-edge removal probability for dropedge.
    #[arg(long, default_value_t = 0.3)]
    pub drop_rate: f64,

    /// Restrict crops to the initial node's connected component.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub enforce_component: bool,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub diffusion: DiffusionFlags,
}

impl AugmentFlags {
    fn config(&self) -> Result<AugmentConfig> {
        let cfg = AugmentConfig {
            p: self.p,
            rho: self.rho,
            method: self.method.into(),
            drop_rate: self.drop_rate,
            diffusion: self.diffusion.config()?,
            enforce_component: self.enforce_component,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct AugmentArgs {
    #[command(flatten)]
    pub data: DataArgs,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,

    #[arg(long, value_enum, default_value = "tu")]
    pub format: Format,

    #[arg(long, default_value_t = 1)]
    pub epochs: usize,

    #[command(flatten)]
    pub augment: AugmentFlags,
}

#[derive(Debug, Clone, Args)]
pub struct CropArgs {
    #[command(flatten)]
    pub data: DataArgs,

    /// 0-based index of the graph to crop.
    #[arg(long, default_value_t = 0)]
    pub graph: usize,

    /// Fix the initial node instead of drawing it from the seed.
    #[arg(long)]
    pub initial_node: Option<usize>,

    #[command(flatten)]
    pub augment: AugmentFlags,
}

#[derive(Debug, Clone, Args)]
pub struct DiffusionArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[arg(long, default_value_t = 0)]
    pub graph: usize,

    /// Node whose score column is printed.
    #[arg(long, default_value_t = 0)]
    pub initial_node: usize,

    #[command(flatten)]
    pub diffusion: DiffusionFlags,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Run only these suites (repeatable).
    #[arg(long)]
    pub suite: Vec<String>,

    /// Perturb expected values so every suite fails.
    #[arg(long)]
    pub inject_fault: bool,
}

/// Worker count from `GRAPHCROP_THREADS`, if set.
fn thread_limit() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(s) if s.trim().is_empty() => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!(
                "{THREADS_ENV} must be a positive integer, got '{s}'"
            ))),
        },
        Err(_) => Ok(None),
    }
}

fn with_pool<T: Send>(f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_limit()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    pool.install(f)
}

fn pick_graph(d: &Dataset, index: usize) -> Result<&crate::graph::Graph> {
    d.graphs()
        .get(index)
        .ok_or_else(|| Error::Usage(format!("graph {index} out of range ({} graphs)", d.len())))
}

/// JSON has no infinities; unreachable shortest-path scores become null.
fn score_values(scores: &[f64]) -> Vec<Value> {
    scores
        .iter()
        .map(|&s| if s.is_finite() { json!(s) } else { Value::Null })
        .collect()
}

fn write_out(out: &mut dyn Write, line: std::fmt::Arguments<'_>) -> Result<()> {
    out.write_fmt(line)
        .and_then(|()| out.write_all(b"\n"))
        .map_err(|e| Error::io("<stdout>", e))
}

pub fn cmd_augment(args: &AugmentArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = args.augment.config()?;
    if args.epochs == 0 {
        return Err(Error::Config("--epochs must be at least 1".into()));
    }
    let d = args.data.load()?;
    let augmenter = Augmenter::new(cfg)?;
    let result = with_pool(|| augmenter.augment_dataset(&d, args.epochs))?;

    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    match args.format {
        Format::Tu => dataset::write_tu(&result.dataset, &args.out)?,
        Format::Jsonl => {
            dataset::write_jsonl(&result.dataset, &args.out.join(format!("{}.jsonl", d.name)))?
        }
    }
    write_metadata(&result.dataset, &args.out)?;

    let s = result.summary;
    write_out(
        out,
        format_args!(
            "graphs in: {}, graphs out: {}, augmented fraction: {:.4}, mean crop size ratio: {:.4}, mean edge ratio: {:.4}",
            s.graphs_in,
            s.graphs_out,
            s.augmented_fraction(),
            s.mean_node_ratio,
            s.mean_edge_ratio
        ),
    )
}

fn write_metadata(d: &Dataset, dir: &Path) -> Result<()> {
    let path = dir.join(format!("{}_augment.json", d.name));
    let mut text = serde_json::to_string_pretty(&d.metadata).expect("string map serializes");
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

pub fn cmd_stats(args: &DataArgs, out: &mut dyn Write) -> Result<()> {
    let d = args.load()?;
    let stats = d.stats()?;
    write_out(out, format_args!("{stats}"))?;
    if let Some(reference) = dataset::reference_stats(&d.name) {
        if stats.matches_reference(&reference) {
            write_out(
                out,
                format_args!("matches published statistics for {}", d.name),
            )?;
        } else {
            write_out(
                out,
                format_args!(
                    "MISMATCH: published statistics for {} are {reference}",
                    d.name
                ),
            )?;
        }
    }
    Ok(())
}

pub fn cmd_crop(args: &CropArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = args.augment.config()?;
    let d = args.data.load()?;
    let g = pick_graph(&d, args.graph)?;
    if g.node_count() == 0 {
        return Err(Error::Usage(format!("graph {} has no nodes", args.graph)));
    }
    let v = match args.initial_node {
        Some(v) => {
            g.check_node(v)?;
            v
        }
        None => {
            use rand::Rng;
            RngStream::new(cfg.seed, args.graph as u64, 0).random_range(0..g.node_count())
        }
    };
    let scores = diffusion::connectivity_scores(g, v, &cfg.diffusion)?;
    let crop = augment::select_crop(g, v, cfg.rho, cfg.enforce_component, &scores)?;
    let record = json!({
        "graph": args.graph,
        "initial_node": v,
        "metric": cfg.diffusion.metric.name(),
        "rho": cfg.rho,
        "kept": crop.kept_original_ids,
        "scores": score_values(&scores.scores),
        "edges": crop.subgraph.edges().iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
        "original_edges": crop
            .subgraph
            .edges()
            .iter()
            .map(|&(a, b)| [crop.kept_original_ids[a], crop.kept_original_ids[b]])
            .collect::<Vec<_>>(),
    });
    write_out(out, format_args!("{record}"))
}

pub fn cmd_diffusion(args: &DiffusionArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = args.diffusion.config()?;
    let d = args.data.load()?;
    let g = pick_graph(&d, args.graph)?;
    let scores = diffusion::connectivity_scores(g, args.initial_node, &cfg)?;
    let record = json!({
        "graph": args.graph,
        "v": args.initial_node,
        "metric": cfg.metric.name(),
        "scores": score_values(&scores.scores),
    });
    write_out(out, format_args!("{record}"))
}

/// Runs the selected suites; returns whether all passed.
pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<bool> {
    let suites: Vec<Suite> = if args.suite.is_empty() {
        Suite::ALL.to_vec()
    } else {
        args.suite
            .iter()
            .map(|s| s.parse())
            .collect::<Result<_>>()?
    };
    let opts = VerifyOptions {
        inject_fault: args.inject_fault,
    };
    let mut all = true;
    for suite in suites {
        let report = with_pool(|| verify::run_suite(suite, opts))?;
        let verdict = if report.passed() { "PASS" } else { "FAIL" };
        write_out(out, format_args!("{verdict} {suite}"))?;
        for c in &report.checks {
            let mark = if c.passed { "ok" } else { "FAILED" };
            write_out(out, format_args!("  [{mark}] {}: {}", c.name, c.detail))?;
        }
        for note in &report.notes {
            write_out(out, format_args!("  note: {note}"))?;
        }
        all &= report.passed();
    }
    Ok(all)
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    run_command(&cli.command, out, err)
}

pub fn run_command(command: &Command, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match command {
        Command::Augment(a) => cmd_augment(a, out).map(|()| true),
        Command::Stats(a) => cmd_stats(a, out).map(|()| true),
        Command::Crop(a) => cmd_crop(a, out).map(|()| true),
        Command::Diffusion(a) => cmd_diffusion(a, out).map(|()| true),
        Command::Verify(a) => cmd_verify(a, out),
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            let _ = writeln!(err, "error: verification failed");
            EXIT_VERIFY
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
