//! Command-line front end. Every subcommand writes one JSON artifact holding
//! the result, the configuration echo, the seed and the crate version.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::batch::{run_batch_with, BatchOptions};
use crate::bench::{run_benchmark, BenchConfig, Method, ScenarioId};
use crate::comparison::{ComparisonDensity, EstimatorKind, SelectionResult};
use crate::config::{EstimatorChoice, PipelineConfig, SelectionRule};
use crate::error::{Error, Result};
use crate::inference::{bootstrap_density, sample_skewg};
use crate::io;
use crate::modes::{x_search_range, SkewGDensity};
use crate::pipeline::{fit_pipeline, run_modes, LpFit};
use crate::reference::{FamilyKind, FitMethod, ReferenceModel};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "lpmode", version, about = "Nonparametric mode identification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the reference and comparison densities to one variable.
    Fit(SingleArgs),
    /// Fit and report the reconciled modes.
    Modes(SingleArgs),
    /// Modes with bootstrap standard errors and intervals.
    Infer(InferArgs),
    /// Mode counts for every column of a matrix.
    Batch(BatchArgs),
    /// Monte Carlo success-rate table over the benchmark scenarios.
    Bench(BenchArgs),
    /// Draw from a fitted density written by `fit`.
    Sample(SampleArgs),
}

/// Overrides applied on top of `--config` (or the defaults).
#[derive(Debug, Clone, Default, Args)]
pub struct PipelineArgs {
    /// JSON pipeline configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyKind>,
    #[arg(long, value_enum)]
    pub fit_method: Option<FitMethod>,
    /// Reference parameters for `--fit-method fixed`, e.g. `0,1` or `2.5`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub params: Option<Vec<f64>>,
    /// Largest Legendre order considered.
    #[arg(long)]
    pub max_order: Option<usize>,
    #[arg(long, value_enum)]
    pub select: Option<SelectionRule>,
    #[arg(long, value_enum)]
    pub estimator: Option<EstimatorChoice>,
    /// Points in the mode-search grid.
    #[arg(long)]
    pub grid: Option<usize>,
    /// RNG seed; drawn at random and logged when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    /// Directory for the JSON artifact and curve CSVs; stdout otherwise.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Also write d̂ on a u-grid and g, f̂ on an x-grid (needs --out-dir).
    #[arg(long)]
    pub emit_curves: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SingleArgs {
    /// CSV with a header row, or one number per line.
    pub input: PathBuf,
    /// Column name or 0-based index.
    #[arg(long)]
    pub col: Option<String>,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct InferArgs {
    #[command(flatten)]
    pub single: SingleArgs,
    /// Bootstrap replicates.
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Confidence level of the intervals.
    #[arg(long)]
    pub level: Option<f64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct BatchArgs {
    /// CSV matrix, variables in columns by default.
    pub input: PathBuf,
    /// Variables are rows (first cell is the name) instead of columns.
    #[arg(long)]
    pub transpose: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Variables that also get bootstrap inference.
    #[arg(long, value_delimiter = ',')]
    pub bootstrap: Vec<String>,
    /// Bootstrap replicates.
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Confidence level of the intervals.
    #[arg(long)]
    pub level: Option<f64>,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// JSON bench configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',', ignore_case = true)]
    pub scenarios: Option<Vec<ScenarioId>>,
    /// Sample sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub methods: Option<Vec<Method>>,
    /// Monte Carlo replications per cell.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Largest Legendre order for the LP methods.
    #[arg(long)]
    pub max_order: Option<usize>,
    #[arg(long, value_enum)]
    pub select: Option<SelectionRule>,
    /// Base seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Also report the mean Hausdorff distance to the true modes.
    #[arg(long)]
    pub hausdorff: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    /// Artifact from `fit`, or a bare fitted-density JSON.
    pub model: PathBuf,
    /// Number of draws.
    #[arg(long)]
    pub n: usize,
    /// RNG seed; drawn at random and logged when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Which estimator to draw from when the artifact holds both.
    #[arg(long, value_enum)]
    pub estimator: Option<EstimatorKind>,
    /// Output CSV; stdout otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunArtifact<T> {
    pub version: String,
    pub command: String,
    pub seed: u64,
    /// True when no seed was given and one was drawn at random.
    pub seed_generated: bool,
    pub config: serde_json::Value,
    pub result: T,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub curves: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedEstimator {
    pub estimator: EstimatorKind,
    pub selected_indices: Vec<usize>,
    /// L² coefficients or MaxEnt natural parameters, aligned with the indices.
    pub coefficients: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<f64>,
    pub density: SkewGDensity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub n: usize,
    pub reference: ReferenceModel,
    pub lp_means: Vec<f64>,
    pub selection: SelectionResult,
    /// One-line description of the selected model.
    pub summary: String,
    pub estimators: Vec<FittedEstimator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maxent_failure: Option<String>,
}

impl FitSummary {
    pub fn from_fit(fit: &LpFit) -> Self {
        let summary = if fit.selection.k_selected == 0 {
            "no significant coefficients; d ≡ 1".to_string()
        } else {
            let idx = fit.selection.sorted_indices();
            format!(
                "selected {{{}}}",
                idx.iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            )
        };
        let estimators = fit
            .densities()
            .map(|(kind, sk)| {
                let mut pairs: Vec<(usize, f64)> = sk
                    .cd
                    .indices()
                    .iter()
                    .copied()
                    .zip(sk.cd.coefficients().iter().copied())
                    .collect();
                pairs.sort_by_key(|p| p.0);
                let theta0 = match &sk.cd {
                    ComparisonDensity::MaxEnt { theta0, .. } => Some(*theta0),
                    ComparisonDensity::L2 { .. } => None,
                };
                FittedEstimator {
                    estimator: kind,
                    selected_indices: pairs.iter().map(|p| p.0).collect(),
                    coefficients: pairs.iter().map(|p| p.1).collect(),
                    theta0,
                    density: sk.clone(),
                }
            })
            .collect();
        FitSummary {
            n: fit.lp.n(),
            reference: fit.reference,
            lp_means: fit.lp.values().to_vec(),
            selection: fit.selection.clone(),
            summary,
            estimators,
            maxent_failure: fit.maxent_failure.clone(),
        }
    }
}

/// Resolved seed and whether it was drawn at random.
fn resolve_seed(flag: Option<u64>, from_file: Option<u64>) -> (u64, bool) {
    match flag.or(from_file) {
        Some(s) => (s, false),
        None => (rand::random(), true),
    }
}

fn read_json_file(path: &Path) -> Result<serde_json::Value> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn file_seed(v: &serde_json::Value) -> Option<u64> {
    v.get("seed").and_then(serde_json::Value::as_u64)
}

impl PipelineArgs {
    /// The effective configuration and the seed it carries. `random` marks
    /// commands that consume randomness, which get a fresh seed when none
    /// was given.
    pub fn resolve(&self, random: bool) -> Result<(PipelineConfig, bool)> {
        let (mut cfg, seed_in_file) = match &self.config {
            Some(p) => {
                let v = read_json_file(p)?;
                let s = file_seed(&v);
                (serde_json::from_value::<PipelineConfig>(v)?, s)
            }
            None => (PipelineConfig::default(), None),
        };
        if let Some(f) = self.family {
            cfg.family = f;
        }
        if let Some(m) = self.fit_method {
            cfg.fit_method = m;
        }
        if let Some(p) = &self.params {
            cfg.reference_params = Some(p.clone());
        }
        if let Some(m) = self.max_order {
            cfg.m_max = m;
        }
        if let Some(s) = self.select {
            cfg.selection_rule = s;
        }
        if let Some(e) = self.estimator {
            cfg.estimator = e;
        }
        if let Some(g) = self.grid {
            cfg.grid = g;
        }
        let mut generated = false;
        if random {
            let (s, g) = resolve_seed(self.seed, seed_in_file);
            cfg.seed = s;
            generated = g;
        } else if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok((cfg, generated))
    }
}

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(w) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(f)),
    }
}

fn kind_name(kind: EstimatorKind) -> &'static str {
    match kind {
        EstimatorKind::L2 => "l2",
        EstimatorKind::MaxEnt => "maxent",
    }
}

/// `points` equally spaced values on [lo, hi], endpoints included.
fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|i| lo + step * i as f64).collect()
}

/// Writes `curve_u_<est>.csv` (u, d) and `curve_x_<est>.csv` (x, g, f) for
/// one fitted density and returns the file names.
pub fn write_curves(
    dir: &Path,
    kind: EstimatorKind,
    sk: &SkewGDensity,
    config: &PipelineConfig,
) -> Result<Vec<String>> {
    let points = config.grid + 1;
    let us = linspace(0.0, 1.0, points);
    let ds: Vec<f64> = us.iter().map(|&u| sk.cd.eval_unchecked(u)).collect();
    let u_name = format!("curve_u_{}.csv", kind_name(kind));
    io::write_columns(&dir.join(&u_name), &["u", "d"], &[us, ds])?;

    let (lo, hi) = x_search_range(&sk.reference, config.tail_delta);
    let xs = linspace(lo, hi, points);
    let gs: Vec<f64> = xs.iter().map(|&x| sk.reference.pdf(x)).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| sk.eval(x)).collect();
    let x_name = format!("curve_x_{}.csv", kind_name(kind));
    io::write_columns(&dir.join(&x_name), &["x", "g", "f"], &[xs, gs, fs])?;
    Ok(vec![u_name, x_name])
}

fn curves_for(
    output: &OutputArgs,
    densities: &[(EstimatorKind, SkewGDensity)],
    config: &PipelineConfig,
) -> Result<Vec<String>> {
    if !output.emit_curves {
        return Ok(vec![]);
    }
    let dir = output
        .out_dir
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("--emit-curves requires --out-dir".into()))?;
    std::fs::create_dir_all(dir)?;
    let mut names = Vec::new();
    for (kind, sk) in densities {
        names.extend(write_curves(dir, *kind, sk, config)?);
    }
    Ok(names)
}

fn emit<T: Serialize>(
    artifact: &RunArtifact<T>,
    output: &OutputArgs,
    stdout: &mut dyn Write,
) -> Result<()> {
    match &output.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(format!("{}.json", artifact.command));
            io::write_json(&path, artifact)?;
            writeln!(stdout, "{}", path.display())?;
        }
        None => {
            serde_json::to_writer_pretty(&mut *stdout, artifact)?;
            writeln!(stdout)?;
        }
    }
    Ok(())
}

fn artifact<T>(
    command: &str,
    seed: u64,
    generated: bool,
    config: serde_json::Value,
    result: T,
) -> RunArtifact<T> {
    RunArtifact {
        version: VERSION.to_string(),
        command: command.to_string(),
        seed,
        seed_generated: generated,
        config,
        result,
        curves: vec![],
        warnings: vec![],
    }
}

fn log_seed(stderr: &mut dyn Write, seed: u64, generated: bool) -> Result<()> {
    if generated {
        writeln!(
            stderr,
            "{}",
            serde_json::json!({ "event": "seed", "seed": seed })
        )?;
    }
    Ok(())
}

pub fn cmd_fit(args: &SingleArgs) -> Result<RunArtifact<FitSummary>> {
    let (cfg, generated) = args.pipeline.resolve(false)?;
    let xs = io::read_column(&args.input, args.col.as_deref())?;
    let fit = fit_pipeline(&xs, &cfg)?;
    let summary = FitSummary::from_fit(&fit);
    let densities: Vec<_> = fit.densities().map(|(k, d)| (k, d.clone())).collect();
    let mut out = artifact(
        "fit",
        cfg.seed,
        generated,
        serde_json::to_value(&cfg)?,
        summary,
    );
    out.curves = curves_for(&args.output, &densities, &cfg)?;
    out.warnings
        .extend(fit.maxent_failure.iter().map(|m| format!("maxent: {m}")));
    Ok(out)
}

pub fn cmd_modes(args: &SingleArgs) -> Result<RunArtifact<crate::pipeline::ModeReport>> {
    let (cfg, generated) = args.pipeline.resolve(false)?;
    let xs = io::read_column(&args.input, args.col.as_deref())?;
    let report = run_modes(&xs, &cfg)?;
    let densities: Vec<_> = report
        .estimators
        .iter()
        .map(|e| (e.estimator, e.density.clone()))
        .collect();
    let curves = curves_for(&args.output, &densities, &cfg)?;
    let mut out = artifact(
        "modes",
        cfg.seed,
        generated,
        serde_json::to_value(&cfg)?,
        report,
    );
    out.curves = curves;
    Ok(out)
}

/// Modes of every enabled estimator with bootstrap inference. An estimator
/// whose bootstrap fails is reported as a warning unless all of them fail.
pub fn cmd_infer(args: &InferArgs) -> Result<RunArtifact<crate::pipeline::ModeReport>> {
    let (mut cfg, generated) = args.single.pipeline.resolve(true)?;
    if let Some(b) = args.replicates {
        cfg.replicates = b;
    }
    if let Some(l) = args.level {
        cfg.ci_level = l;
    }
    cfg.validate()?;
    let xs = io::read_column(&args.single.input, args.single.col.as_deref())?;
    let mut report = run_modes(&xs, &cfg)?;
    let mut warnings = Vec::new();
    let mut first_err = None;
    for e in &report.estimators {
        let r = with_workers(args.workers, || {
            bootstrap_density(
                &e.density,
                xs.len(),
                &cfg,
                cfg.replicates,
                cfg.ci_level,
                cfg.seed,
            )
        })?;
        match r {
            Ok(inf) => report.inference.push(inf),
            Err(err) => {
                warnings.push(format!("{}: {err}", kind_name(e.estimator)));
                first_err.get_or_insert(err);
            }
        }
    }
    if report.inference.is_empty() {
        if let Some(e) = first_err {
            return Err(e);
        }
    }
    let densities: Vec<_> = report
        .estimators
        .iter()
        .map(|e| (e.estimator, e.density.clone()))
        .collect();
    let curves = curves_for(&args.single.output, &densities, &cfg)?;
    let mut out = artifact(
        "infer",
        cfg.seed,
        generated,
        serde_json::to_value(&cfg)?,
        report,
    );
    out.curves = curves;
    out.warnings = warnings;
    Ok(out)
}

pub fn cmd_batch(args: &BatchArgs) -> Result<RunArtifact<crate::batch::BatchReport>> {
    let random = !args.bootstrap.is_empty();
    let (mut cfg, generated) = args.pipeline.resolve(random)?;
    if let Some(b) = args.replicates {
        cfg.replicates = b;
    }
    if let Some(l) = args.level {
        cfg.ci_level = l;
    }
    let matrix = io::read_matrix(&args.input, args.transpose)?;
    let options = BatchOptions {
        workers: args.workers,
        bootstrap: args.bootstrap.clone(),
    };
    let report = run_batch_with(&matrix, &cfg, &options)?;
    if let Some(dir) = &args.output.out_dir {
        std::fs::create_dir_all(dir)?;
        report.write_summary_csv(&dir.join("batch_summary.csv"))?;
    }
    Ok(artifact(
        "batch",
        cfg.seed,
        generated,
        serde_json::to_value(&cfg)?,
        report,
    ))
}

pub fn cmd_bench(args: &BenchArgs) -> Result<RunArtifact<crate::bench::BenchTable>> {
    let (mut cfg, seed_in_file) = match &args.config {
        Some(p) => {
            let v = read_json_file(p)?;
            let s = file_seed(&v);
            (serde_json::from_value::<BenchConfig>(v)?, s)
        }
        None => (BenchConfig::default(), None),
    };
    if let Some(s) = &args.scenarios {
        cfg.scenarios = s.clone();
    }
    if let Some(s) = &args.sizes {
        cfg.sizes = s.clone();
    }
    if let Some(m) = &args.methods {
        cfg.methods = m.clone();
    }
    if let Some(r) = args.reps {
        cfg.replications = r;
    }
    if let Some(m) = args.max_order {
        cfg.pipeline.m_max = m;
    }
    if let Some(s) = args.select {
        cfg.pipeline.selection_rule = s;
    }
    cfg.hausdorff |= args.hausdorff;
    let (seed, generated) = resolve_seed(args.seed, seed_in_file);
    cfg.seed = seed;
    let table = with_workers(args.workers, || run_benchmark(&cfg))??;
    if let Some(dir) = &args.output.out_dir {
        std::fs::create_dir_all(dir)?;
        table.write_csv(&dir.join("bench.csv"))?;
    }
    Ok(artifact(
        "bench",
        seed,
        generated,
        serde_json::to_value(&cfg)?,
        table,
    ))
}

/// Reads a fitted density from a `fit` artifact, a bare fit summary or a
/// bare density.
pub fn load_density(path: &Path, kind: Option<EstimatorKind>) -> Result<SkewGDensity> {
    let v = read_json_file(path)?;
    let v = v.get("result").cloned().unwrap_or(v);
    if v.get("estimators").is_some() {
        let summary: FitSummary = serde_json::from_value(v)?;
        let pick = match kind {
            Some(k) => summary.estimators.iter().find(|e| e.estimator == k),
            None => summary
                .estimators
                .iter()
                .find(|e| e.estimator == EstimatorKind::MaxEnt)
                .or_else(|| summary.estimators.first()),
        };
        return pick.map(|e| e.density.clone()).ok_or_else(|| {
            Error::InvalidArgument("the model file holds no density for that estimator".into())
        });
    }
    let sk: SkewGDensity = serde_json::from_value(v)?;
    sk.validate()?;
    Ok(sk)
}

pub struct SampleOutput {
    pub seed: u64,
    pub seed_generated: bool,
    pub sample: crate::inference::SkewGSample,
}

pub fn cmd_sample(args: &SampleArgs) -> Result<SampleOutput> {
    let sk = load_density(&args.model, args.estimator)?;
    let (seed, seed_generated) = resolve_seed(args.seed, None);
    let sample = sample_skewg(&sk, args.n, seed)?;
    if let Some(path) = &args.out {
        io::write_columns(path, &["x"], std::slice::from_ref(&sample.draws))?;
    }
    Ok(SampleOutput {
        seed,
        seed_generated,
        sample,
    })
}

/// Runs a parsed command, writing results to `stdout` and log lines to
/// `stderr`.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Fit(a) => {
            let out = cmd_fit(a)?;
            emit(&out, &a.output, stdout)
        }
        Command::Modes(a) => {
            let out = cmd_modes(a)?;
            emit(&out, &a.output, stdout)
        }
        Command::Infer(a) => {
            let out = cmd_infer(a)?;
            log_seed(stderr, out.seed, out.seed_generated)?;
            emit(&out, &a.single.output, stdout)
        }
        Command::Batch(a) => {
            let out = cmd_batch(a)?;
            log_seed(stderr, out.seed, out.seed_generated)?;
            emit(&out, &a.output, stdout)
        }
        Command::Bench(a) => {
            let out = cmd_bench(a)?;
            log_seed(stderr, out.seed, out.seed_generated)?;
            emit(&out, &a.output, stdout)
        }
        Command::Sample(a) => {
            let out = cmd_sample(a)?;
            log_seed(stderr, out.seed, out.seed_generated)?;
            writeln!(
                stderr,
                "{}",
                serde_json::json!({
                    "event": "sample",
                    "n": out.sample.draws.len(),
                    "acceptance_rate": out.sample.acceptance_rate,
                })
            )?;
            if a.out.is_none() {
                writeln!(stdout, "x")?;
                for x in &out.sample.draws {
                    writeln!(stdout, "{x}")?;
                }
            }
            Ok(())
        }
    }
}

/// Structured error line for stderr.
pub fn error_json(code: &str, message: &str) -> String {
    serde_json::json!({ "code": code, "message": message }).to_string()
}

/// Parses `args`, runs the command and returns the process exit code. Help
/// and version requests exit 0; usage errors exit 2; failures exit 1.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let msg = e.to_string();
                    let first = msg.lines().next().unwrap_or_default();
                    let _ = writeln!(stderr, "{}", error_json("usage_error", first));
                    2
                }
            };
        }
    };
    match run(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{}", error_json(e.code(), &e.to_string()));
            1
        }
    }
}
