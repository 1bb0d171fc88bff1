//! Mode exploration across many variables.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::comparison::EstimatorKind;
use crate::config::{EstimatorChoice, PipelineConfig};
use crate::error::{Error, Result};
use crate::inference::{bootstrap_density, ModeInferenceReport};
use crate::pipeline::{fit_pipeline, reconciled_modes};
use crate::stats;

/// Variables with fewer observations are skipped.
pub const MIN_BATCH_N: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    FitFailure,
    NonConvergence,
    SkippedSmallSample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableFailure {
    pub kind: FailureKind,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableResult {
    pub name: String,
    pub n: usize,
    pub mode_count: usize,
    pub modes: Vec<f64>,
    pub estimator_used: Option<EstimatorKind>,
    pub selection: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<VariableFailure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inference: Option<ModeInferenceReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inference_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub results: Vec<VariableResult>,
    pub modality_histogram: BTreeMap<usize, usize>,
    pub config_echo: PipelineConfig,
}

impl BatchReport {
    pub fn failures(&self) -> impl Iterator<Item = &VariableResult> {
        self.results.iter().filter(|r| r.error.is_some())
    }

    /// Writes `name,n,mode_count,modes` with modes joined by `|`.
    pub fn write_summary_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["name", "n", "mode_count", "modes", "error"])?;
        for r in &self.results {
            let modes = r
                .modes
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join("|");
            let err = r.error.as_ref().map(|e| {
                serde_json::to_value(e.kind)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_owned))
                    .unwrap_or_default()
            });
            w.write_record([
                r.name.clone(),
                r.n.to_string(),
                r.mode_count.to_string(),
                modes,
                err.unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct BatchOptions {
    /// Thread cap; `None` uses the rayon default.
    pub workers: Option<usize>,
    /// Variables that also get bootstrap inference.
    pub bootstrap: Vec<String>,
}

/// 64-bit FNV-1a of the base seed followed by the variable name.
pub fn variable_seed(base_seed: u64, name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in base_seed.to_le_bytes().iter().chain(name.as_bytes()) {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn run_batch(matrix: &[(String, Vec<f64>)], config: &PipelineConfig) -> Result<BatchReport> {
    run_batch_with(matrix, config, &BatchOptions::default())
}

pub fn run_batch_with(
    matrix: &[(String, Vec<f64>)],
    config: &PipelineConfig,
    options: &BatchOptions,
) -> Result<BatchReport> {
    config.validate()?;
    let work = || -> Vec<VariableResult> {
        matrix
            .par_iter()
            .map(|(name, xs)| {
                let infer = options.bootstrap.iter().any(|b| b == name);
                analyse_variable(name, xs, config, infer)
            })
            .collect()
    };
    let results = match options.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(work),
        None => work(),
    };
    let mut modality_histogram = BTreeMap::new();
    for r in results.iter().filter(|r| r.error.is_none()) {
        *modality_histogram.entry(r.mode_count).or_insert(0) += 1;
    }
    Ok(BatchReport {
        results,
        modality_histogram,
        config_echo: config.clone(),
    })
}

fn failure(name: &str, n: usize, kind: FailureKind, message: String) -> VariableResult {
    VariableResult {
        name: name.to_owned(),
        n,
        mode_count: 0,
        modes: vec![],
        estimator_used: None,
        selection: vec![],
        error: Some(VariableFailure { kind, message }),
        inference: None,
        inference_error: None,
    }
}

/// Runs one variable. With `Both`, MaxEnt is used and L² is the fallback when
/// MaxEnt does not converge.
fn analyse_variable(
    name: &str,
    xs: &[f64],
    config: &PipelineConfig,
    infer: bool,
) -> VariableResult {
    let n = xs.len();
    if n < MIN_BATCH_N {
        return failure(
            name,
            n,
            FailureKind::SkippedSmallSample,
            format!("{n} observations, need at least {MIN_BATCH_N}"),
        );
    }
    let attempt = |kind: EstimatorKind| -> Result<_> {
        let mut cfg = config.clone();
        cfg.estimator = kind.into();
        let fit = fit_pipeline(xs, &cfg)?;
        let sk = fit.density(kind).cloned().ok_or(Error::NoModes)?;
        let modes = reconciled_modes(&sk, &cfg)?;
        Ok((fit, sk, modes, cfg))
    };
    let outcome = match config.estimator {
        EstimatorChoice::L2 => attempt(EstimatorKind::L2),
        EstimatorChoice::MaxEnt => attempt(EstimatorKind::MaxEnt),
        EstimatorChoice::Both => match attempt(EstimatorKind::MaxEnt) {
            Err(Error::NonConvergence { .. }) => attempt(EstimatorKind::L2),
            other => other,
        },
    };
    let (fit, sk, modes, cfg) = match outcome {
        Ok(v) => v,
        Err(e @ Error::NonConvergence { .. }) => {
            return failure(name, n, FailureKind::NonConvergence, e.to_string())
        }
        Err(e) => return failure(name, n, FailureKind::FitFailure, e.to_string()),
    };
    let (inference, inference_error) = if infer {
        let seed = variable_seed(config.seed, name);
        match bootstrap_density(&sk, n, &cfg, config.replicates, config.ci_level, seed) {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };
    VariableResult {
        name: name.to_owned(),
        n,
        mode_count: modes.len(),
        modes: modes.locations,
        estimator_used: Some(sk.cd.kind()),
        selection: fit.selection.sorted_indices(),
        error: None,
        inference,
        inference_error,
    }
}

/// Pearson correlation between the observations and their empirical-CDF
/// values, with mid-ranks for ties.
pub fn gini(samples: &[f64]) -> Result<f64> {
    crate::reference::check_samples(samples)?;
    if samples.len() < 3 {
        return Err(Error::DegenerateSample(
            "need at least 3 observations".into(),
        ));
    }
    let n = samples.len() as f64;
    let ecdf: Vec<f64> = stats::mid_ranks(samples)
        .into_iter()
        .map(|r| r / n)
        .collect();
    stats::pearson(samples, &ecdf).ok_or_else(|| Error::DegenerateSample("constant sample".into()))
}
