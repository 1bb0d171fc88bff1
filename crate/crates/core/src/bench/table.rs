//! Success-rate table over scenarios, sample sizes and methods.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gmm::gmm_bic_modes;
use super::kde::silverman_kde_modes;
use super::scenario::ScenarioId;
use crate::comparison::EstimatorKind;
use crate::config::{EstimatorChoice, PipelineConfig, SelectionRule};
use crate::error::{Error, Result};
use crate::pipeline::{fit_pipeline, reconciled_modes};
use crate::reference::FamilyKind;
use crate::stats;

#[derive(
    Debug,
    Clone,
    Copy,
    PartialEq,
    Eq,
    PartialOrd,
    Ord,
    Hash,
    Serialize,
    Deserialize,
    clap::ValueEnum,
)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Silverman,
    Gmm,
    #[value(name = "l2")]
    LpL2,
    #[value(name = "maxent")]
    LpMaxEnt,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Silverman,
        Method::Gmm,
        Method::LpL2,
        Method::LpMaxEnt,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub scenarios: Vec<ScenarioId>,
    pub sizes: Vec<usize>,
    pub methods: Vec<Method>,
    pub replications: usize,
    pub seed: u64,
    /// Pipeline settings for the LP methods; the reference family comes from
    /// the scenario unless `lp_family` overrides it.
    pub pipeline: PipelineConfig,
    pub lp_family: Option<FamilyKind>,
    pub k_max: usize,
    /// Also report the mean Hausdorff distance to the true mode set.
    pub hausdorff: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            scenarios: ScenarioId::ALL.to_vec(),
            sizes: vec![250, 500, 1000],
            methods: Method::ALL.to_vec(),
            replications: 500,
            seed: 1,
            pipeline: PipelineConfig {
                selection_rule: SelectionRule::Bic,
                ..PipelineConfig::default()
            },
            lp_family: None,
            k_max: 9,
            hausdorff: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchCell {
    pub scenario: ScenarioId,
    pub n: usize,
    pub method: Method,
    pub true_mode_count: usize,
    pub success_pct: f64,
    /// Binomial standard error of `success_pct`, in percentage points.
    pub mc_se: f64,
    /// SD of the reported mode count over non-failed replications.
    pub mode_count_sd: f64,
    pub replications: usize,
    /// Replications where the method returned an error; they count as misses.
    pub failures: usize,
    /// Reported mode count → number of replications.
    pub tallies: BTreeMap<usize, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_hausdorff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchTable {
    pub cells: Vec<BenchCell>,
    pub config_echo: BenchConfig,
    /// Scenario descriptions with the parameter readings used.
    pub scenarios: BTreeMap<ScenarioId, String>,
}

impl BenchTable {
    pub fn cell(&self, scenario: ScenarioId, n: usize, method: Method) -> Option<&BenchCell> {
        self.cells
            .iter()
            .find(|c| c.scenario == scenario && c.n == n && c.method == method)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "scenario",
            "n",
            "method",
            "success_pct",
            "mc_se",
            "mode_count_sd",
            "replications",
            "failures",
            "mean_hausdorff",
        ])?;
        for c in &self.cells {
            let method = serde_json::to_value(c.method)?;
            w.write_record([
                c.scenario.to_string(),
                c.n.to_string(),
                method.as_str().unwrap_or_default().to_owned(),
                format!("{:.1}", c.success_pct),
                format!("{:.2}", c.mc_se),
                format!("{:.3}", c.mode_count_sd),
                c.replications.to_string(),
                c.failures.to_string(),
                c.mean_hausdorff
                    .map(|h| format!("{h:.4}"))
                    .unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn mix(mut h: u64, v: u64) -> u64 {
    for b in v.to_le_bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Seed of replication `r` in cell (scenario, n); shared by all methods.
pub fn replication_seed(seed: u64, scenario: ScenarioId, n: usize, r: usize) -> u64 {
    [seed, scenario.index() as u64, n as u64, r as u64]
        .into_iter()
        .fold(0xcbf2_9ce4_8422_2325, mix)
}

fn lp_config(cfg: &BenchConfig, scenario: ScenarioId, methods: &[Method]) -> PipelineConfig {
    let mut p = cfg.pipeline.clone();
    p.family = cfg.lp_family.unwrap_or(scenario.spec().lp_family);
    let l2 = methods.contains(&Method::LpL2);
    let me = methods.contains(&Method::LpMaxEnt);
    p.estimator = match (l2, me) {
        (true, false) => EstimatorChoice::L2,
        (false, true) => EstimatorChoice::MaxEnt,
        _ => EstimatorChoice::Both,
    };
    p
}

/// Mode locations reported by every requested method on one sample.
pub fn method_modes(
    xs: &[f64],
    methods: &[Method],
    lp: &PipelineConfig,
    k_max: usize,
    seed: u64,
) -> Vec<(Method, Result<Vec<f64>>)> {
    let mut out = Vec::new();
    let lp_methods: Vec<Method> = methods
        .iter()
        .copied()
        .filter(|m| matches!(m, Method::LpL2 | Method::LpMaxEnt))
        .collect();
    let lp_fit = (!lp_methods.is_empty()).then(|| fit_pipeline(xs, lp));
    for &m in methods {
        let r = match m {
            Method::Silverman => silverman_kde_modes(xs),
            Method::Gmm => gmm_bic_modes(xs, k_max, seed).map(|s| s.modes),
            Method::LpL2 | Method::LpMaxEnt => {
                let kind = if m == Method::LpL2 {
                    EstimatorKind::L2
                } else {
                    EstimatorKind::MaxEnt
                };
                match lp_fit.as_ref().expect("fitted when requested") {
                    Err(e) => Err(Error::InvalidArgument(e.to_string())),
                    Ok(fit) => match fit.density(kind) {
                        Some(sk) => reconciled_modes(sk, lp).map(|s| s.locations),
                        None => Err(Error::InvalidArgument(
                            fit.maxent_failure.clone().unwrap_or_default(),
                        )),
                    },
                }
            }
        };
        out.push((m, r));
    }
    out
}

/// Runs every (scenario, n, method) cell. Replications run in parallel;
/// results depend only on the seed.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchTable> {
    if cfg.replications == 0 {
        return Err(Error::InvalidArgument(
            "replications must be positive".into(),
        ));
    }
    if cfg.sizes.iter().any(|&n| n < 10) {
        return Err(Error::InvalidArgument(
            "sample sizes must be at least 10".into(),
        ));
    }
    cfg.pipeline.validate()?;
    let mut cells = Vec::new();
    let mut scenarios = BTreeMap::new();
    for &sid in &cfg.scenarios {
        let spec = sid.spec();
        scenarios.insert(sid, spec.description.clone());
        let truth = spec.analytic_modes(100_000);
        let lp = lp_config(cfg, sid, &cfg.methods);
        for &n in &cfg.sizes {
            let reps: Vec<Vec<(Method, Result<Vec<f64>>)>> = (0..cfg.replications)
                .into_par_iter()
                .map(|r| {
                    let seed = replication_seed(cfg.seed, sid, n, r);
                    let xs = spec.sample(n, seed);
                    method_modes(
                        &xs,
                        &cfg.methods,
                        &lp,
                        cfg.k_max,
                        seed ^ 0x9e37_79b9_7f4a_7c15,
                    )
                })
                .collect();
            for (mi, &method) in cfg.methods.iter().enumerate() {
                let mut tallies = BTreeMap::new();
                let mut counts = Vec::new();
                let mut hd = Vec::new();
                let mut failures = 0;
                for rep in &reps {
                    match &rep[mi].1 {
                        Ok(modes) => {
                            *tallies.entry(modes.len()).or_insert(0) += 1;
                            counts.push(modes.len() as f64);
                            hd.push(stats::hausdorff(modes, &truth));
                        }
                        Err(_) => failures += 1,
                    }
                }
                let hits = tallies.get(&spec.true_mode_count).copied().unwrap_or(0);
                let r = cfg.replications as f64;
                let p = hits as f64 / r;
                let finite: Vec<f64> = hd.into_iter().filter(|h| h.is_finite()).collect();
                cells.push(BenchCell {
                    scenario: sid,
                    n,
                    method,
                    true_mode_count: spec.true_mode_count,
                    success_pct: 100.0 * p,
                    mc_se: 100.0 * (p * (1.0 - p) / r).sqrt(),
                    mode_count_sd: stats::sd(&counts),
                    replications: cfg.replications,
                    failures,
                    tallies,
                    mean_hausdorff: (cfg.hausdorff && !finite.is_empty())
                        .then(|| stats::mean(&finite)),
                });
            }
        }
    }
    Ok(BenchTable {
        cells,
        config_echo: cfg.clone(),
        scenarios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BenchConfig {
        BenchConfig {
            scenarios: vec![ScenarioId::D1, ScenarioId::D4],
            sizes: vec![100],
            replications: 8,
            seed: 3,
            ..BenchConfig::default()
        }
    }

    #[test]
    fn table_is_deterministic_and_well_formed() {
        let a = run_benchmark(&small()).unwrap();
        let b = run_benchmark(&small()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.cells.len(), 2 * 4);
        for c in &a.cells {
            assert!((0.0..=100.0).contains(&c.success_pct));
            assert_eq!(
                c.tallies.values().sum::<usize>() + c.failures,
                c.replications
            );
        }
    }

    #[test]
    fn cells_do_not_depend_on_neighbours() {
        let full = run_benchmark(&small()).unwrap();
        let only = run_benchmark(&BenchConfig {
            scenarios: vec![ScenarioId::D4],
            methods: vec![Method::Gmm],
            ..small()
        })
        .unwrap();
        assert_eq!(
            full.cell(ScenarioId::D4, 100, Method::Gmm),
            only.cell(ScenarioId::D4, 100, Method::Gmm)
        );
    }

    #[test]
    fn zero_replications_rejected() {
        let cfg = BenchConfig {
            replications: 0,
            ..small()
        };
        assert!(run_benchmark(&cfg).is_err());
    }
}
