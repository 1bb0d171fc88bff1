//! Accept-reject sampling from a fitted skew-G density and parametric
//! bootstrap of mode locations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::comparison::EstimatorKind;
use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::modes::SkewGDensity;
use crate::pipeline::{fit_pipeline, reconciled_modes};
use crate::stats;

/// Acceptance rates below this abort sampling.
pub const MIN_ACCEPTANCE: f64 = 1e-3;
/// Anchor modes matched in fewer than this fraction of replicates are an error.
pub const MIN_MATCH_RATE: f64 = 0.2;
const ENVELOPE_GRID: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct SkewGSample {
    pub draws: Vec<f64>,
    /// Accepted / proposed.
    pub acceptance_rate: f64,
    /// Envelope constant M with d̂ ≤ M on [0, 1].
    pub envelope: f64,
}

/// Draws `n` values from f̂ = g · d̂(G) by proposing from G and accepting
/// with probability max(d̂(G(y)), 0) / M.
pub fn sample_skewg(sk: &SkewGDensity, n: usize, seed: u64) -> Result<SkewGSample> {
    sk.validate()?;
    let envelope = 1.001 * sk.cd.grid_max(ENVELOPE_GRID).max(0.0);
    let mut buf = Vec::new();
    let mass: f64 = (0..ENVELOPE_GRID)
        .map(|i| {
            sk.cd
                .eval_with((i as f64 + 0.5) / ENVELOPE_GRID as f64, &mut buf)
                .max(0.0)
        })
        .sum::<f64>()
        / ENVELOPE_GRID as f64;
    let expected = if envelope > 0.0 { mass / envelope } else { 0.0 };
    if expected < MIN_ACCEPTANCE {
        return Err(Error::AcceptanceStall { rate: expected });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(n);
    let mut proposed: u64 = 0;
    while draws.len() < n {
        let y = sk.reference.sample_with(&mut rng);
        let u = sk.reference.cdf(y);
        proposed += 1;
        let d = sk.cd.eval_with(u, &mut buf).max(0.0);
        if rng.random::<f64>() * envelope < d {
            draws.push(y);
        }
    }
    Ok(SkewGSample {
        acceptance_rate: if proposed == 0 {
            expected
        } else {
            n as f64 / proposed as f64
        },
        draws,
        envelope,
    })
}

/// Greedy nearest-neighbour matching of replicate modes to anchor modes.
///
/// Closest pairs are taken first; ties go to the lower anchor index and then
/// to the smaller replicate value. Each replicate mode is used at most once.
pub fn match_modes(replicate: &[f64], anchor: &[f64]) -> Vec<Option<f64>> {
    let mut pairs: Vec<(f64, usize, f64, usize)> = Vec::new();
    for (a, &am) in anchor.iter().enumerate() {
        for (r, &rm) in replicate.iter().enumerate() {
            pairs.push(((rm - am).abs(), a, rm, r));
        }
    }
    pairs.sort_by(|x, y| {
        x.0.total_cmp(&y.0)
            .then(x.1.cmp(&y.1))
            .then(x.2.total_cmp(&y.2))
    });
    let mut out = vec![None; anchor.len()];
    let mut used = vec![false; replicate.len()];
    for (_, a, rm, r) in pairs {
        if out[a].is_none() && !used[r] {
            out[a] = Some(rm);
            used[r] = true;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeInferenceReport {
    pub estimator: EstimatorKind,
    /// Anchor mode locations from the original fit.
    pub modes: Vec<f64>,
    /// Bootstrap standard error per mode.
    pub se: Vec<f64>,
    /// Percentile interval per mode.
    pub ci: Vec<[f64; 2]>,
    #[serde(rename = "B")]
    pub b: usize,
    /// Fraction of replicates whose mode count equals the anchor count.
    pub match_rate: f64,
    pub level: f64,
    /// Replicates per mode that produced a match.
    pub matched: Vec<usize>,
    /// Replicates whose refit failed; they count as unmatched.
    pub failed_replicates: usize,
}

/// Parametric bootstrap of the reconciled modes of one estimator.
///
/// Replicate `b` is drawn from the fitted density with seed `seed + b` and
/// refitted with the same configuration, so results do not depend on the
/// thread count.
pub fn bootstrap_modes(
    samples: &[f64],
    config: &PipelineConfig,
    kind: EstimatorKind,
    b: usize,
    level: f64,
    seed: u64,
) -> Result<ModeInferenceReport> {
    let mut cfg = config.clone();
    cfg.estimator = kind.into();
    cfg.replicates = b;
    cfg.ci_level = level;
    cfg.validate()?;
    let fit = fit_pipeline(samples, &cfg)?;
    let sk = fit
        .density(kind)
        .ok_or_else(|| Error::InvalidArgument(format!("{kind:?} estimate unavailable")))?;
    bootstrap_density(sk, samples.len(), &cfg, b, level, seed)
}

/// Bootstrap starting from an already fitted density and sample size.
pub fn bootstrap_density(
    sk: &SkewGDensity,
    n: usize,
    config: &PipelineConfig,
    b: usize,
    level: f64,
    seed: u64,
) -> Result<ModeInferenceReport> {
    if b == 0 {
        return Err(Error::InvalidArgument("replicates must be positive".into()));
    }
    crate::error::check_unit_open("level", level)?;
    let kind = sk.cd.kind();
    let mut cfg = config.clone();
    cfg.estimator = kind.into();
    let anchor = reconciled_modes(sk, &cfg)?.locations;
    if anchor.is_empty() {
        return Err(Error::NoModes);
    }
    let replicates: Vec<Option<Vec<f64>>> = (0..b)
        .into_par_iter()
        .map(|i| {
            let draws = sample_skewg(sk, n, seed.wrapping_add(i as u64)).ok()?.draws;
            let fit = fit_pipeline(&draws, &cfg).ok()?;
            reconciled_modes(fit.density(kind)?, &cfg)
                .ok()
                .map(|m| m.locations)
        })
        .collect();
    let failed_replicates = replicates.iter().filter(|r| r.is_none()).count();
    let same_count = replicates
        .iter()
        .filter(|r| r.as_ref().is_some_and(|m| m.len() == anchor.len()))
        .count();
    let mut per_mode: Vec<Vec<f64>> = vec![Vec::new(); anchor.len()];
    for r in replicates.iter().flatten() {
        for (slot, m) in per_mode.iter_mut().zip(match_modes(r, &anchor)) {
            if let Some(m) = m {
                slot.push(m);
            }
        }
    }
    let alpha = 1.0 - level;
    let mut se = Vec::new();
    let mut ci = Vec::new();
    let mut matched = Vec::new();
    for (i, vals) in per_mode.iter().enumerate() {
        let rate = vals.len() as f64 / b as f64;
        if rate < MIN_MATCH_RATE {
            return Err(Error::TooFewMatches { mode: i, rate });
        }
        let s = stats::sorted(vals);
        se.push(stats::sd(&s));
        ci.push([
            stats::quantile_sorted(&s, alpha / 2.0),
            stats::quantile_sorted(&s, 1.0 - alpha / 2.0),
        ]);
        matched.push(vals.len());
    }
    Ok(ModeInferenceReport {
        estimator: kind,
        modes: anchor,
        se,
        ci,
        b,
        match_rate: same_count as f64 / b as f64,
        level,
        matched,
        failed_replicates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comparison::ComparisonDensity;
    use crate::reference::ReferenceModel;

    #[test]
    fn matching_is_greedy_and_exclusive() {
        assert_eq!(
            match_modes(&[0.9, 3.2], &[1.0, 3.0]),
            vec![Some(0.9), Some(3.2)]
        );
        assert_eq!(match_modes(&[1.1], &[1.0, 3.0]), vec![Some(1.1), None]);
        // equidistant replicate goes to the lower anchor index
        assert_eq!(match_modes(&[2.0], &[1.0, 3.0]), vec![Some(2.0), None]);
        assert_eq!(match_modes(&[], &[1.0]), vec![None]);
    }

    #[test]
    fn uniform_cd_accepts_nearly_everything() {
        let g = ReferenceModel::normal(0.0, 1.0).unwrap();
        let sk = SkewGDensity::new(g, ComparisonDensity::uniform(EstimatorKind::L2));
        let s = sample_skewg(&sk, 5000, 3).unwrap();
        assert!((s.acceptance_rate - 1.0 / 1.001).abs() < 0.005);
        assert_eq!(s.draws.len(), 5000);
        let again = sample_skewg(&sk, 5000, 3).unwrap();
        assert_eq!(s.draws, again.draws);
    }

    #[test]
    fn stall_on_sharp_spike() {
        // exp(θ·Leg₁) with θ = 1000 piles its mass within ~1/3464 of u = 1,
        // so the acceptance rate is near 3e-4.
        let g = ReferenceModel::normal(0.0, 1.0).unwrap();
        let theta = 1000.0;
        let lambda = 2.0 * theta * 3f64.sqrt();
        let cd = ComparisonDensity::MaxEnt {
            indices: vec![1],
            theta: vec![theta],
            theta0: -theta * 3f64.sqrt() + lambda.ln(),
            quad_nodes: 128,
        };
        let r = sample_skewg(&SkewGDensity::new(g, cd), 10, 1);
        assert!(matches!(r, Err(Error::AcceptanceStall { rate }) if rate < MIN_ACCEPTANCE));
    }
}
