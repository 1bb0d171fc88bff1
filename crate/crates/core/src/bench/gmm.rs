//! Univariate Gaussian mixtures fitted by EM, with BIC order selection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reference::check_samples;
use crate::special::std_normal_pdf;
use crate::stats;

use super::kde::grid_modes;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmOptions {
    pub restarts: usize,
    pub max_iter: usize,
    /// Convergence threshold on the change in mean log-likelihood.
    pub tol: f64,
    /// Variance floor as a fraction of the sample variance.
    pub var_floor_frac: f64,
}

impl Default for EmOptions {
    fn default() -> Self {
        EmOptions {
            restarts: 10,
            max_iter: 500,
            tol: 1e-8,
            var_floor_frac: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixture {
    pub weights: Vec<f64>,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

impl GaussianMixture {
    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.means)
            .zip(&self.sds)
            .map(|((w, m), s)| w * std_normal_pdf((x - m) / s) / s)
            .sum()
    }

    /// Local maxima of the mixture density. The evaluation points are a
    /// uniform grid over all components' ±6 sd ranges, merged with a
    /// quarter-sd lattice around each component so narrow components are
    /// resolved.
    pub fn modes(&self) -> Vec<f64> {
        let lo = (0..self.k())
            .map(|j| self.means[j] - 6.0 * self.sds[j])
            .fold(f64::INFINITY, f64::min);
        let hi = (0..self.k())
            .map(|j| self.means[j] + 6.0 * self.sds[j])
            .fold(f64::NEG_INFINITY, f64::max);
        let mut xs: Vec<f64> = (0..4096)
            .map(|i| lo + (hi - lo) * i as f64 / 4095.0)
            .collect();
        for j in 0..self.k() {
            xs.extend((-24..=24).map(|t| self.means[j] + 0.25 * t as f64 * self.sds[j]));
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let ys: Vec<f64> = xs.iter().map(|&x| self.pdf(x)).collect();
        grid_modes(&xs, &ys)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmFit {
    pub mixture: GaussianMixture,
    pub loglik: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Log-likelihood after each E-step.
    pub trace: Vec<f64>,
}

/// k-means++ seeding: first centre uniform, later ones with probability
/// proportional to squared distance to the nearest chosen centre.
fn kmeanspp<R: Rng>(xs: &[f64], k: usize, rng: &mut R) -> Vec<f64> {
    let mut centres = vec![xs[rng.random_range(0..xs.len())]];
    let mut d2: Vec<f64> = xs.iter().map(|&x| (x - centres[0]).powi(2)).collect();
    while centres.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut t = rng.random::<f64>() * total;
            let mut pick = xs.len() - 1;
            for (i, &d) in d2.iter().enumerate() {
                if t < d {
                    pick = i;
                    break;
                }
                t -= d;
            }
            xs[pick]
        } else {
            xs[rng.random_range(0..xs.len())]
        };
        centres.push(next);
        for (d, &x) in d2.iter_mut().zip(xs) {
            *d = d.min((x - next).powi(2));
        }
    }
    centres
}

fn initial_mixture(xs: &[f64], centres: &[f64], var: f64, floor: f64) -> GaussianMixture {
    let k = centres.len();
    let mut count = vec![0.0; k];
    let mut sum = vec![0.0; k];
    let mut sq = vec![0.0; k];
    for &x in xs {
        let j = (0..k)
            .min_by(|&a, &b| (x - centres[a]).abs().total_cmp(&(x - centres[b]).abs()))
            .unwrap_or(0);
        count[j] += 1.0;
        sum[j] += x;
        sq[j] += x * x;
    }
    let n = xs.len() as f64;
    let mut mix = GaussianMixture {
        weights: vec![],
        means: vec![],
        sds: vec![],
    };
    for j in 0..k {
        let (w, m, v) = if count[j] >= 2.0 {
            let m = sum[j] / count[j];
            (count[j] / n, m, (sq[j] / count[j] - m * m).max(floor))
        } else {
            (1.0 / n, centres[j], var)
        };
        mix.weights.push(w);
        mix.means.push(m);
        mix.sds.push(v.sqrt());
    }
    let tw: f64 = mix.weights.iter().sum();
    mix.weights.iter_mut().for_each(|w| *w /= tw);
    mix
}

/// One EM run from the given start. Variances are clamped to `floor`, which
/// is the constrained M-step, so the log-likelihood never decreases.
///
/// Each pass evaluates the log-likelihood of the current parameters and
/// accumulates the sufficient statistics of the next M-step.
pub fn run_em(xs: &[f64], start: GaussianMixture, floor: f64, opts: &EmOptions) -> EmFit {
    let n = xs.len() as f64;
    let k = start.k();
    let mut mix = start;
    let mut trace = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    let mut logw = vec![0.0; k];
    let mut inv2v = vec![0.0; k];
    let mut r = vec![0.0; k];
    let mut nk = vec![0.0; k];
    let mut s1 = vec![0.0; k];
    let mut s2 = vec![0.0; k];
    let mut loglik = f64::NEG_INFINITY;
    for it in 0..opts.max_iter {
        iterations = it + 1;
        for j in 0..k {
            let v = mix.sds[j] * mix.sds[j];
            logw[j] = mix.weights[j].ln() - 0.5 * (2.0 * std::f64::consts::PI * v).ln();
            inv2v[j] = 0.5 / v;
        }
        nk.iter_mut().for_each(|v| *v = 0.0);
        s1.iter_mut().for_each(|v| *v = 0.0);
        s2.iter_mut().for_each(|v| *v = 0.0);
        loglik = 0.0;
        for &x in xs {
            let mut mx = f64::NEG_INFINITY;
            for j in 0..k {
                let d = x - mix.means[j];
                r[j] = logw[j] - d * d * inv2v[j];
                mx = mx.max(r[j]);
            }
            let mut s = 0.0;
            for v in r.iter_mut() {
                *v = (*v - mx).exp();
                s += *v;
            }
            loglik += mx + s.ln();
            let inv = 1.0 / s;
            for j in 0..k {
                let w = r[j] * inv;
                let d = x - mix.means[j];
                nk[j] += w;
                s1[j] += w * d;
                s2[j] += w * d * d;
            }
        }
        trace.push(loglik);
        if (loglik - prev).abs() / n <= opts.tol {
            converged = true;
            break;
        }
        prev = loglik;
        for j in 0..k {
            if nk[j] <= 1e-300 {
                mix.weights[j] = 0.0;
                continue;
            }
            // statistics are centred on the previous mean
            let shift = s1[j] / nk[j];
            mix.weights[j] = nk[j] / n;
            mix.means[j] += shift;
            mix.sds[j] = (s2[j] / nk[j] - shift * shift).max(floor).sqrt();
        }
    }
    EmFit {
        mixture: mix,
        loglik,
        iterations,
        converged,
        trace,
    }
}

/// Best of `opts.restarts` k-means++-seeded EM runs with `k` components.
pub fn fit_gmm<R: Rng>(xs: &[f64], k: usize, rng: &mut R, opts: &EmOptions) -> EmFit {
    let var = stats::sd(xs).powi(2);
    let floor = opts.var_floor_frac * var;
    let restarts = if k == 1 { 1 } else { opts.restarts.max(1) };
    let mut best: Option<EmFit> = None;
    for _ in 0..restarts {
        let centres = kmeanspp(xs, k, rng);
        let fit = run_em(xs, initial_mixture(xs, &centres, var, floor), floor, opts);
        if best.as_ref().is_none_or(|b| fit.loglik > b.loglik) {
            best = Some(fit);
        }
    }
    best.expect("at least one restart")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmSelection {
    pub k: usize,
    pub bic: Vec<f64>,
    pub mixture: GaussianMixture,
    pub modes: Vec<f64>,
}

/// Fits k = 1..=k_max, keeps the lowest BIC = −2ℓ + (3k − 1) ln n and
/// returns the modes of the chosen mixture density.
pub fn gmm_bic_modes(samples: &[f64], k_max: usize, seed: u64) -> Result<GmmSelection> {
    gmm_bic_modes_with(samples, k_max, seed, &EmOptions::default())
}

pub fn gmm_bic_modes_with(
    samples: &[f64],
    k_max: usize,
    seed: u64,
    opts: &EmOptions,
) -> Result<GmmSelection> {
    check_samples(samples)?;
    if samples.len() < 10 {
        return Err(Error::InvalidArgument("mixture fit needs n >= 10".into()));
    }
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be positive".into()));
    }
    if stats::sd(samples) == 0.0 {
        return Err(Error::DegenerateSample("zero variance".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ln_n = (samples.len() as f64).ln();
    let mut bic = Vec::with_capacity(k_max);
    let mut best: Option<(f64, EmFit)> = None;
    for k in 1..=k_max {
        let fit = fit_gmm(samples, k, &mut rng, opts);
        let b = -2.0 * fit.loglik + (3 * k - 1) as f64 * ln_n;
        bic.push(b);
        if best.as_ref().is_none_or(|(bb, _)| b < *bb) {
            best = Some((b, fit));
        }
    }
    let (_, fit) = best.expect("k_max >= 1");
    Ok(GmmSelection {
        k: fit.mixture.k(),
        bic,
        modes: fit.mixture.modes(),
        mixture: fit.mixture,
    })
}
