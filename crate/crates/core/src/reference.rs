//! Parametric reference (null) distributions G.
//!
//! A reference is anything that can evaluate a density, a continuous
//! strictly-increasing cdf and its inverse. Sampling is derived from the
//! quantile so every family gets a sampler consistent with its rank transform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_open, Error, Result};
use crate::special::{std_normal_cdf, std_normal_pdf, std_normal_quantile};

/// Interface shared by every reference family.
pub trait ReferenceFamily {
    fn pdf(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;
    /// Inverse cdf for `u` strictly inside (0, 1). Callers validate `u`.
    fn quantile_unchecked(&self, u: f64) -> f64;
    /// Finite lower edge of the support, if any.
    fn lower_bound(&self) -> Option<f64> {
        None
    }
    /// Location of the density's maximum.
    fn mode(&self) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normal {
    pub mu: f64,
    pub sigma: f64,
}

impl ReferenceFamily for Normal {
    fn pdf(&self, x: f64) -> f64 {
        std_normal_pdf((x - self.mu) / self.sigma) / self.sigma
    }

    fn cdf(&self, x: f64) -> f64 {
        std_normal_cdf((x - self.mu) / self.sigma)
    }

    fn quantile_unchecked(&self, u: f64) -> f64 {
        self.mu + self.sigma * std_normal_quantile(u)
    }

    fn mode(&self) -> f64 {
        self.mu
    }
}

/// Exponential with mean `beta`, supported on [0, ∞).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponential {
    pub beta: f64,
}

impl ReferenceFamily for Exponential {
    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            (-x / self.beta).exp() / self.beta
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-x / self.beta).exp_m1()
        }
    }

    fn quantile_unchecked(&self, u: f64) -> f64 {
        -self.beta * (-u).ln_1p()
    }

    fn lower_bound(&self) -> Option<f64> {
        Some(0.0)
    }

    fn mode(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Normal,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FitMethod {
    #[default]
    Mle,
    Moments,
    Fixed,
}

/// A fitted reference distribution. Serializes as
/// `{"family": "normal", "params": {"mu": .., "sigma": ..}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "lowercase")]
pub enum ReferenceModel {
    Normal(Normal),
    Exponential(Exponential),
}

impl ReferenceModel {
    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite() && mu.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "normal reference needs finite mu and sigma > 0, got mu={mu}, sigma={sigma}"
            )));
        }
        Ok(ReferenceModel::Normal(Normal { mu, sigma }))
    }

    pub fn exponential(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "exponential reference needs beta > 0, got {beta}"
            )));
        }
        Ok(ReferenceModel::Exponential(Exponential { beta }))
    }

    /// Builds a model from a family tag and a raw parameter vector
    /// (`[mu, sigma]` or `[beta]`).
    pub fn from_params(family: FamilyKind, params: &[f64]) -> Result<Self> {
        match (family, params) {
            (FamilyKind::Normal, &[mu, sigma]) => Self::normal(mu, sigma),
            (FamilyKind::Exponential, &[beta]) => Self::exponential(beta),
            _ => Err(Error::InvalidArgument(format!(
                "wrong parameter count {} for {family:?}",
                params.len()
            ))),
        }
    }

    /// Re-checks parameter bounds, e.g. after deserialization.
    pub fn validate(&self) -> Result<()> {
        Self::from_params(self.kind(), &self.params()).map(|_| ())
    }

    pub fn kind(&self) -> FamilyKind {
        match self {
            ReferenceModel::Normal(_) => FamilyKind::Normal,
            ReferenceModel::Exponential(_) => FamilyKind::Exponential,
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match self {
            ReferenceModel::Normal(n) => vec![n.mu, n.sigma],
            ReferenceModel::Exponential(e) => vec![e.beta],
        }
    }

    fn family(&self) -> &dyn ReferenceFamily {
        match self {
            ReferenceModel::Normal(n) => n,
            ReferenceModel::Exponential(e) => e,
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.family().pdf(x)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.family().cdf(x)
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        check_unit_open("u", u)?;
        Ok(self.family().quantile_unchecked(u))
    }

    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        self.family().quantile_unchecked(u)
    }

    pub fn lower_bound(&self) -> Option<f64> {
        self.family().lower_bound()
    }

    pub fn mode(&self) -> f64 {
        self.family().mode()
    }

    /// Draws from a caller-owned generator by inverse transform.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let u: f64 = rng.random();
            if u > 0.0 {
                return self.quantile_unchecked(u);
            }
        }
    }

    /// `n` deterministic draws for the given seed.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.sample_with(&mut rng)).collect()
    }
}

/// Rejects empty and non-finite input.
pub(crate) fn check_samples(samples: &[f64]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteSample(i));
    }
    Ok(())
}

/// Fits a reference family. For both shipped families the method-of-moments
/// estimates coincide with the closed-form MLE (sample mean and 1/n variance).
/// `Fixed` requires `fixed_params` and ignores the data apart from validation.
pub fn fit_reference(
    samples: &[f64],
    family: FamilyKind,
    method: FitMethod,
    fixed_params: Option<&[f64]>,
) -> Result<ReferenceModel> {
    check_samples(samples)?;
    if method == FitMethod::Fixed {
        let params = fixed_params.ok_or_else(|| {
            Error::InvalidArgument("fit method `fixed` requires reference parameters".into())
        })?;
        return ReferenceModel::from_params(family, params);
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    match family {
        FamilyKind::Normal => {
            if samples.len() < 2 {
                return Err(Error::DegenerateSample(
                    "normal fit needs at least two samples".into(),
                ));
            }
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
            if !(var > 0.0) {
                return Err(Error::DegenerateSample("zero variance".into()));
            }
            ReferenceModel::normal(mean, var.sqrt())
        }
        FamilyKind::Exponential => {
            if let Some(&neg) = samples.iter().find(|&&x| x < 0.0) {
                return Err(Error::NegativeSampleForExponential(neg));
            }
            if !(mean > 0.0) {
                return Err(Error::DegenerateSample("all samples are zero".into()));
            }
            ReferenceModel::exponential(mean)
        }
    }
}
