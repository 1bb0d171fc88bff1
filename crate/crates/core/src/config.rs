//! One configuration object for the whole pipeline. A validated config plus
//! a seed determines every output.

use serde::{Deserialize, Serialize};

use crate::basis::MAX_ORDER;
use crate::error::{Error, FieldError, Result};
use crate::reference::{FamilyKind, FitMethod};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SelectionRule {
    #[default]
    Aic,
    Bic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorChoice {
    L2,
    #[value(name = "maxent")]
    MaxEnt,
    #[default]
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub family: FamilyKind,
    pub fit_method: FitMethod,
    /// Parameters for `fit_method = fixed`: `[mu, sigma]` or `[beta]`.
    pub reference_params: Option<Vec<f64>>,
    pub m_max: usize,
    pub selection_rule: SelectionRule,
    pub estimator: EstimatorChoice,
    /// Grid points for the mode search.
    pub grid: usize,
    /// Golden-section stopping width; `None` means 1e-6 of the search range.
    pub refine_tol: Option<f64>,
    pub quad_nodes: usize,
    /// Bootstrap replicate count B.
    pub replicates: usize,
    pub ci_level: f64,
    pub seed: u64,
    /// Tail mass excluded from each side of the x-space mode search.
    pub tail_delta: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            family: FamilyKind::Normal,
            fit_method: FitMethod::Mle,
            reference_params: None,
            m_max: 8,
            selection_rule: SelectionRule::Aic,
            estimator: EstimatorChoice::Both,
            grid: 1000,
            refine_tol: None,
            quad_nodes: 128,
            replicates: 500,
            ci_level: 0.95,
            seed: 1,
            tail_delta: 1e-4,
        }
    }
}

impl PipelineConfig {
    pub fn with_family(mut self, family: FamilyKind) -> Self {
        self.family = family;
        self
    }

    pub fn with_estimator(mut self, estimator: EstimatorChoice) -> Self {
        self.estimator = estimator;
        self
    }

    /// Checks every bound and reports all violations together.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let mut bad =
            |field: &'static str, message: String| errs.push(FieldError { field, message });
        if !(1..=MAX_ORDER).contains(&self.m_max) {
            bad(
                "m_max",
                format!("must be in 1..={MAX_ORDER}, got {}", self.m_max),
            );
        }
        if self.grid < 100 {
            bad("grid", format!("must be at least 100, got {}", self.grid));
        }
        if self.quad_nodes < 64 {
            bad(
                "quad_nodes",
                format!("must be at least 64, got {}", self.quad_nodes),
            );
        }
        if self.replicates < 50 {
            bad(
                "replicates",
                format!("must be at least 50, got {}", self.replicates),
            );
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            bad(
                "ci_level",
                format!("must lie in (0, 1), got {}", self.ci_level),
            );
        }
        if !(self.tail_delta > 0.0 && self.tail_delta < 0.5) {
            bad(
                "tail_delta",
                format!("must lie in (0, 0.5), got {}", self.tail_delta),
            );
        }
        if let Some(tol) = self.refine_tol {
            if !(tol > 0.0 && tol.is_finite()) {
                bad("refine_tol", format!("must be positive, got {tol}"));
            }
        }
        match (&self.fit_method, &self.reference_params) {
            (FitMethod::Fixed, None) => bad(
                "reference_params",
                "required when fit_method is fixed".into(),
            ),
            (FitMethod::Fixed, Some(p)) => {
                let want = match self.family {
                    FamilyKind::Normal => 2,
                    FamilyKind::Exponential => 1,
                };
                if p.len() != want {
                    bad(
                        "reference_params",
                        format!(
                            "expected {want} values for {:?}, got {}",
                            self.family,
                            p.len()
                        ),
                    );
                }
            }
            _ => {}
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }

    pub fn validated(self) -> Result<Self> {
        self.validate().map(|_| self)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
