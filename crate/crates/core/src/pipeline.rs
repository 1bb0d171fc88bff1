//! The full fit: reference, LP means, order selection, comparison densities
//! and reconciled modes.

use serde::{Deserialize, Serialize};

use crate::basis::{lp_means, LpCoefficients};
use crate::comparison::{fit_l2, fit_maxent, select, EstimatorKind, SelectionResult};
use crate::config::{EstimatorChoice, PipelineConfig};
use crate::error::{Error, Result};
use crate::inference::ModeInferenceReport;
use crate::modes::{modes_of_cd, modes_of_f, reconcile_modes, ModeSet, SkewGDensity};
use crate::reference::{check_samples, fit_reference, ReferenceModel};

impl EstimatorChoice {
    pub fn kinds(self) -> &'static [EstimatorKind] {
        match self {
            EstimatorChoice::L2 => &[EstimatorKind::L2],
            EstimatorChoice::MaxEnt => &[EstimatorKind::MaxEnt],
            EstimatorChoice::Both => &[EstimatorKind::L2, EstimatorKind::MaxEnt],
        }
    }
}

impl From<EstimatorKind> for EstimatorChoice {
    fn from(k: EstimatorKind) -> Self {
        match k {
            EstimatorKind::L2 => EstimatorChoice::L2,
            EstimatorKind::MaxEnt => EstimatorChoice::MaxEnt,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LpFit {
    pub reference: ReferenceModel,
    pub lp: LpCoefficients,
    pub selection: SelectionResult,
    pub l2: Option<SkewGDensity>,
    pub maxent: Option<SkewGDensity>,
    /// Why the requested MaxEnt estimate is missing, if it is.
    pub maxent_failure: Option<String>,
}

impl LpFit {
    pub fn density(&self, kind: EstimatorKind) -> Option<&SkewGDensity> {
        match kind {
            EstimatorKind::L2 => self.l2.as_ref(),
            EstimatorKind::MaxEnt => self.maxent.as_ref(),
        }
    }

    pub fn densities(&self) -> impl Iterator<Item = (EstimatorKind, &SkewGDensity)> {
        [
            (EstimatorKind::L2, self.l2.as_ref()),
            (EstimatorKind::MaxEnt, self.maxent.as_ref()),
        ]
        .into_iter()
        .filter_map(|(k, d)| d.map(|d| (k, d)))
    }
}

/// Fits the reference and every estimator enabled in `config`.
///
/// When MaxEnt is the only estimator requested its non-convergence is an
/// error; alongside L² it is recorded in `maxent_failure` instead.
pub fn fit_pipeline(samples: &[f64], config: &PipelineConfig) -> Result<LpFit> {
    check_samples(samples)?;
    if samples.len() > 1 && samples.iter().all(|&x| x == samples[0]) {
        return Err(Error::DegenerateSample("all samples are identical".into()));
    }
    let reference = fit_reference(
        samples,
        config.family,
        config.fit_method,
        config.reference_params.as_deref(),
    )?;
    let lp = lp_means(samples, &reference, config.m_max)?;
    let selection = select(&lp, config.selection_rule);
    let kinds = config.estimator.kinds();
    let l2 = kinds
        .contains(&EstimatorKind::L2)
        .then(|| SkewGDensity::new(reference, fit_l2(&lp, &selection)));
    let mut maxent = None;
    let mut maxent_failure = None;
    if kinds.contains(&EstimatorKind::MaxEnt) {
        match fit_maxent(&lp, &selection, config.quad_nodes) {
            Ok(cd) => maxent = Some(SkewGDensity::new(reference, cd)),
            Err(e) if l2.is_some() => maxent_failure = Some(e.to_string()),
            Err(e) => return Err(e),
        }
    }
    Ok(LpFit {
        reference,
        lp,
        selection,
        l2,
        maxent,
        maxent_failure,
    })
}

/// Mode sets for one estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorModes {
    pub estimator: EstimatorKind,
    pub density: SkewGDensity,
    /// Local maxima of d̂ on [0, 1].
    pub u_modes: ModeSet,
    /// Local maxima of f̂ before reconciliation.
    pub f_modes: ModeSet,
    /// Reconciled modes.
    pub modes: ModeSet,
}

pub fn identify_modes(
    sk: &SkewGDensity,
    config: &PipelineConfig,
) -> Result<(ModeSet, ModeSet, ModeSet)> {
    let u_modes = modes_of_cd(&sk.cd, config.grid, None, true);
    let f_modes = modes_of_f(sk, config.grid, config.refine_tol, config.tail_delta);
    let modes = reconcile_modes(&u_modes, &f_modes)?;
    Ok((u_modes, f_modes, modes))
}

/// Reconciled modes of a fitted skew-G density.
pub fn reconciled_modes(sk: &SkewGDensity, config: &PipelineConfig) -> Result<ModeSet> {
    identify_modes(sk, config).map(|(_, _, m)| m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeReport {
    pub n: usize,
    pub reference: ReferenceModel,
    pub lp_means: Vec<f64>,
    pub selection: SelectionResult,
    pub estimators: Vec<EstimatorModes>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maxent_failure: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inference: Vec<ModeInferenceReport>,
}

impl ModeReport {
    pub fn estimator(&self, kind: EstimatorKind) -> Option<&EstimatorModes> {
        self.estimators.iter().find(|e| e.estimator == kind)
    }
}

/// Fit plus mode identification for every enabled estimator.
pub fn run_modes(samples: &[f64], config: &PipelineConfig) -> Result<ModeReport> {
    config.validate()?;
    let fit = fit_pipeline(samples, config)?;
    let mut estimators = Vec::new();
    for (kind, sk) in fit.densities() {
        let (u_modes, f_modes, modes) = identify_modes(sk, config)?;
        estimators.push(EstimatorModes {
            estimator: kind,
            density: sk.clone(),
            u_modes,
            f_modes,
            modes,
        });
    }
    Ok(ModeReport {
        n: samples.len(),
        reference: fit.reference,
        lp_means: fit.lp.values().to_vec(),
        selection: fit.selection,
        estimators,
        maxent_failure: fit.maxent_failure,
        inference: vec![],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::FamilyKind;

    #[test]
    fn reference_data_yields_single_reference_mode() {
        let g = ReferenceModel::normal(10.0, 2.0).unwrap();
        let xs = g.sample(2000, 17);
        let report = run_modes(&xs, &PipelineConfig::default()).unwrap();
        assert_eq!(report.selection.k_selected, 0, "{:?}", report.lp_means);
        for e in &report.estimators {
            assert_eq!(e.modes.len(), 1);
            assert!((e.modes.locations[0] - report.reference.mode()).abs() < 1e-4);
        }
    }

    #[test]
    fn bimodal_sample_gives_two_modes() {
        let a = ReferenceModel::normal(-2.0, 0.6).unwrap().sample(400, 1);
        let b = ReferenceModel::normal(2.0, 0.6).unwrap().sample(400, 2);
        let xs: Vec<f64> = a.into_iter().chain(b).collect();
        let report = run_modes(&xs, &PipelineConfig::default()).unwrap();
        let me = &report.estimator(EstimatorKind::MaxEnt).unwrap().modes;
        assert_eq!(me.len(), 2);
        assert!((me.locations[0] + 2.0).abs() < 0.3);
        assert!((me.locations[1] - 2.0).abs() < 0.3);
        // the truncated L² series ripples between the peaks; its two largest
        // jumps are still the true modes
        let l2 = &report.estimator(EstimatorKind::L2).unwrap().modes;
        let mut by_jump: Vec<usize> = (0..l2.len()).collect();
        by_jump.sort_by(|&a, &b| l2.jumps[b].total_cmp(&l2.jumps[a]));
        let mut top: Vec<f64> = by_jump[..2].iter().map(|&i| l2.locations[i]).collect();
        top.sort_by(f64::total_cmp);
        assert!((top[0] + 2.0).abs() < 0.3 && (top[1] - 2.0).abs() < 0.3);
    }

    #[test]
    fn constant_sample_is_degenerate() {
        let cfg = PipelineConfig::default().with_family(FamilyKind::Exponential);
        assert!(matches!(
            fit_pipeline(&[3.0; 50], &cfg),
            Err(Error::DegenerateSample(_))
        ));
    }
}
