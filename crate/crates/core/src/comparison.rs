//! Selection of significant LP means and the two comparison-density
//! estimators: the L² orthogonal series and the maximum-entropy exponential
//! family with LP moment constraints.

use serde::{Deserialize, Serialize};

use crate::basis::{shifted_legendre_all, shifted_legendre_integrals, LpCoefficients};
use crate::config::SelectionRule;
use crate::error::{check_unit_closed, Error, Result};
use crate::special::GaussLegendre;

pub const DEFAULT_QUAD_NODES: usize = 128;
const MAX_NEWTON_ITERS: usize = 200;
const MOMENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    /// LP-mean orders (1-based) sorted by decreasing magnitude.
    pub order_by_magnitude: Vec<usize>,
    pub k_selected: usize,
    /// The first `k_selected` entries of `order_by_magnitude`.
    pub selected_indices: Vec<usize>,
    /// Criterion value for k = 0..=m_max; entry 0 is the empty model.
    pub criterion_trace: Vec<f64>,
}

impl SelectionResult {
    /// Selected orders in ascending order.
    pub fn sorted_indices(&self) -> Vec<usize> {
        let mut v = self.selected_indices.clone();
        v.sort_unstable();
        v
    }
}

/// AIC(k) = Σ_{top k} LP² − 2k/n, maximized at the smallest k.
pub fn aic_select(coeffs: &LpCoefficients) -> SelectionResult {
    select(coeffs, SelectionRule::Aic)
}

pub fn select(coeffs: &LpCoefficients, rule: SelectionRule) -> SelectionResult {
    let vals = coeffs.values();
    let n = coeffs.n() as f64;
    let mut order: Vec<usize> = (1..=vals.len()).collect();
    // stable sort keeps smaller index first on ties
    order.sort_by(|&a, &b| vals[b - 1].abs().total_cmp(&vals[a - 1].abs()));
    let penalty = match rule {
        SelectionRule::Aic => 2.0 / n,
        SelectionRule::Bic => n.ln() / n,
    };
    let mut trace = Vec::with_capacity(vals.len() + 1);
    trace.push(0.0);
    let mut ss = 0.0;
    for (k, &j) in order.iter().enumerate() {
        ss += vals[j - 1].powi(2);
        trace.push(ss - penalty * (k + 1) as f64);
    }
    let mut best = 0;
    for k in 1..trace.len() {
        if trace[k] > trace[best] {
            best = k;
        }
    }
    SelectionResult {
        selected_indices: order[..best].to_vec(),
        order_by_magnitude: order,
        k_selected: best,
        criterion_trace: trace,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    L2,
    #[serde(rename = "maxent")]
    #[value(name = "maxent")]
    MaxEnt,
}

/// A fitted comparison density on [0, 1].
///
/// JSON: `{"kind": "l2", "indices": [..], "coeffs": [..]}` or
/// `{"kind": "maxent", "indices": [..], "theta": [..], "theta0": ..}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ComparisonDensity {
    /// d(u) = 1 + Σ coeffs_j Leg_j(u)
    L2 {
        indices: Vec<usize>,
        coeffs: Vec<f64>,
    },
    /// d(u) = exp(theta0 + Σ theta_j Leg_j(u))
    #[serde(rename = "maxent")]
    MaxEnt {
        indices: Vec<usize>,
        theta: Vec<f64>,
        theta0: f64,
        #[serde(default = "default_quad_nodes")]
        quad_nodes: usize,
    },
}

fn default_quad_nodes() -> usize {
    DEFAULT_QUAD_NODES
}

impl ComparisonDensity {
    /// The flat density d ≡ 1.
    pub fn uniform(kind: EstimatorKind) -> Self {
        match kind {
            EstimatorKind::L2 => ComparisonDensity::L2 {
                indices: vec![],
                coeffs: vec![],
            },
            EstimatorKind::MaxEnt => ComparisonDensity::MaxEnt {
                indices: vec![],
                theta: vec![],
                theta0: 0.0,
                quad_nodes: DEFAULT_QUAD_NODES,
            },
        }
    }

    pub fn kind(&self) -> EstimatorKind {
        match self {
            ComparisonDensity::L2 { .. } => EstimatorKind::L2,
            ComparisonDensity::MaxEnt { .. } => EstimatorKind::MaxEnt,
        }
    }

    pub fn indices(&self) -> &[usize] {
        match self {
            ComparisonDensity::L2 { indices, .. } | ComparisonDensity::MaxEnt { indices, .. } => {
                indices
            }
        }
    }

    /// L² coefficients or MaxEnt natural parameters, aligned with `indices`.
    pub fn coefficients(&self) -> &[f64] {
        match self {
            ComparisonDensity::L2 { coeffs, .. } => coeffs,
            ComparisonDensity::MaxEnt { theta, .. } => theta,
        }
    }

    pub fn is_uniform(&self) -> bool {
        self.indices().is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let (idx, c) = (self.indices(), self.coefficients());
        if idx.len() != c.len() {
            return Err(Error::InvalidArgument(
                "comparison density indices and coefficients differ in length".into(),
            ));
        }
        if idx.iter().any(|&j| j == 0 || j > crate::basis::MAX_ORDER) {
            return Err(Error::InvalidArgument(
                "comparison density index out of range".into(),
            ));
        }
        Ok(())
    }

    fn max_order(&self) -> usize {
        self.indices().iter().copied().max().unwrap_or(0)
    }

    /// Σ c_j Leg_j(u) over the stored indices.
    fn series(&self, u: f64, buf: &mut Vec<f64>) -> f64 {
        let m = self.max_order();
        buf.resize(m + 1, 0.0);
        shifted_legendre_all(u, buf);
        self.indices()
            .iter()
            .zip(self.coefficients())
            .map(|(&j, &c)| c * buf[j])
            .sum()
    }

    /// d̂(u) without the domain check.
    pub fn eval_unchecked(&self, u: f64) -> f64 {
        let mut buf = Vec::new();
        self.eval_with(u, &mut buf)
    }

    pub(crate) fn eval_with(&self, u: f64, buf: &mut Vec<f64>) -> f64 {
        if self.is_uniform() {
            return 1.0;
        }
        let s = self.series(u, buf);
        match self {
            ComparisonDensity::L2 { .. } => 1.0 + s,
            ComparisonDensity::MaxEnt { theta0, .. } => (theta0 + s).exp(),
        }
    }

    /// d̂(u) for u in [0, 1].
    pub fn eval(&self, u: f64) -> Result<f64> {
        check_unit_closed("u", u)?;
        Ok(self.eval_unchecked(u))
    }

    /// Largest value of d̂ over an evenly spaced grid of `points` on [0, 1].
    pub fn grid_max(&self, points: usize) -> f64 {
        let mut buf = Vec::new();
        let last = (points - 1) as f64;
        (0..points)
            .map(|i| self.eval_with(i as f64 / last, &mut buf))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Precomputes the cumulative D̂(u) = ∫₀ᵘ d̂.
    pub fn distribution(&self) -> ComparisonDistribution<'_> {
        ComparisonDistribution::new(self)
    }
}

/// D̂(u) = ∫₀ᵘ d̂. Where an L² estimate dips below zero the cumulative is taken
/// over max(d̂, 0) and renormalized, which keeps it monotone and matches the
/// law targeted by the accept-reject sampler.
pub struct ComparisonDistribution<'a> {
    cd: &'a ComparisonDensity,
    /// Positive stretches of a sign-changing L² estimate, with the total
    /// positive mass.
    clamped: Option<(Vec<(f64, f64)>, f64)>,
    rule: GaussLegendre,
}

impl<'a> ComparisonDistribution<'a> {
    fn new(cd: &'a ComparisonDensity) -> Self {
        let clamped = match cd {
            ComparisonDensity::L2 { .. } if !cd.is_uniform() => positive_intervals(cd),
            _ => None,
        };
        Self {
            cd,
            clamped,
            rule: GaussLegendre::new(32),
        }
    }

    fn l2_closed(&self, u: f64, buf: &mut Vec<f64>) -> f64 {
        let m = self.cd.max_order();
        buf.resize(m + 1, 0.0);
        shifted_legendre_integrals(u, buf);
        u + self
            .cd
            .indices()
            .iter()
            .zip(self.cd.coefficients())
            .map(|(&j, &c)| c * buf[j])
            .sum::<f64>()
    }

    pub fn eval(&self, u: f64) -> Result<f64> {
        check_unit_closed("u", u)?;
        Ok(self.eval_unchecked(u))
    }

    pub fn eval_unchecked(&self, u: f64) -> f64 {
        if self.cd.is_uniform() {
            return u;
        }
        let mut buf = Vec::new();
        match self.cd {
            ComparisonDensity::L2 { .. } => match &self.clamped {
                None => self.l2_closed(u, &mut buf).clamp(0.0, 1.0),
                Some((intervals, total)) => {
                    let mut acc = 0.0;
                    for &(a, b) in intervals {
                        if a >= u {
                            break;
                        }
                        let hi = b.min(u);
                        acc += self.l2_closed(hi, &mut buf) - self.l2_closed(a, &mut buf);
                    }
                    (acc / total).clamp(0.0, 1.0)
                }
            },
            ComparisonDensity::MaxEnt { .. } => {
                // composite Gauss-Legendre; the integrand is entire
                let panels = ((u * 16.0).ceil() as usize).max(1);
                let w = u / panels as f64;
                let total: f64 = (0..panels)
                    .map(|k| {
                        let a = k as f64 * w;
                        self.rule
                            .integrate_on(a, a + w, |v| self.cd.eval_with(v, &mut buf))
                    })
                    .sum();
                total.clamp(0.0, 1.0)
            }
        }
    }
}

/// Maximal subintervals of [0, 1] where an L² estimate is positive, or `None`
/// when it is nonnegative throughout.
fn positive_intervals(cd: &ComparisonDensity) -> Option<(Vec<(f64, f64)>, f64)> {
    const POINTS: usize = 4096;
    let mut buf = Vec::new();
    let grid: Vec<f64> = (0..=POINTS).map(|i| i as f64 / POINTS as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&u| cd.eval_with(u, &mut buf)).collect();
    if vals.iter().all(|&v| v >= 0.0) {
        return None;
    }
    let root = |mut lo: f64, mut hi: f64, buf: &mut Vec<f64>| {
        let lo_pos = cd.eval_with(lo, buf) > 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if (cd.eval_with(mid, buf) > 0.0) == lo_pos {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let mut intervals = Vec::new();
    let mut start = if vals[0] > 0.0 { Some(0.0) } else { None };
    for i in 0..POINTS {
        let (p0, p1) = (vals[i] > 0.0, vals[i + 1] > 0.0);
        if p0 != p1 {
            let r = root(grid[i], grid[i + 1], &mut buf);
            if p1 {
                start = Some(r);
            } else if let Some(s) = start.take() {
                intervals.push((s, r));
            }
        }
    }
    if let Some(s) = start {
        intervals.push((s, 1.0));
    }
    let dist = ComparisonDistribution {
        cd,
        clamped: None,
        rule: GaussLegendre::new(1),
    };
    let total: f64 = intervals
        .iter()
        .map(|&(a, b)| dist.l2_closed(b, &mut buf) - dist.l2_closed(a, &mut buf))
        .sum();
    Some((intervals, total))
}

/// D̂(u) for a single point. Use [`ComparisonDensity::distribution`] when
/// evaluating many points.
pub fn cd_distribution(cd: &ComparisonDensity, u: f64) -> Result<f64> {
    cd.distribution().eval(u)
}

/// d̂(u) for u in [0, 1].
pub fn eval_cd(cd: &ComparisonDensity, u: f64) -> Result<f64> {
    cd.eval(u)
}

/// The L² series estimator over the selected orders, coefficients verbatim.
pub fn fit_l2(coeffs: &LpCoefficients, sel: &SelectionResult) -> ComparisonDensity {
    let indices = sel.sorted_indices();
    let c = indices.iter().map(|&j| coeffs.get(j)).collect();
    ComparisonDensity::L2 { indices, coeffs: c }
}

/// Output of the maximum-entropy dual solver.
#[derive(Debug, Clone)]
pub struct MaxEntSolution {
    pub indices: Vec<usize>,
    pub theta: Vec<f64>,
    pub theta0: f64,
    pub iterations: usize,
    /// Dual objective after each accepted step, starting at the initial point.
    pub objective_trace: Vec<f64>,
    /// max_j |∫ d̂ Leg_j − LP_j| at the returned solution.
    pub gradient_norm: f64,
}

impl MaxEntSolution {
    pub fn density(&self, quad_nodes: usize) -> ComparisonDensity {
        ComparisonDensity::MaxEnt {
            indices: self.indices.clone(),
            theta: self.theta.clone(),
            theta0: self.theta0,
            quad_nodes,
        }
    }
}

/// Evaluates log Z, the tilted moments and (optionally) their covariance.
struct DualEval {
    log_z: f64,
    mean: Vec<f64>,
    cov: Vec<f64>,
}

struct Dual {
    basis: Vec<f64>, // nodes × k, row-major
    weights: Vec<f64>,
    k: usize,
}

impl Dual {
    fn new(indices: &[usize], quad_nodes: usize) -> Self {
        let rule = GaussLegendre::new(quad_nodes);
        let k = indices.len();
        let m = indices.iter().copied().max().unwrap_or(0);
        let mut buf = vec![0.0; m + 1];
        let mut basis = Vec::with_capacity(quad_nodes * k);
        for &u in &rule.nodes {
            shifted_legendre_all(u, &mut buf);
            basis.extend(indices.iter().map(|&j| buf[j]));
        }
        Self {
            basis,
            weights: rule.weights,
            k,
        }
    }

    fn row(&self, q: usize) -> &[f64] {
        &self.basis[q * self.k..(q + 1) * self.k]
    }

    fn log_z(&self, theta: &[f64]) -> f64 {
        let s: Vec<f64> = (0..self.weights.len())
            .map(|q| dot(self.row(q), theta))
            .collect();
        let smax = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = s
            .iter()
            .zip(&self.weights)
            .map(|(&si, &w)| w * (si - smax).exp())
            .sum();
        z.ln() + smax
    }

    fn eval(&self, theta: &[f64], with_cov: bool) -> DualEval {
        let nq = self.weights.len();
        let s: Vec<f64> = (0..nq).map(|q| dot(self.row(q), theta)).collect();
        let smax = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = s
            .iter()
            .zip(&self.weights)
            .map(|(&si, &w)| w * (si - smax).exp())
            .collect();
        let z: f64 = e.iter().sum();
        let k = self.k;
        let mut mean = vec![0.0; k];
        for (q, &eq) in e.iter().enumerate() {
            let p = eq / z;
            for (m, b) in mean.iter_mut().zip(self.row(q)) {
                *m += p * b;
            }
        }
        let mut cov = Vec::new();
        if with_cov {
            cov = vec![0.0; k * k];
            for (q, &eq) in e.iter().enumerate() {
                let p = eq / z;
                let row = self.row(q);
                for a in 0..k {
                    let da = row[a] - mean[a];
                    for b in 0..=a {
                        cov[a * k + b] += p * da * (row[b] - mean[b]);
                    }
                }
            }
            for a in 0..k {
                for b in 0..a {
                    cov[b * k + a] = cov[a * k + b];
                }
            }
        }
        DualEval {
            log_z: z.ln() + smax,
            mean,
            cov,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `a x = b` for symmetric positive-definite `a` (row-major, k × k).
/// Returns `None` if the factorization breaks down.
fn cholesky_solve(a: &[f64], b: &[f64], k: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..=i {
            let mut s = a[i * k + j];
            for p in 0..j {
                s -= l[i * k + p] * l[j * k + p];
            }
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i * k + i] = s.sqrt();
            } else {
                l[i * k + j] = s / l[j * k + j];
            }
        }
    }
    let mut y = vec![0.0; k];
    for i in 0..k {
        let s = b[i] - (0..i).map(|p| l[i * k + p] * y[p]).sum::<f64>();
        y[i] = s / l[i * k + i];
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let s = y[i] - (i + 1..k).map(|p| l[p * k + i] * x[p]).sum::<f64>();
        x[i] = s / l[i * k + i];
    }
    Some(x)
}

/// Newton's method with backtracking on the convex dual
/// Ψ(θ) = log ∫₀¹ exp(Σ θ_j Leg_j) − Σ θ_j LP_j, started at θ = LP.
pub fn solve_maxent(
    indices: &[usize],
    targets: &[f64],
    quad_nodes: usize,
) -> Result<MaxEntSolution> {
    assert_eq!(indices.len(), targets.len());
    if quad_nodes < 64 {
        return Err(Error::InvalidArgument(format!(
            "quad_nodes must be at least 64, got {quad_nodes}"
        )));
    }
    if indices.is_empty() {
        return Ok(MaxEntSolution {
            indices: vec![],
            theta: vec![],
            theta0: 0.0,
            iterations: 0,
            objective_trace: vec![0.0],
            gradient_norm: 0.0,
        });
    }
    let dual = Dual::new(indices, quad_nodes);
    let k = indices.len();
    let objective = |theta: &[f64], log_z: f64| log_z - dot(theta, targets);

    let mut theta = targets.to_vec();
    let mut cur = dual.eval(&theta, true);
    let mut psi = objective(&theta, cur.log_z);
    let mut trace = vec![psi];
    let mut grad: Vec<f64> = cur.mean.iter().zip(targets).map(|(m, t)| m - t).collect();
    let mut gnorm = grad.iter().fold(0.0f64, |a, g| a.max(g.abs()));

    let mut iterations = 0;
    while gnorm > 1e-12 && iterations < MAX_NEWTON_ITERS {
        iterations += 1;
        let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
        let mut ridge = 0.0;
        let step = loop {
            let mut h = cur.cov.clone();
            for i in 0..k {
                h[i * k + i] += ridge;
            }
            if let Some(s) = cholesky_solve(&h, &neg, k) {
                break s;
            }
            ridge = if ridge == 0.0 { 1e-10 } else { ridge * 10.0 };
            if ridge > 1e6 {
                break neg.clone();
            }
        };
        let slope = dot(&grad, &step);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = theta.iter().zip(&step).map(|(a, s)| a + t * s).collect();
            let trial_psi = objective(&trial, dual.log_z(&trial));
            // slack absorbs rounding once the decrease falls below machine precision
            if trial_psi.is_finite()
                && trial_psi <= psi + 1e-4 * t * slope + 1e-15 * psi.abs().max(1.0)
            {
                theta = trial;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        cur = dual.eval(&theta, true);
        psi = objective(&theta, cur.log_z);
        trace.push(psi);
        grad = cur.mean.iter().zip(targets).map(|(m, t)| m - t).collect();
        gnorm = grad.iter().fold(0.0f64, |a, g| a.max(g.abs()));
    }
    if !(gnorm <= MOMENT_TOL) {
        return Err(Error::NonConvergence {
            iterations,
            residual: gnorm,
        });
    }
    Ok(MaxEntSolution {
        indices: indices.to_vec(),
        theta,
        theta0: -cur.log_z,
        iterations,
        objective_trace: trace,
        gradient_norm: gnorm,
    })
}

/// The maximum-entropy estimator matching the selected LP means as moments.
pub fn fit_maxent(
    coeffs: &LpCoefficients,
    sel: &SelectionResult,
    quad_nodes: usize,
) -> Result<ComparisonDensity> {
    let indices = sel.sorted_indices();
    let targets: Vec<f64> = indices.iter().map(|&j| coeffs.get(j)).collect();
    if indices.is_empty() {
        return Ok(ComparisonDensity::MaxEnt {
            indices,
            theta: vec![],
            theta0: 0.0,
            quad_nodes,
        });
    }
    Ok(solve_maxent(&indices, &targets, quad_nodes)?.density(quad_nodes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::shifted_legendre;

    fn lp(values: &[f64], n: usize) -> LpCoefficients {
        LpCoefficients::new(values.to_vec(), n).unwrap()
    }

    #[test]
    fn zero_means_select_nothing() {
        let sel = aic_select(&lp(&[0.0; 8], 500));
        assert_eq!(sel.k_selected, 0);
        assert!(sel.selected_indices.is_empty());
        assert_eq!(sel.criterion_trace[0], 0.0);
        assert!(fit_l2(&lp(&[0.0; 8], 500), &sel).is_uniform());
    }

    #[test]
    fn hand_computed_trace() {
        let c = lp(&[0.01, 0.30, 0.02, 0.25], 100);
        let sel = aic_select(&c);
        assert_eq!(sel.order_by_magnitude, vec![2, 4, 3, 1]);
        let t = &sel.criterion_trace;
        assert!((t[1] - 0.07).abs() < 1e-12);
        assert!((t[2] - 0.1125).abs() < 1e-12);
        assert!((t[3] - 0.0929).abs() < 1e-12);
        assert!((t[4] - 0.073).abs() < 1e-12);
        assert_eq!(sel.k_selected, 2);
        assert_eq!(sel.selected_indices, vec![2, 4]);
        // brute force over all k
        let best = (0..t.len())
            .max_by(|&a, &b| t[a].total_cmp(&t[b]).then(b.cmp(&a)))
            .unwrap();
        assert_eq!(best, sel.k_selected);
    }

    #[test]
    fn ties_pick_smaller_index_and_smaller_k() {
        let c = lp(&[0.25, -0.25, 0.0], 32);
        let sel = aic_select(&c);
        assert_eq!(sel.order_by_magnitude, vec![1, 2, 3]);
        // 0.25² = 2/32 exactly, so AIC(1) = AIC(2) = 0 ties the empty model
        assert_eq!(sel.k_selected, 0);
    }

    #[test]
    fn bic_is_stricter() {
        let c = lp(&[0.09, 0.0, 0.0], 500);
        assert_eq!(aic_select(&c).k_selected, 1);
        assert_eq!(select(&c, SelectionRule::Bic).k_selected, 0);
    }

    #[test]
    fn l2_evaluation_examples() {
        let cd = ComparisonDensity::L2 {
            indices: vec![1],
            coeffs: vec![0.5],
        };
        assert!((cd.eval(0.0).unwrap() - (1.0 - 0.5 * 3f64.sqrt())).abs() < 1e-14);
        let cd = ComparisonDensity::L2 {
            indices: vec![2],
            coeffs: vec![0.2],
        };
        assert!((cd.eval(0.5).unwrap() - (1.0 - 0.2 * 5f64.sqrt() / 2.0)).abs() < 1e-14);
        assert!(cd.eval(1.2).is_err());
        let flat = ComparisonDensity::uniform(EstimatorKind::MaxEnt);
        assert_eq!(flat.eval(0.37).unwrap(), 1.0);
    }

    #[test]
    fn uniform_distribution_is_identity() {
        for kind in [EstimatorKind::L2, EstimatorKind::MaxEnt] {
            let cd = ComparisonDensity::uniform(kind);
            for u in [0.0, 0.2, 0.9, 1.0] {
                assert_eq!(cd_distribution(&cd, u).unwrap(), u);
            }
        }
    }

    fn riemann_cdf(cd: &ComparisonDensity, u: f64, n: usize) -> f64 {
        // midpoint rule over max(d, 0), normalized by the same rule on [0, 1]
        let mut buf = Vec::new();
        let h = 1.0 / n as f64;
        let mut part = 0.0;
        let mut total = 0.0;
        for i in 0..n {
            let v = (i as f64 + 0.5) * h;
            let d = cd.eval_with(v, &mut buf).max(0.0) * h;
            total += d;
            if v < u {
                part += d;
            }
        }
        part / total
    }

    #[test]
    fn l2_distribution_matches_riemann_oracle() {
        let cd = ComparisonDensity::L2 {
            indices: vec![2],
            coeffs: vec![0.3],
        };
        let dist = cd.distribution();
        assert_eq!(dist.eval(0.0).unwrap(), 0.0);
        assert!((dist.eval(1.0).unwrap() - 1.0).abs() < 1e-12);
        for &u in &[0.1, 0.25, 0.5, 0.8] {
            let want = riemann_cdf(&cd, u, 1_000_000);
            assert!((dist.eval(u).unwrap() - want).abs() < 1e-6, "u={u}");
        }
    }

    #[test]
    fn clamped_l2_distribution_is_monotone() {
        let cd = ComparisonDensity::L2 {
            indices: vec![1],
            coeffs: vec![0.5],
        };
        let dist = cd.distribution();
        let mut prev = 0.0;
        for i in 0..=200 {
            let u = i as f64 / 200.0;
            let d = dist.eval(u).unwrap();
            assert!(d >= prev - 1e-15);
            prev = d;
        }
        assert!((prev - 1.0).abs() < 1e-10);
        for &u in &[0.3, 0.6] {
            let want = riemann_cdf(&cd, u, 1_000_000);
            assert!((dist.eval(u).unwrap() - want).abs() < 1e-6);
        }
    }

    /// Independent 1-D oracle: bisection on the tilted mean of Leg_1.
    fn bisection_theta(target: f64) -> f64 {
        let rule = GaussLegendre::new(200);
        let tilted_mean = |t: f64| {
            let z = rule.integrate(|u| (t * 12f64.sqrt() * (u - 0.5)).exp());
            rule.integrate(|u| {
                let l = 12f64.sqrt() * (u - 0.5);
                l * (t * l).exp()
            }) / z
        };
        let (mut lo, mut hi) = (-20.0, 20.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if tilted_mean(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn maxent_single_constraint_matches_bisection() {
        for target in [0.1, -0.35, 0.8] {
            let sol = solve_maxent(&[1], &[target], 128).unwrap();
            let want = bisection_theta(target);
            assert!(
                (sol.theta[0] - want).abs() < 1e-8,
                "{} vs {want}",
                sol.theta[0]
            );
        }
    }

    #[test]
    fn maxent_moments_and_normalization() {
        let c = lp(&[0.0, 0.0, 0.3, -0.35, -0.15, 0.1], 245);
        let sel = SelectionResult {
            order_by_magnitude: vec![4, 3, 5, 6, 1, 2],
            k_selected: 4,
            selected_indices: vec![4, 3, 5, 6],
            criterion_trace: vec![],
        };
        let cd = fit_maxent(&c, &sel, 128).unwrap();
        assert_eq!(cd.indices(), &[3, 4, 5, 6]);
        let rule = GaussLegendre::new(256);
        let mass = rule.integrate(|u| cd.eval(u).unwrap());
        assert!((mass - 1.0).abs() < 1e-8);
        for &j in cd.indices() {
            let m = rule.integrate(|u| cd.eval(u).unwrap() * shifted_legendre(j, u).unwrap());
            assert!((m - c.get(j)).abs() < 1e-8, "j={j}");
        }
        assert!((cd.distribution().eval(1.0).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn maxent_objective_decreases() {
        let sol = solve_maxent(&[1, 2, 4], &[0.5, -0.6, 0.3], 128).unwrap();
        assert!(sol.objective_trace.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        assert!(sol.gradient_norm <= 1e-8);
    }

    #[test]
    fn maxent_empty_is_flat() {
        let c = lp(&[0.0; 4], 100);
        let cd = fit_maxent(&c, &aic_select(&c), 128).unwrap();
        assert!(cd.is_uniform());
        assert_eq!(cd.eval(0.2).unwrap(), 1.0);
        if let ComparisonDensity::MaxEnt { theta0, .. } = cd {
            assert_eq!(theta0, 0.0);
        }
    }

    #[test]
    fn infeasible_moments_do_not_converge() {
        // |LP_1| can never exceed √3
        let err = solve_maxent(&[1], &[1.8], 128).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn json_shape() {
        let cd = ComparisonDensity::MaxEnt {
            indices: vec![3, 4],
            theta: vec![0.5, -0.25],
            theta0: -0.43,
            quad_nodes: 128,
        };
        let v: serde_json::Value = serde_json::to_value(&cd).unwrap();
        assert_eq!(v["kind"], "maxent");
        assert_eq!(v["theta0"], -0.43);
        let back: ComparisonDensity = serde_json::from_value(v).unwrap();
        assert_eq!(back, cd);
        let l2: ComparisonDensity =
            serde_json::from_str(r#"{"kind":"l2","indices":[2],"coeffs":[0.1]}"#).unwrap();
        assert_eq!(l2.kind(), EstimatorKind::L2);
    }
}
