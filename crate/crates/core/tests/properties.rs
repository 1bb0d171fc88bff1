//! Monte Carlo properties of the estimators. Each test runs at a fixed seed.

use lpmode::batch::{gini, run_batch, run_batch_with, BatchOptions, FailureKind};
use lpmode::bench::ScenarioId;
use lpmode::comparison::{select, ComparisonDensity};
use lpmode::inference::{bootstrap_modes, sample_skewg};
use lpmode::pipeline::run_modes;
use lpmode::reference::ReferenceModel;
use lpmode::{
    lp_means, EstimatorKind, FamilyKind, FitMethod, PipelineConfig, SelectionRule, SkewGDensity,
};

fn bic() -> PipelineConfig {
    PipelineConfig {
        selection_rule: SelectionRule::Bic,
        ..PipelineConfig::default()
    }
}

#[test]
fn batch_of_reference_draws_is_mostly_unimodal() {
    let g = ReferenceModel::normal(3.0, 2.0).unwrap();
    let matrix: Vec<(String, Vec<f64>)> = (0..100)
        .map(|i| (format!("v{i}"), g.sample(500, 1000 + i)))
        .collect();
    let report = run_batch(&matrix, &bic()).unwrap();
    let uni = report.modality_histogram.get(&1).copied().unwrap_or(0);
    assert!(uni >= 90, "{:?}", report.modality_histogram);
    let total: usize = report.modality_histogram.values().sum();
    assert_eq!(
        total,
        report.results.iter().filter(|r| r.error.is_none()).count()
    );
}

#[test]
fn constant_variable_is_isolated() {
    let g = ReferenceModel::normal(0.0, 1.0).unwrap();
    let mut matrix: Vec<(String, Vec<f64>)> = (0..100)
        .map(|i| (format!("v{i}"), g.sample(60, i)))
        .collect();
    matrix[37].1 = vec![1.0; 60];
    let report = run_batch(&matrix, &PipelineConfig::default()).unwrap();
    let failures: Vec<_> = report.failures().collect();
    assert_eq!(failures.len(), 1);
    assert_eq!(failures[0].name, "v37");
    assert_eq!(
        failures[0].error.as_ref().unwrap().kind,
        FailureKind::FitFailure
    );
    assert_eq!(report.results.len(), 100);
}

/// 24481 variables of 78 observations, one in five a well-separated
/// two-component mixture. With 78 observations the series is kept short.
#[test]
fn planted_modality_share_is_recovered() {
    let a = ReferenceModel::normal(-2.5, 1.0).unwrap();
    let b = ReferenceModel::normal(2.5, 1.0).unwrap();
    let g = ReferenceModel::normal(0.0, 1.0).unwrap();
    let p = 24_481u64;
    let matrix: Vec<(String, Vec<f64>)> = (0..p)
        .map(|i| {
            let xs = if i % 5 == 0 {
                let mut v = a.sample(39, 2 * i);
                v.extend(b.sample(39, 2 * i + 1));
                v
            } else {
                g.sample(78, 7 * i + 3)
            };
            (format!("g{i}"), xs)
        })
        .collect();
    let cfg = PipelineConfig {
        selection_rule: SelectionRule::Bic,
        m_max: 4,
        ..PipelineConfig::default()
    };
    let report = run_batch_with(&matrix, &cfg, &BatchOptions::default()).unwrap();
    let uni = report.modality_histogram.get(&1).copied().unwrap_or(0) as f64 / p as f64;
    assert!((uni - 0.8).abs() <= 0.05, "unimodal share {uni:.3}");
}

/// For X lognormal(0, s²), cov(X, F(X)) is a quarter of the mean absolute
/// difference 2·erf(s/2)·E[X], and F(X) is uniform.
fn lognormal_gini_oracle(s: f64) -> f64 {
    let mean = (s * s / 2.0).exp();
    let sd_x = mean * ((s * s).exp() - 1.0).sqrt();
    let cov = libm::erf(s / 2.0) * mean / 2.0;
    cov / (sd_x / 12f64.sqrt())
}

#[test]
fn gini_of_lognormal_samples_matches_closed_form() {
    use rand::SeedableRng;
    use rand_distr::{Distribution, LogNormal};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    // the heavier tail makes the sample standard deviation noisier
    for (s, tol) in [(0.5, 0.01), (1.5, 0.06)] {
        let ln = LogNormal::new(0.0, s).unwrap();
        let xs: Vec<f64> = (0..10_000).map(|_| ln.sample(&mut rng)).collect();
        let g = gini(&xs).unwrap();
        let want = lognormal_gini_oracle(s);
        assert!((g - want).abs() < tol, "s = {s}: {g} vs {want}");
    }
}

#[test]
fn bootstrap_se_under_the_null_is_of_order_sigma_over_root_n() {
    let (mu, sigma, n) = (1.0, 2.0, 500);
    let xs = ReferenceModel::normal(mu, sigma).unwrap().sample(n, 21);
    let r = bootstrap_modes(&xs, &bic(), EstimatorKind::MaxEnt, 100, 0.95, 3).unwrap();
    assert_eq!(r.modes.len(), 1);
    let scale = sigma / (n as f64).sqrt();
    assert!(
        r.se[0] > 0.3 * scale && r.se[0] < 5.0 * scale,
        "se {} vs {scale}",
        r.se[0]
    );
    assert!(r.ci[0][0] < r.modes[0] && r.modes[0] < r.ci[0][1]);
}

#[test]
fn bootstrap_is_thread_count_independent() {
    let xs = ScenarioId::D5.spec().sample(300, 4);
    let cfg = PipelineConfig::default();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| bootstrap_modes(&xs, &cfg, EstimatorKind::L2, 60, 0.9, 8).unwrap())
    };
    let a = serde_json::to_string(&run(1)).unwrap();
    let b = serde_json::to_string(&run(4)).unwrap();
    assert_eq!(a, b);
}

fn symmetric_mixture(n: usize, seed: u64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let left = ReferenceModel::normal(-2.0, 0.8).unwrap();
    let right = ReferenceModel::normal(2.0, 0.8).unwrap();
    (0..n)
        .map(|_| {
            if rng.random::<bool>() {
                left.sample_with(&mut rng)
            } else {
                right.sample_with(&mut rng)
            }
        })
        .collect()
}

/// 95% intervals for the modes of 0.5 N(-2, 0.64) + 0.5 N(2, 0.64) at
/// n = 500 should cover both true modes in at least 85% of outer
/// replications.
#[test]
fn bootstrap_intervals_cover_true_modes() {
    // the right mode solves x - 2 = (x + 2)·exp(-8x / 0.64); iterate
    let mut m = 2.0;
    for _ in 0..50 {
        m = 2.0 + (m + 2.0) * (-8.0 * m / 0.64f64).exp();
    }
    let truth = [-m, m];
    let cfg = PipelineConfig::default();
    let reps = 200;
    let mut covered = 0;
    for r in 0..reps {
        let xs = symmetric_mixture(500, 40_000 + r);
        let Ok(rep) = bootstrap_modes(&xs, &cfg, EstimatorKind::MaxEnt, 50, 0.95, r) else {
            continue;
        };
        if rep.modes.len() == 2
            && rep
                .ci
                .iter()
                .zip(&truth)
                .all(|(ci, t)| ci[0] <= *t && *t <= ci[1])
        {
            covered += 1;
        }
    }
    let rate = covered as f64 / reps as f64;
    assert!(rate >= 0.85, "coverage {rate:.3}");
}

/// Expected integrated squared error of the series over index set `set`
/// when the true coefficients are `c`:
/// 2·Σ_{j∉set} c_j² + (2/n)·Σ_{j∈set} (1 − c_j²).
fn mise(set: &[usize], c: &[f64], n: usize) -> f64 {
    let mut out = 0.0;
    for (j, &cj) in c.iter().enumerate() {
        if set.contains(&(j + 1)) {
            out += 2.0 / n as f64 * (1.0 - cj * cj);
        } else {
            out += 2.0 * cj * cj;
        }
    }
    out
}

#[test]
fn aic_order_is_close_to_the_oracle_order() {
    let g = ReferenceModel::normal(0.0, 1.0).unwrap();
    let mut truth = vec![0.0; 8];
    truth[1] = 0.3;
    truth[2] = -0.2;
    truth[4] = 0.12;
    let indices = vec![2, 3, 5];
    let cd = ComparisonDensity::L2 {
        indices: indices.clone(),
        coeffs: indices.iter().map(|&j| truth[j - 1]).collect(),
    };
    let sk = SkewGDensity::new(g, cd);
    let (n, reps) = (500, 200);
    let mut good = 0;
    for r in 0..reps {
        let xs = sample_skewg(&sk, n, 300 + r).unwrap().draws;
        let lp = lp_means(&xs, &g, 8).unwrap();
        let sel = select(&lp, SelectionRule::Aic);
        let order = &sel.order_by_magnitude;
        let errs: Vec<f64> = (0..=8).map(|k| mise(&order[..k], &truth, n)).collect();
        let best = errs.iter().cloned().fold(f64::INFINITY, f64::min);
        if errs[sel.k_selected] <= 2.0 * best {
            good += 1;
        }
    }
    assert!(good >= 180, "{good}/200");
}

#[test]
fn doubling_the_grid_leaves_modes_in_place() {
    for (i, id) in [
        ScenarioId::D4,
        ScenarioId::D5,
        ScenarioId::D8,
        ScenarioId::D7,
    ]
    .into_iter()
    .enumerate()
    {
        let spec = id.spec();
        let xs = spec.sample(500, 60 + i as u64);
        let mut cfg = PipelineConfig::default().with_family(spec.lp_family);
        let a = run_modes(&xs, &cfg).unwrap();
        cfg.grid = 2000;
        let b = run_modes(&xs, &cfg).unwrap();
        for (ea, eb) in a.estimators.iter().zip(&b.estimators) {
            let (la, lb) = (&ea.modes.locations, &eb.modes.locations);
            assert_eq!(la.len(), lb.len(), "{id}: {la:?} vs {lb:?}");
            let (lo, hi) = lpmode::modes::x_search_range(&a.reference, cfg.tail_delta);
            let tol = 2.0 * (hi - lo) * 1e-6;
            for (x, y) in la.iter().zip(lb) {
                assert!((x - y).abs() <= tol, "{id}: {x} vs {y} (tol {tol:.1e})");
            }
        }
    }
}

#[test]
fn fixed_reference_skips_estimation() {
    let xs = ReferenceModel::exponential(2.0).unwrap().sample(400, 9);
    let cfg = PipelineConfig {
        family: FamilyKind::Exponential,
        fit_method: FitMethod::Fixed,
        reference_params: Some(vec![2.0]),
        ..PipelineConfig::default()
    };
    let r = run_modes(&xs, &cfg).unwrap();
    assert_eq!(r.reference, ReferenceModel::exponential(2.0).unwrap());
}
