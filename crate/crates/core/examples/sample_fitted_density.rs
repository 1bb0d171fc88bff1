// Accept-reject draws from a fitted skew-G density. The rank transform of
// the draws should follow the fitted comparison distribution.

use lpmode::bench::ScenarioId;
use lpmode::inference::sample_skewg;
use lpmode::stats::ks_statistic;
use lpmode::{fit_pipeline, EstimatorChoice, EstimatorKind, PipelineConfig};

pub fn run_example() -> lpmode::Result<()> {
    let xs = ScenarioId::D5.spec().sample(400, 5);
    let cfg = PipelineConfig::default().with_estimator(EstimatorChoice::MaxEnt);
    let fit = fit_pipeline(&xs, &cfg)?;
    let sk = fit
        .density(EstimatorKind::MaxEnt)
        .expect("maxent requested");

    let draws = sample_skewg(sk, 1000, 9)?;
    println!(
        "envelope {:.3}, acceptance {:.3}",
        draws.envelope, draws.acceptance_rate
    );

    let us: Vec<f64> = draws.draws.iter().map(|&x| sk.reference.cdf(x)).collect();
    let dist = sk.cd.distribution();
    let ks = ks_statistic(&us, |u| dist.eval_unchecked(u));
    // two-sided DKW band at 99%
    let band = ((2.0f64 / 0.01).ln() / (2.0 * us.len() as f64)).sqrt();
    println!("KS {ks:.4} vs 99% band {band:.4}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("sampling example failed");
}
