// Standard errors and percentile intervals for mode locations from the
// smoothed bootstrap.

use lpmode::bench::ScenarioId;
use lpmode::inference::bootstrap_modes;
use lpmode::{EstimatorKind, PipelineConfig};

pub fn run_example() -> lpmode::Result<()> {
    let xs = ScenarioId::D5.spec().sample(500, 3);
    let cfg = PipelineConfig::default();
    let report = bootstrap_modes(&xs, &cfg, EstimatorKind::MaxEnt, 100, 0.95, 42)?;

    for i in 0..report.modes.len() {
        println!(
            "mode {:.3}  se {:.3}  ci [{:.3}, {:.3}]",
            report.modes[i], report.se[i], report.ci[i][0], report.ci[i][1]
        );
    }
    println!("B = {}, match rate {:.2}", report.b, report.match_rate);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("bootstrap example failed");
}
