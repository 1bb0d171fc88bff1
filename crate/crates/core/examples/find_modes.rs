// Mode identification on a trimodal normal mixture, compared with the
// analytic modes of the true density.

use lpmode::bench::ScenarioId;
use lpmode::pipeline::run_modes;
use lpmode::{EstimatorKind, PipelineConfig};

pub fn run_example() -> lpmode::Result<()> {
    let spec = ScenarioId::D8.spec();
    let xs = spec.sample(2000, 11);
    let report = run_modes(&xs, &PipelineConfig::default())?;

    println!("true modes: {:?}", spec.analytic_modes(100_000));
    for kind in [EstimatorKind::L2, EstimatorKind::MaxEnt] {
        let Some(e) = report.estimator(kind) else {
            continue;
        };
        println!("{kind:?}");
        println!("  d-modes (u):     {:?}", e.u_modes.locations);
        println!("  f-modes (x):     {:?}", e.f_modes.locations);
        println!("  reconciled:      {:?}", e.modes.locations);
        println!("  jumps:           {:?}", e.modes.jumps);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("modes example failed");
}
