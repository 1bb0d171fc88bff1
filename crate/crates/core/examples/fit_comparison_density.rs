// Fit a normal reference and both comparison-density estimators to a
// two-component sample, then print the selected LP terms.

use lpmode::bench::ScenarioId;
use lpmode::{fit_pipeline, PipelineConfig};

pub fn run_example() -> lpmode::Result<()> {
    let xs = ScenarioId::D4.spec().sample(500, 7);
    let fit = fit_pipeline(&xs, &PipelineConfig::default())?;

    println!("reference: {:?}", fit.reference);
    println!("LP means:  {:?}", fit.lp.values());
    println!("selected:  {:?}", fit.selection.sorted_indices());
    for (kind, sk) in fit.densities() {
        println!(
            "{kind:?}: indices {:?} coefficients {:?}",
            sk.cd.indices(),
            sk.cd.coefficients()
        );
        let d_mid = sk.cd.eval(0.5)?;
        println!("  d(0.5) = {d_mid:.4}, f(0) = {:.4}", sk.eval(0.0));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("fit example failed");
}
