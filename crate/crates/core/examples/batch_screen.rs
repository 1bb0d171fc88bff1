// Screen many variables at once and tabulate how many modes each has.

use lpmode::batch::{gini, run_batch_with, BatchOptions};
use lpmode::bench::ScenarioId;
use lpmode::PipelineConfig;

pub fn run_example() -> lpmode::Result<()> {
    let mut matrix = Vec::new();
    for i in 0..40u64 {
        let scenario = if i % 4 == 0 {
            ScenarioId::D4
        } else {
            ScenarioId::D1
        };
        matrix.push((format!("gene{i:02}"), scenario.spec().sample(300, 100 + i)));
    }
    // too short to analyse; reported, not fatal
    matrix.push(("short".to_string(), vec![0.1, 0.4, 0.2]));

    let opts = BatchOptions {
        workers: Some(2),
        bootstrap: vec![],
    };
    let report = run_batch_with(&matrix, &PipelineConfig::default(), &opts)?;
    println!("modality histogram: {:?}", report.modality_histogram);
    for r in report.failures() {
        println!("{}: {:?}", r.name, r.error);
    }
    let bimodal: Vec<&str> = report
        .results
        .iter()
        .filter(|r| r.mode_count == 2)
        .map(|r| r.name.as_str())
        .collect();
    println!("bimodal: {bimodal:?}");
    println!("gini(gene00) = {:.3}", gini(&matrix[0].1)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("batch example failed");
}
