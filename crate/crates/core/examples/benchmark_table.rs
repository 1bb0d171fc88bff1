// A small slice of the Monte Carlo comparison: success rates of the LP
// estimators against Silverman KDE on two scenarios.

use lpmode::bench::{run_benchmark, BenchConfig, Method, ScenarioId};

pub fn run_example() -> lpmode::Result<()> {
    let cfg = BenchConfig {
        scenarios: vec![ScenarioId::D1, ScenarioId::D4],
        sizes: vec![250],
        methods: vec![Method::Silverman, Method::LpL2, Method::LpMaxEnt],
        replications: 20,
        seed: 2,
        hausdorff: true,
        ..BenchConfig::default()
    };
    let table = run_benchmark(&cfg)?;
    println!(
        "{:<4} {:>5} {:<10} {:>8} {:>6}",
        "id", "n", "method", "success", "se"
    );
    for c in &table.cells {
        println!(
            "{:<4} {:>5} {:<10} {:>7.1}% {:>6.1}",
            c.scenario.to_string(),
            c.n,
            format!("{:?}", c.method),
            c.success_pct,
            c.mc_se
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("bench example failed");
}
