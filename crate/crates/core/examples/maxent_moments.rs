// Solve the maximum-entropy problem directly for a few moment targets and
// check that the fitted density reproduces them.

use lpmode::comparison::solve_maxent;
use lpmode::shifted_legendre;
use lpmode::special::GaussLegendre;

pub fn run_example() -> lpmode::Result<()> {
    let indices = [1, 3, 4];
    let targets = [0.15, 0.3, -0.25];
    let sol = solve_maxent(&indices, &targets, 128)?;
    println!(
        "theta {:?}, theta0 {:.5}, {} Newton steps",
        sol.theta, sol.theta0, sol.iterations
    );

    let d = sol.density(128);
    let gl = GaussLegendre::new(256);
    println!(
        "integral of d = {:.12}",
        gl.integrate(|u| d.eval_unchecked(u))
    );
    for (&j, &t) in indices.iter().zip(&targets) {
        let m = gl.integrate(|u| d.eval_unchecked(u) * shifted_legendre(j, u).unwrap());
        println!("moment {j}: {m:.10} (target {t})");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("maxent example failed");
}
