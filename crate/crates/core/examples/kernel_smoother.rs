// The full-order L2 estimate is a kernel smoother: averaging the
// Christoffel–Darboux kernel over the rank-transformed data reproduces it.

use lpmode::comparison::{fit_l2, select};
use lpmode::reference::ReferenceModel;
use lpmode::{cd_kernel, lp_means, SelectionRule};

pub fn run_example() -> lpmode::Result<()> {
    let g = ReferenceModel::normal(0.0, 1.0)?;
    let xs = ReferenceModel::normal(0.4, 1.3)?.sample(100, 1);
    let us: Vec<f64> = xs.iter().map(|&x| g.cdf(x)).collect();

    for m in [2, 4, 6] {
        let lp = lp_means(&xs, &g, m)?;
        // keep every term so the series is the full-order estimate
        let mut sel = select(&lp, SelectionRule::Aic);
        sel.selected_indices = (1..=m).collect();
        sel.k_selected = m;
        let d = fit_l2(&lp, &sel);
        let mut worst = 0.0f64;
        for i in 1..20 {
            let u = i as f64 / 20.0;
            let mut k = 0.0;
            for &v in &us {
                k += cd_kernel(m, u, v)?;
            }
            let smooth = 1.0 + k / us.len() as f64;
            worst = worst.max((smooth - d.eval(u)?).abs());
        }
        println!("m = {m}: max |series - kernel| = {worst:.2e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("kernel example failed");
}
