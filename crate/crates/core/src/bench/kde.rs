//! Gaussian kernel density estimate with Silverman's rule-of-thumb bandwidth.

use crate::error::{Error, Result};
use crate::reference::check_samples;
use crate::special::std_normal_pdf;
use crate::stats;

pub const KDE_GRID: usize = 2048;

/// h = 0.9 · min(sd, IQR / 1.34) · n^(-1/5). When the IQR is zero the sd
/// alone is used.
pub fn silverman_bandwidth(samples: &[f64]) -> Result<f64> {
    check_samples(samples)?;
    let sd = stats::sd(samples);
    let iqr = stats::iqr(samples) / 1.34;
    let spread = match (sd > 0.0, iqr > 0.0) {
        (false, false) => {
            return Err(Error::DegenerateSample("zero sd and zero IQR".into()));
        }
        (true, true) => sd.min(iqr),
        (true, false) => sd,
        (false, true) => iqr,
    };
    Ok(0.9 * spread * (samples.len() as f64).powf(-0.2))
}

/// Grid and density values of the Silverman KDE over [min − 3h, max + 3h].
pub fn silverman_kde(samples: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = silverman_bandwidth(samples)?;
    let s = stats::sorted(samples);
    let lo = s[0] - 3.0 * h;
    let hi = s[s.len() - 1] + 3.0 * h;
    let step = (hi - lo) / (KDE_GRID - 1) as f64;
    let norm = 1.0 / (s.len() as f64 * h);
    // kernels beyond 10h contribute below 1e-22 relative and are skipped
    let reach = 10.0 * h;
    let xs: Vec<f64> = (0..KDE_GRID).map(|i| lo + i as f64 * step).collect();
    let ys = xs
        .iter()
        .map(|&x| {
            let a = s.partition_point(|&v| v < x - reach);
            let b = s.partition_point(|&v| v <= x + reach);
            norm * s[a..b]
                .iter()
                .map(|&v| std_normal_pdf((x - v) / h))
                .sum::<f64>()
        })
        .collect();
    Ok((xs, ys))
}

/// Strict interior local maxima of a sampled curve; a flat top counts once,
/// at its midpoint.
pub fn grid_modes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < ys.len() {
        if ys[i] > ys[i - 1] {
            let mut j = i;
            while j + 1 < ys.len() && ys[j + 1] == ys[i] {
                j += 1;
            }
            if j + 1 < ys.len() && ys[j + 1] < ys[i] {
                out.push(0.5 * (xs[i] + xs[j]));
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Mode locations of the Silverman KDE.
pub fn silverman_kde_modes(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.len() < 10 {
        return Err(Error::InvalidArgument(
            "KDE mode count needs n >= 10".into(),
        ));
    }
    let (xs, ys) = silverman_kde(samples)?;
    Ok(grid_modes(&xs, &ys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::ReferenceModel;

    #[test]
    fn bandwidth_by_hand() {
        // 1..=5 has sd √2.5 and type-7 IQR 2
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let sd = (2.5f64).sqrt();
        let want = 0.9 * sd.min(2.0 / 1.34) * 5f64.powf(-0.2);
        assert!((silverman_bandwidth(&xs).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn separated_spikes_are_two_modes() {
        let mut xs = ReferenceModel::normal(-10.0, 0.5).unwrap().sample(100, 1);
        xs.extend(ReferenceModel::normal(10.0, 0.5).unwrap().sample(100, 2));
        let m = silverman_kde_modes(&xs).unwrap();
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn degenerate_sample() {
        let e = silverman_kde_modes(&[4.0; 20]).unwrap_err();
        assert_eq!(e.code(), "degenerate_sample");
    }

    #[test]
    fn truncated_sum_matches_full_sum() {
        let xs = ReferenceModel::normal(0.0, 1.0).unwrap().sample(300, 9);
        let h = silverman_bandwidth(&xs).unwrap();
        let (gx, gy) = silverman_kde(&xs).unwrap();
        for k in (0..KDE_GRID).step_by(97) {
            let full: f64 = xs
                .iter()
                .map(|&v| std_normal_pdf((gx[k] - v) / h))
                .sum::<f64>()
                / (300.0 * h);
            assert!((full - gy[k]).abs() < 1e-15 * full.max(1.0));
        }
    }

    #[test]
    fn plateau_counts_once() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(grid_modes(&xs, &[0.0, 1.0, 1.0, 1.0, 0.0]), vec![2.0]);
        assert!(grid_modes(&xs, &[0.0, 1.0, 1.0, 2.0, 3.0]).is_empty());
    }
}
