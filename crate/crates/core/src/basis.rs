//! Shifted Legendre polynomials on [0, 1] and the LP score functions
//! T_j(x; G) = Leg_j(G(x)).

use serde::{Deserialize, Serialize};

use crate::error::{check_unit_closed, check_unit_open, Error, Result};
use crate::reference::{check_samples, ReferenceModel};

/// Highest supported order.
pub const MAX_ORDER: usize = 20;

/// Standard Legendre values P_0..=P_m at t = 2u - 1, written into `out`.
fn legendre_standard(t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = t;
    }
    for j in 1..out.len().saturating_sub(1) {
        let jf = j as f64;
        out[j + 1] = ((2.0 * jf + 1.0) * t * out[j] - jf * out[j - 1]) / (jf + 1.0);
    }
}

/// Orthonormal Leg_0..=Leg_m at `u` into `out` (length m + 1). No domain check.
pub fn shifted_legendre_all(u: f64, out: &mut [f64]) {
    legendre_standard(2.0 * u - 1.0, out);
    for (j, v) in out.iter_mut().enumerate() {
        *v *= ((2 * j + 1) as f64).sqrt();
    }
}

/// Orthonormal shifted Legendre polynomial Leg_j(u), with Leg_0 ≡ 1.
pub fn shifted_legendre(j: usize, u: f64) -> Result<f64> {
    check_unit_closed("u", u)?;
    let mut buf = vec![0.0; j + 1];
    shifted_legendre_all(u, &mut buf);
    Ok(buf[j])
}

/// LP score T_j(x; G).
pub fn lp_score(j: usize, x: f64, model: &ReferenceModel) -> Result<f64> {
    shifted_legendre(j, model.cdf(x))
}

/// Sample LP means LP(j; G, F̃) for j = 1..=m_max.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpCoefficients {
    values: Vec<f64>,
    n: usize,
}

impl LpCoefficients {
    /// Wraps precomputed values (index 0 holds j = 1).
    pub fn new(values: Vec<f64>, n: usize) -> Result<Self> {
        if values.is_empty() || values.len() > MAX_ORDER {
            return Err(Error::InvalidArgument(format!(
                "LP coefficient count must be in 1..={MAX_ORDER}, got {}",
                values.len()
            )));
        }
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        Ok(Self { values, n })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// LP mean for order `j` (1-based).
    pub fn get(&self, j: usize) -> f64 {
        self.values[j - 1]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m_max(&self) -> usize {
        self.values.len()
    }
}

/// LP means of `samples` against `model` up to order `m_max`.
pub fn lp_means(samples: &[f64], model: &ReferenceModel, m_max: usize) -> Result<LpCoefficients> {
    check_samples(samples)?;
    if m_max == 0 || m_max > MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "m_max must be in 1..={MAX_ORDER}, got {m_max}"
        )));
    }
    let us: Vec<f64> = samples.iter().map(|&x| model.cdf(x)).collect();
    Ok(lp_means_of_ranks(&us, m_max))
}

/// LP means from already rank-G transformed values.
pub(crate) fn lp_means_of_ranks(us: &[f64], m_max: usize) -> LpCoefficients {
    let mut sums = vec![0.0; m_max + 1];
    let mut buf = vec![0.0; m_max + 1];
    for &u in us {
        shifted_legendre_all(u, &mut buf);
        for (s, b) in sums.iter_mut().zip(&buf) {
            *s += b;
        }
    }
    let n = us.len() as f64;
    LpCoefficients {
        values: sums[1..].iter().map(|s| s / n).collect(),
        n: us.len(),
    }
}

/// Σ_{j=1}^{m} Leg_j(u)·Leg_j(v).
///
/// Away from the diagonal this uses the Christoffel–Darboux closed form
/// `(m+1)/2 · (L_{m+1}(u) L_m(v) − L_m(u) L_{m+1}(v)) / (u − v)` with
/// `L_j = Leg_j / √(2j+1)`. That expression equals the sum starting at
/// j = 0, so the constant term 1 is subtracted. Within 1e-6 of the diagonal
/// the direct sum is used.
pub fn cd_kernel(m: usize, u: f64, v: f64) -> Result<f64> {
    check_unit_open("u", u)?;
    check_unit_open("v", v)?;
    if m == 0 {
        return Ok(0.0);
    }
    // Symmetric by construction: order the arguments before evaluating.
    let (a, b) = if u <= v { (u, v) } else { (v, u) };
    if (b - a).abs() <= 1e-6 {
        return Ok(cd_kernel_direct(m, a, b));
    }
    let mut pa = vec![0.0; m + 2];
    let mut pb = vec![0.0; m + 2];
    legendre_standard(2.0 * a - 1.0, &mut pa);
    legendre_standard(2.0 * b - 1.0, &mut pb);
    let closed = 0.5 * (m as f64 + 1.0) * (pa[m + 1] * pb[m] - pa[m] * pb[m + 1]) / (a - b);
    Ok(closed - 1.0)
}

/// Direct summation of Σ_{j=1}^{m} Leg_j(u)·Leg_j(v).
pub fn cd_kernel_direct(m: usize, u: f64, v: f64) -> f64 {
    let mut lu = vec![0.0; m + 1];
    let mut lv = vec![0.0; m + 1];
    shifted_legendre_all(u, &mut lu);
    shifted_legendre_all(v, &mut lv);
    lu[1..].iter().zip(&lv[1..]).map(|(a, b)| a * b).sum()
}

/// ∫₀ᵘ Leg_j(v) dv for j = 0..=m into `out` (length m + 1), using
/// ∫ P_j = (P_{j+1} − P_{j−1}) / (2j + 1) on [−1, 1].
pub(crate) fn shifted_legendre_integrals(u: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let mut p = vec![0.0; out.len() + 1];
    legendre_standard(2.0 * u - 1.0, &mut p);
    out[0] = u;
    for j in 1..out.len() {
        let w = (2 * j + 1) as f64;
        out[j] = 0.5 * w.sqrt() * (p[j + 1] - p[j - 1]) / w;
    }
}
