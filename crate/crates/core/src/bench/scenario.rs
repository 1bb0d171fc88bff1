//! Simulation scenarios D1–D8.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::reference::FamilyKind;
use crate::special::{std_normal_cdf, std_normal_pdf};

#[derive(
    Debug,
    Clone,
    Copy,
    PartialEq,
    Eq,
    PartialOrd,
    Ord,
    Hash,
    Serialize,
    Deserialize,
    clap::ValueEnum,
)]
pub enum ScenarioId {
    D1,
    D2,
    D3,
    D4,
    D5,
    D6,
    D7,
    D8,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 8] = [
        ScenarioId::D1,
        ScenarioId::D2,
        ScenarioId::D3,
        ScenarioId::D4,
        ScenarioId::D5,
        ScenarioId::D6,
        ScenarioId::D7,
        ScenarioId::D8,
    ];

    pub fn spec(self) -> ScenarioSpec {
        ScenarioSpec::new(self)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl std::str::FromStr for ScenarioId {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScenarioId::ALL
            .into_iter()
            .find(|id| format!("{id:?}").eq_ignore_ascii_case(s))
            .ok_or_else(|| crate::error::Error::InvalidArgument(format!("unknown scenario {s:?}")))
    }
}

impl std::fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

/// One mixture component. Normal components are parameterised by standard
/// deviation, Gamma components by shape and rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case")]
pub enum Component {
    Normal {
        weight: f64,
        mean: f64,
        sd: f64,
    },
    Gamma {
        weight: f64,
        shape: f64,
        rate: f64,
    },
    StudentT {
        weight: f64,
        df: f64,
    },
    SkewNormal {
        weight: f64,
        xi: f64,
        omega: f64,
        alpha: f64,
    },
}

impl Component {
    pub fn weight(&self) -> f64 {
        match *self {
            Component::Normal { weight, .. }
            | Component::Gamma { weight, .. }
            | Component::StudentT { weight, .. }
            | Component::SkewNormal { weight, .. } => weight,
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            Component::Normal { mean, sd, .. } => std_normal_pdf((x - mean) / sd) / sd,
            Component::Gamma { shape, rate, .. } => {
                if x < 0.0 {
                    0.0
                } else if x == 0.0 {
                    match shape {
                        s if s < 1.0 => f64::INFINITY,
                        s if s == 1.0 => rate,
                        _ => 0.0,
                    }
                } else {
                    (shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - libm::lgamma(shape))
                        .exp()
                }
            }
            Component::StudentT { df, .. } => {
                let c = libm::lgamma(0.5 * (df + 1.0))
                    - libm::lgamma(0.5 * df)
                    - 0.5 * (df * std::f64::consts::PI).ln();
                (c - 0.5 * (df + 1.0) * (x * x / df).ln_1p()).exp()
            }
            Component::SkewNormal {
                xi, omega, alpha, ..
            } => {
                let z = (x - xi) / omega;
                2.0 / omega * std_normal_pdf(z) * std_normal_cdf(alpha * z)
            }
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Component::Normal { mean, sd, .. } => mean + sd * rng.sample::<f64, _>(StandardNormal),
            Component::Gamma { shape, rate, .. } => Gamma::new(shape, 1.0 / rate)
                .expect("valid gamma parameters")
                .sample(rng),
            Component::StudentT { df, .. } => StudentT::new(df)
                .expect("valid degrees of freedom")
                .sample(rng),
            Component::SkewNormal {
                xi, omega, alpha, ..
            } => {
                let delta = alpha / (1.0 + alpha * alpha).sqrt();
                let z0: f64 = rng.sample(StandardNormal);
                let z1: f64 = rng.sample(StandardNormal);
                xi + omega * (delta * z0.abs() + (1.0 - delta * delta).sqrt() * z1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub id: ScenarioId,
    pub description: String,
    pub components: Vec<Component>,
    /// Modes of the analytic density, counting a maximum at a finite lower
    /// support boundary.
    pub true_mode_count: usize,
    /// Reference family the LP pipeline uses for this scenario.
    pub lp_family: FamilyKind,
    /// Window used to locate the analytic modes.
    pub window: (f64, f64),
}

fn normal(weight: f64, mean: f64, sd: f64) -> Component {
    Component::Normal { weight, mean, sd }
}

fn gamma(weight: f64, shape: f64, rate: f64) -> Component {
    Component::Gamma {
        weight,
        shape,
        rate,
    }
}

impl ScenarioSpec {
    pub fn new(id: ScenarioId) -> Self {
        use ScenarioId::*;
        let (description, components, true_mode_count, lp_family, window) = match id {
            D1 => (
                "N(0,1)",
                vec![normal(1.0, 0.0, 1.0)],
                1,
                FamilyKind::Normal,
                (-8.0, 8.0),
            ),
            D2 => (
                "Gamma(shape 2, rate 0.1)",
                vec![gamma(1.0, 2.0, 0.1)],
                1,
                FamilyKind::Exponential,
                (0.0, 250.0),
            ),
            D3 => (
                "Student t, 3 df",
                vec![Component::StudentT {
                    weight: 1.0,
                    df: 3.0,
                }],
                1,
                FamilyKind::Normal,
                (-60.0, 60.0),
            ),
            D4 => (
                "0.5 N(-1.1, 1) + 0.5 N(1.1, 1)",
                vec![normal(0.5, -1.1, 1.0), normal(0.5, 1.1, 1.0)],
                2,
                FamilyKind::Normal,
                (-9.0, 9.0),
            ),
            D5 => (
                "0.2 N(-1, var 1) + 0.8 N(2, var 0.25)",
                vec![normal(0.2, -1.0, 1.0), normal(0.8, 2.0, 0.5)],
                2,
                FamilyKind::Normal,
                (-9.0, 9.0),
            ),
            D6 => (
                "0.6 N(0, 1) + 0.4 SN(xi 1, omega 5, alpha 15)",
                vec![
                    normal(0.6, 0.0, 1.0),
                    Component::SkewNormal {
                        weight: 0.4,
                        xi: 1.0,
                        omega: 5.0,
                        alpha: 15.0,
                    },
                ],
                1,
                FamilyKind::Normal,
                (-8.0, 40.0),
            ),
            D7 => (
                "0.5 Gamma(shape 1, rate 3) + 0.5 Gamma(shape 5, rate 2)",
                vec![gamma(0.5, 1.0, 3.0), gamma(0.5, 5.0, 2.0)],
                2,
                FamilyKind::Exponential,
                (0.0, 25.0),
            ),
            D8 => (
                "0.4 N(-1.2, sd 0.6) + 0.4 N(1.2, sd 0.6) + 0.2 N(0, sd 0.25)",
                vec![
                    normal(0.4, -1.2, 0.6),
                    normal(0.4, 1.2, 0.6),
                    normal(0.2, 0.0, 0.25),
                ],
                3,
                FamilyKind::Normal,
                (-8.0, 8.0),
            ),
        };
        ScenarioSpec {
            id,
            description: description.to_owned(),
            components,
            true_mode_count,
            lp_family,
            window,
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.components.iter().map(|c| c.weight() * c.pdf(x)).sum()
    }

    /// Finite lower support boundary, if every component is nonnegative.
    pub fn lower_bound(&self) -> Option<f64> {
        self.components
            .iter()
            .all(|c| matches!(c, Component::Gamma { .. }))
            .then_some(0.0)
    }

    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(n, &mut rng)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n)
            .map(|_| {
                let mut u: f64 = rng.random();
                let mut pick = self.components.last().expect("nonempty mixture");
                for c in &self.components {
                    if u < c.weight() {
                        pick = c;
                        break;
                    }
                    u -= c.weight();
                }
                pick.sample(rng)
            })
            .collect()
    }

    /// Mode locations of the analytic density found on a `points`-point grid
    /// over the scenario window, refined by golden-section search.
    pub fn analytic_modes(&self, points: usize) -> Vec<f64> {
        let (lo, hi) = self.window;
        let step = (hi - lo) / (points - 1) as f64;
        let ys: Vec<f64> = (0..points)
            .map(|i| {
                let x = lo + i as f64 * step;
                // the boundary value of a shape-1 gamma is finite; use it
                if i == 0 && self.lower_bound().is_some() {
                    self.pdf(0.0)
                } else {
                    self.pdf(x)
                }
            })
            .collect();
        let mut modes = Vec::new();
        if self.lower_bound().is_some() && ys[0] > ys[1] {
            modes.push(lo);
        }
        let mut i = 1;
        while i + 1 < points {
            if ys[i] > ys[i - 1] {
                let mut j = i;
                while j + 1 < points && ys[j + 1] == ys[i] {
                    j += 1;
                }
                if j + 1 < points && ys[j + 1] < ys[i] {
                    let a = lo + (i - 1) as f64 * step;
                    let b = lo + (j + 1) as f64 * step;
                    modes.push(golden_max(|x| self.pdf(x), a, b));
                }
                i = j + 1;
            } else {
                i += 1;
            }
        }
        modes
    }
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-10 * (1.0 + a.abs() + b.abs()) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
