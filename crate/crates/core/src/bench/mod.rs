//! Monte-Carlo comparison of mode-counting methods on scenarios D1–D8.

pub mod gmm;
pub mod kde;
pub mod scenario;
pub mod table;

pub use gmm::{gmm_bic_modes, GaussianMixture, GmmSelection};
pub use kde::{silverman_bandwidth, silverman_kde_modes};
pub use scenario::{Component, ScenarioId, ScenarioSpec};
pub use table::{run_benchmark, BenchCell, BenchConfig, BenchTable, Method};
