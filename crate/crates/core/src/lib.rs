//! Nonparametric mode identification through skew-G density modeling.
//!
//! An unknown density is written as `f(x) = g(x) · d(G(x))`: a unimodal
//! parametric reference `G` times a comparison density `d` on [0, 1]
//! expanded in orthonormal shifted Legendre polynomials. Modes are found in
//! both spaces and reconciled, and their locations get bootstrap standard
//! errors from accept-reject draws of the fitted density.
//!
//! The [`pipeline`] module ties the pieces together; [`batch`] and [`bench`]
//! run it at scale.

pub mod basis;
pub mod batch;
pub mod bench;
pub mod cli;
pub mod comparison;
pub mod config;
pub mod error;
pub mod inference;
pub mod io;
pub mod modes;
pub mod pipeline;
pub mod reference;
pub mod special;
pub mod stats;

pub use basis::{cd_kernel, lp_means, lp_score, shifted_legendre, LpCoefficients};
pub use comparison::EstimatorKind;
pub use comparison::{aic_select, fit_l2, fit_maxent, ComparisonDensity, SelectionResult};
pub use config::{EstimatorChoice, PipelineConfig, SelectionRule};
pub use error::{Error, Result};
pub use modes::{ModeSet, SkewGDensity, Space};
pub use pipeline::{fit_pipeline, LpFit, ModeReport};
pub use reference::{fit_reference, FamilyKind, FitMethod, ReferenceModel};
