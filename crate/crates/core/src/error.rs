use std::fmt;

use serde::Serialize;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// One violated configuration bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldError {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("input sample is empty")]
    EmptyInput,
    #[error("exponential reference requires nonnegative samples, found {0}")]
    NegativeSampleForExponential(f64),
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("sample contains a non-finite value at position {0}")]
    NonFiniteSample(usize),
    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("maximum-entropy solver did not converge after {iterations} iterations (moment residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("mode sets carry the wrong space tags (expected u-space then x-space)")]
    InconsistentSpaces,
    #[error("accept-reject acceptance rate {rate:.2e} is below 1e-3")]
    AcceptanceStall { rate: f64 },
    #[error("mode {mode} was matched in only {rate:.1}% of replicates")]
    TooFewMatches { mode: usize, rate: f64 },
    #[error("the original fit reported no modes")]
    NoModes,
    #[error("invalid configuration: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Validation(Vec<FieldError>),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable code, used by the CLI's structured stderr output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyInput => "empty_input",
            Error::NegativeSampleForExponential(_) => "negative_sample_for_exponential",
            Error::DegenerateSample(_) => "degenerate_sample",
            Error::NonFiniteSample(_) => "non_finite_sample",
            Error::Domain { .. } => "domain_error",
            Error::NonConvergence { .. } => "non_convergence",
            Error::InconsistentSpaces => "inconsistent_spaces",
            Error::AcceptanceStall { .. } => "acceptance_stall",
            Error::TooFewMatches { .. } => "too_few_matches",
            Error::NoModes => "no_modes",
            Error::Validation(_) => "validation_error",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Parse(_) => "parse_error",
            Error::Io(_) => "io_error",
            Error::Csv(_) => "csv_error",
            Error::Json(_) => "json_error",
        }
    }
}

pub(crate) fn check_unit_open(what: &'static str, u: f64) -> Result<()> {
    if u > 0.0 && u < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value: u,
            domain: "(0, 1)",
        })
    }
}

pub(crate) fn check_unit_closed(what: &'static str, u: f64) -> Result<()> {
    if (0.0..=1.0).contains(&u) {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value: u,
            domain: "[0, 1]",
        })
    }
}
