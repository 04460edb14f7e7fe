//! Dependence statistics between a lagged sentiment score and a price series.

pub mod entropy;
pub mod granger;
pub mod knn;
pub mod ols;
pub mod pearson;
pub mod special;

use thiserror::Error;

pub use entropy::{
    conditional_entropy, kl_entropy, mutual_information, uncertainty_coefficient, EntropyEstimate, UCoeffResult,
};
pub use granger::{granger_causes, granger_causes_partial, GrangerResult};
pub use ols::{ols, OlsFit};
pub use pearson::{classify, correlate, pearson, pearson_xy, CorrelationResult};
pub use special::{digamma, f_distribution_sf, ln_gamma, regularized_incomplete_beta};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("series is constant")]
    DegenerateSeries,
    #[error("design matrix is rank deficient (condition estimate {condition:e})")]
    RankDeficient { condition: f64 },
    #[error("more than half of the nearest-neighbour distances are zero")]
    DegenerateSample,
    #[error("input contains non-finite values")]
    NonFinite,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("argument outside the function's domain: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl StatsError {
    /// Stable short name used as a reason code in reports.
    pub fn code(&self) -> &'static str {
        match self {
            StatsError::InsufficientData { .. } => "InsufficientData",
            StatsError::DegenerateSeries => "DegenerateSeries",
            StatsError::RankDeficient { .. } => "RankDeficient",
            StatsError::DegenerateSample => "DegenerateSample",
            StatsError::NonFinite => "NonFinite",
            StatsError::LengthMismatch(..) => "LengthMismatch",
            StatsError::Domain(_) => "DomainError",
            StatsError::InvalidParameter(_) => "InvalidParameter",
        }
    }
}
