use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::series::AlignedPairs;

/// Magnitude above which a correlation is reported as significant.
pub const DEFAULT_THRESHOLD: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub r: f64,
    pub n: usize,
    pub significant: bool,
    pub threshold: f64,
}

/// Pearson's r over `(x, y)` slices using mean-subtracted (two-pass) sums.
pub fn pearson_xy(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(StatsError::InsufficientData { needed: 3, got: n });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n as f64;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::DegenerateSeries);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

pub fn pearson(pairs: &AlignedPairs) -> Result<f64, StatsError> {
    pearson_xy(&pairs.xs(), &pairs.ys())
}

/// `|r| > threshold`, strictly.
pub fn classify(r: f64, threshold: f64) -> bool {
    r.abs() > threshold
}

pub fn correlate(pairs: &AlignedPairs, threshold: f64) -> Result<CorrelationResult, StatsError> {
    let r = pearson(pairs)?;
    Ok(CorrelationResult { r, n: pairs.n(), significant: classify(r, threshold), threshold })
}
