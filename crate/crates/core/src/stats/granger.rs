//! Bivariate linear Granger causality: does the past of `x` improve a linear
//! autoregressive prediction of `y`?

use serde::{Deserialize, Serialize};

use super::ols::ols;
use super::special::f_distribution_sf;
use super::StatsError;

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_LAG: usize = 1;

/// Minimum usable rows beyond `2 * lag`.
const MIN_EXTRA_ROWS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrangerResult {
    pub f_stat: f64,
    pub p_value: f64,
    /// Number of excluded lagged-`x` coefficients (the lag order).
    pub df_num: usize,
    /// `n_obs - 2 * lag - 1`.
    pub df_den: usize,
    pub lag: usize,
    pub alpha: f64,
    pub causal: bool,
    pub n_obs: usize,
    pub rss_restricted: f64,
    pub rss_unrestricted: f64,
    /// The unrestricted model fits exactly, so the F ratio is not finite.
    pub perfect_fit: bool,
}

/// Tests whether `x` Granger-causes `y` on dense, equal-length series.
pub fn granger_causes(x: &[f64], y: &[f64], lag: usize, alpha: f64) -> Result<GrangerResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let xo: Vec<Option<f64>> = x.iter().copied().map(Some).collect();
    let yo: Vec<Option<f64>> = y.iter().copied().map(Some).collect();
    granger_causes_partial(&xo, &yo, lag, alpha)
}

/// Same test on positionally aligned series with gaps.
///
/// Row `t` enters both regressions only when `y[t]` and every `x[t-i]`,
/// `y[t-i]` for `i in 1..=lag` are present.
///
/// Restricted: `y_t = c + Σ d_i y_{t-i}`. Unrestricted adds `Σ c_i x_{t-i}`.
/// `F = ((RSS_r - RSS_u) / lag) / (RSS_u / (n - 2 lag - 1))`.
pub fn granger_causes_partial(
    x: &[Option<f64>],
    y: &[Option<f64>],
    lag: usize,
    alpha: f64,
) -> Result<GrangerResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if lag == 0 {
        return Err(StatsError::InvalidParameter("Granger lag must be at least 1".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatsError::InvalidParameter(format!("alpha {alpha} outside (0, 1)")));
    }

    let mut response = Vec::new();
    let mut y_lags: Vec<Vec<f64>> = vec![Vec::new(); lag];
    let mut x_lags: Vec<Vec<f64>> = vec![Vec::new(); lag];
    'rows: for t in lag..y.len() {
        let Some(yt) = y[t] else { continue };
        let mut row_y = Vec::with_capacity(lag);
        let mut row_x = Vec::with_capacity(lag);
        for i in 1..=lag {
            match (y[t - i], x[t - i]) {
                (Some(yv), Some(xv)) => {
                    row_y.push(yv);
                    row_x.push(xv);
                }
                _ => continue 'rows,
            }
        }
        response.push(yt);
        for i in 0..lag {
            y_lags[i].push(row_y[i]);
            x_lags[i].push(row_x[i]);
        }
    }

    let n = response.len();
    let needed = 2 * lag + MIN_EXTRA_ROWS;
    if n < needed {
        return Err(StatsError::InsufficientData { needed, got: n });
    }

    let restricted = ols(&y_lags, &response)?;
    let mut full_design = y_lags;
    full_design.extend(x_lags);
    let unrestricted = ols(&full_design, &response)?;

    let df_num = lag;
    let df_den = n - 2 * lag - 1;
    let (rss_r, rss_u) = (restricted.rss, unrestricted.rss);

    let mean = response.iter().sum::<f64>() / n as f64;
    let tss: f64 = response.iter().map(|v| (v - mean) * (v - mean)).sum();
    // exact-fit threshold relative to the response's own spread
    let negligible = |rss: f64| rss <= 1e-24 * tss.max(f64::MIN_POSITIVE);

    let (f_stat, p_value, perfect_fit) = if negligible(rss_u) {
        if negligible(rss_r) {
            // the lagged-y model is already exact; x cannot add anything
            (0.0, 1.0, true)
        } else {
            (f64::INFINITY, 0.0, true)
        }
    } else {
        let f = (((rss_r - rss_u) / df_num as f64) / (rss_u / df_den as f64)).max(0.0);
        (f, f_distribution_sf(f, df_num, df_den)?, false)
    };

    Ok(GrangerResult {
        f_stat,
        p_value,
        df_num,
        df_den,
        lag,
        alpha,
        causal: p_value < alpha,
        n_obs: n,
        rss_restricted: rss_r,
        rss_unrestricted: rss_u,
        perfect_fit,
    })
}

/// First differences; a difference is missing when either endpoint is.
pub fn difference(series: &[Option<f64>]) -> Vec<Option<f64>> {
    let mut out = vec![None; series.len()];
    for t in 1..series.len() {
        if let (Some(a), Some(b)) = (series[t - 1], series[t]) {
            out[t] = Some(b - a);
        }
    }
    out
}
