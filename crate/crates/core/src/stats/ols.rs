//! Ordinary least squares by Householder QR.

use super::StatsError;

/// Condition-number estimate above which a design is treated as singular.
pub const MAX_CONDITION: f64 = 1e10;

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    /// Intercept first, then one coefficient per regressor column.
    pub coefficients: Vec<f64>,
    pub rss: f64,
    pub n_obs: usize,
}

/// Fits `response ≈ b0 + Σ b_j · regressors[j]`.
///
/// `regressors` holds one column per regressor, each of the response's
/// length. An intercept column is always added. Columns are scaled to unit
/// norm before factorisation; the rank check uses the ratio of the largest
/// to smallest |R_ii| of the scaled system.
pub fn ols(regressors: &[Vec<f64>], response: &[f64]) -> Result<OlsFit, StatsError> {
    let n = response.len();
    let p = regressors.len() + 1;
    if let Some(col) = regressors.iter().find(|c| c.len() != n) {
        return Err(StatsError::LengthMismatch(col.len(), n));
    }
    if n < p + 1 {
        return Err(StatsError::InsufficientData { needed: p + 1, got: n });
    }
    if response.iter().chain(regressors.iter().flatten()).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }

    // column-major design with unit-norm columns
    let mut a: Vec<Vec<f64>> = Vec::with_capacity(p);
    a.push(vec![1.0; n]);
    a.extend(regressors.iter().cloned());
    let mut scale = vec![0.0; p];
    for (j, col) in a.iter_mut().enumerate() {
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(StatsError::RankDeficient { condition: f64::INFINITY });
        }
        col.iter_mut().for_each(|v| *v /= norm);
        scale[j] = norm;
    }
    let mut qty = response.to_vec();

    for k in 0..p {
        let norm = a[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(StatsError::RankDeficient { condition: f64::INFINITY });
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        // Householder vector v = x - alpha e1
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            let reflect = |col: &mut [f64]| {
                let dot: f64 = v.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
                let f = 2.0 * dot / vnorm2;
                for (c, vi) in col.iter_mut().zip(&v) {
                    *c -= f * vi;
                }
            };
            for col in a.iter_mut().skip(k + 1) {
                reflect(&mut col[k..]);
            }
            reflect(&mut qty[k..]);
        }
        a[k][k] = alpha;
    }

    let diag: Vec<f64> = (0..p).map(|k| a[k][k].abs()).collect();
    let max = diag.iter().cloned().fold(0.0, f64::max);
    let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = if min == 0.0 { f64::INFINITY } else { max / min };
    if condition > MAX_CONDITION {
        return Err(StatsError::RankDeficient { condition });
    }

    // back substitution on R b = Qᵀy (R is upper triangular, a[j][i] = R[i][j])
    let mut coef = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = qty[i];
        for j in i + 1..p {
            s -= a[j][i] * coef[j];
        }
        coef[i] = s / a[i][i];
    }
    let rss = qty[p..].iter().map(|v| v * v).sum();
    let coefficients = coef.iter().zip(&scale).map(|(c, s)| c / s).collect();
    Ok(OlsFit { coefficients, rss, n_obs: n })
}
