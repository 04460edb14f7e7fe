//! Nearest-neighbour (Kozachenko–Leonenko) differential entropy, conditional
//! entropy by the chain rule, and the uncertainty coefficient built on them.
//!
//! All entropies are in nats. Distances use the max-norm, whose unit ball in
//! `d` dimensions has volume `2^d`.

use serde::{Deserialize, Serialize};

use super::knn::KdTree;
use super::special::digamma;
use super::StatsError;
use crate::series::AlignedPairs;

pub const DEFAULT_K: usize = 3;
pub const MAX_K: usize = 20;
/// Zero neighbour distances (duplicate points) are raised to this before the log.
pub const DISTANCE_FLOOR: f64 = 1e-12;
/// Absolute floor on `H(y)` below which the uncertainty coefficient is not trusted.
pub const DEFAULT_MIN_ENTROPY: f64 = 1e-6;
/// `H(y)` must also exceed this many standard errors of its own estimate.
pub const ENTROPY_SE_MULTIPLIER: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub value: f64,
    pub k: usize,
    pub n: usize,
    pub dim: usize,
    /// Sample standard deviation of the per-point log-volume terms over √n.
    pub std_error: f64,
    /// Zero neighbour distances raised to [`DISTANCE_FLOOR`]. Each one pulls the
    /// estimate down by about `(d/n)·27.6` nats.
    pub floored: usize,
}

fn check_k(k: usize) -> Result<(), StatsError> {
    if (1..=MAX_K).contains(&k) {
        Ok(())
    } else {
        Err(StatsError::InvalidParameter(format!("k = {k} outside 1..={MAX_K}")))
    }
}

/// Kozachenko–Leonenko estimate for `n` points of dimension `dim`, stored row-major.
///
/// `Ĥ = ψ(n) − ψ(k) + d·ln 2 + (d/n) Σ ln ε_i`, where `ε_i` is the max-norm
/// distance from point `i` to its `k`-th nearest neighbour.
pub fn kl_entropy(samples: &[f64], dim: usize, k: usize) -> Result<EntropyEstimate, StatsError> {
    check_k(k)?;
    if dim == 0 || !samples.len().is_multiple_of(dim) {
        return Err(StatsError::InvalidParameter(format!(
            "{} coordinates do not form points of dimension {dim}",
            samples.len()
        )));
    }
    let n = samples.len() / dim;
    if n < k + 2 {
        return Err(StatsError::InsufficientData { needed: k + 2, got: n });
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }

    let tree = KdTree::new(samples, dim);
    let mut zeros = 0usize;
    let logs: Vec<f64> = (0..n)
        .map(|i| {
            let eps = tree.kth_neighbor_distance(i, k).expect("n > k");
            if eps == 0.0 {
                zeros += 1;
            }
            eps.max(DISTANCE_FLOOR).ln()
        })
        .collect();
    if 2 * zeros > n {
        return Err(StatsError::DegenerateSample);
    }

    let d = dim as f64;
    let nf = n as f64;
    let mean_log = logs.iter().sum::<f64>() / nf;
    let var = logs.iter().map(|l| (l - mean_log) * (l - mean_log)).sum::<f64>() / (nf - 1.0);
    let value = digamma(nf)? - digamma(k as f64)? + d * std::f64::consts::LN_2 + d * mean_log;
    Ok(EntropyEstimate { value, k, n, dim, std_error: d * (var / nf).sqrt(), floored: zeros })
}

pub fn kl_entropy_1d(samples: &[f64], k: usize) -> Result<EntropyEstimate, StatsError> {
    kl_entropy(samples, 1, k)
}

fn joint(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).flat_map(|(&a, &b)| [a, b]).collect()
}

/// `Ĥ(y | x) = Ĥ(x, y) − Ĥ(x)`.
pub fn conditional_entropy(y: &[f64], x: &[f64], k: usize) -> Result<EntropyEstimate, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let h_xy = kl_entropy(&joint(x, y), 2, k)?;
    let h_x = kl_entropy(x, 1, k)?;
    Ok(EntropyEstimate {
        value: h_xy.value - h_x.value,
        k,
        n: y.len(),
        dim: 1,
        std_error: h_xy.std_error.hypot(h_x.std_error),
        floored: h_xy.floored + h_x.floored,
    })
}

/// Mutual information `I(x; y) = H(x) + H(y) − H(x, y)` estimated on z-scored
/// copies of both series.
///
/// `I` does not depend on the scale of either variable, but the max-norm
/// neighbourhoods of the joint estimate do: with raw inputs whose spreads
/// differ by orders of magnitude the joint neighbours are chosen by one
/// coordinate alone and the estimate is biased far below zero at small `n`.
/// Returns the estimate and the number of floored zero distances.
pub fn mutual_information(x: &[f64], y: &[f64], k: usize) -> Result<(f64, usize), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let zx = standardize(x)?;
    let zy = standardize(y)?;
    let h_x = kl_entropy(&zx, 1, k)?;
    let h_y = kl_entropy(&zy, 1, k)?;
    let h_xy = kl_entropy(&joint(&zx, &zy), 2, k)?;
    Ok((h_x.value + h_y.value - h_xy.value, h_x.floored + h_y.floored + h_xy.floored))
}

fn standardize(v: &[f64]) -> Result<Vec<f64>, StatsError> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let sd = (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt();
    if sd == 0.0 || !sd.is_finite() {
        return Err(StatsError::DegenerateSeries);
    }
    Ok(v.iter().map(|x| (x - mean) / sd).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UCoeffResult {
    /// `(H(y) − H(y|x)) / H(y)`; may be non-finite when `H(y)` is zero.
    pub u: f64,
    /// Entropy of the raw response.
    pub h_y: f64,
    /// `H(y) − I(x; y)`.
    pub h_y_given_x: f64,
    /// Numerator `H(y) − H(y|x)`: the estimated mutual information in nats.
    pub mutual_information: f64,
    /// False when `H(y)` is negative or indistinguishable from zero.
    pub valid: bool,
    /// Floored zero distances across the underlying estimates.
    pub floored_distances: usize,
    pub k: usize,
    pub n: usize,
}

/// Uncertainty coefficient of `y` given `x` over already-lagged pairs.
pub fn uncertainty_coefficient(pairs: &AlignedPairs, k: usize) -> Result<UCoeffResult, StatsError> {
    uncertainty_coefficient_xy(&pairs.xs(), &pairs.ys(), k, DEFAULT_MIN_ENTROPY)
}

/// `H(y)` comes from the raw response so `u` keeps its units; the numerator
/// is [`mutual_information`]. Validity requires `H(y) > max(min_entropy, 2·SE(H(y)))`.
pub fn uncertainty_coefficient_xy(
    x: &[f64],
    y: &[f64],
    k: usize,
    min_entropy: f64,
) -> Result<UCoeffResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let h_y = kl_entropy(y, 1, k)?;
    let (mi, floored) = mutual_information(x, y, k)?;
    let floor = min_entropy.max(ENTROPY_SE_MULTIPLIER * h_y.std_error);
    Ok(UCoeffResult {
        u: mi / h_y.value,
        h_y: h_y.value,
        h_y_given_x: h_y.value - mi,
        mutual_information: mi,
        valid: h_y.value > floor,
        floored_distances: h_y.floored + floored,
        k,
        n: y.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn gaussian(seed: u64, n: usize, sd: f64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = Normal::new(0.0, sd).unwrap();
        (0..n).map(|_| d.sample(&mut rng)).collect()
    }

    fn uniform(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random::<f64>()).collect()
    }

    const GAUSS_H: f64 = 1.418_938_533_204_672_7; // ½ ln(2πe)

    #[test]
    fn uniform_and_gaussian_single_seed() {
        let u = kl_entropy_1d(&uniform(1, 10_000), 3).unwrap();
        assert!(u.value.abs() < 0.05, "{}", u.value);
        let g = kl_entropy_1d(&gaussian(2, 10_000, 1.0), 3).unwrap();
        assert!((g.value - GAUSS_H).abs() < 0.05, "{}", g.value);
    }

    #[test]
    fn bivariate_gaussian() {
        // independent N(0,1)²: H = 2 · ½ ln(2πe)
        let x = gaussian(3, 5000, 1.0);
        let y = gaussian(4, 5000, 1.0);
        let h = kl_entropy(&joint(&x, &y), 2, 3).unwrap();
        assert!((h.value - 2.0 * GAUSS_H).abs() < 0.08, "{}", h.value);
    }

    #[test]
    fn conditional_entropy_cases() {
        let x = gaussian(5, 10_000, 1.0);
        let y = gaussian(6, 10_000, 1.0);
        let hy = kl_entropy_1d(&y, 3).unwrap().value;
        let hyx = conditional_entropy(&y, &x, 3).unwrap().value;
        assert!((hy - hyx).abs() < 0.05, "{hy} vs {hyx}");

        let e = gaussian(7, 10_000, 0.01);
        let y: Vec<f64> = x.iter().zip(&e).map(|(a, b)| a + b).collect();
        let want = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * 1e-4).ln();
        let got = conditional_entropy(&y, &x, 3).unwrap().value;
        assert!((got - want).abs() < 0.1, "{got} vs {want}");
    }

    #[test]
    fn errors() {
        assert_eq!(kl_entropy_1d(&[1.0; 100], 3), Err(StatsError::DegenerateSample));
        assert_eq!(kl_entropy_1d(&[1.0, 2.0, 3.0, 4.0], 3), Err(StatsError::InsufficientData { needed: 5, got: 4 }));
        assert!(kl_entropy_1d(&[1.0, 2.0, 3.0, 4.0, 5.0], 0).is_err());
        assert!(kl_entropy_1d(&[1.0, 2.0, 3.0, 4.0, 5.0], 21).is_err());
        assert!(kl_entropy(&[1.0, 2.0, 3.0], 2, 1).is_err());
        assert_eq!(kl_entropy_1d(&[1.0, f64::NAN, 3.0, 4.0, 5.0, 6.0], 1), Err(StatsError::NonFinite));
        assert!(matches!(
            conditional_entropy(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0], 3),
            Err(StatsError::InsufficientData { .. })
        ));
    }

    #[test]
    fn partial_duplicates_are_floored_not_fatal() {
        // 40% duplicates: below the degeneracy cutoff
        let mut v: Vec<f64> = (0..60).map(|i| i as f64 * 0.37).collect();
        v.extend(std::iter::repeat_n(5.0, 40));
        let h = kl_entropy_1d(&v, 1).unwrap();
        assert!(h.value.is_finite());
        assert_eq!(h.floored, 40);
    }

    #[test]
    fn independent_u_is_near_zero() {
        let x = gaussian(10, 10_000, 1.0);
        let y = gaussian(11, 10_000, 1.0);
        let u = uncertainty_coefficient(&AlignedPairs::from_values(x.into_iter().zip(y).collect(), 1), 3).unwrap();
        assert!(u.valid);
        assert!(u.u.abs() <= 0.05, "{}", u.u);
        assert!((u.mutual_information - (u.h_y - u.h_y_given_x)).abs() < 1e-15);
    }

    #[test]
    fn uniform_response_trips_validity() {
        let x = gaussian(12, 10_000, 1.0);
        let y = uniform(13, 10_000);
        let u = uncertainty_coefficient(&AlignedPairs::from_values(x.into_iter().zip(y).collect(), 1), 3).unwrap();
        assert!(!u.valid, "h_y = {}", u.h_y);
    }

    #[test]
    fn mismatched_scales_do_not_bias_mutual_information() {
        // independent series, spreads 0.01 and 20
        let mut total = 0.0;
        for seed in 0..20 {
            let x: Vec<f64> = gaussian(100 + seed, 61, 0.01);
            let y: Vec<f64> = gaussian(200 + seed, 61, 20.0).iter().map(|v| 50.0 + v).collect();
            total += mutual_information(&x, &y, 3).unwrap().0;
        }
        assert!((total / 20.0).abs() < 0.1, "{}", total / 20.0);
    }

    #[test]
    fn dependent_mutual_information_matches_gaussian_formula() {
        // I = -½ ln(1 - ρ²) for a bivariate normal with correlation ρ = 0.8
        let x = gaussian(31, 10_000, 1.0);
        let e = gaussian(32, 10_000, 0.6);
        let y: Vec<f64> = x.iter().zip(&e).map(|(a, b)| 0.8 * a + b).collect();
        let want = -0.5 * (1.0f64 - 0.64).ln();
        let (got, floored) = mutual_information(&x, &y, 3).unwrap();
        assert_eq!(floored, 0);
        assert!((got - want).abs() < 0.03, "{got} vs {want}");
    }

    #[test]
    fn constant_input_is_degenerate() {
        let x = vec![1.0; 50];
        let y = gaussian(1, 50, 1.0);
        assert_eq!(mutual_information(&x, &y, 3), Err(StatsError::DegenerateSeries));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn u_ignores_rescaling_of_x(seed in 0u64..1000, a in 0.01f64..100.0, b in -1e3f64..1e3) {
            let x = gaussian(seed, 200, 1.0);
            let y = gaussian(seed + 1, 200, 1.0);
            let base = uncertainty_coefficient_xy(&x, &y, 3, DEFAULT_MIN_ENTROPY).unwrap();
            let xs: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            let scaled = uncertainty_coefficient_xy(&xs, &y, 3, DEFAULT_MIN_ENTROPY).unwrap();
            prop_assert!((base.u - scaled.u).abs() < 1e-9);
        }

        #[test]
        fn translation_and_scaling(seed in 0u64..1000, c in -1e3f64..1e3, a in prop_oneof![-20.0f64..-0.05, 0.05f64..20.0]) {
            // integer-valued support keeps translated distances exact
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let base: Vec<f64> = (0..300).map(|_| rng.random_range(-500i32..500) as f64).collect();
            let h0 = kl_entropy_1d(&base, 3).unwrap().value;
            let shifted: Vec<f64> = base.iter().map(|v| v + c.round()).collect();
            prop_assert_eq!(kl_entropy_1d(&shifted, 3).unwrap().value, h0);

            let g = gaussian(seed, 300, 1.0);
            let pts = joint(&g, &gaussian(seed + 1, 300, 1.0));
            let h2 = kl_entropy(&pts, 2, 3).unwrap().value;
            let scaled: Vec<f64> = pts.iter().map(|v| a * v).collect();
            let h2s = kl_entropy(&scaled, 2, 3).unwrap().value;
            prop_assert!((h2s - (h2 + 2.0 * a.abs().ln())).abs() < 1e-9);
        }
    }
}
