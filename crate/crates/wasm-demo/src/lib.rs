//! Browser bindings for three interactive views: a lagged-dependence
//! explorer, an entropy-estimator explorer and an F-distribution tail curve.
//!
//! Each exported function returns a JSON string; errors come back as
//! `{"error": "..."}` so the page never has to catch exceptions.

use serde::Serialize;
use wasm_bindgen::prelude::*;
use xfsa_core::stats::entropy::{kl_entropy_1d, uncertainty_coefficient_xy, DEFAULT_MIN_ENTROPY};
use xfsa_core::stats::{f_distribution_sf, granger_causes, pearson_xy};
use xfsa_core::synth::{analytic_entropy, lagged_linear_pair, samples};

const MAX_POINTS: usize = 20_000;

#[derive(Debug, Serialize)]
pub struct DependenceView {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub r: Option<f64>,
    pub r_significant: Option<bool>,
    pub granger_f: Option<f64>,
    pub granger_p: Option<f64>,
    pub granger_causal: Option<bool>,
    pub u: Option<f64>,
    pub u_valid: Option<bool>,
    pub mutual_information: Option<f64>,
    pub notes: Vec<String>,
}

/// Simulates `y_t = coupling · x_{t-1} + noise` and runs all three statistics
/// with sentiment lagged one step behind the response.
pub fn dependence_view(n: usize, coupling: f64, noise_sd: f64, k: usize, seed: u64) -> Result<DependenceView, String> {
    if !(5..=MAX_POINTS).contains(&n) {
        return Err(format!("n must be in 5..={MAX_POINTS}"));
    }
    if !(noise_sd >= 0.0 && noise_sd.is_finite() && coupling.is_finite()) {
        return Err("coupling and noise must be finite, noise non-negative".into());
    }
    let (x, y) = lagged_linear_pair(n, coupling, noise_sd, seed);
    let (xl, yl) = (&x[..n - 1], &y[1..]);
    let mut view = DependenceView {
        x: x.clone(),
        y: y.clone(),
        r: None,
        r_significant: None,
        granger_f: None,
        granger_p: None,
        granger_causal: None,
        u: None,
        u_valid: None,
        mutual_information: None,
        notes: Vec::new(),
    };
    match pearson_xy(xl, yl) {
        Ok(r) => {
            view.r = Some(r);
            view.r_significant = Some(xfsa_core::stats::classify(r, xfsa_core::stats::pearson::DEFAULT_THRESHOLD));
        }
        Err(e) => view.notes.push(format!("r: {e}")),
    }
    match granger_causes(&x, &y, 1, 0.05) {
        Ok(g) => {
            view.granger_f = Some(g.f_stat).filter(|f| f.is_finite());
            view.granger_p = Some(g.p_value);
            view.granger_causal = Some(g.causal);
            if g.perfect_fit {
                view.notes.push("Granger: exact fit".into());
            }
        }
        Err(e) => view.notes.push(format!("Granger: {e}")),
    }
    match uncertainty_coefficient_xy(xl, yl, k, DEFAULT_MIN_ENTROPY) {
        Ok(u) => {
            view.u = Some(u.u).filter(|v| v.is_finite());
            view.u_valid = Some(u.valid);
            view.mutual_information = Some(u.mutual_information);
        }
        Err(e) => view.notes.push(format!("U: {e}")),
    }
    Ok(view)
}

#[derive(Debug, Serialize)]
pub struct EntropyView {
    pub estimate: f64,
    pub analytic: f64,
    pub std_error: f64,
    pub samples: Vec<f64>,
}

/// Nearest-neighbour entropy of `n` draws from a named distribution next to its closed form.
pub fn entropy_view(distribution: &str, n: usize, k: usize, seed: u64) -> Result<EntropyView, String> {
    if !(5..=MAX_POINTS).contains(&n) {
        return Err(format!("n must be in 5..={MAX_POINTS}"));
    }
    let analytic = analytic_entropy(distribution).ok_or_else(|| format!("unknown distribution '{distribution}'"))?;
    let s = samples(distribution, n, seed).expect("known distribution");
    let est = kl_entropy_1d(&s, k).map_err(|e| e.to_string())?;
    Ok(EntropyView { estimate: est.value, analytic, std_error: est.std_error, samples: s })
}

#[derive(Debug, Serialize)]
pub struct FTailView {
    pub f: Vec<f64>,
    pub p: Vec<f64>,
    /// Smallest `f` with upper tail below 0.05.
    pub critical_05: f64,
}

/// Upper-tail probability of F(d1, d2) on an even grid over `[0, f_max]`.
pub fn f_tail_view(d1: usize, d2: usize, f_max: f64, points: usize) -> Result<FTailView, String> {
    if d1 == 0 || d2 == 0 {
        return Err("degrees of freedom must be at least 1".into());
    }
    if !(f_max > 0.0 && f_max.is_finite()) || !(2..=2000).contains(&points) {
        return Err("need f_max > 0 and 2..=2000 points".into());
    }
    let sf = |f: f64| f_distribution_sf(f, d1, d2).map_err(|e| e.to_string());
    let mut fs = Vec::with_capacity(points);
    let mut ps = Vec::with_capacity(points);
    for i in 0..points {
        let f = f_max * i as f64 / (points - 1) as f64;
        fs.push(f);
        ps.push(sf(f)?);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while sf(hi)? > 0.05 {
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if sf(mid)? > 0.05 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(FTailView { f: fs, p: ps, critical_05: hi })
}

fn to_json<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| error_json(&e.to_string())),
        Err(e) => error_json(&e),
    }
}

fn error_json(msg: &str) -> String {
    serde_json::json!({ "error": msg }).to_string()
}

#[wasm_bindgen]
pub fn explore_dependence(n: usize, coupling: f64, noise_sd: f64, k: usize, seed: u32) -> String {
    to_json(dependence_view(n, coupling, noise_sd, k, seed as u64))
}

#[wasm_bindgen]
pub fn explore_entropy(distribution: &str, n: usize, k: usize, seed: u32) -> String {
    to_json(entropy_view(distribution, n, k, seed as u64))
}

#[wasm_bindgen]
pub fn f_tail_curve(d1: usize, d2: usize, f_max: f64, points: usize) -> String {
    to_json(f_tail_view(d1, d2, f_max, points))
}
