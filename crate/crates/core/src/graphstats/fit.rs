use serde::{Deserialize, Serialize};

use super::DegreeHistogram;
use crate::special::{hurwitz_zeta, kolmogorov_sf};

/// Fewest tail observations accepted by [`tail_exponent_fit`].
pub const MIN_TAIL: f64 = 50.0;
/// Goodness-of-fit p-values below this flag the power law as implausible.
pub const GOF_LEVEL: f64 = 0.01;

const S_MIN: f64 = 1.0 + 1e-6;
const S_MAX: f64 = 40.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("only {found} observations with k >= {k_min}, need at least {needed}")]
    InsufficientTail { k_min: u64, found: f64, needed: f64 },
    #[error("k_min must be at least 1")]
    ZeroKMin,
}

/// Power-law tail estimates for `P(D = k) ∝ k^{-γ}`, `k ≥ k_min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub k_min: u64,
    /// Total weight of observations at or above `k_min`.
    pub n_tail: f64,
    /// Discrete maximum-likelihood exponent.
    pub mle: f64,
    pub mle_stderr: f64,
    /// `1 - slope` of the log-log complementary CDF regression.
    pub ls: f64,
    pub ls_stderr: f64,
    /// Kolmogorov–Smirnov distance between the tail and the fitted law.
    pub ks_statistic: f64,
    /// Asymptotic KS p-value (conservative since `γ` is estimated).
    pub ks_p_value: f64,
    /// `ks_p_value < GOF_LEVEL`.
    pub rejected: bool,
}

/// Fits the tail of a degree histogram.
pub fn tail_exponent_fit(hist: &DegreeHistogram, k_min: u64) -> Result<TailFit, FitError> {
    fit_weighted(&hist.weighted(), k_min)
}

/// Fits `(k, weight)` frequencies; weights act as observation counts.
pub fn fit_weighted(data: &[(u64, f64)], k_min: u64) -> Result<TailFit, FitError> {
    if k_min == 0 {
        return Err(FitError::ZeroKMin);
    }
    let mut tail: Vec<(u64, f64)> = data
        .iter()
        .copied()
        .filter(|&(k, w)| k >= k_min && w > 0.0)
        .collect();
    tail.sort_unstable_by_key(|p| p.0);
    let n: f64 = tail.iter().map(|p| p.1).sum();
    if n < MIN_TAIL {
        return Err(FitError::InsufficientTail {
            k_min,
            found: n,
            needed: MIN_TAIL,
        });
    }
    let q = k_min as f64;
    let mean_ln = tail.iter().map(|&(k, w)| w * (k as f64).ln()).sum::<f64>() / n;
    let nll = |s: f64| s * mean_ln + hurwitz_zeta(s, q).ln();
    let mle = golden_min(nll, S_MIN, S_MAX, 1e-10);
    let h = 1e-4 * mle.max(1.0);
    let curvature = (nll(mle + h) - 2.0 * nll(mle) + nll((mle - h).max(S_MIN))) / (h * h);
    let mle_stderr = if curvature > 0.0 {
        1.0 / (n * curvature).sqrt()
    } else {
        f64::INFINITY
    };

    let (ls, ls_stderr) = ccdf_regression(&tail, n);

    let z = hurwitz_zeta(mle, q);
    let mut cum = 0.0;
    let mut ks: f64 = 0.0;
    for &(k, w) in &tail {
        // empirical and model CDF just below and at k
        let model_below = 1.0 - hurwitz_zeta(mle, k as f64) / z;
        let model_at = 1.0 - hurwitz_zeta(mle, k as f64 + 1.0) / z;
        ks = ks.max((cum / n - model_below).abs());
        cum += w;
        ks = ks.max((cum / n - model_at).abs());
    }
    let ks_p_value = kolmogorov_sf(n.sqrt() * ks);
    Ok(TailFit {
        k_min,
        n_tail: n,
        mle,
        mle_stderr,
        ls,
        ls_stderr,
        ks_statistic: ks,
        ks_p_value,
        rejected: ks_p_value < GOF_LEVEL,
    })
}

/// Least squares of `ln P(D ≥ k)` on `ln k` over the tail, keeping points
/// with at least 10 observations at or above them.
fn ccdf_regression(tail: &[(u64, f64)], n: f64) -> (f64, f64) {
    let mut above = n;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(k, w) in tail {
        if above < 10.0 {
            break;
        }
        xs.push((k as f64).ln());
        ys.push((above / n).ln());
        above -= w;
    }
    match linear_fit(&xs, &ys) {
        Some(f) => (1.0 - f.slope, f.slope_stderr),
        None => (f64::NAN, f64::NAN),
    }
}

/// Ordinary least squares `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

/// Needs at least two distinct `x`; the standard error needs three points.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if n > 2 {
        let rss: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        (rss / (nf - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    Some(LinearFit {
        slope,
        intercept,
        slope_stderr,
    })
}

/// Minimizer of a unimodal function on `[a, b]`.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
