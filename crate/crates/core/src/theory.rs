//! Closed-form and numerical predictions of the model.

use serde::{Deserialize, Serialize};

use crate::kernel::KernelError;
use crate::process::ProcessParams;
use crate::scalar::Real;

/// Default truncation of the limit law.
pub const DEFAULT_K_MAX: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TheoryError {
    #[error("the limit law needs alpha > 2, got {0}")]
    AlphaTooSmall(f64),
    #[error("delta must satisfy δ > -m (m = {m}, delta = {delta})")]
    Delta { m: usize, delta: f64 },
    #[error("m must be at least 1")]
    ZeroM,
    #[error("k_max = {k_max} must be at least 2m = {two_m}")]
    KMaxTooSmall { k_max: usize, two_m: usize },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

fn check<T: Real>(m: usize, alpha: T, delta: T) -> Result<(), TheoryError> {
    if m == 0 {
        return Err(TheoryError::ZeroM);
    }
    if !(delta > -T::from_usize(m).unwrap()) {
        return Err(TheoryError::Delta {
            m,
            delta: delta.as_f64(),
        });
    }
    if !(alpha > T::lit(2.0)) {
        return Err(TheoryError::AlphaTooSmall(alpha.as_f64()));
    }
    Ok(())
}

fn binomial<T: Real>(n: usize, k: usize) -> T {
    (0..k).fold(T::one(), |acc, i| {
        acc * T::from_usize(n - i).unwrap() / T::from_usize(i + 1).unwrap()
    })
}

/// Probability that a new vertex has degree `k` at insertion:
/// `C(m, k-m) (1-2/α)^{k-m} (2/α)^{2m-k}` for `m ≤ k ≤ 2m`, else 0.
pub fn selfloop_degree_pmf<T: Real>(m: usize, alpha: T, k: usize) -> T {
    if k < m || k > 2 * m {
        return T::zero();
    }
    let q = T::lit(2.0) / alpha;
    let p = T::one() - q;
    let j = k - m;
    binomial::<T>(m, j) * p.powi(j as i32) * q.powi((m - j) as i32)
}

/// The same expression with the exponent `2k - m` on `2/α`. It does not
/// define a probability law; kept to document the difference.
pub fn selfloop_degree_pmf_printed<T: Real>(m: usize, alpha: T, k: usize) -> T {
    if k < m || k > 2 * m {
        return T::zero();
    }
    let q = T::lit(2.0) / alpha;
    let j = k - m;
    binomial::<T>(m, j) * (T::one() - q).powi(j as i32) * q.powi((2 * k - m) as i32)
}

/// `1 + α(1 + δ/2m)`.
pub fn powerlaw_exponent<T: Real>(m: usize, alpha: T, delta: T) -> T {
    T::one() + alpha * (T::one() + delta / T::from_usize(2 * m).unwrap())
}

/// `Θ = (2m+δ)/2`.
pub fn theta<T: Real>(m: usize, delta: T) -> T {
    (T::from_usize(2 * m).unwrap() + delta) / T::lit(2.0)
}

/// Degree-growth exponent `a = m/(αΘ)`.
pub fn degree_growth_exponent<T: Real>(m: usize, alpha: T, delta: T) -> T {
    T::from_usize(m).unwrap() / (alpha * theta(m, delta))
}

/// `E[T_σ(U)] = I_n (2m+δ) σ`.
pub fn expected_total_attraction<T: Real>(params: &ProcessParams<T>, sigma: usize) -> Result<T, TheoryError> {
    let i_n = params.kernel.attractiveness_integral()?;
    Ok(i_n * (T::from_usize(2 * params.m).unwrap() + params.delta) * T::from_usize(sigma).unwrap())
}

/// Deviation scale `Θ I_n (σ^{2/α} + σ^{1/2} ln σ) ln n`.
pub fn concentration_band<T: Real>(params: &ProcessParams<T>, sigma: usize) -> Result<T, TheoryError> {
    let i_n = params.kernel.attractiveness_integral()?;
    let s = T::from_usize(sigma).unwrap();
    let n = T::from_usize(params.n).unwrap();
    let growth = s.powf(T::lit(2.0) / params.alpha) + s.sqrt() * s.ln();
    Ok(theta(params.m, params.delta) * i_n * growth * n.ln())
}

/// Limit law `p_k` of the degree of a uniform vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitLaw<T> {
    pub m: usize,
    /// `p[k]` for `0 ≤ k ≤ k_max`; zero below `m`.
    pub p: Vec<T>,
    /// `1 - Σ_{k ≤ k_max} p_k`.
    pub deficit: T,
}

impl<T: Real> LimitLaw<T> {
    pub fn k_max(&self) -> usize {
        self.p.len() - 1
    }

    pub fn get(&self, k: usize) -> T {
        self.p.get(k).copied().unwrap_or(T::zero())
    }

    /// `(k, p_k)` rows for `k ≥ m`.
    pub fn rows(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.p.iter().copied().enumerate().skip(self.m)
    }

    /// Least-squares slope of `ln p_k` on `ln k` over `k ∈ [lo, hi]`, using
    /// 200 log-spaced degrees.
    pub fn log_slope(&self, lo: usize, hi: usize) -> f64 {
        let hi = hi.min(self.k_max());
        let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
        let mut ks: Vec<usize> = (0..200)
            .map(|i| (a + (b - a) * i as f64 / 199.0).exp().round() as usize)
            .collect();
        ks.dedup();
        let xs: Vec<f64> = ks.iter().map(|&k| (k as f64).ln()).collect();
        let ys: Vec<f64> = ks.iter().map(|&k| self.get(k).as_f64().ln()).collect();
        crate::graphstats::linear_fit(&xs, &ys).map_or(f64::NAN, |f| f.slope)
    }

    /// `p_k (1 + a(k+δ)) - a(k-1+δ) p_{k-1} - s_k`.
    pub fn residual(&self, alpha: T, delta: T, k: usize) -> T {
        let a = degree_growth_exponent(self.m, alpha, delta);
        let kf = T::from_usize(k).unwrap();
        let prev = if k == 0 { T::zero() } else { self.get(k - 1) };
        self.get(k) * (T::one() + a * (kf + delta))
            - a * (kf - T::one() + delta) * prev
            - selfloop_degree_pmf(self.m, alpha, k)
    }
}

/// Solves `p_k = [a(k-1+δ) p_{k-1} + s_k] / (1 + a(k+δ))` from `p_{m-1} = 0`,
/// with `s_k` the insertion-degree law.
pub fn limit_degree_distribution<T: Real>(
    m: usize,
    alpha: T,
    delta: T,
    k_max: usize,
) -> Result<LimitLaw<T>, TheoryError> {
    check(m, alpha, delta)?;
    if k_max < 2 * m {
        return Err(TheoryError::KMaxTooSmall { k_max, two_m: 2 * m });
    }
    let a = degree_growth_exponent(m, alpha, delta);
    let mut p = vec![T::zero(); k_max + 1];
    let mut prev = T::zero();
    let mut sum = T::zero();
    for (k, slot) in p.iter_mut().enumerate().skip(m) {
        let kf = T::from_usize(k).unwrap();
        let s = selfloop_degree_pmf(m, alpha, k);
        let v = (a * (kf - T::one() + delta) * prev + s) / (T::one() + a * (kf + delta));
        *slot = v;
        sum += v;
        prev = v;
    }
    Ok(LimitLaw {
        m,
        p,
        deficit: T::one() - sum,
    })
}

/// Every prediction for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryPrediction<T> {
    pub law: LimitLaw<T>,
    pub tail_exponent: T,
    /// `I_n (2m+δ)`, the slope of `E[T_σ]` in `σ`.
    pub expected_t_slope: T,
    /// Insertion-degree law indexed by `k - m`.
    pub selfloop_pmf: Vec<T>,
    pub degree_growth_a: T,
}

impl<T: Real> TheoryPrediction<T> {
    pub fn new(params: &ProcessParams<T>, k_max: usize) -> Result<Self, TheoryError> {
        let (m, alpha, delta) = (params.m, params.alpha, params.delta);
        Ok(Self {
            law: limit_degree_distribution(m, alpha, delta, k_max)?,
            tail_exponent: powerlaw_exponent(m, alpha, delta),
            expected_t_slope: expected_total_attraction(params, 1)?,
            selfloop_pmf: (m..=2 * m).map(|k| selfloop_degree_pmf(m, alpha, k)).collect(),
            degree_growth_a: degree_growth_exponent(m, alpha, delta),
        })
    }
}
