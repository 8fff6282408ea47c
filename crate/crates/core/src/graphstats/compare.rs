use serde::{Deserialize, Serialize};

use super::DegreeHistogram;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub k: usize,
    /// Ensemble mean of `N_k / n`.
    pub mean: f64,
    /// Standard error of that mean.
    pub stderr: f64,
    pub p_k: Option<f64>,
    pub z_score: Option<f64>,
    /// `|mean - p_k| / p_k`.
    pub relative_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub replicas: usize,
    /// False when no limit law was supplied (it requires `α > 2`).
    pub theory_available: bool,
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    pub fn row(&self, k: usize) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.k == k)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompareError {
    #[error("comparison needs at least 2 replicas, got {0}")]
    TooFewReplicas(usize),
}

/// Per-degree ensemble means of `N_k/n` against `p_k` (indexed by `k`) for
/// `k ∈ k_range`.
pub fn compare_empirical_theory(
    ensemble: &[DegreeHistogram],
    p_k: Option<&[f64]>,
    k_range: std::ops::RangeInclusive<usize>,
) -> Result<Comparison, CompareError> {
    let r = ensemble.len();
    if r < 2 {
        return Err(CompareError::TooFewReplicas(r));
    }
    let rows = k_range
        .map(|k| {
            let xs: Vec<f64> = ensemble.iter().map(|h| h.fraction(k)).collect();
            let mean = xs.iter().sum::<f64>() / r as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r - 1) as f64;
            let stderr = (var / r as f64).sqrt();
            let p = p_k.map(|t| t.get(k).copied().unwrap_or(0.0));
            ComparisonRow {
                k,
                mean,
                stderr,
                p_k: p,
                z_score: p.map(|p| if stderr > 0.0 { (mean - p) / stderr } else { f64::NAN }),
                relative_error: p.map(|p| (mean - p).abs() / p),
            }
        })
        .collect();
    Ok(Comparison {
        replicas: r,
        theory_available: p_k.is_some(),
        rows,
    })
}

/// Fraction of `samples` with `|x - center| > band`.
pub fn exceedance_fraction(samples: &[f64], center: f64, band: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().filter(|&&x| (x - center).abs() > band).count() as f64 / samples.len() as f64
}
