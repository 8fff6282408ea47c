use serde::{Deserialize, Serialize};

use super::{CoupledRun, CouplingError};
use crate::graphstats::linear_fit;

pub const MIN_REPLICAS: usize = 20;
/// Smallest accepted `n/τ`.
pub const MIN_RANGE: f64 = 10.0;

/// Fitted growth of the ensemble-mean mismatch count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// Slope of `ln E[Δ_σ] - ln ln σ` against `ln(σ/τ)`.
    pub slope: f64,
    pub stderr: f64,
    /// 95% normal interval; serial correlation makes it optimistic.
    pub ci: (f64, f64),
    /// `(σ, mean Δ_σ)` at the regression points.
    pub points: Vec<(usize, f64)>,
}

/// Regresses the ensemble mean of `Δ_σ` over 40 log-spaced `σ ∈ [τ, n]`.
pub fn mismatch_growth_fit<T>(runs: &[CoupledRun<T>]) -> Result<GrowthFit, CouplingError> {
    if runs.len() < MIN_REPLICAS {
        return Err(CouplingError::InsufficientReplicas {
            found: runs.len(),
            needed: MIN_REPLICAS,
        });
    }
    let tau = runs[0].tau;
    let n = runs[0].n();
    if runs.iter().any(|r| r.tau != tau || r.n() != n) {
        return Err(CouplingError::Mixed);
    }
    let start = tau.max(3);
    if (n as f64) < MIN_RANGE * start as f64 {
        return Err(CouplingError::InsufficientRange { tau, n });
    }
    let (a, b) = ((start as f64).ln(), (n as f64).ln());
    let mut sigmas: Vec<usize> = (0..40)
        .map(|i| ((a + (b - a) * i as f64 / 39.0).exp().round() as usize).clamp(start, n))
        .collect();
    sigmas.dedup();
    let mut points = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in sigmas {
        let mean = runs.iter().map(|r| r.delta_at(s) as f64).sum::<f64>() / runs.len() as f64;
        points.push((s, mean));
        if mean > 0.0 {
            xs.push((s as f64 / tau as f64).ln());
            ys.push(mean.ln() - (s as f64).ln().ln());
        }
    }
    let f = linear_fit(&xs, &ys).ok_or(CouplingError::InsufficientRange { tau, n })?;
    Ok(GrowthFit {
        slope: f.slope,
        stderr: f.slope_stderr,
        ci: (f.slope - 1.96 * f.slope_stderr, f.slope + 1.96 * f.slope_stderr),
        points,
    })
}
