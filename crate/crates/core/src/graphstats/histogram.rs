use serde::{Deserialize, Serialize};

use crate::process::GraphState;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HistogramError {
    #[error("histogram counts {counted} vertices, expected {sigma}")]
    VertexCount { counted: u64, sigma: usize },
    #[error("histogram degree sum {sum} differs from 2mσ = {expected}")]
    DegreeSum { sum: u64, expected: u64 },
    #[error("vertex of degree {k} below m = {m}")]
    BelowMinimum { k: usize, m: usize },
}

/// Counts `N_k` of vertices with degree `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeHistogram {
    pub sigma: usize,
    pub m: usize,
    /// `counts[k] = N_k`; the vector ends at the largest observed degree.
    pub counts: Vec<u64>,
}

impl DegreeHistogram {
    pub fn from_state<T: Real>(state: &GraphState<T>) -> Self {
        Self::from_degrees(state.m(), state.degrees())
    }

    pub fn from_degrees(m: usize, degrees: &[u64]) -> Self {
        let max = degrees.iter().copied().max().unwrap_or(0) as usize;
        let mut counts = vec![0u64; max + 1];
        for &d in degrees {
            counts[d as usize] += 1;
        }
        Self {
            sigma: degrees.len(),
            m,
            counts,
        }
    }

    pub fn count(&self, k: usize) -> u64 {
        self.counts.get(k).copied().unwrap_or(0)
    }

    /// `N_k / σ`.
    pub fn fraction(&self, k: usize) -> f64 {
        if self.sigma == 0 {
            0.0
        } else {
            self.count(k) as f64 / self.sigma as f64
        }
    }

    pub fn max_degree(&self) -> usize {
        self.counts.iter().rposition(|&c| c > 0).unwrap_or(0)
    }

    /// Non-empty `(k, N_k)` pairs in increasing `k`.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| (k, c))
    }

    /// Checks `Σ N_k = σ`, `Σ k N_k = 2mσ` and `N_k = 0` for `k < m`.
    pub fn check(&self) -> Result<(), HistogramError> {
        let counted: u64 = self.counts.iter().sum();
        if counted != self.sigma as u64 {
            return Err(HistogramError::VertexCount {
                counted,
                sigma: self.sigma,
            });
        }
        let sum: u64 = self.nonzero().map(|(k, c)| k as u64 * c).sum();
        let expected = 2 * (self.m * self.sigma) as u64;
        if sum != expected {
            return Err(HistogramError::DegreeSum { sum, expected });
        }
        if let Some((k, _)) = self.nonzero().find(|&(k, _)| k < self.m) {
            return Err(HistogramError::BelowMinimum { k, m: self.m });
        }
        Ok(())
    }

    /// `(k, N_k)` pairs as tail-fit input.
    pub fn weighted(&self) -> Vec<(u64, f64)> {
        self.nonzero().map(|(k, c)| (k as u64, c as f64)).collect()
    }
}
