//! Urn coupling of two processes that differ only in the vertex born at
//! time τ.
//!
//! Before τ the processes share one history. At τ each grows independently;
//! afterwards they share positions, and each edge is drawn through a pair of
//! coloured, weighted urns whose joint law keeps both marginals exact while
//! making the drawn balls agree as often as possible. `Δ_σ` counts draws in
//! which the two balls differ.

mod engine;
mod fit;
mod urns;

pub use engine::{
    aggregated_mismatch_probability, run_coupled, run_coupled_ensemble, CoupledRun, CouplingEngine,
    CouplingOptions,
};
pub use fit::{mismatch_growth_fit, GrowthFit, MIN_RANGE, MIN_REPLICAS};
pub use urns::{build_urns, joint_draw, joint_law, Ball, BallColor, JointDraw, UrnPair, TIE_TOLERANCE};

use crate::process::ProcessError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CouplingError {
    #[error("states do not share history: {0}")]
    InconsistentHistory(String),
    #[error("urn invariant violated: {0}")]
    UrnInvariant(String),
    #[error("tau = {tau} outside [1, {n}]")]
    TauOutOfRange { tau: usize, n: usize },
    #[error("{found} replicas, need at least {needed}")]
    InsufficientReplicas { found: usize, needed: usize },
    #[error("window from tau = {tau} to n = {n} spans less than a decade")]
    InsufficientRange { tau: usize, n: usize },
    #[error("runs differ in tau or n")]
    Mixed,
    #[error(transparent)]
    Process(#[from] ProcessError),
}
