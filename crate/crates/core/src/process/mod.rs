//! The growth engine.
//!
//! At step σ+1 a uniform point `x` joins the graph with `m` edges. Each edge
//! head is drawn independently from `G_σ`: old vertex `v` with probability
//! `(d(v)+δ) F(|x_v - x|) / M` and the new vertex itself (a self-loop) with
//! probability `1 - T/M`, where `T = Σ_v (d(v)+δ) F(|x_v - x|)` and
//! `M = max(T, αΘ I_n σ)`. The very first vertex has nothing to attach to
//! and receives `m` self-loops.

mod engine;
mod grid;
mod params;
mod state;

pub use engine::{
    run, run_ensemble, run_replica, Process, RunOptions, RunOutput, SamplerKind, SamplerStats,
    Snapshot, StepRecord,
};
pub use params::{Model, ParamWarning, ProcessParams};
pub use state::{GraphState, InvariantViolation};

use crate::kernel::{FitnessKernel, KernelError};
use crate::scalar::Real;
use crate::sphere::{angular_distance, SpherePoint};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProcessError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("run needs {edges} edges, above the limit of {limit}")]
    ResourceLimit { edges: usize, limit: usize },
    #[error("snapshot time {0} outside [1, n]")]
    SnapshotOutOfRange(usize),
    #[error("tracked vertex {0} outside [0, n)")]
    TrackedOutOfRange(usize),
    #[error(transparent)]
    Invariant(#[from] InvariantViolation),
}

/// `T_σ(u) = Σ_v (d(v)+δ) F(|x_v - u|)` by a full scan; 0 for the empty graph.
pub fn total_attraction<T: Real>(
    state: &GraphState<T>,
    u: &SpherePoint<T>,
    kernel: &FitnessKernel<T>,
    delta: T,
) -> T {
    state
        .positions()
        .iter()
        .zip(state.degrees())
        .map(|(p, &d)| (T::from_count(d) + delta) * kernel.at(angular_distance(p, u)))
        .sum()
}

/// `M = max(T, αΘ I_n σ)`; zero for the empty graph.
pub fn normalizer<T: Real>(t: T, sigma: usize, alpha: T, theta: T, i_n: T) -> T {
    if sigma == 0 {
        return T::zero();
    }
    t.max(alpha * theta * i_n * T::from_usize(sigma).unwrap())
}

/// Law of one edge head given `G_σ` and the new position `u`.
///
/// Entry `v < σ` is the probability of attaching to old vertex `v`; the last
/// entry is the self-loop probability. Requires `σ ≥ 1`.
pub fn attachment_distribution<T: Real>(
    state: &GraphState<T>,
    u: &SpherePoint<T>,
    model: &Model<T>,
) -> Vec<T> {
    let sigma = state.sigma();
    assert!(sigma >= 1, "attachment law needs at least one vertex");
    let mut out: Vec<T> = state
        .positions()
        .iter()
        .zip(state.degrees())
        .map(|(p, &d)| (T::from_count(d) + model.delta()) * model.kernel().at(angular_distance(p, u)))
        .collect();
    let t: T = out.iter().copied().sum();
    let norm = normalizer(t, sigma, model.params.alpha, model.theta, model.i_n);
    for w in &mut out {
        *w = *w / norm;
    }
    out.push(T::one() - t / norm);
    out
}

/// Law of one edge head under the rejection sampler, computed analytically:
/// proposal `q(v) ∝ d(v)+δ` from the edge/vertex urn, acceptance
/// `F(|x_v - u|)/F_max`, renormalized and scaled by `T/M`.
pub fn fast_sampler_law<T: Real>(
    state: &GraphState<T>,
    u: &SpherePoint<T>,
    model: &Model<T>,
) -> Vec<T> {
    let sigma = state.sigma();
    assert!(sigma >= 1, "attachment law needs at least one vertex");
    let m = T::from_usize(model.m()).unwrap();
    let delta = model.delta();
    let s = T::from_usize(sigma).unwrap();
    // a uniform vertex with probability (m+δ)/(2m+δ), otherwise the head of a
    // uniform edge
    let pick_vertex = (m + delta) / (m + m + delta);
    let mut accepted: Vec<T> = (0..sigma)
        .map(|v| {
            let heads = T::from_count(state.in_degree(v));
            let proposal = pick_vertex / s + (T::one() - pick_vertex) * heads / (m * s);
            let accept = model.kernel().at(angular_distance(state.position(v), u)) / model.f_max;
            proposal * accept
        })
        .collect();
    let z: T = accepted.iter().copied().sum();
    let t = total_attraction(state, u, model.kernel(), delta);
    let norm = normalizer(t, sigma, model.params.alpha, model.theta, model.i_n);
    let old_mass = t / norm;
    if z > T::zero() {
        for a in &mut accepted {
            *a = *a / z * old_mass;
        }
    }
    accepted.push(T::one() - old_mass);
    accepted
}

/// One step of the exact reference sampler, applied in place.
pub fn grow_one_step<T: Real, R: rand::Rng + ?Sized>(
    state: &mut GraphState<T>,
    model: &Model<T>,
    rng: &mut R,
) -> StepRecord<T> {
    let owned = std::mem::replace(state, GraphState::new(state.m()));
    let mut p = Process::from_state(model.clone(), SamplerKind::Exact, owned);
    let rec = p.step(rng);
    *state = p.into_state();
    rec
}
