use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::urns::{build_urns, joint_draw, TIE_TOLERANCE};
use super::CouplingError;
use crate::process::{GraphState, Model, Process, ProcessParams, SamplerKind};
use crate::rng::process_rng;
use crate::scalar::{unit, Real};
use crate::sphere::{angular_distance, sample_uniform, SpherePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CouplingEngine {
    /// Per-vertex bookkeeping of the urn differences; scales to large `n`.
    #[default]
    Aggregated,
    /// Rebuilds both ball multisets at every step. Small `n` only.
    Materialized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct CouplingOptions {
    pub engine: CouplingEngine,
    pub sampler: SamplerKind,
}

/// Two processes perturbed at time `tau`.
#[derive(Debug, Clone)]
pub struct CoupledRun<T> {
    pub tau: usize,
    pub replica: u64,
    /// `trajectory[i] = Δ_{τ+i}`, cumulative ball mismatches up to that time.
    pub trajectory: Vec<u64>,
    /// Cumulative endpoint disagreements (never above the ball count).
    pub endpoint_trajectory: Vec<u64>,
    pub state: GraphState<T>,
    pub state_hat: GraphState<T>,
}

impl<T> CoupledRun<T> {
    /// `Δ_σ` for `τ ≤ σ ≤ n`.
    pub fn delta_at(&self, sigma: usize) -> u64 {
        self.trajectory[sigma - self.tau]
    }

    pub fn n(&self) -> usize {
        self.tau + self.trajectory.len() - 1
    }
}

/// Pair of processes after the perturbation, with the differences of their
/// white-ball counts `ĉ_v - c_v` (vertices other than the perturbed one).
struct Coupled<T> {
    p: Process<T>,
    q: Process<T>,
    perturbed: usize,
    diff: BTreeMap<usize, i64>,
}

impl<T: Real> Coupled<T> {
    fn record(&mut self, heads: &[usize], sign: i64) {
        for &h in heads.iter().filter(|&&h| h != self.perturbed) {
            let e = self.diff.entry(h).or_insert(0);
            *e += sign;
            if *e == 0 {
                self.diff.remove(&h);
            }
        }
    }

    /// One coupled step with shared position `x`; returns both head lists
    /// and the number of ball mismatches.
    fn step_aggregated<R: Rng + ?Sized>(&mut self, x: SpherePoint<T>, rng: &mut R) -> (Vec<usize>, Vec<usize>, u64) {
        let sigma = self.p.state().sigma();
        let m = self.p.model().m();
        let model = self.p.model().clone();
        let delta = model.delta();
        let tau = self.perturbed;
        let (t0, _) = self.p.attraction_at(&x);
        let (t1, _) = self.q.attraction_at(&x);
        let swapped = t0 > t1;
        let (t_lo, t_hi) = if swapped { (t1, t0) } else { (t0, t1) };
        let k = model.floor_mass(sigma);
        let scale = t_hi.max(k).max(T::one());
        let t_hi_eff = if t_hi - t_lo <= T::lit(TIE_TOLERANCE) * scale { t_lo } else { t_hi };
        let green = (k - t_hi_eff).max(T::zero());
        let blue = ((k - t_lo).max(T::zero()) - green).max(T::zero());
        let norm_lo = t_lo + green + blue;
        let norm_hi = t_hi + green;
        let keep = (norm_lo / norm_hi).min(T::one());
        // white-ball excess of the low urn over the high one at v
        let sign: i64 = if swapped { 1 } else { -1 };
        let mut l_cache: Option<(Vec<usize>, Vec<T>)> = None;

        let mut lo_heads = Vec::with_capacity(m);
        let mut hi_heads = Vec::with_capacity(m);
        let mut mismatches = 0;
        for _ in 0..m {
            let r = unit::<T, _>(rng) * norm_lo;
            let (v, common) = {
                let lo = if swapped { &mut self.q } else { &mut self.p };
                if r < t_lo {
                    let v = lo.draw_old(&x, rng);
                    if v == tau {
                        (v, false)
                    } else {
                        let excess = (sign * self.diff.get(&v).copied().unwrap_or(0)).max(0);
                        let w = T::from_count(lo.state().degree(v)) + delta;
                        (v, unit::<T, _>(rng) * w >= T::from_count(excess as u64))
                    }
                } else {
                    (sigma, r - t_lo < green)
                }
            };
            lo_heads.push(v);
            if common && (keep >= T::one() || unit::<T, _>(rng) < keep) {
                hi_heads.push(v);
                continue;
            }
            mismatches += 1;
            let (vs, cum) = l_cache.get_or_insert_with(|| self.l_balls(&x, swapped, delta));
            let total = *cum.last().expect("redistribution from an empty L");
            assert!(total > T::zero(), "redistribution from an empty L");
            let r = unit::<T, _>(rng) * total;
            let i = cum.partition_point(|&c| c <= r).min(vs.len() - 1);
            hi_heads.push(vs[i]);
        }
        if swapped {
            (hi_heads, lo_heads, mismatches)
        } else {
            (lo_heads, hi_heads, mismatches)
        }
    }

    /// Vertices of `L` with cumulative weights: surplus white balls of the
    /// high urn and its perturbed-vertex ball.
    fn l_balls(&self, x: &SpherePoint<T>, swapped: bool, delta: T) -> (Vec<usize>, Vec<T>) {
        let hi = if swapped { &self.p } else { &self.q };
        let kernel = hi.model().kernel();
        let sign: i64 = if swapped { -1 } else { 1 };
        let mut vs = Vec::new();
        let mut cum = Vec::new();
        let mut acc = T::zero();
        let mut push = |v: usize, w: T| {
            if w > T::zero() {
                acc += w;
                vs.push(v);
                cum.push(acc);
            }
        };
        for (&v, &d) in &self.diff {
            let excess = sign * d;
            if excess > 0 {
                let a = kernel.at(angular_distance(hi.state().position(v), x));
                push(v, T::from_count(excess as u64) * a);
            }
        }
        let tau = self.perturbed;
        let a = kernel.at(angular_distance(hi.state().position(tau), x));
        push(tau, (T::from_count(hi.state().degree(tau)) + delta) * a);
        (vs, cum)
    }

    fn step_materialized<R: Rng + ?Sized>(&mut self, x: SpherePoint<T>, rng: &mut R) -> Result<(Vec<usize>, Vec<usize>, u64), CouplingError> {
        let model = self.p.model().clone();
        let pair = build_urns(self.p.state(), self.q.state(), &x, self.perturbed, &model)?;
        let m = model.m();
        let mut a = Vec::with_capacity(m);
        let mut b = Vec::with_capacity(m);
        let mut mismatches = 0;
        for _ in 0..m {
            let d = joint_draw(&pair, rng);
            a.push(pair.u[d.ball].number);
            b.push(pair.u_hat[d.ball_hat].number);
            mismatches += u64::from(!d.matched);
        }
        Ok(if pair.swapped { (b, a, mismatches) } else { (a, b, mismatches) })
    }
}

/// Mismatch probability of one draw for the next vertex at `x`, computed
/// from the aggregated bookkeeping. Exposed for cross-checks.
pub fn aggregated_mismatch_probability<T: Real>(
    state: &GraphState<T>,
    state_hat: &GraphState<T>,
    x: &SpherePoint<T>,
    perturbed: usize,
    model: &Model<T>,
) -> T {
    let mut c = Coupled {
        p: Process::from_state(model.clone(), SamplerKind::Exact, state.clone()),
        q: Process::from_state(model.clone(), SamplerKind::Exact, state_hat.clone()),
        perturbed,
        diff: BTreeMap::new(),
    };
    let m = model.m();
    let p_heads = state.heads()[perturbed * m..].to_vec();
    let q_heads = state_hat.heads()[perturbed * m..].to_vec();
    c.record(&p_heads, -1);
    c.record(&q_heads, 1);
    let (t0, _) = c.p.attraction_at(x);
    let (t1, _) = c.q.attraction_at(x);
    let swapped = t0 > t1;
    let norm_hi = t0.max(t1).max(model.floor_mass(state.sigma()));
    let (_, cum) = c.l_balls(x, swapped, model.delta());
    cum.last().copied().unwrap_or(T::zero()) / norm_hi
}

/// Runs one coupled replica perturbed at time `tau ∈ [1, n]` (vertex
/// `tau - 1` gets two independent positions and edge sets).
pub fn run_coupled<T: Real>(
    params: &ProcessParams<T>,
    tau: usize,
    replica: u64,
    options: &CouplingOptions,
) -> Result<CoupledRun<T>, CouplingError> {
    let n = params.n;
    if tau < 1 || tau > n {
        return Err(CouplingError::TauOutOfRange { tau, n });
    }
    let model = Model::new(params.clone())?;
    let mut rng = process_rng(params.seed, replica);
    let mut p = Process::new(model.clone(), options.sampler);
    for _ in 1..tau {
        p.step(&mut rng);
    }
    let mut q = p.clone();
    let a = p.step(&mut rng);
    let b = q.step(&mut rng);
    let first = a.heads.iter().zip(&b.heads).filter(|(x, y)| x != y).count() as u64;
    let mut c = Coupled {
        p,
        q,
        perturbed: tau - 1,
        diff: BTreeMap::new(),
    };
    c.record(&a.heads, -1);
    c.record(&b.heads, 1);

    let mut trajectory = Vec::with_capacity(n - tau + 1);
    let mut endpoint_trajectory = Vec::with_capacity(n - tau + 1);
    let (mut delta, mut endpoint) = (first, first);
    trajectory.push(delta);
    endpoint_trajectory.push(endpoint);
    for _ in tau..n {
        let x = sample_uniform(&mut rng);
        let (hp, hq, mism) = match options.engine {
            CouplingEngine::Aggregated => c.step_aggregated(x, &mut rng),
            CouplingEngine::Materialized => c.step_materialized(x, &mut rng)?,
        };
        delta += mism;
        endpoint += hp.iter().zip(&hq).filter(|(x, y)| x != y).count() as u64;
        c.record(&hp, -1);
        c.record(&hq, 1);
        c.p.push(x, &hp);
        c.q.push(x, &hq);
        trajectory.push(delta);
        endpoint_trajectory.push(endpoint);
    }
    Ok(CoupledRun {
        tau,
        replica,
        trajectory,
        endpoint_trajectory,
        state: c.p.into_state(),
        state_hat: c.q.into_state(),
    })
}

/// Replicas `0..replicas` in parallel, in replica order.
pub fn run_coupled_ensemble<T: Real>(
    params: &ProcessParams<T>,
    tau: usize,
    replicas: usize,
    options: &CouplingOptions,
) -> Result<Vec<CoupledRun<T>>, CouplingError> {
    (0..replicas as u64)
        .into_par_iter()
        .map(|r| run_coupled(params, tau, r, options))
        .collect()
}
