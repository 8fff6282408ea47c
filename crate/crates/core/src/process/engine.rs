use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::SphereGrid;
use super::{total_attraction, GraphState, Model, ParamWarning, ProcessError, ProcessParams};
use crate::graphstats::DegreeHistogram;
use crate::rng::{probe_rng, process_rng};
use crate::scalar::{unit, Real};
use crate::sphere::{angular_distance, sample_uniform, SpherePoint};

/// How edge heads are drawn. Both variants sample the same law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplerKind {
    /// Linear scan over all vertices at every step.
    #[default]
    Exact,
    /// Urn proposal `∝ d(v)+δ` with acceptance `F/F_max`. `T` comes from a
    /// closed form (constant kernels), a spatial grid (compact support) or a
    /// scan. Below `acceptance_floor` expected acceptance, heads are drawn
    /// directly from the scanned weights instead.
    Fast { acceptance_floor: f64 },
}

impl SamplerKind {
    pub fn fast() -> Self {
        SamplerKind::Fast {
            acceptance_floor: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerStats {
    pub proposals: u64,
    pub accepted: u64,
    /// Heads drawn from explicit weights because rejection was not used.
    pub direct_draws: u64,
    pub self_loops: u64,
}

/// What happened in one step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord<T> {
    pub vertex: usize,
    pub position: SpherePoint<T>,
    pub heads: Vec<usize>,
    pub self_loops: usize,
    /// `T_σ(x)` (zero at the first step).
    pub total: T,
    /// `M_σ(x)` (zero at the first step).
    pub norm: T,
}

/// Per-step scratch: `T`, `M`, and positive weights when they were computed.
#[derive(Debug, Clone, Default)]
pub(crate) struct Attraction<T> {
    pub total: T,
    pub norm: T,
    pub vertices: Vec<usize>,
    pub cumulative: Vec<T>,
}

impl<T: Real> Attraction<T> {
    fn clear(&mut self) {
        self.total = T::zero();
        self.norm = T::zero();
        self.vertices.clear();
        self.cumulative.clear();
    }

    fn push(&mut self, v: usize, w: T) {
        if w > T::zero() {
            self.total += w;
            self.vertices.push(v);
            self.cumulative.push(self.total);
        }
    }

    /// Vertex whose cumulative interval contains `r ∈ [0, total)`.
    fn pick(&self, r: T) -> usize {
        let i = self.cumulative.partition_point(|&c| c <= r);
        self.vertices[i.min(self.vertices.len() - 1)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Route {
    Exact,
    Constant,
    Rejection,
    Direct,
}

/// A running graph process.
#[derive(Debug, Clone)]
pub struct Process<T> {
    model: Model<T>,
    kind: SamplerKind,
    route: Route,
    state: GraphState<T>,
    grid: Option<SphereGrid<T>>,
    att: Attraction<T>,
    stats: SamplerStats,
}

impl<T: Real> Process<T> {
    pub fn new(model: Model<T>, kind: SamplerKind) -> Self {
        let state = GraphState::with_capacity(model.m(), model.params.n);
        Self::from_state(model, kind, state)
    }

    /// Continues from an existing graph.
    pub fn from_state(model: Model<T>, kind: SamplerKind, state: GraphState<T>) -> Self {
        let kernel = model.kernel();
        let (route, grid) = match kind {
            SamplerKind::Exact => (Route::Exact, None),
            SamplerKind::Fast { acceptance_floor } => {
                let grid = kernel.support_radius().map(SphereGrid::for_radius);
                let route = if kernel.is_constant() {
                    Route::Constant
                } else if model.expected_acceptance().as_f64() >= acceptance_floor {
                    Route::Rejection
                } else {
                    Route::Direct
                };
                (route, grid)
            }
        };
        let mut p = Self {
            model,
            kind,
            route,
            state,
            grid,
            att: Attraction::default(),
            stats: SamplerStats::default(),
        };
        if let Some(g) = p.grid.as_mut() {
            for (v, x) in p.state.positions().iter().enumerate() {
                g.insert(v, x);
            }
        }
        p
    }

    pub fn model(&self) -> &Model<T> {
        &self.model
    }

    pub fn sampler(&self) -> SamplerKind {
        self.kind
    }

    /// True when the fast sampler gave up on rejection for this kernel.
    pub fn uses_fallback(&self) -> bool {
        self.route == Route::Direct
    }

    pub fn state(&self) -> &GraphState<T> {
        &self.state
    }

    pub fn into_state(self) -> GraphState<T> {
        self.state
    }

    pub fn stats(&self) -> SamplerStats {
        self.stats
    }

    /// Grows the graph by one uniformly placed vertex.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> StepRecord<T> {
        let x = sample_uniform(rng);
        self.step_at(x, rng)
    }

    /// Grows the graph by one vertex at `x`.
    pub fn step_at<R: Rng + ?Sized>(&mut self, x: SpherePoint<T>, rng: &mut R) -> StepRecord<T> {
        let sigma = self.state.sigma();
        let m = self.model.m();
        let mut heads = vec![sigma; m];
        if sigma > 0 {
            self.prepare(&x);
            for h in heads.iter_mut() {
                *h = self.draw(&x, rng);
            }
        }
        let self_loops = heads.iter().filter(|&&h| h == sigma).count();
        self.push(x, &heads);
        StepRecord {
            vertex: sigma,
            position: x,
            heads,
            self_loops,
            total: self.att.total,
            norm: self.att.norm,
        }
    }

    /// `T_σ(x)` and `M_σ(x)` for the current graph.
    pub fn attraction_at(&mut self, x: &SpherePoint<T>) -> (T, T) {
        self.prepare(x);
        (self.att.total, self.att.norm)
    }

    /// Appends a vertex at `x` with the given heads.
    pub(crate) fn push(&mut self, x: SpherePoint<T>, heads: &[usize]) {
        let sigma = self.state.sigma();
        self.stats.self_loops += heads.iter().filter(|&&h| h == sigma).count() as u64;
        self.state.push_vertex(x, heads);
        if let Some(g) = self.grid.as_mut() {
            g.insert(sigma, &x);
        }
    }

    /// Draws an old vertex with probability `∝ (d(v)+δ) F(|x_v - x|)`,
    /// conditional on not drawing a self-loop. Requires `T > 0`.
    pub(crate) fn draw_old<R: Rng + ?Sized>(&mut self, x: &SpherePoint<T>, rng: &mut R) -> usize {
        let r = unit::<T, _>(rng) * self.att.total;
        self.draw_old_with(r, x, rng)
    }

    fn prepare(&mut self, x: &SpherePoint<T>) {
        self.att.clear();
        let sigma = self.state.sigma();
        let delta = self.model.delta();
        let kernel = self.model.kernel();
        match self.route {
            Route::Constant => {
                let per_vertex = T::from_usize(2 * self.model.m()).unwrap() + delta;
                self.att.total = per_vertex * T::from_usize(sigma).unwrap() * kernel.at(T::zero());
            }
            _ => {
                let degrees = self.state.degrees();
                let positions = self.state.positions();
                let att = &mut self.att;
                let mut visit = |v: usize| {
                    let f = kernel.at(angular_distance(&positions[v], x));
                    att.push(v, (T::from_count(degrees[v]) + delta) * f);
                };
                match (&self.grid, self.route) {
                    (Some(g), Route::Rejection | Route::Direct) => {
                        g.for_each_candidate(x, &mut visit);
                        // cell order is arbitrary; the law does not depend on it
                    }
                    _ => (0..sigma).for_each(&mut visit),
                }
            }
        }
        self.att.norm = self.att.total.max(self.model.floor_mass(sigma));
    }

    fn draw<R: Rng + ?Sized>(&mut self, x: &SpherePoint<T>, rng: &mut R) -> usize {
        let sigma = self.state.sigma();
        let r = unit::<T, _>(rng) * self.att.norm;
        if r >= self.att.total {
            return sigma;
        }
        self.draw_old_with(r, x, rng)
    }

    fn draw_old_with<R: Rng + ?Sized>(&mut self, r: T, x: &SpherePoint<T>, rng: &mut R) -> usize {
        match self.route {
            Route::Exact | Route::Direct => {
                self.stats.direct_draws += 1;
                self.att.pick(r)
            }
            Route::Constant => {
                self.stats.proposals += 1;
                self.stats.accepted += 1;
                self.propose(rng)
            }
            Route::Rejection => {
                let f_max = self.model.f_max;
                // An accepted proposal has exactly the target law whatever the
                // number of trials, so a capped loop followed by a direct draw
                // leaves the law unchanged.
                for _ in 0..100_000 {
                    self.stats.proposals += 1;
                    let v = self.propose(rng);
                    let f = self.model.kernel().at(angular_distance(self.state.position(v), x));
                    if unit::<T, _>(rng) * f_max < f {
                        self.stats.accepted += 1;
                        return v;
                    }
                }
                self.stats.direct_draws += 1;
                let r = unit::<T, _>(rng) * self.att.total;
                self.att.pick(r)
            }
        }
    }

    /// Vertex with probability `(d(v)+δ) / ((2m+δ)σ)`: a uniform vertex with
    /// probability `(m+δ)/(2m+δ)`, else the head of a uniform edge.
    fn propose<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let sigma = self.state.sigma();
        let m = T::from_usize(self.model.m()).unwrap();
        let delta = self.model.delta();
        if unit::<T, _>(rng) * (m + m + delta) < m + delta {
            rng.random_range(0..sigma)
        } else {
            let heads = self.state.heads();
            heads[rng.random_range(0..heads.len())]
        }
    }
}

/// Options for [`run`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub sampler: SamplerKind,
    /// Times σ at which a [`Snapshot`] is taken (sorted, within `[1, n]`).
    pub snapshot_times: Vec<usize>,
    /// Random probe points per snapshot at which `T_σ` is evaluated.
    pub probe_points: usize,
    /// 0-based vertices whose degree is recorded at each snapshot.
    pub tracked_vertices: Vec<usize>,
    /// Verify the conservation laws at every snapshot and at the end.
    pub check_invariants: bool,
    pub max_edges: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            sampler: SamplerKind::Exact,
            snapshot_times: Vec::new(),
            probe_points: 0,
            tracked_vertices: Vec::new(),
            check_invariants: true,
            max_edges: 1 << 31,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T> {
    pub sigma: usize,
    pub histogram: DegreeHistogram,
    /// `T_σ(U)` at independent uniform probe points.
    pub probes: Vec<T>,
    /// Degrees of the tracked vertices (0 if not yet born).
    pub tracked: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput<T> {
    pub replica: u64,
    pub state: GraphState<T>,
    pub snapshots: Vec<Snapshot<T>>,
    /// `selfloop_counts[j]`: number of vertices after the first that were
    /// inserted with exactly `j` self-loops.
    pub selfloop_counts: Vec<u64>,
    pub stats: SamplerStats,
    pub warnings: Vec<ParamWarning>,
}

/// Runs replica 0.
pub fn run<T: Real>(params: &ProcessParams<T>, options: &RunOptions) -> Result<RunOutput<T>, ProcessError> {
    run_replica(params, 0, options)
}

/// Runs one replica on its own random stream.
pub fn run_replica<T: Real>(
    params: &ProcessParams<T>,
    replica: u64,
    options: &RunOptions,
) -> Result<RunOutput<T>, ProcessError> {
    let model = Model::new(params.clone())?;
    let n = params.n;
    let edges = n.checked_mul(params.m).unwrap_or(usize::MAX);
    if edges > options.max_edges {
        return Err(ProcessError::ResourceLimit {
            edges,
            limit: options.max_edges,
        });
    }
    for &t in &options.snapshot_times {
        if t < 1 || t > n {
            return Err(ProcessError::SnapshotOutOfRange(t));
        }
    }
    if let Some(&v) = options.tracked_vertices.iter().find(|&&v| v >= n) {
        return Err(ProcessError::TrackedOutOfRange(v));
    }
    let mut times = options.snapshot_times.clone();
    times.sort_unstable();
    times.dedup();

    let warnings = model.warnings.clone();
    let mut rng = process_rng(params.seed, replica);
    let mut probe = probe_rng(params.seed, replica);
    let mut process = Process::new(model, options.sampler);
    let mut selfloop_counts = vec![0u64; params.m + 1];
    let mut snapshots = Vec::with_capacity(times.len());
    let mut next = times.iter().peekable();

    for sigma in 1..=n {
        let rec = process.step(&mut rng);
        if rec.vertex > 0 {
            selfloop_counts[rec.self_loops] += 1;
        }
        while next.peek().is_some_and(|&&t| t == sigma) {
            next.next();
            let state = process.state();
            if options.check_invariants {
                state.check_invariants()?;
            }
            let probes = (0..options.probe_points)
                .map(|_| {
                    let u = sample_uniform(&mut probe);
                    total_attraction(state, &u, &params.kernel, params.delta)
                })
                .collect();
            snapshots.push(Snapshot {
                sigma,
                histogram: DegreeHistogram::from_state(state),
                probes,
                tracked: options
                    .tracked_vertices
                    .iter()
                    .map(|&v| if v < sigma { state.degree(v) } else { 0 })
                    .collect(),
            });
        }
    }
    let stats = process.stats();
    let state = process.into_state();
    if options.check_invariants {
        state.check_invariants()?;
    }
    Ok(RunOutput {
        replica,
        state,
        snapshots,
        selfloop_counts,
        stats,
        warnings,
    })
}

/// Runs replicas `0..replicas` in parallel; results are in replica order.
pub fn run_ensemble<T: Real>(
    params: &ProcessParams<T>,
    replicas: usize,
    options: &RunOptions,
) -> Result<Vec<RunOutput<T>>, ProcessError> {
    (0..replicas as u64)
        .into_par_iter()
        .map(|r| run_replica(params, r, options))
        .collect()
}
