//! Runs one configured experiment and writes its artifacts.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use gpaf::coupling::{mismatch_growth_fit, run_coupled_ensemble, CouplingError, CouplingOptions};
use gpaf::graphstats::{
    compare_empirical_theory, components_of, diameter, tail_exponent_fit, DegreeHistogram, DiameterMethod,
    UndirectedGraph,
};
use gpaf::io::{read_edges, write_edges, write_histogram, write_positions, write_theory, write_trajectory, ParseError};
use gpaf::kernel::KernelError;
use gpaf::process::{run_ensemble, ProcessError, RunOptions};
use gpaf::theory::{concentration_band, expected_total_attraction, TheoryError};
use gpaf::{GraphState, Model, RunOutput, TheoryPrediction};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{DiameterChoice, ExperimentConfig, Mode, MANIFEST_VERSION_KEY};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit status when any conservation law or module invariant fails.
pub const EXIT_INVARIANT: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("cannot start worker pool: {0}")]
    Threads(String),
}

/// What a finished experiment produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub artifacts: Vec<PathBuf>,
    pub report: Value,
    /// Failed invariant checks; any entry makes the exit status nonzero.
    pub violations: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.violations.is_empty() {
            0
        } else {
            EXIT_INVARIANT
        }
    }
}

struct Sink {
    dir: PathBuf,
    artifacts: Vec<PathBuf>,
}

impl Sink {
    fn write(
        &mut self,
        name: &str,
        f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    ) -> Result<(), ExperimentError> {
        let path = self.dir.join(name);
        let io = |source| ExperimentError::Io {
            path: path.clone(),
            source,
        };
        let mut w = BufWriter::new(File::create(&path).map_err(io)?);
        f(&mut w).and_then(|_| w.flush()).map_err(io)?;
        self.artifacts.push(path);
        Ok(())
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), ExperimentError> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)
        })
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Outcome, ExperimentError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = config.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| ExperimentError::Threads(e.to_string()))?;
    fs::create_dir_all(&config.outputs).map_err(|source| ExperimentError::Io {
        path: config.outputs.clone(),
        source,
    })?;
    let mut sink = Sink {
        dir: config.outputs.clone(),
        artifacts: Vec::new(),
    };
    sink.json("manifest.json", &manifest(config))?;
    let mut violations = Vec::new();
    let body = pool.install(|| match config.mode {
        Mode::Generate | Mode::Ensemble => simulate(config, &mut sink, &mut violations),
        Mode::Theory => theory(config, &mut sink),
        Mode::Analyze => analyze(config, &mut sink, &mut violations),
        Mode::Couple => couple(config, &mut sink, &mut violations),
        Mode::CheckKernel => check_kernel(config),
    })?;
    let report = json!({
        "mode": config.mode.name(),
        "version": VERSION,
        "params": config.params,
        "invariants": { "ok": violations.is_empty(), "violations": violations },
        "results": body,
    });
    sink.json("report.json", &report)?;
    Ok(Outcome {
        artifacts: sink.artifacts,
        report,
        violations,
    })
}

/// Full config plus how each replica's random stream is derived.
pub fn manifest(config: &ExperimentConfig) -> Value {
    let replicas = match config.mode {
        Mode::Ensemble | Mode::Couple => config.replicas,
        Mode::Generate => 1,
        _ => 0,
    };
    let streams: Vec<Value> = (0..replicas)
        .map(|r| json!({ "replica": r, "seed": config.params.seed, "stream": r }))
        .collect();
    json!({
        MANIFEST_VERSION_KEY: 1,
        "version": VERSION,
        "rng": "ChaCha8, seeded by params.seed, one stream per replica",
        "streams": streams,
        "config": config,
    })
}

fn diameter_method(c: &ExperimentConfig) -> Option<DiameterMethod> {
    match c.analysis.diameter {
        DiameterChoice::Skip => None,
        DiameterChoice::Ifub => Some(DiameterMethod::Ifub),
        DiameterChoice::Exact => Some(DiameterMethod::Exact),
    }
}

/// Fit, components and diameter of one graph.
fn graph_summary(c: &ExperimentConfig, hist: &DegreeHistogram, graph: &UndirectedGraph) -> Value {
    let fit = match tail_exponent_fit(hist, c.analysis.k_min) {
        Ok(f) => json!(f),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let n = graph.vertex_count();
    let comps = components_of(n, (0..n).flat_map(|v| graph.neighbors(v).iter().map(move |&w| (v, w))));
    let diam = diameter_method(c).map(|m| match diameter(graph, m) {
        Ok(d) => json!(d),
        Err(e) => json!({ "error": e.to_string() }),
    });
    json!({
        "vertices": n,
        "max_degree": hist.max_degree(),
        "tail_fit": fit,
        "components": { "count": comps.count(), "largest": comps.sizes.iter().max() },
        "diameter": diam,
    })
}

fn check_state(tag: &str, state: &GraphState, violations: &mut Vec<String>) -> DegreeHistogram {
    if let Err(e) = state.check_invariants() {
        violations.push(format!("{tag}: {e}"));
    }
    let hist = DegreeHistogram::from_state(state);
    if let Err(e) = hist.check() {
        violations.push(format!("{tag}: {e}"));
    }
    hist
}

fn theory_rows(c: &ExperimentConfig, sink: &mut Sink) -> Result<Option<TheoryPrediction>, ExperimentError> {
    if c.params.alpha <= 2.0 {
        return Ok(None);
    }
    let pred = TheoryPrediction::new(&c.params, c.analysis.theory_k_max)?;
    let top = c.analysis.k_max.min(pred.law.k_max());
    sink.write("theory.csv", |w| write_theory((c.params.m..=top).map(|k| (k, pred.law.get(k))), w))?;
    Ok(Some(pred))
}

fn theory_summary(pred: &TheoryPrediction) -> Value {
    let k_max = pred.law.k_max();
    let (lo, hi) = if k_max >= 100_000 { (1000, 100_000) } else { ((k_max / 100).max(1), k_max) };
    json!({
        "tail_exponent": pred.tail_exponent,
        "log_slope": { "k_lo": lo, "k_hi": hi, "slope": pred.law.log_slope(lo, hi) },
        "mass_deficit": pred.law.deficit,
        "degree_growth_a": pred.degree_growth_a,
        "expected_t_slope": pred.expected_t_slope,
        "selfloop_pmf": pred.selfloop_pmf,
    })
}

fn simulate(c: &ExperimentConfig, sink: &mut Sink, violations: &mut Vec<String>) -> Result<Value, ExperimentError> {
    let replicas = if c.mode == Mode::Generate { 1 } else { c.replicas };
    let opts = RunOptions {
        sampler: c.sampler,
        snapshot_times: c.snapshot_times.clone(),
        probe_points: c.analysis.probe_points,
        tracked_vertices: c.analysis.tracked_vertices.clone(),
        check_invariants: false,
        ..RunOptions::default()
    };
    let outs = run_ensemble(&c.params, replicas, &opts)?;
    let single = replicas == 1;
    let name = |stem: &str, ext: &str, r: u64| {
        if single {
            format!("{stem}.{ext}")
        } else {
            format!("{stem}_{r}.{ext}")
        }
    };
    let mut hists = Vec::with_capacity(outs.len());
    let mut per_replica = Vec::with_capacity(outs.len());
    let mut all_degrees = Vec::with_capacity(c.params.n * outs.len());
    for o in &outs {
        let hist = check_state(&format!("replica {}", o.replica), &o.state, violations);
        for s in &o.snapshots {
            if let Err(e) = s.histogram.check() {
                violations.push(format!("replica {} snapshot {}: {e}", o.replica, s.sigma));
            }
        }
        if single {
            sink.write("positions.csv", |w| write_positions(&o.state, w))?;
        }
        if c.write_edges {
            sink.write(&name("edges", "tsv", o.replica), |w| write_edges(&o.state, w))?;
        }
        let graph = UndirectedGraph::from_state(&o.state);
        per_replica.push(json!({
            "replica": o.replica,
            "graph": graph_summary(c, &hist, &graph),
            "selfloop_counts": o.selfloop_counts,
            "sampler": o.stats,
        }));
        all_degrees.extend_from_slice(o.state.degrees());
        hists.push(hist);
    }
    let pooled = DegreeHistogram::from_degrees(c.params.m, &all_degrees);
    sink.write("degree_hist.csv", |w| write_histogram(&pooled, w))?;
    let pooled_fit = match tail_exponent_fit(&pooled, c.analysis.k_min) {
        Ok(f) => json!(f),
        Err(e) => json!({ "error": e.to_string() }),
    };

    let pred = theory_rows(c, sink)?;
    let comparison = if hists.len() >= 2 {
        let top = c.analysis.k_max.min(pooled.max_degree().max(c.params.m));
        let p = pred.as_ref().map(|t| t.law.p.as_slice());
        compare_empirical_theory(&hists, p, c.params.m..=top).ok().map(|cmp| json!(cmp))
    } else {
        None
    };

    let snapshots: Vec<Value> = c
        .snapshot_times
        .iter()
        .enumerate()
        .map(|(i, &sigma)| snapshot_summary(c, &outs, i, sigma))
        .collect::<Result<_, _>>()?;

    Ok(json!({
        "replicas": per_replica,
        "pooled_tail_fit": pooled_fit,
        "comparison": comparison,
        "theory": pred.as_ref().map(theory_summary),
        "snapshots": snapshots,
        "warnings": outs.first().map(|o| o.warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>()),
    }))
}

fn snapshot_summary(c: &ExperimentConfig, outs: &[RunOutput], i: usize, sigma: usize) -> Result<Value, ExperimentError> {
    let probes: Vec<f64> = outs.iter().flat_map(|o| o.snapshots[i].probes.iter().copied()).collect();
    let tracked: Vec<f64> = (0..c.analysis.tracked_vertices.len())
        .map(|j| outs.iter().map(|o| o.snapshots[i].tracked[j] as f64).sum::<f64>() / outs.len() as f64)
        .collect();
    let attraction = if probes.is_empty() {
        None
    } else {
        let mean = probes.iter().sum::<f64>() / probes.len() as f64;
        Some(json!({
            "probes": probes.len(),
            "mean": mean,
            "expected": expected_total_attraction(&c.params, sigma)?,
            "band": concentration_band(&c.params, sigma)?,
        }))
    };
    Ok(json!({
        "sigma": sigma,
        "mean_max_degree": outs.iter().map(|o| o.snapshots[i].histogram.max_degree() as f64).sum::<f64>() / outs.len() as f64,
        "mean_tracked_degree": tracked,
        "total_attraction": attraction,
    }))
}

fn theory(c: &ExperimentConfig, sink: &mut Sink) -> Result<Value, ExperimentError> {
    Ok(match theory_rows(c, sink)? {
        Some(pred) => theory_summary(&pred),
        None => json!({ "skipped": "alpha <= 2" }),
    })
}

fn analyze(c: &ExperimentConfig, sink: &mut Sink, violations: &mut Vec<String>) -> Result<Value, ExperimentError> {
    let path = c.input.as_deref().unwrap_or(Path::new(""));
    let file = File::open(path).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let edges = read_edges(BufReader::new(file)).map_err(|source| ExperimentError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    let m = c.params.m;
    let mut degrees: Vec<u64> = Vec::new();
    let mut kept = Vec::with_capacity(edges.len());
    for (i, &(s, h)) in edges.iter().enumerate() {
        if s == 0 || h == 0 || h > s {
            violations.push(format!("edge {}: {s} -> {h} is not a backward edge", i + 1));
            continue;
        }
        kept.push((s - 1, h - 1));
        if s != i / m + 1 {
            violations.push(format!("edge {}: source {s}, expected {}", i + 1, i / m + 1));
        }
        if degrees.len() < s {
            degrees.resize(s, 0);
        }
        degrees[s - 1] += 1;
        degrees[h - 1] += 1;
    }
    let n = degrees.len();
    if edges.len() != n * m {
        violations.push(format!("{} edges for {n} vertices, expected {}", edges.len(), n * m));
    }
    if degrees.iter().sum::<u64>() != 2 * edges.len() as u64 {
        violations.push("degree sum differs from twice the edge count".into());
    }
    let hist = DegreeHistogram::from_degrees(m, &degrees);
    if let Err(e) = hist.check() {
        violations.push(e.to_string());
    }
    sink.write("degree_hist.csv", |w| write_histogram(&hist, w))?;
    let graph = UndirectedGraph::from_edges(n, kept);
    Ok(json!({
        "input": path,
        "edges": edges.len(),
        "graph": graph_summary(c, &hist, &graph),
    }))
}

fn couple(c: &ExperimentConfig, sink: &mut Sink, violations: &mut Vec<String>) -> Result<Value, ExperimentError> {
    let tau = c.tau.unwrap_or(1);
    let opts = CouplingOptions {
        engine: c.coupling_engine,
        sampler: c.sampler,
    };
    let runs = run_coupled_ensemble(&c.params, tau, c.replicas, &opts)?;
    let len = runs[0].trajectory.len();
    let mut mean = vec![0.0; len];
    let mut mean_endpoint = vec![0.0; len];
    for r in &runs {
        check_state(&format!("replica {}", r.replica), &r.state, violations);
        check_state(&format!("replica {} (perturbed)", r.replica), &r.state_hat, violations);
        sink.write(&format!("coupling_{}.csv", r.replica), |w| write_trajectory(tau, &r.trajectory, w))?;
        for i in 0..len {
            mean[i] += r.trajectory[i] as f64 / runs.len() as f64;
            mean_endpoint[i] += r.endpoint_trajectory[i] as f64 / runs.len() as f64;
        }
    }
    sink.write("coupling_mean.csv", |w| {
        writeln!(w, "sigma,delta,endpoint")?;
        for i in 0..len {
            writeln!(w, "{},{:e},{:e}", tau + i, mean[i], mean_endpoint[i])?;
        }
        Ok(())
    })?;
    let fit = match mismatch_growth_fit(&runs) {
        Ok(f) => json!(f),
        Err(e) => json!({ "error": e.to_string() }),
    };
    Ok(json!({
        "tau": tau,
        "replicas": runs.len(),
        "final_mean_delta": mean.last(),
        "final_mean_endpoint": mean_endpoint.last(),
        "final_delta": runs.iter().map(|r| r.trajectory.last().copied().unwrap_or(0)).collect::<Vec<_>>(),
        "degree_growth_a": c.params.growth_exponent(),
        "growth_fit": fit,
    }))
}

fn check_kernel(c: &ExperimentConfig) -> Result<Value, ExperimentError> {
    let a = &c.analysis;
    let kernel = &c.params.kernel;
    let report = kernel.report(c.params.n.max(2) as u64, a.mu, a.l, a.c3_min)?;
    let model = Model::new(c.params.clone())?;
    Ok(json!({
        "kernel": kernel,
        "report": report,
        "f_max": model.f_max,
        "expected_acceptance": model.expected_acceptance(),
        "support_radius": kernel.support_radius(),
    }))
}
