use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use gpaf_cli::{run_experiment, validate_config, Mode};
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "gpaf", version, about = "Geometric preferential attachment with fitness: simulation and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow one graph.
    Generate(Overrides),
    /// Grow independent replicas and compare with the limiting law.
    Ensemble(Overrides),
    /// Tabulate the limiting degree law.
    Theory(Overrides),
    /// Analyze an edge list.
    Analyze(Overrides),
    /// Run coupled processes perturbed at time tau.
    Couple(Overrides),
    /// Report the regularity conditions of the kernel.
    CheckKernel(Overrides),
}

/// Flags override the corresponding fields of the config document.
#[derive(Args)]
struct Overrides {
    /// JSON config or manifest.
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[arg(short, long)]
    outputs: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Kernel as JSON, e.g. '{"variant":"RangeIndicator","r_n":0.3}'.
    #[arg(long)]
    kernel: Option<String>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    snapshot_times: Option<Vec<usize>>,
    #[arg(long)]
    threads: Option<usize>,
    /// Write edge lists.
    #[arg(long)]
    edges: bool,
    /// Use the rejection sampler.
    #[arg(long)]
    fast: bool,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    tau: Option<usize>,
    #[arg(long)]
    k_min: Option<u64>,
    #[arg(long)]
    k_max: Option<usize>,
}

fn object(v: &mut Value) -> &mut Map<String, Value> {
    if !v.is_object() {
        *v = Value::Object(Map::new());
    }
    v.as_object_mut().unwrap()
}

fn set(v: &mut Value, path: &[&str], x: Value) {
    let (last, parents) = path.split_last().unwrap();
    let mut node = v;
    for p in parents {
        node = object(node).entry(*p).or_insert(Value::Null);
    }
    object(node).insert((*last).to_string(), x);
}

fn document(mode: Mode, o: &Overrides) -> anyhow::Result<String> {
    let mut doc = match &o.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let mut v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            if v.get(gpaf_cli::config::MANIFEST_VERSION_KEY).is_some() {
                v = v["config"].take();
            }
            v
        }
        None => json!({}),
    };
    set(&mut doc, &["mode"], json!(mode));
    if object(&mut doc).get("params").and_then(|p| p.get("kernel")).is_none() {
        set(&mut doc, &["params", "kernel"], json!({ "variant": "Constant" }));
    }
    if let Some(k) = &o.kernel {
        let kernel: Value = serde_json::from_str(k).context("parsing --kernel")?;
        set(&mut doc, &["params", "kernel"], kernel);
    }
    let fields: [(&[&str], Option<Value>); 14] = [
        (&["outputs"], o.outputs.as_ref().map(|x| json!(x))),
        (&["params", "n"], o.n.map(|x| json!(x))),
        (&["params", "m"], o.m.map(|x| json!(x))),
        (&["params", "alpha"], o.alpha.map(|x| json!(x))),
        (&["params", "delta"], o.delta.map(|x| json!(x))),
        (&["params", "seed"], o.seed.map(|x| json!(x))),
        (&["replicas"], o.replicas.map(|x| json!(x))),
        (&["snapshot_times"], o.snapshot_times.as_ref().map(|x| json!(x))),
        (&["threads"], o.threads.map(|x| json!(x))),
        (&["input"], o.input.as_ref().map(|x| json!(x))),
        (&["tau"], o.tau.map(|x| json!(x))),
        (&["analysis", "k_min"], o.k_min.map(|x| json!(x))),
        (&["analysis", "k_max"], o.k_max.map(|x| json!(x))),
        (&["write_edges"], o.edges.then(|| json!(true))),
    ];
    for (path, value) in fields {
        if let Some(v) = value {
            set(&mut doc, path, v);
        }
    }
    if o.fast {
        set(&mut doc, &["sampler"], json!({ "kind": "fast", "acceptance_floor": 0.01 }));
    }
    Ok(doc.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, overrides) = match &cli.command {
        Command::Generate(o) => (Mode::Generate, o),
        Command::Ensemble(o) => (Mode::Ensemble, o),
        Command::Theory(o) => (Mode::Theory, o),
        Command::Analyze(o) => (Mode::Analyze, o),
        Command::Couple(o) => (Mode::Couple, o),
        Command::CheckKernel(o) => (Mode::CheckKernel, o),
    };
    let raw = match document(mode, overrides) {
        Ok(raw) => raw,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::FAILURE;
        }
    };
    let validated = match validate_config(&raw) {
        Ok(v) => v,
        Err(errors) => {
            for e in errors {
                eprintln!("config error: {e}");
            }
            return ExitCode::FAILURE;
        }
    };
    for w in &validated.warnings {
        eprintln!("warning: {w}");
    }
    match run_experiment(&validated.config) {
        Ok(outcome) => {
            for a in &outcome.artifacts {
                println!("{}", a.display());
            }
            for v in &outcome.violations {
                eprintln!("invariant violation: {v}");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
