use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use serde::Serialize;
use serde_json::{json, Value};

use specevo::diagnostics::{verify_assumption, VerifyOptions};
use specevo::error::ErrorKind;
use specevo::evaluation::{run_benchmark, threshold_predict, BenchmarkConfig};
use specevo::graph::{
    build_snapshots, build_snapshots_by_time, connected_components, largest_connected_component,
    parse_edge_list, write_edge_list, Delimiter, SnapshotSequence, TemporalGraph,
};
use specevo::kernels::{Alpha, SpectralTransform};
use specevo::spectral::decompose;
use specevo::synthetic::{generate_spectral_network, SpectralScenario};
use specevo::trajectory::{forecast_spectrum, predict_scores, ForecastMethod, ForecastOptions};

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "specevo", version, about = "Temporal link prediction by spectral evolution")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    /// Worker threads for parallel sections.
    #[arg(long, env = "SPECEVO_THREADS", global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse an edge list, keep its largest connected component, report statistics.
    Ingest(IngestArgs),
    /// Check whether eigenvectors stay fixed across snapshots.
    Verify(VerifyArgs),
    /// Forecast the next spectrum and write link scores.
    Predict(PredictArgs),
    /// Benchmark several methods on temporal train/test splits.
    Evaluate(EvaluateArgs),
    /// Generate a synthetic network with prescribed spectral evolution.
    Generate(GenerateArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum DelimiterArg {
    Auto,
    Whitespace,
    Comma,
}

impl From<DelimiterArg> for Delimiter {
    fn from(d: DelimiterArg) -> Self {
        match d {
            DelimiterArg::Auto => Delimiter::Auto,
            DelimiterArg::Whitespace => Delimiter::Whitespace,
            DelimiterArg::Comma => Delimiter::Comma,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum SplitBy {
    /// Equal numbers of new edges per snapshot.
    Edges,
    /// Equally spaced timestamp cutoffs.
    Time,
}

#[derive(Args, Debug, Serialize)]
struct InputArgs {
    /// Edge list with `source target timestamp` lines.
    #[arg(short, long)]
    input: PathBuf,

    #[arg(long, value_enum, default_value = "auto")]
    delimiter: DelimiterArg,

    /// Use the whole graph instead of its largest connected component.
    #[arg(long)]
    no_lcc: bool,
}

#[derive(Args, Debug, Serialize)]
struct SnapshotArgs {
    /// Number of cumulative snapshots.
    #[arg(short = 't', long, default_value_t = 10)]
    snapshots: usize,

    #[arg(long, value_enum, default_value = "edges")]
    split_by: SplitBy,
}

#[derive(Args, Debug, Serialize)]
struct IngestArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Where to write the cleaned edge list.
    #[arg(short, long)]
    out: PathBuf,

    /// Manifest path; defaults to `<out>.manifest.json`.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,

    #[command(flatten)]
    snapshots: SnapshotArgs,

    /// Minimum score for a PASS verdict.
    #[arg(long, default_value_t = 0.9)]
    threshold: f64,

    /// Relative position of the reference snapshot.
    #[arg(long, default_value_t = 0.75)]
    reference: f64,

    /// Share of leading dimensions to track.
    #[arg(long, default_value_t = 0.08)]
    fraction: f64,

    /// Directory for the report, CSV tables and manifest.
    #[arg(short, long)]
    out_dir: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct PredictArgs {
    #[command(flatten)]
    input: InputArgs,

    #[command(flatten)]
    snapshots: SnapshotArgs,

    /// `extrapolate`, `linreg`, `quadreg` (optionally `:exact`), `triangle`,
    /// `exp[:alpha]` or `neumann[:alpha]`.
    #[arg(short, long, default_value = "linreg")]
    method: String,

    /// Kernel alpha (`auto` or a number); overrides one given in the method.
    #[arg(long)]
    alpha: Option<String>,

    /// Share of dimensions forecast by trajectory methods.
    #[arg(long, default_value_t = 0.08)]
    fraction: f64,

    /// What unforecast dimensions contribute: `keep` or `zero`.
    #[arg(long, default_value = "keep")]
    unselected: String,

    /// Relative position of the earlier two-point snapshot.
    #[arg(long, default_value_t = 0.75)]
    two_point_position: f64,

    /// Also write the adjacency thresholded at this normalised score.
    #[arg(long)]
    delta: Option<f64>,

    /// List this many highest-scoring non-adjacent pairs.
    #[arg(long, default_value_t = 20)]
    top: usize,

    #[arg(short, long)]
    out_dir: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct EvaluateArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Comma-separated method specs.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "triangle,exp:auto,neumann:auto,extrapolate,linreg,quadreg"
    )]
    methods: Vec<String>,

    /// Comma-separated train ratios.
    #[arg(long, value_delimiter = ',', default_value = "0.75,0.8")]
    ratios: Vec<f64>,

    /// Snapshots built from the train edges.
    #[arg(short = 't', long, default_value_t = 10)]
    snapshots: usize,

    #[arg(long, default_value_t = 0.08)]
    fraction: f64,

    #[arg(long, default_value = "zero")]
    unselected: String,

    #[arg(long, default_value_t = 0.75)]
    two_point_position: f64,

    /// Negatives per ratio; defaults to the number of test edges.
    #[arg(long)]
    negatives: Option<usize>,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Network name recorded in the report; defaults to the input file stem.
    #[arg(long)]
    network: Option<String>,

    /// JSON report path.
    #[arg(short, long)]
    out: PathBuf,

    /// Optional flat CSV copy of the report.
    #[arg(long)]
    csv: Option<PathBuf>,

    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct GenerateArgs {
    #[arg(short, long, default_value_t = 200)]
    n: usize,

    /// Observed steps; one more step is held out.
    #[arg(long, default_value_t = 10)]
    steps: usize,

    /// `constant`, `linear[:slope]`, `quadratic[:curvature]` or
    /// `irregular[:drift_lo,drift_hi,volatility,start]`.
    #[arg(long, default_value = "linear")]
    trajectory: String,

    #[arg(long, default_value_t = 0.05)]
    density: f64,

    #[arg(long, default_value_t = 0.85)]
    decay: f64,

    #[arg(long, default_value_t = 0.3)]
    negative_fraction: f64,

    /// Switch to an independent basis from this 1-based step on.
    #[arg(long)]
    rotate_at: Option<usize>,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Edge list output.
    #[arg(short, long)]
    out: PathBuf,

    /// Ground-truth sidecar; defaults to `<out>.truth.json`.
    #[arg(long)]
    truth: Option<PathBuf>,

    /// Include the basis matrix in the sidecar.
    #[arg(long)]
    include_basis: bool,

    #[arg(long)]
    manifest: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (kind, code) = classify(&e);
            let line = json!({ "error": kind, "message": format!("{e:#}") });
            eprintln!("{line}");
            ExitCode::from(code)
        }
    }
}

fn classify(e: &anyhow::Error) -> (&'static str, u8) {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<specevo::Error>() {
            return match err.kind() {
                ErrorKind::Usage => ("usage", EXIT_USAGE),
                ErrorKind::Numerical => ("numerical", EXIT_NUMERICAL),
                ErrorKind::Input => ("input", EXIT_IO),
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() || cause.downcast_ref::<serde_json::Error>().is_some() {
            return ("input", EXIT_IO);
        }
    }
    ("usage", EXIT_USAGE)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Ingest(a) => ingest(&a),
        Command::Verify(a) => verify(&a),
        Command::Predict(a) => predict(&a),
        Command::Evaluate(a) => evaluate(&a),
        Command::Generate(a) => generate(&a),
    }
}

fn load(args: &InputArgs) -> anyhow::Result<(TemporalGraph, Value)> {
    let file = File::open(&args.input).with_context(|| format!("opening {}", args.input.display()))?;
    let parsed = parse_edge_list(BufReader::new(file), args.delimiter.into())
        .with_context(|| format!("parsing {}", args.input.display()))?;
    if parsed.self_loops > 0 {
        warn!("dropped {} self-loop lines", parsed.self_loops);
    }
    if parsed.duplicates > 0 {
        warn!("merged {} duplicate edges", parsed.duplicates);
    }
    let full = parsed.graph;
    let components = connected_components(&full).len();
    let graph = if args.no_lcc {
        full.clone()
    } else {
        largest_connected_component(&full)?
    };
    let stats = json!({
        "vertices": full.vertex_count(),
        "edges": full.edge_count(),
        "self_loops": parsed.self_loops,
        "duplicates": parsed.duplicates,
        "components": components,
        "used_vertices": graph.vertex_count(),
        "used_edges": graph.edge_count(),
    });
    info!(
        "loaded {} vertices, {} edges; using {} vertices, {} edges",
        full.vertex_count(),
        full.edge_count(),
        graph.vertex_count(),
        graph.edge_count()
    );
    Ok((graph, stats))
}

fn snapshots(graph: &TemporalGraph, args: &SnapshotArgs) -> anyhow::Result<SnapshotSequence> {
    Ok(match args.split_by {
        SplitBy::Edges => build_snapshots(graph, args.snapshots)?,
        SplitBy::Time => build_snapshots_by_time(graph, args.snapshots)?,
    })
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_json(path: &Path, value: &impl Serialize) -> anyhow::Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    path.with_file_name(name)
}

fn write_manifest(
    path: &Path,
    command: &str,
    config: &impl Serialize,
    seed: Option<u64>,
    outputs: &[&Path],
    summary: Value,
) -> anyhow::Result<()> {
    let manifest = json!({
        "tool": "specevo",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "seed": seed,
        "outputs": outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "summary": summary,
    });
    write_json(path, &manifest)
}

fn ingest(a: &IngestArgs) -> anyhow::Result<()> {
    let (graph, stats) = load(&a.input)?;
    let mut w = create(&a.out)?;
    write_edge_list(&graph, &mut w)?;
    w.flush()?;
    println!("{stats}");
    let manifest = a.manifest.clone().unwrap_or_else(|| sibling(&a.out, ".manifest.json"));
    write_manifest(&manifest, "ingest", a, None, &[&a.out], stats)
}

fn write_table(path: &Path, header: &[String], rows: &[Vec<f64>]) -> anyhow::Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{}", header.join(","))?;
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        writeln!(w, "{},{}", i + 1, cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}

fn verify(a: &VerifyArgs) -> anyhow::Result<()> {
    let (graph, stats) = load(&a.input)?;
    let s = snapshots(&graph, &a.snapshots)?;
    let opts = VerifyOptions {
        threshold: a.threshold,
        reference_position: a.reference,
        top_fraction: a.fraction,
    };
    let report = verify_assumption(&s, &opts)?;
    let dir = &a.out_dir;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;

    let header: Vec<String> = std::iter::once("step".to_string())
        .chain(report.dimensions.iter().map(|j| format!("dim{}", j + 1)))
        .collect();
    let evolution_rows: Vec<Vec<f64>> = (0..s.len())
        .map(|i| report.evolution.iter().map(|series| series[i]).collect())
        .collect();
    let paths = [
        dir.join("report.json"),
        dir.join("spectra.csv"),
        dir.join("evolution.csv"),
        dir.join("stability.csv"),
    ];
    write_json(&paths[0], &report)?;
    write_table(&paths[1], &header, &report.spectra)?;
    write_table(&paths[2], &header, &evolution_rows)?;
    let mut w = create(&paths[3])?;
    report.stability.write_csv(&mut w)?;
    w.flush()?;

    println!("{}", report.verdict_line());
    let summary = json!({
        "graph": stats,
        "passed": report.passed,
        "score": report.score,
        "diagonality_score": report.diagonality_score,
        "min_evolution_similarity": report.min_evolution_similarity,
    });
    let outputs: Vec<&Path> = paths.iter().map(PathBuf::as_path).collect();
    write_manifest(&dir.join("manifest.json"), "verify", a, None, &outputs, summary)
}

fn resolve_method(a: &PredictArgs) -> anyhow::Result<ForecastMethod> {
    let method: ForecastMethod = a.method.parse()?;
    let Some(alpha) = &a.alpha else {
        return Ok(method);
    };
    let alpha: Alpha = alpha.parse()?;
    Ok(match method {
        ForecastMethod::Kernel(SpectralTransform::Exponential(_)) => {
            ForecastMethod::Kernel(SpectralTransform::Exponential(alpha))
        }
        ForecastMethod::Kernel(SpectralTransform::Neumann(_)) => {
            ForecastMethod::Kernel(SpectralTransform::Neumann(alpha))
        }
        _ => bail!(specevo::Error::InvalidArgument(format!(
            "--alpha applies to exp and neumann only, not {method}"
        ))),
    })
}

fn predict(a: &PredictArgs) -> anyhow::Result<()> {
    let method = resolve_method(a)?;
    let unselected = a.unselected.parse()?;
    if let Some(delta) = a.delta {
        if !(0.0..=1.0).contains(&delta) {
            bail!(specevo::Error::InvalidArgument(format!("delta must lie in [0, 1], got {delta}")));
        }
    }
    let (graph, stats) = load(&a.input)?;
    let s = snapshots(&graph, &a.snapshots)?;
    let d = decompose(s.last())?;
    let options = ForecastOptions {
        fraction: a.fraction,
        two_point_position: a.two_point_position,
    };
    let forecast = forecast_spectrum(&s, &d, method, &options)?;
    let scores = predict_scores(&d, &forecast, unselected)?;

    let dir = &a.out_dir;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut outputs = vec![dir.join("scores.csv"), dir.join("forecast.json"), dir.join("top_pairs.csv")];

    let mut w = create(&outputs[0])?;
    scores.matrix().write_csv(&mut w)?;
    w.flush()?;

    let dims: Vec<Value> = forecast
        .predicted
        .iter()
        .map(|(&j, &v)| json!({ "dimension": j + 1, "current": d.eigenvalue(j), "predicted": v }))
        .collect();
    let alpha = match method {
        ForecastMethod::Kernel(k) => k.resolve_alpha(d.spectral_radius()),
        _ => None,
    };
    write_json(
        &outputs[1],
        &json!({
            "method": method.to_string(),
            "alpha": alpha,
            "selected_fraction": forecast.selected_fraction,
            "unselected": unselected.to_string(),
            "dimensions": dims,
        }),
    )?;

    let last = s.last();
    let n = graph.vertex_count();
    let mut candidates: Vec<(f64, usize, usize)> = (0..n)
        .flat_map(|v| (0..v).map(move |u| (u, v)))
        .filter(|&(u, v)| last.get(u, v) == 0.0)
        .map(|(u, v)| (scores.score(u, v), u, v))
        .collect();
    candidates.sort_by(|x, y| y.0.total_cmp(&x.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    let mut w = create(&outputs[2])?;
    writeln!(w, "source,target,score")?;
    for &(score, u, v) in candidates.iter().take(a.top) {
        writeln!(w, "{},{},{}", graph.label(u), graph.label(v), score)?;
    }
    w.flush()?;

    if let Some(delta) = a.delta {
        let path = dir.join("adjacency.csv");
        let mut w = create(&path)?;
        threshold_predict(&scores, delta)?.write_csv(&mut w)?;
        w.flush()?;
        outputs.push(path);
    }

    println!("{method}: forecast {} dimensions over {} vertices", forecast.predicted.len(), n);
    let summary = json!({ "graph": stats, "method": method.to_string(), "alpha": alpha, "forecast_dimensions": forecast.predicted.len() });
    let refs: Vec<&Path> = outputs.iter().map(PathBuf::as_path).collect();
    write_manifest(&dir.join("manifest.json"), "predict", a, None, &refs, summary)
}

fn evaluate(a: &EvaluateArgs) -> anyhow::Result<()> {
    let methods = a
        .methods
        .iter()
        .map(|m| m.trim().parse::<ForecastMethod>())
        .collect::<Result<Vec<_>, _>>()?;
    let network = a.network.clone().unwrap_or_else(|| {
        a.input
            .input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "network".into())
    });
    let config = BenchmarkConfig {
        network,
        methods,
        ratios: a.ratios.clone(),
        snapshots: a.snapshots,
        fraction: a.fraction,
        unselected: a.unselected.parse()?,
        two_point_position: a.two_point_position,
        negatives: a.negatives,
        seed: a.seed,
    };
    let (graph, stats) = load(&a.input)?;
    let report = run_benchmark(&graph, &config)?;
    write_json(&a.out, &report)?;

    let mut outputs: Vec<&Path> = vec![&a.out];
    if let Some(csv) = &a.csv {
        let mut w = create(csv)?;
        writeln!(w, "network,ratio,method,auc,runtime_s")?;
        for c in &report.results {
            writeln!(w, "{},{},{},{},{}", c.network, c.ratio, c.method, c.auc, c.runtime_s)?;
        }
        w.flush()?;
        outputs.push(csv);
    }
    for c in &report.results {
        println!("{} ratio={} {}: auc={:.4}", c.network, c.ratio, c.method, c.auc);
    }
    let manifest = a.manifest.clone().unwrap_or_else(|| sibling(&a.out, ".manifest.json"));
    let summary = json!({ "graph": stats, "cells": report.results.len() });
    write_manifest(&manifest, "evaluate", a, Some(a.seed), &outputs, summary)
}

fn generate(a: &GenerateArgs) -> anyhow::Result<()> {
    let scenario = SpectralScenario {
        n: a.n,
        t: a.steps,
        basis_seed: a.seed,
        trajectory: a.trajectory.parse()?,
        density: a.density,
        decay: a.decay,
        negative_fraction: a.negative_fraction,
        rotate_at: a.rotate_at,
    };
    let net = generate_spectral_network(&scenario)?;
    let mut w = create(&a.out)?;
    write_edge_list(&net.graph, &mut w)?;
    w.flush()?;

    let truth_path = a.truth.clone().unwrap_or_else(|| sibling(&a.out, ".truth.json"));
    let mut truth = json!({
        "n": a.n,
        "steps": a.steps,
        "trajectory": scenario.trajectory.to_string(),
        "threshold": net.truth.threshold,
        "repaired": net.truth.repaired,
        "edges": net.graph.edge_count(),
        "eigenvalues": net.truth.eigenvalues,
    });
    if a.include_basis {
        let rows = |m: &nalgebra::DMatrix<f64>| -> Vec<Vec<f64>> {
            m.row_iter().map(|r| r.iter().copied().collect()).collect()
        };
        truth["basis"] = json!(rows(&net.truth.basis));
        if let Some(r) = &net.truth.rotated_basis {
            truth["rotated_basis"] = json!(rows(r));
        }
    }
    write_json(&truth_path, &truth)?;

    println!(
        "generated {} vertices, {} edges over {} steps",
        net.graph.vertex_count(),
        net.graph.edge_count(),
        a.steps
    );
    let manifest = a.manifest.clone().unwrap_or_else(|| sibling(&a.out, ".manifest.json"));
    let summary = json!({ "edges": net.graph.edge_count(), "repaired": net.truth.repaired });
    write_manifest(&manifest, "generate", a, Some(a.seed), &[&a.out, &truth_path], summary)
}
