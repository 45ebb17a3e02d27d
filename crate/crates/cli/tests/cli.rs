use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn specevo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specevo"))
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn read_csv(p: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(|v| v.trim().parse().unwrap()).collect())
        .collect()
}

fn generate(dir: &TempDir, trajectory: &str, n: usize, seed: u64) -> PathBuf {
    let out = dir.path().join(format!("{}-{n}-{seed}.txt", trajectory.replace(':', "_")));
    let o = specevo(&[
        "generate",
        "--n",
        &n.to_string(),
        "--steps",
        "6",
        "--trajectory",
        trajectory,
        "--density",
        "0.15",
        "--seed",
        &seed.to_string(),
        "--out",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn generate_writes_graph_truth_and_manifest() {
    let dir = TempDir::new().unwrap();
    let out = generate(&dir, "linear", 30, 1);
    let truth = read_json(&dir.path().join("linear-30-1.txt.truth.json"));
    assert_eq!(truth["eigenvalues"].as_array().unwrap().len(), 7);
    let manifest = read_json(&dir.path().join("linear-30-1.txt.manifest.json"));
    assert_eq!(manifest["command"], "generate");
    assert_eq!(manifest["seed"], 1);
    assert!(fs::read_to_string(out).unwrap().lines().count() > 10);
}

#[test]
fn ingest_reports_statistics() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("raw.txt");
    fs::write(&input, "a b 1\nb c 2\nc c 3\nb a 4\nx y 5\n").unwrap();
    let out = dir.path().join("clean.txt");
    let o = specevo(&["ingest", "--input", path(&input), "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stats: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(stats["self_loops"], 1);
    assert_eq!(stats["duplicates"], 1);
    assert_eq!(stats["components"], 2);
    assert_eq!(stats["used_vertices"], 3);
    assert_eq!(stats["used_edges"], 2);
}

#[test]
fn verify_passes_on_fixed_basis_graph() {
    let dir = TempDir::new().unwrap();
    let input = generate(&dir, "constant", 40, 3);
    let out = dir.path().join("verify");
    let o = specevo(&[
        "verify",
        "--input",
        path(&input),
        "--snapshots",
        "1",
        "--out-dir",
        path(&out),
    ]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout.contains("spectral-evolution-assumption: PASS"), "{stdout}");
    for file in ["report.json", "stability.csv", "spectra.csv", "evolution.csv", "manifest.json"] {
        assert!(out.join(file).exists(), "{file}");
    }
    let report = read_json(&out.join("report.json"));
    assert_eq!(report["passed"], true);
}

#[test]
fn verify_exits_zero_on_fail_verdict() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("g.txt");
    let mut text = String::new();
    for i in 0..12 {
        text.push_str(&format!("{} {} {}\n", i, (i + 1) % 12, i));
    }
    for i in 0..12 {
        text.push_str(&format!("{} {} {}\n", i, (i + 5) % 12, 20 + i));
    }
    fs::write(&input, text).unwrap();
    let out = dir.path().join("verify");
    let o = specevo(&[
        "verify",
        "--input",
        path(&input),
        "--snapshots",
        "2",
        "--threshold",
        "0.999",
        "--out-dir",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("spectral-evolution-assumption: "), "{stdout}");
}

#[test]
fn full_fraction_regression_reproduces_a_static_graph() {
    let dir = TempDir::new().unwrap();
    let input = generate(&dir, "constant", 30, 5);
    let out = dir.path().join("predict");
    let o = specevo(&[
        "predict",
        "--input",
        path(&input),
        "--no-lcc",
        "--snapshots",
        "4",
        "--split-by",
        "time",
        "--method",
        "linreg",
        "--fraction",
        "1.0",
        "--delta",
        "0.5",
        "--out-dir",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let scores = read_csv(&out.join("scores.csv"));
    let text = fs::read_to_string(&input).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    let labels: Vec<&str> = header.split_whitespace().skip(2).collect();
    let n = labels.len();
    assert_eq!(scores.len(), n);
    let mut adj = vec![vec![0.0; n]; n];
    for line in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        let u = labels.iter().position(|l| *l == f[0]).unwrap();
        let v = labels.iter().position(|l| *l == f[1]).unwrap();
        adj[u][v] = 1.0;
        adj[v][u] = 1.0;
    }
    for (row, want) in scores.iter().zip(&adj) {
        for (g, w) in row.iter().zip(want) {
            assert!((g - w).abs() < 1e-8, "{g} vs {w}");
        }
    }
    let forecast = read_json(&out.join("forecast.json"));
    assert_eq!(forecast["dimensions"].as_array().unwrap().len(), n);
    assert!(out.join("adjacency.csv").exists());
    assert!(out.join("top_pairs.csv").exists());
}

#[test]
fn evaluate_covers_every_cell_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let input = generate(&dir, "linear", 40, 7);
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = specevo(&[
            "evaluate",
            "--input",
            path(&input),
            "--snapshots",
            "4",
            "--fraction",
            "0.2",
            "--seed",
            "11",
            "--out",
            path(&out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let mut report = read_json(&out);
        for cell in report["results"].as_array_mut().unwrap() {
            cell.as_object_mut().unwrap().remove("runtime_s");
        }
        report
    };
    let a = run("a.json");
    let b = run("b.json");
    assert_eq!(a["results"].as_array().unwrap().len(), 12);
    assert_eq!(a, b);
    for cell in a["results"].as_array().unwrap() {
        let auc = cell["auc"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&auc));
    }
    assert!(dir.path().join("a.json.manifest.json").exists());
}

#[test]
fn errors_are_single_json_lines_with_exit_codes() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.txt");
    let o = specevo(&["verify", "--input", path(&missing), "--out-dir", path(dir.path())]);
    assert_eq!(o.status.code(), Some(4));
    let err: Value = serde_json::from_slice(o.stderr.trim_ascii()).unwrap();
    assert_eq!(err["error"], "input");

    let input = generate(&dir, "constant", 20, 2);
    let o = specevo(&[
        "predict",
        "--input",
        path(&input),
        "--method",
        "bogus",
        "--out-dir",
        path(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(o.stderr.trim_ascii()).unwrap();
    assert_eq!(err["error"], "usage");

    let o = specevo(&["evaluate", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(2));
}
