//! Temporal splits, negative sampling, AUC, thresholding and the benchmark
//! harness.

use std::collections::{BTreeSet, HashSet};
use std::time::Instant;

use log::{debug, warn};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::{build_snapshots, TemporalGraph};
use crate::scores::PredictionScores;
use crate::spectral::{decompose, SymmetricMatrix};
use crate::trajectory::{
    forecast_spectrum, predict_scores, ForecastMethod, ForecastOptions, UnselectedPolicy,
    DEFAULT_TWO_POINT_POSITION,
};

/// Canonical vertex pairs `(u, v)` with `u < v`.
pub type PairSet = BTreeSet<(usize, usize)>;

#[derive(Debug, Clone, PartialEq)]
pub struct LinkSplit {
    /// Same vertex set as the source graph, holding only the train edges.
    pub train: TemporalGraph,
    pub test_positives: PairSet,
    pub ratio: f64,
}

/// The first `⌈ratio · |E|⌉` edges in chronological order form the train
/// graph; the rest are the positives to predict.
pub fn temporal_split(g: &TemporalGraph, ratio: f64) -> Result<LinkSplit> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::invalid(format!("split ratio must lie in (0, 1), got {ratio}")));
    }
    let total = g.edge_count();
    let cut = (ratio * total as f64 - 1e-9).ceil().max(0.0) as usize;
    if cut == 0 || cut >= total {
        return Err(Error::invalid(format!(
            "ratio {ratio} on {total} edges leaves an empty train or test side"
        )));
    }
    let (train, test) = g.edges().split_at(cut);
    Ok(LinkSplit {
        train: g.with_edges(train.to_vec()),
        test_positives: test.iter().map(|e| e.pair()).collect(),
        ratio,
    })
}

/// `count` distinct uniformly random pairs that are neither train edges,
/// test positives nor self-pairs. Deterministic per seed.
pub fn sample_negatives(g: &TemporalGraph, split: &LinkSplit, count: usize, seed: u64) -> Result<PairSet> {
    let mut excluded: HashSet<(usize, usize)> = split.train.edge_set();
    excluded.extend(split.test_positives.iter().copied());
    excluded.extend(g.edge_set());
    sample_non_edges(g.vertex_count(), &excluded, count, seed)
}

pub(crate) fn sample_non_edges(
    n: usize,
    excluded: &HashSet<(usize, usize)>,
    count: usize,
    seed: u64,
) -> Result<PairSet> {
    let pairs = n * n.saturating_sub(1) / 2;
    let available = pairs - excluded.len().min(pairs);
    if count > available {
        return Err(Error::InsufficientNonEdges {
            requested: count,
            available,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = PairSet::new();
    if count == 0 {
        return Ok(out);
    }
    if 2 * count > available {
        let candidates: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .filter(|p| !excluded.contains(p))
            .collect();
        out.extend(rand::seq::index::sample(&mut rng, candidates.len(), count).into_iter().map(|i| candidates[i]));
        return Ok(out);
    }
    while out.len() < count {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            continue;
        }
        let p = (u.min(v), u.max(v));
        if !excluded.contains(&p) {
            out.insert(p);
        }
    }
    Ok(out)
}

/// `P(p > q) + ½ P(p = q)` over all positive/negative value pairs, via
/// mid-ranks.
pub fn auc_from_values(positives: &[f64], negatives: &[f64]) -> Result<f64> {
    if positives.is_empty() || negatives.is_empty() {
        return Err(Error::invalid("AUC needs at least one positive and one negative"));
    }
    if positives.iter().chain(negatives).any(|v| !v.is_finite()) {
        return Err(Error::invalid("AUC scores must be finite"));
    }
    let mut all: Vec<(f64, bool)> = positives
        .iter()
        .map(|&v| (v, true))
        .chain(negatives.iter().map(|&v| (v, false)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        // Ranks i+1..=j share their mean.
        let mid = (i + 1 + j) as f64 / 2.0;
        rank_sum += mid * all[i..j].iter().filter(|x| x.1).count() as f64;
        i = j;
    }
    let (np, nn) = (positives.len() as f64, negatives.len() as f64);
    Ok(((rank_sum - np * (np + 1.0) / 2.0) / (np * nn)).clamp(0.0, 1.0))
}

fn pair_scores(scores: &PredictionScores, pairs: &PairSet) -> Result<Vec<f64>> {
    let n = scores.dim();
    pairs
        .iter()
        .map(|&(u, v)| {
            if u >= n || v >= n {
                Err(Error::IndexOutOfRange { index: u.max(v), dim: n })
            } else {
                Ok(scores.score(u, v))
            }
        })
        .collect()
}

pub fn auc_roc(scores: &PredictionScores, positives: &PairSet, negatives: &PairSet) -> Result<f64> {
    if let Some(p) = positives.intersection(negatives).next() {
        return Err(Error::invalid(format!("pair {p:?} is both positive and negative")));
    }
    auc_from_values(&pair_scores(scores, positives)?, &pair_scores(scores, negatives)?)
}

/// Min-max normalises the off-diagonal scores to `[0, 1]` and marks pairs
/// at or above `delta`. The diagonal is always 0.
pub fn threshold_predict(scores: &PredictionScores, delta: f64) -> Result<SymmetricMatrix> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::invalid(format!("delta must lie in [0, 1], got {delta}")));
    }
    let n = scores.dim();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in 0..n {
        for u in 0..v {
            let s = scores.score(u, v);
            lo = lo.min(s);
            hi = hi.max(s);
        }
    }
    let span = hi - lo;
    if n > 1 && span <= 0.0 {
        warn!("constant score matrix: every pair normalises to 0");
    }
    Ok(SymmetricMatrix::from_upper(n, |u, v| {
        if u == v {
            return 0.0;
        }
        let norm = if span > 0.0 { (scores.score(u, v) - lo) / span } else { 0.0 };
        if norm >= delta {
            1.0
        } else {
            0.0
        }
    }))
}

/// Share of off-diagonal pairs on which two 0/1 matrices agree.
pub fn reconstruction_accuracy(predicted: &SymmetricMatrix, truth: &SymmetricMatrix) -> Result<f64> {
    let n = truth.dim();
    if predicted.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: predicted.dim(),
        });
    }
    if n < 2 {
        return Ok(1.0);
    }
    let mut agree = 0usize;
    for v in 0..n {
        for u in 0..v {
            agree += usize::from((predicted.get(u, v) != 0.0) == (truth.get(u, v) != 0.0));
        }
    }
    Ok(agree as f64 / (n * (n - 1) / 2) as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    pub network: String,
    pub methods: Vec<ForecastMethod>,
    pub ratios: Vec<f64>,
    /// Snapshots built from the train edges.
    pub snapshots: usize,
    pub fraction: f64,
    pub unselected: UnselectedPolicy,
    pub two_point_position: f64,
    /// Negatives per ratio; defaults to the number of test positives.
    pub negatives: Option<usize>,
    pub seed: u64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            network: "network".into(),
            methods: Vec::new(),
            ratios: vec![0.75, 0.8],
            snapshots: 10,
            fraction: 0.08,
            unselected: UnselectedPolicy::Zero,
            two_point_position: DEFAULT_TWO_POINT_POSITION,
            negatives: None,
            seed: 0,
        }
    }
}

/// One (ratio, method) result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkCell {
    pub network: String,
    pub ratio: f64,
    pub method: String,
    pub auc: f64,
    /// Wall-clock seconds; the only non-deterministic field.
    pub runtime_s: f64,
    pub params: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub network: String,
    pub seed: u64,
    pub results: Vec<BenchmarkCell>,
}

impl EvaluationReport {
    pub fn auc(&self, ratio: f64, method: &str) -> Option<f64> {
        self.results
            .iter()
            .find(|c| c.ratio == ratio && c.method == method)
            .map(|c| c.auc)
    }

    /// The report with every `runtime_s` set to zero.
    pub fn without_runtime(&self) -> EvaluationReport {
        let mut r = self.clone();
        for c in &mut r.results {
            c.runtime_s = 0.0;
        }
        r
    }
}

/// Per ratio: temporal split, snapshots of the train graph, one
/// decomposition of the last snapshot, then every method scored on the
/// test positives against sampled non-edges. Cells run in parallel and
/// are reported in (ratio, method) input order.
pub fn run_benchmark(g: &TemporalGraph, config: &BenchmarkConfig) -> Result<EvaluationReport> {
    if config.methods.is_empty() || config.ratios.is_empty() {
        return Err(Error::invalid("benchmark needs at least one method and one ratio"));
    }
    let per_ratio: Vec<Vec<BenchmarkCell>> = config
        .ratios
        .par_iter()
        .enumerate()
        .map(|(k, &ratio)| ratio_cells(g, config, k, ratio))
        .collect::<Result<_>>()?;
    Ok(EvaluationReport {
        network: config.network.clone(),
        seed: config.seed,
        results: per_ratio.into_iter().flatten().collect(),
    })
}

fn ratio_cells(g: &TemporalGraph, config: &BenchmarkConfig, k: usize, ratio: f64) -> Result<Vec<BenchmarkCell>> {
    let split = temporal_split(g, ratio)?;
    let snapshots = build_snapshots(&split.train, config.snapshots)?;
    let decomposition = decompose(snapshots.last())?;
    let count = config.negatives.unwrap_or(split.test_positives.len());
    let negatives = sample_negatives(g, &split, count, config.seed.wrapping_add(k as u64))?;
    debug!(
        "ratio {ratio}: {} train edges, {} positives, {} negatives",
        split.train.edge_count(),
        split.test_positives.len(),
        negatives.len()
    );
    let options = ForecastOptions {
        fraction: config.fraction,
        two_point_position: config.two_point_position,
    };

    config
        .methods
        .par_iter()
        .map(|&method| {
            let started = Instant::now();
            let forecast = forecast_spectrum(&snapshots, &decomposition, method, &options)?;
            let scores = predict_scores(&decomposition, &forecast, config.unselected)?;
            let auc = auc_roc(&scores, &split.test_positives, &negatives)?;
            let runtime_s = started.elapsed().as_secs_f64();

            let mut params = json!({
                "snapshots": config.snapshots,
                "negatives": negatives.len(),
                "seed": config.seed,
            });
            match method {
                ForecastMethod::Kernel(t) => {
                    if let Some(a) = t.resolve_alpha(decomposition.spectral_radius()) {
                        params["alpha"] = json!(a);
                    }
                }
                ForecastMethod::TwoPoint(_) => {
                    params["fraction"] = json!(config.fraction);
                    params["unselected"] = json!(config.unselected.to_string());
                    params["two_point_position"] = json!(config.two_point_position);
                }
                ForecastMethod::Regression(..) => {
                    params["fraction"] = json!(config.fraction);
                    params["unselected"] = json!(config.unselected.to_string());
                }
            }
            Ok(BenchmarkCell {
                network: config.network.clone(),
                ratio,
                method: method.to_string(),
                auc,
                runtime_s,
                params,
            })
        })
        .collect()
}

/// Dense 0/1 matrix of a pair set, for inspection and tests.
pub fn pairs_to_matrix(n: usize, pairs: &PairSet) -> SymmetricMatrix {
    let mut m = DMatrix::zeros(n, n);
    for &(u, v) in pairs {
        m[(u, v)] = 1.0;
        m[(v, u)] = 1.0;
    }
    SymmetricMatrix::symmetrized(m)
}
