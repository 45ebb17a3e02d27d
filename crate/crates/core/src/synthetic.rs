//! Temporal networks with prescribed spectral evolution.
//!
//! A seeded orthogonal basis `X` and per-dimension eigenvalue weights give
//! dense matrices `M_i = X Λ(i) Xᵀ` for `i = 1..=t+1`. Every `M_i` is
//! thresholded at one global level `τ`, chosen so that `M_{t+1}` reaches the
//! target density, and running unions make the 0/1 snapshots cumulative.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{SnapshotSequence, TemporalEdge, TemporalGraph};
use crate::spectral::{reconstruct, SymmetricMatrix};

/// Share of edges that may need to be kept alive by the running union.
pub const MAX_REPAIR_FRACTION: f64 = 0.1;

/// Shape of the eigenvalue weight `w_j(i)`; `λ_j(i) = λ⁰_j · w_j(i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectorySpec {
    /// `w(i) = 1`.
    Constant,
    /// `w(i) = 1 + slope · (i - 1)`.
    Linear { slope: f64 },
    /// `w(i) = 1 + curvature · (i - 1)²`.
    Quadratic { curvature: f64 },
    /// `w(1) = start`, `w(i+1) = w(i) + d_j + volatility · ξ` with
    /// `d_j ~ U[drift_lo, drift_hi]` per dimension and `ξ ~ N(0, 1)`.
    Irregular {
        drift_lo: f64,
        drift_hi: f64,
        volatility: f64,
        start: f64,
    },
}

impl TrajectorySpec {
    pub const IRREGULAR_DEFAULT: TrajectorySpec = TrajectorySpec::Irregular {
        drift_lo: -1.0,
        drift_hi: 0.6,
        volatility: 0.05,
        start: 1.0,
    };
}

impl fmt::Display for TrajectorySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TrajectorySpec::Constant => f.write_str("constant"),
            TrajectorySpec::Linear { slope } => write!(f, "linear:{slope}"),
            TrajectorySpec::Quadratic { curvature } => write!(f, "quadratic:{curvature}"),
            TrajectorySpec::Irregular {
                drift_lo,
                drift_hi,
                volatility,
                start,
            } => write!(f, "irregular:{drift_lo},{drift_hi},{volatility},{start}"),
        }
    }
}

impl FromStr for TrajectorySpec {
    type Err = Error;

    /// `constant`, `linear[:slope]`, `quadratic[:curvature]`,
    /// `irregular[:drift_lo,drift_hi,volatility,start]`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let numbers = |p: &str| -> Result<Vec<f64>> {
            p.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::invalid(format!("bad number {x:?} in trajectory {s:?}")))
                })
                .collect()
        };
        let one = |default: f64| -> Result<f64> {
            match param {
                None => Ok(default),
                Some(p) => match numbers(p)?.as_slice() {
                    [v] => Ok(*v),
                    _ => Err(Error::invalid(format!("trajectory {s:?} takes one parameter"))),
                },
            }
        };
        match name {
            "constant" if param.is_none() => Ok(TrajectorySpec::Constant),
            "linear" => Ok(TrajectorySpec::Linear { slope: one(0.15)? }),
            "quadratic" => Ok(TrajectorySpec::Quadratic { curvature: one(0.02)? }),
            "irregular" => match param {
                None => Ok(TrajectorySpec::IRREGULAR_DEFAULT),
                Some(p) => match numbers(p)?.as_slice() {
                    &[drift_lo, drift_hi, volatility, start] if drift_lo <= drift_hi && volatility >= 0.0 => {
                        Ok(TrajectorySpec::Irregular {
                            drift_lo,
                            drift_hi,
                            volatility,
                            start,
                        })
                    }
                    _ => Err(Error::invalid(format!(
                        "irregular takes drift_lo<=drift_hi,volatility>=0,start; got {p:?}"
                    ))),
                },
            },
            _ => Err(Error::invalid(format!("unknown trajectory spec {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralScenario {
    pub n: usize,
    pub t: usize,
    pub basis_seed: u64,
    pub trajectory: TrajectorySpec,
    /// Edge density of the held-out step `t + 1`.
    pub density: f64,
    /// `λ⁰_j = n · decay^j` (0-based `j`).
    pub decay: f64,
    /// Probability that a dimension other than the first has a negative base eigenvalue.
    pub negative_fraction: f64,
    /// 1-based step from which a second, independent basis is used.
    pub rotate_at: Option<usize>,
}

impl Default for SpectralScenario {
    fn default() -> Self {
        SpectralScenario {
            n: 200,
            t: 10,
            basis_seed: 0,
            trajectory: TrajectorySpec::Constant,
            density: 0.05,
            decay: 0.85,
            negative_fraction: 0.3,
            rotate_at: None,
        }
    }
}

impl SpectralScenario {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::invalid(m));
        if self.n < 4 {
            return bad(format!("n must be at least 4, got {}", self.n));
        }
        if self.t < 3 {
            return bad(format!("t must be at least 3, got {}", self.t));
        }
        if !(self.density > 0.0 && self.density < 1.0) {
            return bad(format!("density must lie in (0, 1), got {}", self.density));
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return bad(format!("decay must lie in (0, 1], got {}", self.decay));
        }
        if !(0.0..1.0).contains(&self.negative_fraction) {
            return bad(format!(
                "negative fraction must lie in [0, 1), got {}",
                self.negative_fraction
            ));
        }
        if let Some(r) = self.rotate_at {
            if r < 2 || r > self.t + 1 {
                return bad(format!("rotation step must lie in 2..={}, got {r}", self.t + 1));
            }
        }
        if self.target_edges() == 0 {
            return bad("density too low: no edges at the final step".into());
        }
        Ok(())
    }

    fn target_edges(&self) -> usize {
        let pairs = self.n * (self.n - 1) / 2;
        (self.density * pairs as f64).round() as usize
    }
}

/// Generator internals kept for oracle checks.
#[derive(Debug, Clone, Serialize)]
pub struct GroundTruth {
    /// Orthonormal basis columns, in base-eigenvalue order.
    #[serde(skip)]
    pub basis: DMatrix<f64>,
    /// Basis used from `rotate_at` on.
    #[serde(skip)]
    pub rotated_basis: Option<DMatrix<f64>>,
    /// `eigenvalues[i][j] = λ_j(i + 1)` for steps `1..=t+1`.
    pub eigenvalues: Vec<Vec<f64>>,
    pub threshold: f64,
    /// Edges kept alive by the running union although `M_i` fell below `τ`.
    pub repaired: usize,
}

#[derive(Debug, Clone)]
pub struct SyntheticNetwork {
    pub scenario: SpectralScenario,
    /// Edges of steps `1..=t`, timestamped by the step of first appearance.
    pub graph: TemporalGraph,
    /// Cumulative 0/1 snapshots `A_1..A_t`.
    pub snapshots: SnapshotSequence,
    /// Cumulative 0/1 adjacency of the held-out step `t + 1`.
    pub next: SymmetricMatrix,
    /// Dense `M_1..M_{t+1}`.
    pub dense: Vec<SymmetricMatrix>,
    pub truth: GroundTruth,
}

impl SyntheticNetwork {
    /// Dense `M_1..M_t` as a snapshot sequence.
    pub fn dense_snapshots(&self) -> SnapshotSequence {
        SnapshotSequence::new(self.dense[..self.scenario.t].to_vec()).expect("t >= 3")
    }

    pub fn dense_next(&self) -> &SymmetricMatrix {
        &self.dense[self.scenario.t]
    }
}

/// Orthonormal basis from the QR factorisation of a Gaussian matrix, with
/// column signs fixed by `diag(R) > 0`.
pub fn random_orthogonal_basis(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

fn weights(spec: TrajectorySpec, steps: usize, n: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    match spec {
        TrajectorySpec::Constant => vec![vec![1.0; n]; steps],
        TrajectorySpec::Linear { slope } => (0..steps).map(|i| vec![1.0 + slope * i as f64; n]).collect(),
        TrajectorySpec::Quadratic { curvature } => (0..steps)
            .map(|i| vec![1.0 + curvature * (i * i) as f64; n])
            .collect(),
        TrajectorySpec::Irregular {
            drift_lo,
            drift_hi,
            volatility,
            start,
        } => {
            let drift: Vec<f64> = (0..n)
                .map(|_| drift_lo + (drift_hi - drift_lo) * rng.random::<f64>())
                .collect();
            let mut rows = vec![vec![start; n]];
            for _ in 1..steps {
                let prev = rows.last().expect("seeded with one row");
                let row = (0..n)
                    .map(|j| prev[j] + drift[j] + volatility * rng.sample::<f64, _>(StandardNormal))
                    .collect();
                rows.push(row);
            }
            rows
        }
    }
}

/// The dense part of a scenario: basis, eigenvalues and `M_1..M_{t+1}`.
#[derive(Debug, Clone)]
pub struct SpectralSequence {
    pub basis: DMatrix<f64>,
    pub rotated_basis: Option<DMatrix<f64>>,
    /// `eigenvalues[i][j] = λ_j(i + 1)`.
    pub eigenvalues: Vec<Vec<f64>>,
    pub dense: Vec<SymmetricMatrix>,
}

impl SpectralSequence {
    /// Dense `M_1..M_t`, leaving out the held-out step.
    pub fn observed(&self) -> SnapshotSequence {
        SnapshotSequence::new(self.dense[..self.dense.len() - 1].to_vec()).expect("t >= 3")
    }
}

pub fn spectral_sequence(sc: &SpectralScenario) -> Result<SpectralSequence> {
    sc.validate()?;
    let (n, t) = (sc.n, sc.t);
    let mut rng = ChaCha8Rng::seed_from_u64(sc.basis_seed);

    let basis = random_orthogonal_basis(n, &mut rng);
    let base: Vec<f64> = (0..n)
        .map(|j| {
            let negative = j > 0 && rng.random::<f64>() < sc.negative_fraction;
            let sign = if negative { -1.0 } else { 1.0 };
            sign * n as f64 * sc.decay.powi(j as i32)
        })
        .collect();
    let w = weights(sc.trajectory, t + 1, n, &mut rng);
    let rotated_basis = sc.rotate_at.map(|_| random_orthogonal_basis(n, &mut rng));

    let eigenvalues: Vec<Vec<f64>> = w
        .iter()
        .map(|row| row.iter().zip(&base).map(|(wi, b)| wi * b).collect())
        .collect();
    let dense = eigenvalues
        .iter()
        .enumerate()
        .map(|(i, lam)| {
            let x = match (&rotated_basis, sc.rotate_at) {
                (Some(r), Some(at)) if i + 1 >= at => r,
                _ => &basis,
            };
            reconstruct(x, lam)
        })
        .collect::<Result<_>>()?;
    Ok(SpectralSequence {
        basis,
        rotated_basis,
        eigenvalues,
        dense,
    })
}

/// Thresholds the scenario's dense sequence into a cumulative temporal graph.
pub fn generate_spectral_network(sc: &SpectralScenario) -> Result<SyntheticNetwork> {
    let SpectralSequence {
        basis,
        rotated_basis,
        eigenvalues,
        dense,
    } = spectral_sequence(sc)?;
    let (n, t) = (sc.n, sc.t);

    let threshold = kth_largest_upper(dense[t].as_matrix(), sc.target_edges());

    let mut first_seen: HashMap<(usize, usize), usize> = HashMap::new();
    let mut current = DMatrix::<f64>::zeros(n, n);
    let mut matrices = Vec::with_capacity(t + 1);
    let mut repaired = 0;
    for (i, m) in dense.iter().enumerate() {
        let m = m.as_matrix();
        for v in 0..n {
            for u in 0..v {
                let on = m[(u, v)] >= threshold;
                let had = current[(u, v)] != 0.0;
                if on && !had {
                    current[(u, v)] = 1.0;
                    current[(v, u)] = 1.0;
                    if i < t {
                        first_seen.insert((u, v), i + 1);
                    }
                } else if had && !on && i < t {
                    repaired += 1;
                }
            }
        }
        matrices.push(SymmetricMatrix::symmetrized(current.clone()));
    }
    let next = matrices.pop().expect("t + 1 matrices");
    let edge_total = first_seen.len();
    if repaired as f64 > MAX_REPAIR_FRACTION * edge_total.max(1) as f64 {
        return Err(Error::RepairBoundExceeded {
            repaired,
            edges: edge_total,
        });
    }

    let edges = first_seen
        .into_iter()
        .map(|((u, v), step)| TemporalEdge::new(u, v, step as f64).expect("u < v"))
        .collect();
    let graph = TemporalGraph::new(n, edges)?;

    Ok(SyntheticNetwork {
        scenario: sc.clone(),
        graph,
        snapshots: SnapshotSequence::new(matrices)?,
        next,
        dense,
        truth: GroundTruth {
            basis,
            rotated_basis,
            eigenvalues,
            threshold,
            repaired,
        },
    })
}

/// The `k`-th largest strictly-upper entry (`k >= 1`).
fn kth_largest_upper(m: &DMatrix<f64>, k: usize) -> f64 {
    let n = m.nrows();
    let mut vals: Vec<f64> = (0..n).flat_map(|v| (0..v).map(move |u| m[(u, v)])).collect();
    let k = k.clamp(1, vals.len());
    let (_, kth, _) = vals.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
    *kth
}
