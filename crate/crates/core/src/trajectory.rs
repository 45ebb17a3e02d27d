//! Eigenvalue trajectories and spectrum forecasting.
//!
//! The final snapshot is decomposed once. For every selected latent
//! dimension `j`, the trajectory is the sequence of Rayleigh quotients
//! `R(A_1, x_j), ..., R(A_t, x_j)` of the fixed final eigenvector `x_j`
//! against each snapshot, which costs `O(n²)` per step instead of a full
//! decomposition. Trajectories are then extrapolated one step ahead (two
//! point rule or least-squares fit) and the score matrix is rebuilt as
//! `X Λ̂ Xᵀ`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::SnapshotSequence;
use crate::kernels::SpectralTransform;
use crate::scores::PredictionScores;
use crate::spectral::{
    by_magnitude, decompose, rayleigh_quotient, reconstruct, SpectralDecomposition,
    SymmetricMatrix,
};

/// Default position of the earlier snapshot used by two-point extrapolation.
pub const DEFAULT_TWO_POINT_POSITION: f64 = 0.75;

/// Approximated eigenvalue of one latent dimension at every snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueTrajectory {
    pub dimension: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegressionModel {
    Linear,
    Quadratic,
}

impl RegressionModel {
    pub fn degree(self) -> usize {
        match self {
            RegressionModel::Linear => 1,
            RegressionModel::Quadratic => 2,
        }
    }

    pub fn min_points(self) -> usize {
        self.degree() + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            RegressionModel::Linear => "linear",
            RegressionModel::Quadratic => "quadratic",
        }
    }
}

/// How a trajectory's per-snapshot eigenvalues are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TrajectorySource {
    /// Rayleigh quotient of the final eigenvector against each snapshot.
    #[default]
    Rayleigh,
    /// Full decomposition of every snapshot; dimension `j` takes the
    /// eigenvalue whose eigenvector is most similar to the final `x_j`.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForecastMethod {
    /// Graph kernel applied to the final snapshot.
    Kernel(SpectralTransform),
    /// `λ̂ = 2λ_t - λ̂_p` from an earlier snapshot `p`.
    TwoPoint(TrajectorySource),
    /// Least-squares fit over all snapshots, evaluated one step ahead.
    Regression(RegressionModel, TrajectorySource),
}

impl ForecastMethod {
    pub fn is_kernel(&self) -> bool {
        matches!(self, ForecastMethod::Kernel(_))
    }
}

impl fmt::Display for ForecastMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (name, source) = match self {
            ForecastMethod::Kernel(k) => return write!(f, "{k}"),
            ForecastMethod::TwoPoint(s) => ("extrapolate", s),
            ForecastMethod::Regression(RegressionModel::Linear, s) => ("linreg", s),
            ForecastMethod::Regression(RegressionModel::Quadratic, s) => ("quadreg", s),
        };
        match source {
            TrajectorySource::Rayleigh => f.write_str(name),
            TrajectorySource::Exact => write!(f, "{name}:exact"),
        }
    }
}

impl FromStr for ForecastMethod {
    type Err = Error;

    /// `extrapolate`, `linreg`, `quadreg` (each optionally `:exact`), or a
    /// kernel spec such as `triangle`, `exp:auto`, `neumann:0.1`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, suffix) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let source = match suffix {
            None => TrajectorySource::Rayleigh,
            Some("exact") => TrajectorySource::Exact,
            Some(_) => TrajectorySource::Rayleigh,
        };
        let trajectory = |m: ForecastMethod| match suffix {
            None | Some("exact") => Ok(m),
            Some(other) => Err(Error::invalid(format!(
                "unknown suffix {other:?} on method {name:?}"
            ))),
        };
        match name {
            "extrapolate" => trajectory(ForecastMethod::TwoPoint(source)),
            "linreg" => trajectory(ForecastMethod::Regression(RegressionModel::Linear, source)),
            "quadreg" => trajectory(ForecastMethod::Regression(RegressionModel::Quadratic, source)),
            _ => s.parse().map(ForecastMethod::Kernel),
        }
    }
}

/// What the unforecast dimensions contribute to `Λ̂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnselectedPolicy {
    /// Carry the current eigenvalue forward.
    #[default]
    KeepCurrent,
    /// Drop the dimension, giving a low-rank score matrix.
    Zero,
}

impl fmt::Display for UnselectedPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnselectedPolicy::KeepCurrent => "keep",
            UnselectedPolicy::Zero => "zero",
        })
    }
}

impl FromStr for UnselectedPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "keep" | "keep_current" => Ok(UnselectedPolicy::KeepCurrent),
            "zero" => Ok(UnselectedPolicy::Zero),
            _ => Err(Error::invalid(format!(
                "unknown unselected policy {s:?}: expected keep or zero"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForecastOptions {
    /// Share of dimensions (largest `|λ|` first) to forecast, in `(0, 1]`.
    pub fraction: f64,
    /// Relative position of the earlier two-point snapshot, in `(0, 1)`.
    pub two_point_position: f64,
}

impl Default for ForecastOptions {
    fn default() -> Self {
        ForecastOptions {
            fraction: 1.0,
            two_point_position: DEFAULT_TWO_POINT_POSITION,
        }
    }
}

/// Predicted next eigenvalues for the selected dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumForecast {
    pub predicted: BTreeMap<usize, f64>,
    pub method: ForecastMethod,
    pub selected_fraction: f64,
}

fn check_selection(n: usize, selection: &[usize]) -> Result<()> {
    match selection.iter().find(|&&j| j >= n) {
        Some(&j) => Err(Error::IndexOutOfRange { index: j, dim: n }),
        None => Ok(()),
    }
}

fn selected_vectors(d: &SpectralDecomposition, selection: &[usize]) -> DMatrix<f64> {
    let x = d.eigenvectors();
    DMatrix::from_fn(x.nrows(), selection.len(), |r, c| x[(r, selection[c])])
}

/// Rayleigh quotients of the selected columns of `x` against `a`.
fn rayleigh_row(a: &SymmetricMatrix, x: &DMatrix<f64>) -> Vec<f64> {
    let ax = a.as_matrix() * x;
    x.column_iter()
        .zip(ax.column_iter())
        .map(|(xc, axc)| xc.dot(&axc) / xc.dot(&xc))
        .collect()
}

/// Eigenvalue of `a` whose eigenvector best matches each selected column.
fn matched_row(a: &SymmetricMatrix, x: &DMatrix<f64>) -> Result<Vec<f64>> {
    let da = decompose(a)?;
    let overlap = da.eigenvectors().transpose() * x;
    Ok(overlap
        .column_iter()
        .map(|col| {
            let best = col
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, v)| {
                    if v.abs() > acc.1 {
                        (i, v.abs())
                    } else {
                        acc
                    }
                })
                .0;
            da.eigenvalue(best)
        })
        .collect())
}

fn trajectory_rows(
    steps: &[&SymmetricMatrix],
    d: &SpectralDecomposition,
    selection: &[usize],
    source: TrajectorySource,
) -> Result<Vec<Vec<f64>>> {
    let n = d.dim();
    check_selection(n, selection)?;
    if let Some(bad) = steps.iter().find(|a| a.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.dim(),
        });
    }
    let x = selected_vectors(d, selection);
    let last = steps.len().saturating_sub(1);
    steps
        .par_iter()
        .enumerate()
        .map(|(i, a)| match source {
            TrajectorySource::Rayleigh => Ok(rayleigh_row(a, &x)),
            // The final snapshot is the one `d` decomposes.
            TrajectorySource::Exact if i == last => {
                Ok(selection.iter().map(|&j| d.eigenvalue(j)).collect())
            }
            TrajectorySource::Exact => matched_row(a, &x),
        })
        .collect()
}

fn transpose_rows(selection: &[usize], rows: Vec<Vec<f64>>) -> Vec<EigenvalueTrajectory> {
    selection
        .iter()
        .enumerate()
        .map(|(c, &j)| EigenvalueTrajectory {
            dimension: j,
            values: rows.iter().map(|r| r[c]).collect(),
        })
        .collect()
}

/// Rayleigh-quotient trajectories `R(A_i, x_j)` for `i = 1..t` of every
/// selected dimension, where `d` decomposes the last snapshot.
pub fn approximate_trajectories(
    s: &SnapshotSequence,
    d: &SpectralDecomposition,
    selection: &[usize],
) -> Result<Vec<EigenvalueTrajectory>> {
    let steps: Vec<&SymmetricMatrix> = s.iter().collect();
    let rows = trajectory_rows(&steps, d, selection, TrajectorySource::Rayleigh)?;
    Ok(transpose_rows(selection, rows))
}

/// Trajectories from a full decomposition of every snapshot.
pub fn exact_trajectories(
    s: &SnapshotSequence,
    d: &SpectralDecomposition,
    selection: &[usize],
) -> Result<Vec<EigenvalueTrajectory>> {
    let steps: Vec<&SymmetricMatrix> = s.iter().collect();
    let rows = trajectory_rows(&steps, d, selection, TrajectorySource::Exact)?;
    Ok(transpose_rows(selection, rows))
}

/// Estimated eigenvalue of dimension `j` at the earlier snapshot `a1`:
/// the Rayleigh quotient of `a1` at the later eigenvector `(X₂)_j`.
pub fn two_point_estimate(
    a1: &SymmetricMatrix,
    d2: &SpectralDecomposition,
    j: usize,
) -> Result<f64> {
    if a1.dim() != d2.dim() {
        return Err(Error::DimensionMismatch {
            expected: d2.dim(),
            found: a1.dim(),
        });
    }
    if j >= d2.dim() {
        return Err(Error::IndexOutOfRange {
            index: j,
            dim: d2.dim(),
        });
    }
    rayleigh_quotient(a1, &d2.eigenvectors().column(j))
}

/// `2 λ₂ - λ̂₁`.
pub fn linear_extrapolate(lambda2: f64, lambda1_hat: f64) -> f64 {
    2.0 * lambda2 - lambda1_hat
}

/// Least-squares polynomial through `(i, values[i-1])` for `i = 1..=t`,
/// evaluated at `t + 1`.
pub fn extrapolate_polynomial(values: &[f64], model: RegressionModel) -> Result<f64> {
    let t = values.len();
    if t < model.min_points() {
        return Err(Error::InsufficientPoints {
            model: model.name(),
            minimum: model.min_points(),
            found: t,
        });
    }
    let columns = model.degree() + 1;
    // Centered and scaled abscissa keeps the design well conditioned.
    let center = (t as f64 + 1.0) / 2.0;
    let scale = (t as f64 / 2.0).max(1.0);
    let z = |i: f64| (i - center) / scale;
    let design = DMatrix::from_fn(t, columns, |r, c| z((r + 1) as f64).powi(c as i32));
    let y = DVector::from_column_slice(values);
    let coef = design
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::invalid(format!("regression solve failed: {e}")))?;
    let at = z((t + 1) as f64);
    Ok((0..columns).map(|c| coef[c] * at.powi(c as i32)).sum())
}

pub fn fit_trajectory(tr: &EigenvalueTrajectory, model: RegressionModel) -> Result<f64> {
    extrapolate_polynomial(&tr.values, model)
}

/// The `⌈fraction · n⌉` dimensions of largest `|λ|` (ties to the lower
/// index), returned in ascending index order.
pub fn select_top_fraction(d: &SpectralDecomposition, fraction: f64) -> Result<Vec<usize>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid(format!(
            "fraction must lie in (0, 1], got {fraction}"
        )));
    }
    let n = d.dim();
    let k = ((fraction * n as f64 - 1e-9).ceil() as usize).clamp(1, n.max(1)).min(n);
    let lam = d.eigenvalues();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        lam[b]
            .abs()
            .total_cmp(&lam[a].abs())
            .then(a.cmp(&b))
    });
    let mut chosen = order[..k].to_vec();
    chosen.sort_unstable();
    Ok(chosen)
}

/// 0-based index of the earlier two-point snapshot among `t` snapshots:
/// `⌈position · t⌉` (1-based), kept strictly before the final snapshot.
pub fn two_point_step(t: usize, position: f64) -> Result<usize> {
    if t < 2 {
        return Err(Error::InsufficientPoints {
            model: "two-point",
            minimum: 2,
            found: t,
        });
    }
    if !(position > 0.0 && position < 1.0) {
        return Err(Error::invalid(format!(
            "two-point position must lie in (0, 1), got {position}"
        )));
    }
    let one_based = ((position * t as f64 - 1e-9).ceil() as usize).clamp(1, t - 1);
    Ok(one_based - 1)
}

/// Predicts the next spectrum from the snapshot history.
///
/// Kernel methods transform the whole final spectrum. Trajectory methods
/// only forecast the top `options.fraction` of dimensions.
pub fn forecast_spectrum(
    s: &SnapshotSequence,
    d: &SpectralDecomposition,
    method: ForecastMethod,
    options: &ForecastOptions,
) -> Result<SpectrumForecast> {
    if s.dim() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: d.dim(),
            found: s.dim(),
        });
    }
    if let ForecastMethod::Kernel(k) = method {
        let values = k.transform_spectrum(d.eigenvalues())?;
        return Ok(SpectrumForecast {
            predicted: values.into_iter().enumerate().collect(),
            method,
            selected_fraction: 1.0,
        });
    }

    let selection = select_top_fraction(d, options.fraction)?;
    let predicted: Vec<f64> = match method {
        ForecastMethod::TwoPoint(source) => {
            let p = two_point_step(s.len(), options.two_point_position)?;
            let x = selected_vectors(d, &selection);
            let earlier = match source {
                TrajectorySource::Rayleigh => rayleigh_row(s.get(p), &x),
                TrajectorySource::Exact => matched_row(s.get(p), &x)?,
            };
            selection
                .iter()
                .zip(earlier)
                .map(|(&j, l1)| linear_extrapolate(d.eigenvalue(j), l1))
                .collect()
        }
        ForecastMethod::Regression(model, source) => {
            if s.len() < model.min_points() {
                return Err(Error::InsufficientPoints {
                    model: model.name(),
                    minimum: model.min_points(),
                    found: s.len(),
                });
            }
            let steps: Vec<&SymmetricMatrix> = s.iter().collect();
            let rows = trajectory_rows(&steps, d, &selection, source)?;
            transpose_rows(&selection, rows)
                .iter()
                .map(|tr| fit_trajectory(tr, model))
                .collect::<Result<_>>()?
        }
        ForecastMethod::Kernel(_) => unreachable!("handled above"),
    };

    Ok(SpectrumForecast {
        predicted: selection.into_iter().zip(predicted).collect(),
        method,
        selected_fraction: options.fraction,
    })
}

/// Builds `Λ̂` from the forecast and the policy for unforecast dimensions,
/// and returns `X Λ̂ Xᵀ`.
pub fn predict_scores(
    d: &SpectralDecomposition,
    forecast: &SpectrumForecast,
    policy: UnselectedPolicy,
) -> Result<PredictionScores> {
    let n = d.dim();
    if let Some((&j, _)) = forecast.predicted.range(n..).next() {
        return Err(Error::IndexOutOfRange { index: j, dim: n });
    }
    let lam: Vec<f64> = (0..n)
        .map(|j| match forecast.predicted.get(&j) {
            Some(&v) => v,
            None => match policy {
                UnselectedPolicy::KeepCurrent => d.eigenvalue(j),
                UnselectedPolicy::Zero => 0.0,
            },
        })
        .collect();
    Ok(PredictionScores::new(reconstruct(d.eigenvectors(), &lam)?))
}

/// Position of `λ` in descending-magnitude order, used by callers that
/// need a stable ranking of arbitrary spectra.
pub fn magnitude_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| by_magnitude(values[a], values[b]).then(a.cmp(&b)));
    order
}
