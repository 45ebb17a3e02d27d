//! Checks of the fixed-eigenvector assumption on a snapshot sequence.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};
use crate::graph::SnapshotSequence;
use crate::spectral::{decompose, SpectralDecomposition, SymmetricMatrix};
use crate::trajectory::{select_top_fraction, two_point_step};

/// Default pass threshold for the verdict.
pub const DEFAULT_THRESHOLD: f64 = 0.9;

/// `|(X₁)ᵢ · (X_t)ⱼ|` for every pair of eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityMatrix(DMatrix<f64>);

impl StabilityMatrix {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        crate::spectral::write_matrix_csv(&self.0, out)
    }
}

impl Serialize for StabilityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.nrows()))?;
        for row in self.0.row_iter() {
            seq.serialize_element(&row.iter().copied().collect::<Vec<f64>>())?;
        }
        seq.end()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalityReport {
    /// Growth `A₂ - A₁` expressed in the earlier eigenbasis.
    pub delta: SymmetricMatrix,
    /// Share of `Δ`'s squared mass on the diagonal; 1 when `Δ = 0`.
    pub diagonality_score: f64,
}

fn same_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// `series[k][i] = |cos((X_i)_j, (X_ref)_j)|` for `j = dims[k]`.
pub fn eigenvector_evolution(
    decomps: &[SpectralDecomposition],
    reference: &SpectralDecomposition,
    dims: &[usize],
) -> Result<Vec<Vec<f64>>> {
    let n = reference.dim();
    for d in decomps {
        same_dim(n, d.dim())?;
    }
    if let Some(&j) = dims.iter().find(|&&j| j >= n) {
        return Err(Error::IndexOutOfRange { index: j, dim: n });
    }
    // Columns are unit vectors, so the cosine is the plain dot product.
    Ok(dims
        .iter()
        .map(|&j| {
            let r = reference.eigenvectors().column(j);
            decomps
                .iter()
                .map(|d| d.eigenvectors().column(j).dot(&r).abs().min(1.0))
                .collect()
        })
        .collect())
}

pub fn stability_matrix(d1: &SpectralDecomposition, dt: &SpectralDecomposition) -> Result<StabilityMatrix> {
    same_dim(d1.dim(), dt.dim())?;
    let sim = (d1.eigenvectors().transpose() * dt.eigenvectors()).map(|v| v.abs().min(1.0));
    Ok(StabilityMatrix(sim))
}

/// `Δ = X₁ᵀ (A₂ - A₁) X₁` and its diagonal energy ratio.
pub fn diagonality_test(
    d1: &SpectralDecomposition,
    a1: &SymmetricMatrix,
    a2: &SymmetricMatrix,
) -> Result<DiagonalityReport> {
    let n = d1.dim();
    same_dim(n, a1.dim())?;
    same_dim(n, a2.dim())?;
    let x = d1.eigenvectors();
    let growth = a2.as_matrix() - a1.as_matrix();
    let delta = SymmetricMatrix::symmetrized(x.transpose() * growth * x);
    Ok(DiagonalityReport {
        diagonality_score: diagonal_energy(delta.as_matrix()),
        delta,
    })
}

fn diagonal_energy(m: &DMatrix<f64>) -> f64 {
    let total = m.norm_squared();
    if total == 0.0 {
        return 1.0;
    }
    let diag: f64 = m.diagonal().iter().map(|v| v * v).sum();
    (diag / total).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Minimum score for a PASS verdict.
    pub threshold: f64,
    /// Relative position of the reference snapshot in the sequence.
    pub reference_position: f64,
    /// Share of leading dimensions whose eigenvector evolution is tracked.
    pub top_fraction: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            threshold: DEFAULT_THRESHOLD,
            reference_position: 0.75,
            top_fraction: 0.08,
        }
    }
}

/// Everything `verify` computes for one snapshot sequence.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AssumptionReport {
    /// 0-based index of the reference snapshot.
    pub reference_step: usize,
    /// Tracked dimensions, 0-based.
    pub dimensions: Vec<usize>,
    /// `spectra[i][k]`: eigenvalue of dimension `dimensions[k]` at snapshot `i`.
    pub spectra: Vec<Vec<f64>>,
    /// `evolution[k][i]`: similarity of dimension `dimensions[k]` at snapshot
    /// `i` with the same dimension of the final snapshot.
    pub evolution: Vec<Vec<f64>>,
    pub min_evolution_similarity: f64,
    /// Reference eigenvectors against final eigenvectors.
    pub stability: StabilityMatrix,
    pub diagonality_score: f64,
    /// `min(diagonality_score, min_evolution_similarity)`.
    pub score: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl AssumptionReport {
    pub fn verdict_line(&self) -> String {
        format!(
            "spectral-evolution-assumption: {} (score={:.4})",
            if self.passed { "PASS" } else { "FAIL" },
            self.score
        )
    }
}

/// Decomposes every snapshot and runs the evolution, stability and
/// diagonality checks, comparing the reference snapshot with the final one.
pub fn verify_assumption(s: &SnapshotSequence, opts: &VerifyOptions) -> Result<AssumptionReport> {
    if !(0.0..=1.0).contains(&opts.threshold) {
        return Err(Error::invalid(format!(
            "threshold must lie in [0, 1], got {}",
            opts.threshold
        )));
    }
    let decomps: Vec<SpectralDecomposition> =
        s.matrices().par_iter().map(decompose).collect::<Result<_>>()?;
    let last = decomps.last().expect("sequences are non-empty");
    let reference_step = if s.len() < 2 {
        0
    } else {
        two_point_step(s.len(), opts.reference_position)?
    };
    let dimensions = select_top_fraction(last, opts.top_fraction)?;

    let spectra = decomps
        .iter()
        .map(|d| dimensions.iter().map(|&j| d.eigenvalue(j)).collect())
        .collect();
    let evolution = eigenvector_evolution(&decomps, last, &dimensions)?;
    let min_evolution_similarity = evolution
        .iter()
        .flatten()
        .fold(1.0_f64, |m, &v| m.min(v));
    let reference = &decomps[reference_step];
    let stability = stability_matrix(reference, last)?;
    let diagonality = diagonality_test(reference, s.get(reference_step), s.last())?;
    let score = diagonality.diagonality_score.min(min_evolution_similarity);

    Ok(AssumptionReport {
        reference_step,
        dimensions,
        spectra,
        evolution,
        min_evolution_similarity,
        stability,
        diagonality_score: diagonality.diagonality_score,
        score,
        threshold: opts.threshold,
        passed: score >= opts.threshold,
    })
}
