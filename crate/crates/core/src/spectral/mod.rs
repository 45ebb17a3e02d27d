//! Symmetric matrices, their spectral decomposition, the Rayleigh quotient,
//! reconstruction from a spectrum, and cosine similarity.

mod eigen;

use std::cmp::Ordering;
use std::io::Write;

use nalgebra::{DMatrix, DVector, Dyn, Matrix, Storage, U1};

use crate::error::{Error, Result};

/// Entries with magnitude at or below this count as zero.
pub const ZERO_TOLERANCE: f64 = 1e-12;

/// A real symmetric matrix. Construction checks symmetry and stores the
/// exactly symmetrized matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix(DMatrix<f64>);

impl SymmetricMatrix {
    /// Accepts `m` if it is square and `|m_ij - m_ji| <= 1e-12 * max(1, max|m|)`.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let n = m.nrows();
        let scale = m.amax().max(1.0);
        for j in 0..n {
            for i in 0..j {
                let gap = (m[(i, j)] - m[(j, i)]).abs();
                if gap > ZERO_TOLERANCE * scale {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        gap,
                    });
                }
            }
        }
        Ok(Self::symmetrized(m))
    }

    /// Returns `(m + mᵀ) / 2`.
    pub fn symmetrized(m: DMatrix<f64>) -> Self {
        assert!(m.is_square(), "symmetrize needs a square matrix");
        let t = m.transpose();
        SymmetricMatrix((m + t) * 0.5)
    }

    pub(crate) fn from_symmetric_unchecked(m: DMatrix<f64>) -> Self {
        debug_assert!(m.is_square());
        SymmetricMatrix(m)
    }

    pub fn zeros(n: usize) -> Self {
        SymmetricMatrix(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        SymmetricMatrix(DMatrix::identity(n, n))
    }

    /// Builds the matrix from the upper triangle `f(i, j)` with `i <= j`.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..=j {
                let x = f(i, j);
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        SymmetricMatrix(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// Largest entrywise difference to `other`.
    pub fn max_abs_diff(&self, other: &SymmetricMatrix) -> f64 {
        (&self.0 - &other.0).amax()
    }

    /// Dense CSV, row-major, full matrix, one row per line.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_matrix_csv(&self.0, out)
    }
}

/// Writes any dense matrix as CSV, one row per line.
pub fn write_matrix_csv<W: Write>(m: &DMatrix<f64>, mut out: W) -> Result<()> {
    let mut line = String::new();
    for i in 0..m.nrows() {
        line.clear();
        for j in 0..m.ncols() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&m[(i, j)].to_string());
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Eigenvectors (as orthonormal columns) and eigenvalues of a symmetric
/// matrix, ordered by descending `|λ|`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvectors: DMatrix<f64>,
    eigenvalues: DVector<f64>,
}

impl SpectralDecomposition {
    /// Wraps an existing basis and spectrum without reordering either.
    /// The caller is responsible for orthonormality.
    pub fn from_parts(eigenvectors: DMatrix<f64>, eigenvalues: Vec<f64>) -> Result<Self> {
        if !eigenvectors.is_square() {
            return Err(Error::DimensionMismatch {
                expected: eigenvectors.nrows(),
                found: eigenvectors.ncols(),
            });
        }
        if eigenvalues.len() != eigenvectors.ncols() {
            return Err(Error::DimensionMismatch {
                expected: eigenvectors.ncols(),
                found: eigenvalues.len(),
            });
        }
        Ok(SpectralDecomposition {
            eigenvectors,
            eigenvalues: DVector::from_vec(eigenvalues),
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        self.eigenvalues.as_slice()
    }

    pub fn eigenvalue(&self, j: usize) -> f64 {
        self.eigenvalues[j]
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, j: usize) -> DVector<f64> {
        self.eigenvectors.column(j).into_owned()
    }

    /// `max_j |λ_j|`.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.amax()
    }

    /// `X Λ Xᵀ`.
    pub fn reconstruct(&self) -> SymmetricMatrix {
        reconstruct(&self.eigenvectors, self.eigenvalues.as_slice())
            .expect("dimensions agree by construction")
    }
}

/// Spectral decomposition `A = X Λ Xᵀ`.
///
/// Eigenvalues are sorted by descending magnitude (positive before negative
/// on equal magnitude), and each eigenvector is flipped so that its first
/// entry with `|x| > 1e-12` is positive. Identical inputs give identical
/// outputs.
pub fn decompose(a: &SymmetricMatrix) -> Result<SpectralDecomposition> {
    let n = a.dim();
    let m = a.as_matrix();
    let mut row_major = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let x = m[(i, j)];
            if !x.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
            row_major.push(x);
        }
    }
    let (values, vectors) = eigen::symmetric_eigen(&row_major, n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| by_magnitude(values[i], values[j]).then(i.cmp(&j)));

    let mut x = DMatrix::zeros(n, n);
    let mut lam = Vec::with_capacity(n);
    for (col, &src) in order.iter().enumerate() {
        let v = &vectors[src];
        let flip = v
            .iter()
            .find(|c| c.abs() > ZERO_TOLERANCE)
            .is_some_and(|&c| c < 0.0);
        let sign = if flip { -1.0 } else { 1.0 };
        for (row, &c) in v.iter().enumerate() {
            x[(row, col)] = sign * c;
        }
        lam.push(values[src]);
    }
    SpectralDecomposition::from_parts(x, lam)
}

/// Descending `|λ|`, then descending `λ`.
pub(crate) fn by_magnitude(a: f64, b: f64) -> Ordering {
    b.abs().total_cmp(&a.abs()).then(b.total_cmp(&a))
}

/// `R(A, x) = xᵀAx / xᵀx`.
pub fn rayleigh_quotient<S>(a: &SymmetricMatrix, x: &Matrix<f64, Dyn, U1, S>) -> Result<f64>
where
    S: Storage<f64, Dyn, U1>,
{
    if x.nrows() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: x.nrows(),
        });
    }
    let norm_sq = x.dot(x);
    if norm_sq.sqrt() <= ZERO_TOLERANCE {
        return Err(Error::ZeroVector {
            norm: norm_sq.sqrt(),
        });
    }
    let ax = a.as_matrix() * x;
    Ok(x.dot(&ax) / norm_sq)
}

/// `X diag(λ) Xᵀ`, symmetrized to remove rounding asymmetry.
pub fn reconstruct(x: &DMatrix<f64>, lam: &[f64]) -> Result<SymmetricMatrix> {
    if !x.is_square() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            found: x.ncols(),
        });
    }
    if lam.len() != x.ncols() {
        return Err(Error::DimensionMismatch {
            expected: x.ncols(),
            found: lam.len(),
        });
    }
    let mut scaled = x.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= lam[j];
    }
    Ok(SymmetricMatrix::symmetrized(scaled * x.transpose()))
}

/// `x·y / (‖x‖‖y‖)`, clamped to `[-1, 1]`.
pub fn cosine_similarity<S1, S2>(
    x: &Matrix<f64, Dyn, U1, S1>,
    y: &Matrix<f64, Dyn, U1, S2>,
) -> Result<f64>
where
    S1: Storage<f64, Dyn, U1>,
    S2: Storage<f64, Dyn, U1>,
{
    if x.nrows() != y.nrows() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            found: y.nrows(),
        });
    }
    let (nx, ny) = (x.norm(), y.norm());
    for norm in [nx, ny] {
        if norm <= ZERO_TOLERANCE {
            return Err(Error::ZeroVector { norm });
        }
    }
    Ok((x.dot(y) / (nx * ny)).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sym(rows: &[&[f64]]) -> SymmetricMatrix {
        let n = rows.len();
        SymmetricMatrix::new(DMatrix::from_fn(n, n, |i, j| rows[i][j])).unwrap()
    }

    #[test]
    fn swap_matrix_decomposes_by_hand() {
        let d = decompose(&sym(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        assert_abs_diff_eq!(d.eigenvalue(0), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.eigenvalue(1), -1.0, epsilon = 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let x = d.eigenvectors();
        assert_abs_diff_eq!(x[(0, 0)], h, epsilon = 1e-14);
        assert_abs_diff_eq!(x[(1, 0)], h, epsilon = 1e-14);
        assert_abs_diff_eq!(x[(0, 1)], h, epsilon = 1e-14);
        assert_abs_diff_eq!(x[(1, 1)], -h, epsilon = 1e-14);
    }

    #[test]
    fn identity_decomposes_to_unit_spectrum() {
        let d = decompose(&SymmetricMatrix::identity(3)).unwrap();
        assert_eq!(d.eigenvalues(), &[1.0, 1.0, 1.0]);
        let xtx = d.eigenvectors().transpose() * d.eigenvectors();
        assert_abs_diff_eq!((xtx - DMatrix::<f64>::identity(3, 3)).amax(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn diagonal_input_sorted_by_magnitude() {
        let d = decompose(&sym(&[&[5.0, 0.0, 0.0], &[0.0, -7.0, 0.0], &[0.0, 0.0, 2.0]])).unwrap();
        assert_eq!(d.eigenvalues(), &[-7.0, 5.0, 2.0]);
        let expected = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(d.eigenvectors(), &expected);
    }

    #[test]
    fn non_finite_entries_rejected() {
        let mut m = DMatrix::zeros(2, 2);
        m[(1, 1)] = f64::NAN;
        let a = SymmetricMatrix::from_symmetric_unchecked(m);
        assert!(matches!(decompose(&a), Err(Error::NonFinite { row: 1, col: 1 })));
    }

    #[test]
    fn asymmetric_input_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        assert!(matches!(SymmetricMatrix::new(m), Err(Error::NotSymmetric { .. })));
        assert!(SymmetricMatrix::new(DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn rayleigh_by_hand() {
        let swap = sym(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(rayleigh_quotient(&swap, &DVector::from_vec(vec![1.0, 1.0])).unwrap(), 1.0);
        assert_eq!(rayleigh_quotient(&swap, &DVector::from_vec(vec![1.0, 0.0])).unwrap(), 0.0);
        let eye = SymmetricMatrix::identity(3);
        let x = DVector::from_vec(vec![0.3, -2.0, 5.0]);
        assert_abs_diff_eq!(rayleigh_quotient(&eye, &x).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rayleigh_rejects_zero_and_mismatch() {
        let eye = SymmetricMatrix::identity(2);
        assert!(matches!(
            rayleigh_quotient(&eye, &DVector::from_vec(vec![0.0, 1e-13])),
            Err(Error::ZeroVector { .. })
        ));
        assert!(rayleigh_quotient(&eye, &DVector::from_vec(vec![1.0])).is_err());
    }

    #[test]
    fn reconstruct_cases() {
        let a = sym(&[&[1.0, 2.0, 0.0], &[2.0, -1.0, 3.0], &[0.0, 3.0, 0.5]]);
        let d = decompose(&a).unwrap();
        assert!(d.reconstruct().max_abs_diff(&a) < 1e-12);

        let diag = reconstruct(&DMatrix::identity(2, 2), &[3.0, -4.0]).unwrap();
        assert_eq!(diag.as_matrix(), &DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, -4.0]));

        let mut lam = vec![0.0; 3];
        lam[0] = 2.5;
        let rank1 = reconstruct(d.eigenvectors(), &lam).unwrap();
        let x1 = d.eigenvector(0);
        let expected = &x1 * x1.transpose() * 2.5;
        assert!((rank1.as_matrix() - expected).amax() < 1e-14);

        assert!(reconstruct(d.eigenvectors(), &[1.0]).is_err());
    }

    #[test]
    fn cosine_cases() {
        let x = DVector::from_vec(vec![0.6, 0.8]);
        assert_abs_diff_eq!(cosine_similarity(&x, &x).unwrap(), 1.0, epsilon = 1e-15);
        let y = DVector::from_vec(vec![-0.8, 0.6]);
        assert_abs_diff_eq!(cosine_similarity(&x, &y).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cosine_similarity(&x, &(-&x)).unwrap(), -1.0, epsilon = 1e-15);
        assert!(cosine_similarity(&x, &DVector::zeros(2)).is_err());
    }

    #[test]
    fn csv_is_row_major() {
        let a = sym(&[&[1.0, 0.5], &[0.5, -2.0]]);
        let mut buf = Vec::new();
        a.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "1,0.5\n0.5,-2\n");
    }
}
