//! Graph kernels expressed as spectral transformations `X f(Λ) Xᵀ`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scores::PredictionScores;
use crate::spectral::{reconstruct, SpectralDecomposition};

/// Largest exponent accepted by the exponential kernel.
pub const MAX_EXPONENT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha {
    /// Scale-free default derived from the spectral radius.
    Auto,
    Value(f64),
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Auto => f.write_str("auto"),
            Alpha::Value(a) => write!(f, "{a}"),
        }
    }
}

impl FromStr for Alpha {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Alpha::Auto);
        }
        s.parse::<f64>()
            .ok()
            .filter(|a| a.is_finite())
            .map(Alpha::Value)
            .ok_or_else(|| Error::invalid(format!("bad alpha {s:?}: expected a number or 'auto'")))
    }
}

/// The function applied to every eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralTransform {
    /// `f(λ) = λ²`, the number of 2-paths.
    TriangleClosing,
    /// `f(λ) = exp(αλ)`.
    Exponential(Alpha),
    /// `f(λ) = 1 / (1 - αλ)`, needs `α|λ₁| < 1`.
    Neumann(Alpha),
}

impl SpectralTransform {
    pub fn name(&self) -> &'static str {
        match self {
            SpectralTransform::TriangleClosing => "triangle",
            SpectralTransform::Exponential(_) => "exp",
            SpectralTransform::Neumann(_) => "neumann",
        }
    }

    /// Concrete α for a spectrum with the given spectral radius, or `None`
    /// for the parameter-free triangle kernel.
    ///
    /// `auto` is `1/|λ₁|` for the exponential kernel and `0.5/|λ₁|` for the
    /// Neumann kernel; on an all-zero spectrum it falls back to 1 and 0.5.
    pub fn resolve_alpha(&self, spectral_radius: f64) -> Option<f64> {
        let radius = if spectral_radius > 0.0 {
            spectral_radius
        } else {
            1.0
        };
        match *self {
            SpectralTransform::TriangleClosing => None,
            SpectralTransform::Exponential(Alpha::Auto) => Some(1.0 / radius),
            SpectralTransform::Neumann(Alpha::Auto) => Some(0.5 / radius),
            SpectralTransform::Exponential(Alpha::Value(a))
            | SpectralTransform::Neumann(Alpha::Value(a)) => Some(a),
        }
    }

    /// Applies `f` to every eigenvalue, checking the kernel's domain.
    pub fn transform_spectrum(&self, eigenvalues: &[f64]) -> Result<Vec<f64>> {
        let radius = eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
        match (*self, self.resolve_alpha(radius)) {
            (SpectralTransform::TriangleClosing, _) => {
                Ok(eigenvalues.iter().map(|l| l * l).collect())
            }
            (SpectralTransform::Exponential(_), Some(alpha)) => {
                if alpha < 0.0 {
                    return Err(Error::NegativeAlpha(alpha));
                }
                let top = eigenvalues.iter().fold(f64::NEG_INFINITY, |m, &l| m.max(alpha * l));
                if top > MAX_EXPONENT {
                    return Err(Error::ExponentialOverflow { exponent: top });
                }
                Ok(eigenvalues.iter().map(|l| (alpha * l).exp()).collect())
            }
            (SpectralTransform::Neumann(_), Some(alpha)) => {
                if alpha < 0.0 {
                    return Err(Error::NegativeAlpha(alpha));
                }
                if alpha * radius >= 1.0 {
                    return Err(Error::NeumannDomain {
                        alpha,
                        spectral_radius: radius,
                        bound: 1.0 / radius,
                    });
                }
                Ok(eigenvalues.iter().map(|l| 1.0 / (1.0 - alpha * l)).collect())
            }
            (_, None) => unreachable!("only the triangle kernel has no alpha"),
        }
    }
}

impl fmt::Display for SpectralTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralTransform::TriangleClosing => f.write_str("triangle"),
            SpectralTransform::Exponential(a) => write!(f, "exp:{a}"),
            SpectralTransform::Neumann(a) => write!(f, "neumann:{a}"),
        }
    }
}

impl FromStr for SpectralTransform {
    type Err = Error;

    /// `triangle`, `exp[:<alpha|auto>]`, `neumann[:<alpha|auto>]`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let alpha = param.map(str::parse::<Alpha>).transpose()?.unwrap_or(Alpha::Auto);
        match name {
            "triangle" if param.is_none() => Ok(SpectralTransform::TriangleClosing),
            "exp" => Ok(SpectralTransform::Exponential(alpha)),
            "neumann" => Ok(SpectralTransform::Neumann(alpha)),
            _ => Err(Error::invalid(format!("unknown kernel spec {s:?}"))),
        }
    }
}

/// Score matrix `X f(Λ) Xᵀ`.
pub fn apply_transform(
    d: &SpectralDecomposition,
    transform: SpectralTransform,
) -> Result<PredictionScores> {
    let values = transform.transform_spectrum(d.eigenvalues())?;
    Ok(PredictionScores::new(reconstruct(d.eigenvectors(), &values)?))
}

/// True iff `0 < α` and `α · max|λ| < 1`.
pub fn validate_neumann_alpha(d: &SpectralDecomposition, alpha: f64) -> bool {
    alpha > 0.0 && alpha * d.spectral_radius() < 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{decompose, SymmetricMatrix};
    use nalgebra::DMatrix;

    fn swap() -> SpectralDecomposition {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        decompose(&SymmetricMatrix::new(m).unwrap()).unwrap()
    }

    fn path4() -> SpectralDecomposition {
        let a = SymmetricMatrix::from_upper(4, |i, j| if j == i + 1 { 1.0 } else { 0.0 });
        decompose(&a).unwrap()
    }

    #[test]
    fn zero_alpha_gives_identity() {
        let d = path4();
        for t in [
            SpectralTransform::Exponential(Alpha::Value(0.0)),
            SpectralTransform::Neumann(Alpha::Value(0.0)),
        ] {
            let s = apply_transform(&d, t).unwrap();
            assert!(s.matrix().max_abs_diff(&SymmetricMatrix::identity(4)) < 1e-12, "{t}");
        }
    }

    #[test]
    fn triangle_on_swap_is_identity() {
        let s = apply_transform(&swap(), SpectralTransform::TriangleClosing).unwrap();
        assert!(s.matrix().max_abs_diff(&SymmetricMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn neumann_alpha_validation() {
        let d = SpectralDecomposition::from_parts(DMatrix::identity(2, 2), vec![4.0, 1.0]).unwrap();
        assert!(validate_neumann_alpha(&d, 0.2));
        assert!(!validate_neumann_alpha(&d, 0.25));
        assert!(!validate_neumann_alpha(&d, -0.1));
        assert!(!validate_neumann_alpha(&d, 0.0));
    }

    #[test]
    fn domain_errors() {
        let d = SpectralDecomposition::from_parts(DMatrix::identity(2, 2), vec![4.0, 1.0]).unwrap();
        let err = apply_transform(&d, SpectralTransform::Neumann(Alpha::Value(0.25))).unwrap_err();
        assert!(matches!(err, Error::NeumannDomain { bound, .. } if bound == 0.25));
        let err = apply_transform(&d, SpectralTransform::Exponential(Alpha::Value(-1.0))).unwrap_err();
        assert!(matches!(err, Error::NegativeAlpha(_)));
        let err = apply_transform(&d, SpectralTransform::Neumann(Alpha::Value(-0.1))).unwrap_err();
        assert!(matches!(err, Error::NegativeAlpha(_)));
        let err = apply_transform(&d, SpectralTransform::Exponential(Alpha::Value(200.0))).unwrap_err();
        assert!(matches!(err, Error::ExponentialOverflow { .. }));
    }

    #[test]
    fn auto_alpha_is_in_domain() {
        let d = path4();
        let radius = d.spectral_radius();
        let t = SpectralTransform::Neumann(Alpha::Auto);
        assert_eq!(t.resolve_alpha(radius), Some(0.5 / radius));
        assert!(apply_transform(&d, t).is_ok());
        let e = SpectralTransform::Exponential(Alpha::Auto);
        assert_eq!(e.resolve_alpha(radius), Some(1.0 / radius));
        let zero = SpectralDecomposition::from_parts(DMatrix::identity(2, 2), vec![0.0, 0.0]).unwrap();
        let s = apply_transform(&zero, t).unwrap();
        assert!(s.matrix().max_abs_diff(&SymmetricMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in ["triangle", "exp:auto", "exp:0.25", "neumann:auto", "neumann:0.1"] {
            let t: SpectralTransform = s.parse().unwrap();
            assert_eq!(t.to_string(), s);
        }
        assert_eq!("exp".parse::<SpectralTransform>().unwrap(), SpectralTransform::Exponential(Alpha::Auto));
        assert!("triangle:2".parse::<SpectralTransform>().is_err());
        assert!("exp:fast".parse::<SpectralTransform>().is_err());
        assert!("katz".parse::<SpectralTransform>().is_err());
    }
}
