//! Validated symmetric positive definite matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{eig_sym, SpectralData, SymMatrix, DEFAULT_TOL_SYM};

/// Default lower bound on `λ₁ / λ_n` accepted by [`validate_spd`].
pub const DEFAULT_TOL_PD: f64 = 1e-12;

/// A point `x ∈ Rⁿ` with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some(index) = coords.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinitePoint { index });
        }
        Ok(Self(coords))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self(self.0.iter().map(|v| t * v).collect())
    }
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Self(v.to_vec())
    }
}

impl From<[f64; 3]> for Point {
    fn from(v: [f64; 3]) -> Self {
        Self(v.to_vec())
    }
}

/// `A`, its spectral inverse, its eigen-decomposition and `κ(A) = λ_n / λ₁`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSpec {
    pub matrix: SymMatrix,
    pub inverse: SymMatrix,
    pub spectral: SpectralData,
    pub kappa: f64,
}

impl MatrixSpec {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectral.eigenvalues
    }

    pub fn lambda_min(&self) -> f64 {
        self.spectral.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> f64 {
        *self.spectral.eigenvalues.last().unwrap()
    }

    /// Diagonal matrix with the given positive eigenvalues.
    pub fn from_eigenvalues(eigenvalues: &[f64]) -> Result<Self> {
        let n = eigenvalues.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { eigenvalues[i] } else { 0.0 }).collect())
            .collect();
        validate_spd(&rows, DEFAULT_TOL_SYM, DEFAULT_TOL_PD)
    }

    pub(crate) fn check_point(&self, x: &Point) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(())
    }
}

/// Symmetrizes, decomposes and checks `raw`; fails unless `λ₁ > tol_pd · λ_n`.
pub fn validate_spd(raw: &[Vec<f64>], tol_sym: f64, tol_pd: f64) -> Result<MatrixSpec> {
    let matrix = SymMatrix::symmetrize(raw, tol_sym)?;
    let spectral = eig_sym(&matrix)?;
    let lo = spectral.eigenvalues[0];
    let hi = *spectral.eigenvalues.last().unwrap();
    let threshold = tol_pd * hi.abs();
    if !(lo > threshold) || hi <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: lo,
            threshold,
        });
    }
    let inverse = spectral.reconstruct_with(|l| 1.0 / l);
    Ok(MatrixSpec {
        matrix,
        inverse,
        kappa: hi / lo,
        spectral,
    })
}
