//! Small dense symmetric linear algebra.
//!
//! Everything here works on row-major `f64` storage and is sized for the
//! tiny systems this crate deals with (n <= 8 in practice). The eigensolver
//! is a cyclic Jacobi iteration: it is accurate to a few ulps on the
//! eigenvalues of small symmetric matrices and needs no external BLAS.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative asymmetry accepted (and removed) by [`SymMatrix::symmetrize`].
pub const DEFAULT_TOL_SYM: f64 = 1e-12;

/// Default PSD tolerance, relative to `max(1, ‖m‖_∞)`.
pub const DEFAULT_EPS_PSD: f64 = 1e-9;

/// Jacobi stops once the off-diagonal Frobenius norm drops below this
/// fraction of ‖A‖_F.
pub const JACOBI_REL_TOL: f64 = 1e-13;

pub const JACOBI_MAX_SWEEPS: usize = 64;

/// A real symmetric `n x n` matrix with finite entries, stored row-major.
///
/// Both triangles are stored and are bitwise equal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds a matrix from raw rows, replacing it by `(M + Mᵀ)/2`.
    ///
    /// Fails if the rows are ragged, empty, contain non-finite values, or if
    /// `max |m_ij - m_ji|` exceeds `tol_sym * ‖M‖_∞`.
    pub fn symmetrize(rows: &[Vec<f64>], tol_sym: f64) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    row: i,
                    cols: row.len(),
                });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
        let norm = rows
            .iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let mut asymmetry = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                asymmetry = asymmetry.max((rows[i][j] - rows[j][i]).abs());
            }
        }
        let limit = tol_sym * norm;
        if asymmetry > limit {
            return Err(Error::NotSymmetric { asymmetry, limit });
        }
        Ok(Self::from_fn(n, |i, j| 0.5 * (rows[i][j] + rows[j][i])))
    }

    /// Builds a matrix from a generator evaluated on the upper triangle
    /// (`i <= j`); the lower triangle is mirrored.
    ///
    /// # Panics
    /// If `n == 0` or the generator returns a non-finite value.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(n > 0, "SymMatrix must have dimension >= 1");
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                assert!(v.is_finite(), "non-finite entry at ({i}, {j})");
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self { dim: n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| 0.0)
    }

    pub fn diag(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| if i == j { values[i] } else { 0.0 })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Row-major view of all `n²` entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        inf_norm(&self.data, self.dim)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|i| (0..n).map(|j| self.data[i * n + j] * x[j]).sum())
            .collect()
    }

    /// `xᵀ M x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::from_fn(self.dim, |i, j| c * self.get(i, j))
    }

    /// `Qᵀ M Q` for a square `Q` given row-major.
    pub fn congruence(&self, q: &[f64]) -> Self {
        let n = self.dim;
        assert_eq!(q.len(), n * n);
        let mut mq = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                mq[i * n + j] = (0..n).map(|k| self.data[i * n + k] * q[k * n + j]).sum();
            }
        }
        Self::from_fn(n, |i, j| (0..n).map(|k| q[k * n + i] * mq[k * n + j]).sum())
    }
}

/// Spectral decomposition `A = Uᵀ diag(λ) U` with `λ` ascending.
///
/// Row `k` of `rotation` is the unit eigenvector for `eigenvalues[k]`, so
/// `y = U x` expresses `x` in eigen-coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    /// `U`, row-major.
    pub rotation: Vec<f64>,
    pub source_dim: usize,
}

impl SpectralData {
    /// `y = U x`.
    pub fn to_eigen_coords(&self, x: &[f64]) -> Vec<f64> {
        let n = self.source_dim;
        (0..n)
            .map(|i| (0..n).map(|j| self.rotation[i * n + j] * x[j]).sum())
            .collect()
    }

    /// `x = Uᵀ y`.
    pub fn from_eigen_coords(&self, y: &[f64]) -> Vec<f64> {
        let n = self.source_dim;
        (0..n)
            .map(|j| (0..n).map(|i| self.rotation[i * n + j] * y[i]).sum())
            .collect()
    }

    /// `Uᵀ diag(f(λ)) U`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.source_dim;
        let w: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        SymMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.rotation[k * n + i] * w[k] * self.rotation[k * n + j])
                .sum()
        })
    }

    pub fn reconstruct(&self) -> SymMatrix {
        self.reconstruct_with(|l| l)
    }
}

pub(crate) fn inf_norm(a: &[f64], n: usize) -> f64 {
    a.chunks(n)
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// In-place cyclic Jacobi on a row-major buffer. On success the diagonal of
/// `a` holds the eigenvalues (unsorted). If `v` is given it must start as the
/// identity and ends with eigenvectors in its columns, `A = V D Vᵀ`.
pub(crate) fn jacobi_in_place(a: &mut [f64], n: usize, mut v: Option<&mut [f64]>) -> Result<()> {
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = JACOBI_REL_TOL * norm;
    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * a[i * n + j] * a[i * n + j];
            }
        }
        s.sqrt()
    };

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_norm(a) <= threshold {
            return Ok(());
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                if let Some(v) = v.as_deref_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    let off = off_norm(a);
    if off <= threshold {
        Ok(())
    } else {
        Err(Error::NoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
            off_norm: off,
        })
    }
}

/// Smallest eigenvalue of a row-major buffer; the buffer is destroyed.
pub(crate) fn min_eigenvalue_in_place(a: &mut [f64], n: usize) -> Result<f64> {
    jacobi_in_place(a, n, None)?;
    Ok((0..n).map(|i| a[i * n + i]).fold(f64::INFINITY, f64::min))
}

/// True if `a + shift·I` admits an LDLᵀ factorization with strictly positive
/// pivots, i.e. `λ_min(a) > -shift` up to rounding. `scratch` needs `n²` slots.
pub(crate) fn shifted_ldl_positive(a: &[f64], n: usize, shift: f64, scratch: &mut [f64]) -> bool {
    let l = &mut scratch[..n * n];
    l.copy_from_slice(a);
    for i in 0..n {
        l[i * n + i] += shift;
    }
    // Row-oriented Cholesky on the lower triangle.
    for j in 0..n {
        let mut d = l[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return false;
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = l[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    true
}

/// Full spectral decomposition with eigenvalues sorted ascending.
pub fn eig_sym(m: &SymMatrix) -> Result<SpectralData> {
    let n = m.dim();
    let mut a = m.as_slice().to_vec();
    let mut v = SymMatrix::identity(n).as_slice().to_vec();
    jacobi_in_place(&mut a, n, Some(&mut v))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]).then(i.cmp(&j)));

    let eigenvalues = order.iter().map(|&k| a[k * n + k]).collect();
    let mut rotation = vec![0.0; n * n];
    for (row, &k) in order.iter().enumerate() {
        for j in 0..n {
            rotation[row * n + j] = v[j * n + k];
        }
    }
    Ok(SpectralData {
        eigenvalues,
        rotation,
        source_dim: n,
    })
}

pub fn min_eigenvalue(m: &SymMatrix) -> Result<f64> {
    let mut a = m.as_slice().to_vec();
    min_eigenvalue_in_place(&mut a, m.dim())
}

/// `λ_min(m) >= -eps · max(1, ‖m‖_∞)`.
pub fn is_psd(m: &SymMatrix, eps: f64) -> Result<bool> {
    Ok(min_eigenvalue(m)? >= -psd_tolerance(m.inf_norm(), eps))
}

/// Absolute PSD slack for a matrix of the given ∞-norm.
#[inline]
pub fn psd_tolerance(inf_norm: f64, eps: f64) -> f64 {
    eps * inf_norm.max(1.0)
}

/// Determinant; closed form up to 3x3, partially pivoted LU beyond.
pub fn det(m: &SymMatrix) -> f64 {
    let a = m.as_slice();
    match m.dim() {
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        3 => {
            a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
        n => lu_det(a.to_vec(), n),
    }
}

fn lu_det(mut a: Vec<f64>, n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        if a[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for i in (col + 1)..n {
            let factor = a[i * n + col] / p;
            for k in col..n {
                a[i * n + k] -= factor * a[col * n + k];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn symmetrize_accepts_last_bit_noise() {
        let rows = vec![vec![2.0, 1.0], vec![1.0 + 1e-15, 2.0]];
        let m = SymMatrix::symmetrize(&rows, DEFAULT_TOL_SYM).unwrap();
        assert_eq!(m.get(0, 1), m.get(1, 0));
    }

    #[test]
    fn symmetrize_rejects_real_asymmetry() {
        let rows = vec![vec![2.0, 1.0], vec![0.5, 2.0]];
        assert!(matches!(
            SymMatrix::symmetrize(&rows, DEFAULT_TOL_SYM),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn symmetrize_rejects_bad_shapes() {
        assert_eq!(SymMatrix::symmetrize(&[], 1e-12), Err(Error::Empty));
        let ragged = vec![vec![1.0, 0.0], vec![0.0]];
        assert!(matches!(
            SymMatrix::symmetrize(&ragged, 1e-12),
            Err(Error::NotSquare { .. })
        ));
        let nan = vec![vec![1.0, f64::NAN], vec![0.0, 1.0]];
        assert_eq!(
            SymMatrix::symmetrize(&nan, 1e-12),
            Err(Error::NonFinite { row: 0, col: 1 })
        );
    }

    #[test]
    fn eig_diagonal_is_signed_permutation() {
        let s = eig_sym(&SymMatrix::diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 2.0, 3.0]);
        for row in s.rotation.chunks(3) {
            let nonzero: Vec<f64> = row.iter().copied().filter(|v| *v != 0.0).collect();
            assert_eq!(nonzero.len(), 1);
            assert_eq!(nonzero[0].abs(), 1.0);
        }
    }

    #[test]
    fn eig_two_by_two() {
        // λ² - 4λ + 3 = 0
        let m = SymMatrix::symmetrize(&[vec![2.0, 1.0], vec![1.0, 2.0]], 0.0).unwrap();
        let s = eig_sym(&m).unwrap();
        assert_close(s.eigenvalues[0], 1.0, 1e-14);
        assert_close(s.eigenvalues[1], 3.0, 1e-14);
    }

    #[test]
    fn eig_reconstructs_and_is_orthogonal() {
        let m = SymMatrix::from_fn(5, |i, j| ((i * 7 + j * 3) % 11) as f64 - 4.5 + (i == j) as u8 as f64);
        let s = eig_sym(&m).unwrap();
        let back = s.reconstruct();
        let err: f64 = m
            .as_slice()
            .iter()
            .zip(back.as_slice())
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(err <= 1e-9 * m.frobenius_norm());
        let u = &s.rotation;
        for i in 0..5 {
            for j in 0..5 {
                let dot: f64 = (0..5).map(|k| u[k * 5 + i] * u[k * 5 + j]).sum();
                assert_close(dot, if i == j { 1.0 } else { 0.0 }, 1e-10);
            }
        }
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn min_eigenvalue_examples() {
        assert_eq!(min_eigenvalue(&SymMatrix::diag(&[0.0, 1.0])).unwrap(), 0.0);
        let m = SymMatrix::from_fn(2, |i, j| if i == j { 73.0 / 12.0 } else { 74.0 / 12.0 });
        assert_close(min_eigenvalue(&m).unwrap(), -1.0 / 12.0, 1e-14);
        let d = 6.0;
        let m = SymMatrix::from_fn(2, |i, j| if i == j { 3.0 + d / 2.0 } else { d });
        assert_close(min_eigenvalue(&m).unwrap(), 0.0, 1e-14);
        assert!(is_psd(&m, DEFAULT_EPS_PSD).unwrap());
    }

    #[test]
    fn zero_matrix_converges_immediately() {
        assert_eq!(min_eigenvalue(&SymMatrix::zeros(4)).unwrap(), 0.0);
    }

    #[test]
    fn det_examples() {
        for n in 1..=6 {
            assert_eq!(det(&SymMatrix::identity(n)), 1.0);
        }
        assert_eq!(det(&SymMatrix::diag(&[1.0, 6.0])), 6.0);
        let m = SymMatrix::from_fn(2, |i, j| if i == j { 2.0 } else { 1.0 });
        assert_eq!(det(&m), 3.0);
        // 4x4 LU path against the eigenvalue product.
        let m = SymMatrix::from_fn(4, |i, j| if i == j { 4.0 + i as f64 } else { 1.0 / (1 + i + j) as f64 });
        let prod: f64 = eig_sym(&m).unwrap().eigenvalues.iter().product();
        assert!((det(&m) - prod).abs() <= 1e-12 * prod.abs());
    }

    #[test]
    fn shifted_ldl_matches_eigenvalue_sign() {
        let mut scratch = vec![0.0; 4];
        let m = SymMatrix::from_fn(2, |i, j| if i == j { 73.0 / 12.0 } else { 74.0 / 12.0 });
        assert!(!shifted_ldl_positive(m.as_slice(), 2, 1e-9, &mut scratch));
        assert!(shifted_ldl_positive(m.as_slice(), 2, 0.1, &mut scratch));
        let z = SymMatrix::zeros(2);
        assert!(shifted_ldl_positive(z.as_slice(), 2, 1e-12, &mut scratch));
    }
}
