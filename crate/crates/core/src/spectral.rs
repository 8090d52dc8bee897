//! Eigen-coordinate forms of the Hessian.
//!
//! With `A = Uᵀ Λ U` and `y = Ux`, the Hessian of `f = K/4` is
//! `Uᵀ H_n(Δ, y) U` where `Δ_ij = λ_j/λ_i + λ_i/λ_j`. So convexity depends on
//! the eigenvalue ratios alone. For n = 3, normalizing `y` by its largest
//! coordinate turns `H_3` into one of the parametric matrices `M`, `P`, `Q`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::spd::{MatrixSpec, Point};

/// The `n(n-1)/2` pairwise ratio sums `Δ_ij`, `i < j`, each `>= 2`.
///
/// `Δ_ij` and `Δ_ji` share one storage cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaVector {
    dim: usize,
    values: Vec<f64>,
}

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

impl DeltaVector {
    /// Values are given in lexicographic pair order `(0,1), (0,2), …, (n-2,n-1)`.
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDelta("dimension must be at least 1".into()));
        }
        if values.len() != pair_count(dim) {
            return Err(Error::InvalidDelta(format!(
                "n={dim} needs {} entries, got {}",
                pair_count(dim),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 2.0) {
            return Err(Error::InvalidDelta(format!("entry {v} is below 2")));
        }
        Ok(Self { dim, values })
    }

    pub fn constant(dim: usize, value: f64) -> Result<Self> {
        Self::new(dim, vec![value; pair_count(dim)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        i * (2 * self.dim - i - 1) / 2 + (j - i - 1)
    }

    /// `Δ_ij` for `i != j` (either order).
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i != j);
        self.values[self.index(i, j)]
    }

    /// Pairs in storage order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.dim;
        (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)))
    }

    /// Largest entry with its pair; ties go to the first pair in storage order.
    pub fn max_entry(&self) -> Option<((usize, usize), f64)> {
        self.pairs()
            .zip(self.values.iter().copied())
            .fold(None, |best, (p, v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((p, v)),
            })
    }
}

impl fmt::Display for DeltaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .pairs()
            .zip(&self.values)
            .map(|((i, j), v)| format!("Δ{}{}={:.12}", i + 1, j + 1, v))
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// `Δ` from the sorted eigenvalues of a validated matrix.
pub fn delta_from_spec(spec: &MatrixSpec) -> DeltaVector {
    delta_from_eigenvalues(spec.eigenvalues())
}

pub fn delta_from_eigenvalues(lambda: &[f64]) -> DeltaVector {
    let n = lambda.len();
    let mut values = Vec::with_capacity(pair_count(n));
    for i in 0..n {
        for j in (i + 1)..n {
            // t + 1/t can round a hair below 2 when t is within an ulp of 1.
            values.push((lambda[j] / lambda[i] + lambda[i] / lambda[j]).max(2.0));
        }
    }
    DeltaVector { dim: n, values }
}

/// Writes `H_n(Δ, y)` row-major into `out` (length `n²`).
pub(crate) fn fill_h(delta: &DeltaVector, y: &[f64], out: &mut [f64]) {
    let n = delta.dim;
    for i in 0..n {
        let mut d = 3.0 * y[i] * y[i];
        for j in 0..n {
            if j != i {
                d += 0.5 * delta.get(i, j) * y[j] * y[j];
            }
        }
        out[i * n + i] = d;
        for j in (i + 1)..n {
            let v = delta.get(i, j) * y[i] * y[j];
            out[i * n + j] = v;
            out[j * n + i] = v;
        }
    }
}

/// `H_n(Δ, y)`: diagonal `3y_i² + ½Σ_{j≠i} Δ_ij y_j²`, off-diagonal `Δ_ij y_i y_j`.
pub fn h_form(delta: &DeltaVector, y: &Point) -> Result<SymMatrix> {
    if y.dim() != delta.dim {
        return Err(Error::DimensionMismatch {
            expected: delta.dim,
            found: y.dim(),
        });
    }
    let n = delta.dim;
    let mut buf = vec![0.0; n * n];
    fill_h(delta, y.coords(), &mut buf);
    Ok(SymMatrix::from_fn(n, |i, j| buf[i * n + j]))
}

/// `det H_2(Δ, y) = 9y₁²y₂² + (3/2)Δ(y₁⁴+y₂⁴) − (3/4)Δ²y₁²y₂²`.
pub fn h2_det(delta12: f64, y: [f64; 2]) -> f64 {
    let (a, b) = (y[0] * y[0], y[1] * y[1]);
    9.0 * a * b + 1.5 * delta12 * (a * a + b * b) - 0.75 * delta12 * delta12 * a * b
}

/// `ω = (ω₁, ω₂, ω₃)`; for n = 3 this is `(Δ₁₂, Δ₁₃, Δ₂₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaBox {
    pub omega: [f64; 3],
}

impl OmegaBox {
    pub fn new(w1: f64, w2: f64, w3: f64) -> Self {
        Self { omega: [w1, w2, w3] }
    }

    /// Requires a three-dimensional `Δ`.
    pub fn from_delta(delta: &DeltaVector) -> Result<Self> {
        if delta.dim != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                found: delta.dim,
            });
        }
        Ok(Self::new(delta.get(0, 1), delta.get(0, 2), delta.get(1, 2)))
    }
}

/// The three normalized 3x3 forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Form {
    /// `H_3 / y₁²` with `α = y₂/y₁`, `β = y₃/y₁`.
    M,
    /// `H_3 / y₂²` with `α = y₁/y₂`, `β = y₃/y₂`.
    P,
    /// `H_3 / y₃²` with `α = y₁/y₃`, `β = y₂/y₃`.
    Q,
}

impl Form {
    pub const ALL: [Form; 3] = [Form::M, Form::P, Form::Q];

    pub fn name(self) -> &'static str {
        match self {
            Form::M => "M",
            Form::P => "P",
            Form::Q => "Q",
        }
    }
}

/// Writes the selected form row-major into `out`.
pub(crate) fn fill_form(form: Form, omega: &OmegaBox, a: f64, b: f64, out: &mut [f64]) {
    let [w1, w2, w3] = omega.omega;
    let (a2, b2) = (a * a, b * b);
    let (d, u) = match form {
        Form::M => (
            [
                3.0 + 0.5 * w1 * a2 + 0.5 * w2 * b2,
                0.5 * w1 + 3.0 * a2 + 0.5 * w3 * b2,
                0.5 * w2 + 0.5 * w3 * a2 + 3.0 * b2,
            ],
            [w1 * a, w2 * b, w3 * a * b],
        ),
        Form::P => (
            [
                3.0 * a2 + 0.5 * w1 + 0.5 * w2 * b2,
                0.5 * w1 * a2 + 3.0 + 0.5 * w3 * b2,
                0.5 * w2 * a2 + 0.5 * w3 + 3.0 * b2,
            ],
            [w1 * a, w2 * a * b, w3 * b],
        ),
        Form::Q => (
            [
                3.0 * a2 + 0.5 * w1 * b2 + 0.5 * w2,
                0.5 * w1 * a2 + 3.0 * b2 + 0.5 * w3,
                0.5 * w2 * a2 + 0.5 * w3 * b2 + 3.0,
            ],
            [w1 * a * b, w2 * a, w3 * b],
        ),
    };
    out[0] = d[0];
    out[4] = d[1];
    out[8] = d[2];
    out[1] = u[0];
    out[3] = u[0];
    out[2] = u[1];
    out[6] = u[1];
    out[5] = u[2];
    out[7] = u[2];
}

pub fn form_matrix(form: Form, omega: &OmegaBox, alpha: f64, beta: f64) -> SymMatrix {
    let mut buf = [0.0; 9];
    fill_form(form, omega, alpha, beta, &mut buf);
    SymMatrix::from_fn(3, |i, j| buf[i * 3 + j])
}

pub fn m_form(omega: &OmegaBox, alpha: f64, beta: f64) -> SymMatrix {
    form_matrix(Form::M, omega, alpha, beta)
}

pub fn p_form(omega: &OmegaBox, alpha: f64, beta: f64) -> SymMatrix {
    form_matrix(Form::P, omega, alpha, beta)
}

pub fn q_form(omega: &OmegaBox, alpha: f64, beta: f64) -> SymMatrix {
    form_matrix(Form::Q, omega, alpha, beta)
}

/// `det M(ω, 0, β) = (3/2)(ω₁+ω₃β²)(½ω₂ + (3−¼ω₂²)β² + ½ω₂β⁴)`.
pub fn det_m_alpha0(omega: &OmegaBox, beta: f64) -> f64 {
    let [w1, w2, w3] = omega.omega;
    let b2 = beta * beta;
    1.5 * (w1 + w3 * b2) * (0.5 * w2 + (3.0 - 0.25 * w2 * w2) * b2 + 0.5 * w2 * b2 * b2)
}
