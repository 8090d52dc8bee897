//! The Kantorovich function `K(x) = (xᵀAx)(xᵀA⁻¹x)` and its derivatives.
//!
//! Derivatives are taken of `f = K/4 = q_A(x)·q_{A⁻¹}(x)` with
//! `q_A(x) = ½xᵀAx`; convexity of `K` and `f` coincide.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::spd::{MatrixSpec, Point};

/// Relative slack allowed when checking the Kantorovich upper bound.
pub const BOUND_REL_SLACK: f64 = 1e-12;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `K(x)`.
pub fn k_value(spec: &MatrixSpec, x: &Point) -> Result<f64> {
    spec.check_point(x)?;
    let x = x.coords();
    Ok(spec.matrix.quad_form(x) * spec.inverse.quad_form(x))
}

/// `f(x) = K(x)/4`.
pub fn f_value(spec: &MatrixSpec, x: &Point) -> Result<f64> {
    Ok(0.25 * k_value(spec, x)?)
}

/// `∇f(x) = q_{A⁻¹}(x)·Ax + q_A(x)·A⁻¹x`. The gradient of `K` is four times this.
pub fn k_gradient(spec: &MatrixSpec, x: &Point) -> Result<Point> {
    spec.check_point(x)?;
    let x = x.coords();
    let ax = spec.matrix.mul_vec(x);
    let bx = spec.inverse.mul_vec(x);
    let qa = 0.5 * dot(&ax, x);
    let qb = 0.5 * dot(&bx, x);
    Point::new(ax.iter().zip(&bx).map(|(a, b)| qb * a + qa * b).collect())
}

/// `∇²f(x) = q_A(x)·A⁻¹ + q_{A⁻¹}(x)·A + Axxᵀ A⁻¹ + A⁻¹xxᵀA`.
pub fn k_hessian(spec: &MatrixSpec, x: &Point) -> Result<SymMatrix> {
    spec.check_point(x)?;
    let x = x.coords();
    let a = &spec.matrix;
    let b = &spec.inverse;
    let ax = a.mul_vec(x);
    let bx = b.mul_vec(x);
    let qa = 0.5 * dot(&ax, x);
    let qb = 0.5 * dot(&bx, x);
    Ok(SymMatrix::from_fn(x.len(), |i, j| {
        qa * b.get(i, j) + qb * a.get(i, j) + ax[i] * bx[j] + bx[i] * ax[j]
    }))
}

/// Hessian of `f` from second-order central differences of `f` values with
/// step `h`. Independent of [`k_gradient`] and [`k_hessian`].
pub fn finite_difference_hessian(spec: &MatrixSpec, x: &Point, h: f64) -> Result<SymMatrix> {
    spec.check_point(x)?;
    let x = x.coords();
    let f = |moves: &[(usize, f64)]| {
        let mut p = x.to_vec();
        for &(i, d) in moves {
            p[i] += d;
        }
        0.25 * spec.matrix.quad_form(&p) * spec.inverse.quad_form(&p)
    };
    let f0 = f(&[]);
    Ok(SymMatrix::from_fn(x.len(), |i, j| {
        if i == j {
            (f(&[(i, h)]) - 2.0 * f0 + f(&[(i, -h)])) / (h * h)
        } else {
            (f(&[(i, h), (j, h)]) - f(&[(i, h), (j, -h)]) - f(&[(i, -h), (j, h)]) + f(&[(i, -h), (j, -h)]))
                / (4.0 * h * h)
        }
    }))
}

/// `max_ij |H − H_fd| / max_ij |H|` with step `2e-4·‖x‖`.
pub fn hessian_fd_deviation(spec: &MatrixSpec, x: &Point) -> Result<f64> {
    if x.norm_squared() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let analytic = k_hessian(spec, x)?;
    let fd = finite_difference_hessian(spec, x, 2e-4 * x.norm())?;
    let diff = analytic
        .as_slice()
        .iter()
        .zip(fd.as_slice())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let scale = analytic.as_slice().iter().map(|v| v.abs()).fold(0.0, f64::max);
    Ok(diff / scale)
}

/// Outcome of an upper-bound check `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Classical Kantorovich inequality
/// `(xᵀAx)(xᵀA⁻¹x) <= (λ₁+λ_n)²/(4λ₁λ_n) · ‖x‖⁴`.
pub fn kantorovich_bound_check(spec: &MatrixSpec, x: &Point) -> Result<BoundCheck> {
    spec.check_point(x)?;
    let nrm2 = x.norm_squared();
    if nrm2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let (l1, ln) = (spec.lambda_min(), spec.lambda_max());
    let lhs = k_value(spec, x)?;
    let rhs = (l1 + ln).powi(2) / (4.0 * l1 * ln) * nrm2 * nrm2;
    Ok(BoundCheck {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + BOUND_REL_SLACK),
    })
}

/// The variant with factor `4λ₁λ_n/(λ₁²+λ_n²)`:
/// `lhs = factor · K(x)` against `rhs = ‖x‖⁴`.
///
/// Kept for comparison only; it does not hold in general (it fails at
/// `A = diag(1, 6)`, `x = (1, 1)`).
pub fn squared_denominator_bound_check(spec: &MatrixSpec, x: &Point) -> Result<BoundCheck> {
    spec.check_point(x)?;
    let nrm2 = x.norm_squared();
    if nrm2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let (l1, ln) = (spec.lambda_min(), spec.lambda_max());
    let factor = 4.0 * l1 * ln / (l1 * l1 + ln * ln);
    let lhs = factor * k_value(spec, x)?;
    let rhs = nrm2 * nrm2;
    Ok(BoundCheck {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + BOUND_REL_SLACK),
    })
}
