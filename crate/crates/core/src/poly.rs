//! `det M(ω, α, β)` as an exact degree-6 polynomial in `α`.
//!
//! Each entry of `M` is at most quadratic in `α`, so the determinant has
//! degree at most 6 and seven samples pin it down. The coefficients are
//! recovered by Newton interpolation on a fixed, well-spread node set.

use serde::{Deserialize, Serialize};

use crate::matrix::det;
use crate::spectral::{m_form, OmegaBox};

/// Interpolation nodes in `α`.
pub const ALPHA_NODES: [f64; 7] = [-1.0, -2.0 / 3.0, -1.0 / 3.0, 0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];

/// `c₀ + c₁α + … + c₆α⁶`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaPoly {
    pub coeffs: [f64; 7],
}

impl AlphaPoly {
    /// Interpolates `values[k] = p(ALPHA_NODES[k])`.
    pub fn interpolate(values: &[f64; 7]) -> Self {
        let x = ALPHA_NODES;
        let mut dd = *values;
        for k in 1..7 {
            for i in (k..7).rev() {
                dd[i] = (dd[i] - dd[i - 1]) / (x[i] - x[i - k]);
            }
        }
        // Horner-style expansion of the Newton form into monomials.
        let mut c = [0.0; 7];
        c[0] = dd[6];
        let mut deg = 0;
        for k in (0..6).rev() {
            // c ← c·(α − x_k) + dd_k
            for i in (0..=deg + 1).rev() {
                let lower = if i > 0 { c[i - 1] } else { 0.0 };
                c[i] = lower - x[k] * c[i];
            }
            c[0] += dd[k];
            deg += 1;
        }
        Self { coeffs: c }
    }

    pub fn eval(&self, alpha: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * alpha + c)
    }

    /// The `order`-th derivative at `alpha`; zero for orders above 6.
    pub fn derivative(&self, order: usize, alpha: f64) -> f64 {
        let mut acc = 0.0;
        for k in (order..7).rev() {
            let falling: f64 = ((k - order + 1)..=k).map(|v| v as f64).product();
            acc = acc * alpha + falling * self.coeffs[k];
        }
        acc
    }
}

/// Coefficients of `α ↦ det M(ω, α, β)`.
pub fn detm_alpha_poly(omega: &OmegaBox, beta: f64) -> AlphaPoly {
    let mut values = [0.0; 7];
    for (v, &a) in values.iter_mut().zip(&ALPHA_NODES) {
        *v = det(&m_form(omega, a, beta));
    }
    AlphaPoly::interpolate(&values)
}
