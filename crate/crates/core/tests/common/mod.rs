#![allow(dead_code)]

use kantorovich::{f_value, validate_spd, MatrixSpec, Point, SymMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Row-major orthogonal matrix from Gram-Schmidt on Gaussian rows.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(n);
    while q.len() < n {
        let mut v = gaussian_vec(rng, n);
        for u in &q {
            let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
        }
        let nrm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if nrm > 1e-8 {
            q.push(v.into_iter().map(|a| a / nrm).collect());
        }
    }
    q.concat()
}

/// `QᵀΛQ` as raw rows.
pub fn conjugated_rows(q: &[f64], eigenvalues: &[f64]) -> Vec<Vec<f64>> {
    let n = eigenvalues.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| q[k * n + i] * eigenvalues[k] * q[k * n + j]).sum())
                .collect()
        })
        .collect()
}

/// Eigenvalues `s·κ^{t_i}` with `t_1 = 0`, `t_n = 1` and random inner
/// exponents, so the condition number is `κ` up to rounding.
pub fn spectrum_with_kappa(rng: &mut ChaCha8Rng, n: usize, kappa: f64) -> Vec<f64> {
    let s: f64 = rng.gen_range(0.5..2.0);
    let mut t: Vec<f64> = (0..n).map(|i| if i == 0 { 0.0 } else if i + 1 == n { 1.0 } else { rng.gen() }).collect();
    t.sort_by(f64::total_cmp);
    t.into_iter().map(|e| s * kappa.powf(e)).collect()
}

/// A rotated SPD matrix with the requested condition number.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize, kappa: f64) -> MatrixSpec {
    let lambda = spectrum_with_kappa(rng, n, kappa);
    let q = random_orthogonal(rng, n);
    validate_spd(&conjugated_rows(&q, &lambda), 1e-12, 1e-12).expect("constructed SPD")
}

/// Hessian of `f` by second-order central differences of `f` values.
pub fn fd_hessian(spec: &MatrixSpec, x: &[f64], h: f64) -> SymMatrix {
    let n = x.len();
    let f = |dx: &[(usize, f64)]| {
        let mut p = x.to_vec();
        for &(i, d) in dx {
            p[i] += d;
        }
        f_value(spec, &Point::new(p).unwrap()).unwrap()
    };
    SymMatrix::from_fn(n, |i, j| {
        if i == j {
            (f(&[(i, h)]) - 2.0 * f(&[]) + f(&[(i, -h)])) / (h * h)
        } else {
            (f(&[(i, h), (j, h)]) - f(&[(i, h), (j, -h)]) - f(&[(i, -h), (j, h)]) + f(&[(i, -h), (j, -h)]))
                / (4.0 * h * h)
        }
    })
}

pub fn max_abs_diff(a: &SymMatrix, b: &SymMatrix) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_abs(a: &SymMatrix) -> f64 {
    a.as_slice().iter().map(|v| v.abs()).fold(0.0, f64::max)
}
