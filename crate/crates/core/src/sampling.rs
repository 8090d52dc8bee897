//! Direction designs on the unit sphere and the scanning kernels that
//! evaluate `λ_min(H_n(Δ, y))` over them.
//!
//! `H_n(Δ, ty) = t² H_n(Δ, y)`, so the unit sphere covers every direction.
//! Since `y` and `-y` give the same matrix, the circle design only spans a
//! half turn.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::{min_eigenvalue_in_place, shifted_ldl_positive, DEFAULT_EPS_PSD};
use crate::spd::Point;
use crate::spectral::{fill_h, DeltaVector};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_REFINE_ROUNDS: usize = 50;

/// Design sizes per dimension, excluding the `e_i ± e_j` probes.
pub fn default_samples(n: usize) -> usize {
    match n {
        0 | 1 => 1,
        2 => 4096,
        3 => 100_000,
        _ => 200_000,
    }
}

/// Budget and tolerances for a sampling run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    /// Design size; `None` selects [`default_samples`] for the dimension.
    pub samples: Option<usize>,
    pub seed: u64,
    pub eps_psd: f64,
    pub refine_rounds: usize,
}

impl Default for SamplePlan {
    fn default() -> Self {
        Self {
            samples: None,
            seed: DEFAULT_SEED,
            eps_psd: DEFAULT_EPS_PSD,
            refine_rounds: DEFAULT_REFINE_ROUNDS,
        }
    }
}

impl SamplePlan {
    pub fn with_samples(samples: usize) -> Self {
        Self {
            samples: Some(samples),
            ..Self::default()
        }
    }

    pub fn sample_count(&self, n: usize) -> usize {
        self.samples.unwrap_or_else(|| default_samples(n)).max(1)
    }

    /// Same plan with `factor` times the design size used at dimension `n`.
    pub fn scaled(&self, n: usize, factor: usize) -> Self {
        Self {
            samples: Some(self.sample_count(n) * factor),
            ..*self
        }
    }
}

/// The kind of design used at a dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DesignKind {
    Single,
    Circle,
    Fibonacci,
    RandomGaussian,
}

impl DesignKind {
    pub fn for_dim(n: usize) -> Self {
        match n {
            0 | 1 => DesignKind::Single,
            2 => DesignKind::Circle,
            3 => DesignKind::Fibonacci,
            _ => DesignKind::RandomGaussian,
        }
    }
}

/// A fixed set of unit directions: the normalized `e_i ± e_j` probes first,
/// then the dimension's design.
#[derive(Debug, Clone)]
pub struct SphereDesign {
    dim: usize,
    kind: DesignKind,
    probes: usize,
    points: Vec<f64>,
}

impl SphereDesign {
    pub fn new(n: usize, plan: &SamplePlan) -> Self {
        assert!(n >= 1, "design dimension must be positive");
        let count = plan.sample_count(n);
        let kind = DesignKind::for_dim(n);
        let mut points = Vec::with_capacity(n * (count + n * n));

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut probes = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                for sign in [1.0, -1.0] {
                    let mut p = vec![0.0; n];
                    p[i] = h;
                    p[j] = sign * h;
                    points.extend_from_slice(&p);
                    probes += 1;
                }
            }
        }

        match kind {
            DesignKind::Single => points.push(1.0),
            DesignKind::Circle => {
                for k in 0..count {
                    let t = std::f64::consts::PI * k as f64 / count as f64;
                    points.extend_from_slice(&[t.cos(), t.sin()]);
                }
            }
            DesignKind::Fibonacci => points.extend(fibonacci_sphere(count)),
            DesignKind::RandomGaussian => {
                let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
                let mut v = vec![0.0; n];
                for _ in 0..count {
                    loop {
                        for c in v.iter_mut() {
                            *c = StandardNormal.sample(&mut rng);
                        }
                        let nrm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                        if nrm > 1e-12 {
                            points.extend(v.iter().map(|c| c / nrm));
                            break;
                        }
                    }
                }
            }
        }
        Self {
            dim: n,
            kind,
            probes,
            points,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> DesignKind {
        self.kind
    }

    pub fn probe_count(&self) -> usize {
        self.probes
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn point(&self, k: usize) -> &[f64] {
        &self.points[k * self.dim..(k + 1) * self.dim]
    }
}

/// `count` near-uniform points on S² along the golden-angle spiral.
pub fn fibonacci_sphere(count: usize) -> Vec<f64> {
    let golden_angle = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let mut out = Vec::with_capacity(3 * count);
    for k in 0..count {
        let z = 1.0 - (2 * k + 1) as f64 / count as f64;
        let r = (1.0 - z * z).max(0.0).sqrt();
        let phi = golden_angle * k as f64;
        out.extend_from_slice(&[r * phi.cos(), r * phi.sin(), z]);
    }
    out
}

/// Lower value wins; equal values go to the lower index.
#[inline]
pub(crate) fn min_by_value_then_index(a: (f64, usize), b: (f64, usize)) -> (f64, usize) {
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Less => a,
        std::cmp::Ordering::Greater => b,
        std::cmp::Ordering::Equal => {
            if a.1 <= b.1 {
                a
            } else {
                b
            }
        }
    }
}

/// `λ_min(H_n(Δ, y))` at a single direction.
pub(crate) fn h_min_eigenvalue(delta: &DeltaVector, y: &[f64], buf: &mut [f64]) -> Result<f64> {
    let n = delta.dim();
    fill_h(delta, y, buf);
    min_eigenvalue_in_place(buf, n)
}

/// Minimum of `λ_min(H_n(Δ, y))` over the whole design with its index.
pub(crate) fn scan_min_eigenvalue(delta: &DeltaVector, design: &SphereDesign) -> Result<(f64, usize)> {
    let n = design.dim();
    (0..design.len())
        .into_par_iter()
        .with_min_len(2048)
        .map_init(
            || vec![0.0; n * n],
            |buf, k| h_min_eigenvalue(delta, design.point(k), buf).map(|v| (v, k)),
        )
        .try_reduce(|| (f64::INFINITY, usize::MAX), |a, b| Ok(min_by_value_then_index(a, b)))
}

/// Most negative `λ_min` among directions where `λ_min(H_n(Δ, y)) < -tol`.
/// A shifted Cholesky screens out the PSD directions before any eigenvalue
/// is computed.
pub(crate) fn scan_violations(
    delta: &DeltaVector,
    design: &SphereDesign,
    tol: f64,
) -> Result<Option<(f64, usize)>> {
    let n = design.dim();
    let best = (0..design.len())
        .into_par_iter()
        .with_min_len(4096)
        .map_init(
            || (vec![0.0; n * n], vec![0.0; n * n]),
            |(h, scratch), k| -> Result<(f64, usize)> {
                fill_h(delta, design.point(k), h);
                if shifted_ldl_positive(h, n, tol, scratch) {
                    return Ok((f64::INFINITY, k));
                }
                let v = min_eigenvalue_in_place(h, n)?;
                Ok(if v < -tol { (v, k) } else { (f64::INFINITY, k) })
            },
        )
        .try_reduce(|| (f64::INFINITY, usize::MAX), |a, b| Ok(min_by_value_then_index(a, b)))?;
    Ok(best.0.is_finite().then_some(best))
}

/// Outcome of scanning a design: a sampling certificate, not a proof.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub worst_value: f64,
    /// Unit direction attaining `worst_value`, in the coordinates of `H_n`.
    pub worst_point: Point,
    pub samples: usize,
    pub seed: u64,
    pub design: DesignKind,
    /// Absolute PSD slack; `passed` iff `worst_value >= -tolerance`.
    pub tolerance: f64,
    pub passed: bool,
}

impl SampleReport {
    pub(crate) fn new(
        worst_value: f64,
        worst_point: Point,
        design: &SphereDesign,
        plan: &SamplePlan,
        tolerance: f64,
    ) -> Self {
        Self {
            worst_value,
            worst_point,
            samples: design.len(),
            seed: plan.seed,
            design: design.kind(),
            tolerance,
            passed: worst_value >= -tolerance,
        }
    }
}

impl fmt::Display for SampleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sampling certificate: {} ({} directions, {:?}, seed {}): worst λ_min = {:.6e} at {:?}, tolerance {:.1e}",
            if self.passed { "passed" } else { "failed" },
            self.samples,
            self.design,
            self.seed,
            self.worst_value,
            self.worst_point.coords(),
            self.tolerance
        )
    }
}
