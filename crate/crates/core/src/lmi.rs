//! Numerical checks of the semi-infinite LMI `H_n(Δ, y) ⪰ 0` and of the
//! three-dimensional inequalities behind the `2+√3` threshold.
//!
//! Everything here is sampling or gridding: a pass is evidence at the
//! recorded density, not a proof.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{min_eigenvalue_in_place, psd_tolerance};
use crate::poly::detm_alpha_poly;
use crate::sampling::{min_by_value_then_index, scan_min_eigenvalue, SamplePlan, SampleReport, SphereDesign};
use crate::spd::Point;
use crate::spectral::{det_m_alpha0, fill_form, DeltaVector, Form, OmegaBox};

/// Absolute slack used by the grid suites.
pub const GRID_TOL: f64 = 1e-9;

/// PSD slack for `H_n(Δ, y)` with unit `y`: `eps · max(1, B)` where
/// `B = 3 + 1.5·max_i Σ_j Δ_ij` bounds `‖H_n(Δ, y)‖_∞` on the unit sphere.
pub fn lmi_tolerance(delta: &DeltaVector, eps: f64) -> f64 {
    let n = delta.dim();
    let row_max = (0..n)
        .map(|i| (0..n).filter(|&j| j != i).map(|j| delta.get(i, j)).sum::<f64>())
        .fold(0.0, f64::max);
    psd_tolerance(3.0 + 1.5 * row_max, eps)
}

/// Sampling certificate for `H_n(Δ, y) ⪰ 0` over the unit sphere.
pub fn verify_h_lmi(delta: &DeltaVector, plan: &SamplePlan) -> Result<SampleReport> {
    let design = SphereDesign::new(delta.dim(), plan);
    let (worst, k) = scan_min_eigenvalue(delta, &design)?;
    let tol = lmi_tolerance(delta, plan.eps_psd);
    Ok(SampleReport::new(worst, Point::new(design.point(k).to_vec())?, &design, plan, tol))
}

/// Runs [`verify_h_lmi`] on constant `Δ` at `nodes` equispaced values in
/// `[lo, hi]` and returns the report with the smallest `worst_value`
/// together with the `Δ` value it came from.
pub fn constant_delta_sweep(n: usize, lo: f64, hi: f64, nodes: usize, plan: &SamplePlan) -> Result<(f64, SampleReport)> {
    let axis = Axis::new(lo, hi, nodes)?;
    let design = SphereDesign::new(n, plan);
    let mut best: Option<(f64, SampleReport)> = None;
    for k in 0..axis.nodes {
        let d = axis.node(k);
        let delta = DeltaVector::constant(n, d)?;
        let (worst, idx) = scan_min_eigenvalue(&delta, &design)?;
        let tol = lmi_tolerance(&delta, plan.eps_psd);
        if best.as_ref().map_or(true, |(_, r)| worst < r.worst_value) {
            let report = SampleReport::new(worst, Point::new(design.point(idx).to_vec())?, &design, plan, tol);
            best = Some((d, report));
        }
    }
    Ok(best.expect("axis has at least one node"))
}

/// One grid axis: `nodes` equispaced points from `lo` to `hi`, both included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub nodes: usize,
}

impl Axis {
    /// A single node is allowed only for a degenerate range `lo == hi`.
    pub fn new(lo: f64, hi: f64, nodes: usize) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidGrid(format!("non-finite range [{lo}, {hi}]")));
        }
        match nodes {
            0 => Err(Error::InvalidGrid("axis needs at least one node".into())),
            1 if lo != hi => Err(Error::InvalidGrid(format!(
                "a single node needs lo == hi, got [{lo}, {hi}]"
            ))),
            n if n >= 2 && lo >= hi => Err(Error::InvalidGrid(format!("range [{lo}, {hi}] is not ordered"))),
            _ => Ok(Self { lo, hi, nodes }),
        }
    }

    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v, nodes: 1 }
    }

    #[inline]
    pub fn node(&self, k: usize) -> f64 {
        if self.nodes == 1 {
            self.lo
        } else if k + 1 == self.nodes {
            self.hi
        } else {
            // One rounding, so decimal steps come out as the nearest double.
            let m = (self.nodes - 1) as f64;
            let k = k as f64;
            (self.lo * (m - k) + self.hi * k) / m
        }
    }

    pub fn within(&self, lo: f64, hi: f64) -> bool {
        self.lo >= lo && self.hi <= hi
    }

    /// Same range with `2·nodes − 1` nodes, so every old node is kept.
    pub fn refined(&self) -> Self {
        if self.nodes == 1 {
            *self
        } else {
            Self {
                nodes: 2 * self.nodes - 1,
                ..*self
            }
        }
    }
}

/// Tensor grid; cells are enumerated lexicographically with the last axis
/// varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
}

impl GridSpec {
    pub fn new(axes: Vec<Axis>) -> Self {
        Self { axes }
    }

    pub fn cube(lo: f64, hi: f64, nodes: usize, dims: usize) -> Result<Self> {
        Ok(Self::new(vec![Axis::new(lo, hi, nodes)?; dims]))
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.nodes).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell(&self, mut index: usize, out: &mut [f64]) {
        for (d, axis) in self.axes.iter().enumerate().rev() {
            out[d] = axis.node(index % axis.nodes);
            index /= axis.nodes;
        }
    }

    pub fn cell_vec(&self, index: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.dims()];
        self.cell(index, &mut v);
        v
    }

    pub fn within(&self, lo: f64, hi: f64) -> bool {
        self.axes.iter().all(|a| a.within(lo, hi))
    }

    pub fn refined(&self) -> Self {
        Self::new(self.axes.iter().map(Axis::refined).collect())
    }

    fn expect_dims(&self, dims: usize, what: &str) -> Result<()> {
        if self.dims() != dims {
            return Err(Error::InvalidGrid(format!(
                "{what} grid needs {dims} axes, got {}",
                self.dims()
            )));
        }
        Ok(())
    }
}

/// Minimum of one checked quantity and where it occurs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellMin {
    pub function: String,
    pub value: f64,
    pub cell: Vec<f64>,
}

/// Outcome of a grid suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub grid: String,
    pub cells: usize,
    pub tolerance: f64,
    pub passed: bool,
    /// False when the grid leaves the box the inequality is claimed on; the
    /// report is then exploratory.
    pub certified_box: bool,
    /// The smallest entry of `minima` (first one on ties).
    pub worst: CellMin,
    pub minima: Vec<CellMin>,
}

impl GridReport {
    fn from_minima(grid: &str, cells: usize, certified_box: bool, minima: Vec<CellMin>) -> Self {
        let worst = minima
            .iter()
            .fold(None::<&CellMin>, |best, m| match best {
                Some(b) if b.value <= m.value => Some(b),
                _ => Some(m),
            })
            .expect("at least one checked function")
            .clone();
        Self {
            grid: grid.to_string(),
            cells,
            tolerance: GRID_TOL,
            passed: worst.value >= -GRID_TOL,
            certified_box,
            worst,
            minima,
        }
    }

    pub fn minimum(&self, function: &str) -> Option<&CellMin> {
        self.minima.iter().find(|m| m.function == function)
    }
}

impl fmt::Display for GridReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} over {} cells{}; worst {} = {:.6e} at {:?}",
            self.grid,
            if self.passed { "pass" } else { "FAIL" },
            self.cells,
            if self.certified_box { "" } else { " (exploratory)" },
            self.worst.function,
            self.worst.value,
            self.worst.cell
        )
    }
}

/// CSV header for [`grid_reports_csv`].
pub const LEMMA_CSV_HEADER: &str = "grid,function,x1,x2,x3,x4,x5,value,passed";

/// One row per checked function of each report; unused coordinates are empty.
pub fn grid_reports_csv(reports: &[GridReport]) -> String {
    let mut out = String::from(LEMMA_CSV_HEADER);
    out.push('\n');
    for r in reports {
        for m in &r.minima {
            let mut cols = vec![r.grid.clone(), m.function.clone()];
            for k in 0..5 {
                cols.push(m.cell.get(k).map(|v| format!("{v}")).unwrap_or_default());
            }
            cols.push(format!("{:.17e}", m.value));
            cols.push((m.value >= -r.tolerance).to_string());
            out.push_str(&cols.join(","));
            out.push('\n');
        }
    }
    out
}

/// `(χ₁, χ₂, χ₃, χ₄, ψ)` at `(δ₁, δ₂, δ₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma41Values {
    pub chi: [f64; 4],
    pub psi: f64,
}

impl Lemma41Values {
    pub const NAMES: [&'static str; 5] = ["chi1", "chi2", "chi3", "chi4", "psi"];

    pub fn as_array(&self) -> [f64; 5] {
        [self.chi[0], self.chi[1], self.chi[2], self.chi[3], self.psi]
    }
}

pub fn lemma41_values(d1: f64, d2: f64, d3: f64) -> Lemma41Values {
    Lemma41Values {
        chi: [
            6.0 * d3 + d1 * d2 - 0.5 * d3 * d2 * d2,
            6.0 * d1 + d3 * d2 - 0.5 * d1 * d2 * d2,
            6.0 * d2 + d1 * d3 - 0.5 * d2 * d1 * d1,
            6.0 * d3 + d1 * d2 - 0.5 * d3 * d1 * d1,
        ],
        psi: 12.0 + d1 * d2 * d3 - d1 * d1 - d2 * d2 - d3 * d3,
    }
}

pub fn default_lemma41_grid() -> GridSpec {
    GridSpec::cube(2.0, 4.0, 41, 3).expect("valid default")
}

pub fn default_omega_grid() -> GridSpec {
    GridSpec::cube(2.0, 4.0, 21, 3).expect("valid default")
}

pub fn default_ab_grid() -> GridSpec {
    GridSpec::cube(-1.0, 1.0, 41, 2).expect("valid default")
}

pub fn default_beta_grid() -> GridSpec {
    GridSpec::cube(-1.0, 1.0, 41, 1).expect("valid default")
}

/// Number of `α` nodes used by [`lemma42_44_check`].
pub const ALPHA_CHECK_NODES: usize = 41;

/// Per-function minima over `(value, cell index)` with index tie-break.
fn reduce_minima<const K: usize>(
    cells: usize,
    eval: impl Fn(usize) -> Result<[f64; K]> + Sync,
) -> Result<[(f64, usize); K]> {
    (0..cells)
        .into_par_iter()
        .with_min_len(64)
        .map(|i| eval(i).map(|vals| vals.map(|v| (v, i))))
        .try_reduce(
            || [(f64::INFINITY, usize::MAX); K],
            |a, b| {
                let mut out = a;
                for k in 0..K {
                    out[k] = min_by_value_then_index(a[k], b[k]);
                }
                Ok(out)
            },
        )
}

/// Checks `χ₁…χ₄, ψ >= 0` at every node of a three-axis grid.
pub fn lemma41_grid_check(grid: &GridSpec) -> Result<GridReport> {
    grid.expect_dims(3, "lemma41")?;
    let mins = reduce_minima::<5>(grid.len(), |i| {
        let mut c = [0.0; 3];
        grid.cell(i, &mut c);
        Ok(lemma41_values(c[0], c[1], c[2]).as_array())
    })?;
    let minima = Lemma41Values::NAMES
        .iter()
        .zip(mins)
        .map(|(name, (value, i))| CellMin {
            function: name.to_string(),
            value,
            cell: grid.cell_vec(i),
        })
        .collect();
    Ok(GridReport::from_minima("lemma41", grid.len(), grid.within(2.0, 4.0), minima))
}

/// `λ_min(form(ω, α, β)) >= -1e-9` over `omega_grid × ab_grid`. Cells of
/// the product grid are ordered `(ω₁, ω₂, ω₃, α, β)`.
pub fn robust_psd_grid(form: Form, omega_grid: &GridSpec, ab_grid: &GridSpec) -> Result<GridReport> {
    omega_grid.expect_dims(3, "omega")?;
    ab_grid.expect_dims(2, "alpha/beta")?;
    let inner = ab_grid.len();
    let (value, flat) = (0..omega_grid.len())
        .into_par_iter()
        .map(|oi| -> Result<(f64, usize)> {
            let mut w = [0.0; 3];
            omega_grid.cell(oi, &mut w);
            let omega = OmegaBox::new(w[0], w[1], w[2]);
            let mut ab = [0.0; 2];
            let mut buf = [0.0; 9];
            let mut best = (f64::INFINITY, usize::MAX);
            for k in 0..inner {
                ab_grid.cell(k, &mut ab);
                fill_form(form, &omega, ab[0], ab[1], &mut buf);
                let v = min_eigenvalue_in_place(&mut buf, 3)?;
                best = min_by_value_then_index(best, (v, oi * inner + k));
            }
            Ok(best)
        })
        .try_reduce(|| (f64::INFINITY, usize::MAX), |a, b| Ok(min_by_value_then_index(a, b)))?;
    let mut cell = omega_grid.cell_vec(flat / inner);
    cell.extend(ab_grid.cell_vec(flat % inner));
    let minima = vec![CellMin {
        function: format!("lambda_min({})", form.name()),
        value,
        cell,
    }];
    let certified = omega_grid.within(2.0, 4.0) && ab_grid.within(-1.0, 1.0);
    Ok(GridReport::from_minima(
        &format!("robust_psd_{}", form.name()),
        omega_grid.len() * inner,
        certified,
        minima,
    ))
}

/// Checks on `p(α) = det M(ω, α, β)` at every `(ω, β)` node, with `p`
/// recovered exactly by interpolation: `p'' >= 0` and `p'''' >= 0` on 41
/// nodes of `[-1, 1]`, `p(α) >= p(0)` on the same nodes, and
/// `det M(ω, 0, β) >= 0`.
pub fn lemma42_44_check(omega_grid: &GridSpec, beta_grid: &GridSpec) -> Result<GridReport> {
    omega_grid.expect_dims(3, "omega")?;
    beta_grid.expect_dims(1, "beta")?;
    let nb = beta_grid.len();
    let alphas = Axis::new(-1.0, 1.0, ALPHA_CHECK_NODES)?;
    let cells = omega_grid.len() * nb;
    // Cells are ordered (ω₁, ω₂, ω₃, β).
    let mins = reduce_minima::<4>(cells, |i| {
        let mut w = [0.0; 3];
        omega_grid.cell(i / nb, &mut w);
        let omega = OmegaBox::new(w[0], w[1], w[2]);
        let beta = beta_grid.axes[0].node(i % nb);
        let p = detm_alpha_poly(&omega, beta);
        let p0 = p.eval(0.0);
        let mut out = [f64::INFINITY, f64::INFINITY, f64::INFINITY, det_m_alpha0(&omega, beta)];
        for k in 0..alphas.nodes {
            let a = alphas.node(k);
            out[0] = out[0].min(p.derivative(2, a));
            out[1] = out[1].min(p.derivative(4, a));
            out[2] = out[2].min(p.eval(a) - p0);
        }
        Ok(out)
    })?;
    let names = ["d2_alpha", "d4_alpha", "alpha_gap", "det_alpha0"];
    let minima = names
        .iter()
        .zip(mins)
        .map(|(name, (value, i))| {
            let mut cell = omega_grid.cell_vec(i / nb);
            cell.push(beta_grid.axes[0].node(i % nb));
            CellMin {
                function: name.to_string(),
                value,
                cell,
            }
        })
        .collect();
    let certified = omega_grid.within(2.0, 4.0) && beta_grid.within(-1.0, 1.0);
    Ok(GridReport::from_minima("lemma42_44", cells, certified, minima))
}
