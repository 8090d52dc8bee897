//! Empirical bracketing of the convexity threshold along eigenvalue families.
//!
//! Bisection treats "no witness found" as convex for the purpose of moving
//! the bracket only. The lower end is therefore an empirical estimate; the
//! upper end always carries a checked witness.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{Falsifier, NECESSARY_KAPPA};
use crate::error::{Error, Result};
use crate::sampling::SamplePlan;
use crate::spd::MatrixSpec;

pub const DEFAULT_TOL: f64 = 1e-4;
pub const INITIAL_BRACKET: (f64, f64) = (1.0, 8.0);

/// How eigenvalues are spread between `1` and `κ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FamilyKind {
    /// `(1, …, 1, κ)`.
    TwoPoint,
    /// `λ_i = κ^{(i−1)/(n−1)}`.
    Geometric,
    /// `(1, κ, …, κ)`.
    PinnedPair,
    /// `λ_i = κ^{t_i}` for a nondecreasing profile with `t_1 = 0`, `t_n = 1`.
    Custom(Vec<f64>),
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::TwoPoint => "two_point",
            FamilyKind::Geometric => "geometric",
            FamilyKind::PinnedPair => "pinned_pair",
            FamilyKind::Custom(_) => "custom",
        }
    }

    /// Parses `two_point`, `geometric`, `pinned_pair` or `custom:t1,t2,…`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "two_point" => Ok(FamilyKind::TwoPoint),
            "geometric" => Ok(FamilyKind::Geometric),
            "pinned_pair" => Ok(FamilyKind::PinnedPair),
            _ => match s.strip_prefix("custom:") {
                Some(list) => list
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::InvalidFamily(format!("bad profile entry {t:?}")))
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(FamilyKind::Custom),
                None => Err(Error::InvalidFamily(format!("unknown family {s:?}"))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenFamily {
    pub kind: FamilyKind,
    pub dim: usize,
}

impl EigenFamily {
    pub fn new(kind: FamilyKind, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidFamily(format!("dimension {dim} < 2")));
        }
        if let FamilyKind::Custom(t) = &kind {
            if t.len() != dim {
                return Err(Error::InvalidFamily(format!(
                    "profile has {} entries for n={dim}",
                    t.len()
                )));
            }
            let ordered = t.windows(2).all(|w| w[0] <= w[1]);
            if t[0] != 0.0 || t[dim - 1] != 1.0 || !ordered {
                return Err(Error::InvalidFamily(
                    "profile must be nondecreasing from 0 to 1".into(),
                ));
            }
        }
        Ok(Self { kind, dim })
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// Ascending eigenvalues with `λ₁ = 1` and `λ_n = κ` exactly.
    pub fn eigenvalues(&self, kappa: f64) -> Vec<f64> {
        let n = self.dim;
        let mut out: Vec<f64> = match &self.kind {
            FamilyKind::TwoPoint => (0..n).map(|i| if i + 1 == n { kappa } else { 1.0 }).collect(),
            FamilyKind::PinnedPair => (0..n).map(|i| if i == 0 { 1.0 } else { kappa }).collect(),
            FamilyKind::Geometric => (0..n)
                .map(|i| kappa.powf(i as f64 / (n - 1) as f64))
                .collect(),
            FamilyKind::Custom(t) => t.iter().map(|&e| kappa.powf(e)).collect(),
        };
        out[0] = 1.0;
        out[n - 1] = kappa;
        out
    }

    pub fn spec(&self, kappa: f64) -> Result<MatrixSpec> {
        MatrixSpec::from_eigenvalues(&self.eigenvalues(kappa))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BisectionStep {
    pub kappa: f64,
    pub witness: bool,
}

/// Empirical bracket `[κ_lo, κ_hi]` around the threshold of one family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEstimate {
    pub family: EigenFamily,
    pub kappa_lo: f64,
    pub kappa_hi: f64,
    pub tol: f64,
    pub steps: Vec<BisectionStep>,
    /// Directions per falsification call.
    pub samples: usize,
    pub seed: u64,
}

impl BoundaryEstimate {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.kappa_lo + self.kappa_hi)
    }

    pub fn contains(&self, kappa: f64) -> bool {
        self.kappa_lo <= kappa && kappa <= self.kappa_hi
    }
}

impl fmt::Display for BoundaryEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} n={}: empirical bracket [{:.9}, {:.9}] after {} steps ({} directions, seed {})",
            self.family.name(),
            self.family.dim,
            self.kappa_lo,
            self.kappa_hi,
            self.steps.len(),
            self.samples,
            self.seed
        )
    }
}

/// Bisects `[1, 8]` down to width `tol`.
pub fn probe_boundary(family: &EigenFamily, tol: f64, plan: &SamplePlan) -> Result<BoundaryEstimate> {
    let falsifier = Falsifier::new(family.dim, plan);
    probe_with(family, tol, plan, &falsifier)
}

/// [`probe_boundary`] with a prebuilt design, so repeated probes at one
/// dimension share it.
pub fn probe_with(family: &EigenFamily, tol: f64, plan: &SamplePlan, falsifier: &Falsifier) -> Result<BoundaryEstimate> {
    if !(tol > 0.0) {
        return Err(Error::InvalidFamily(format!("tolerance {tol} must be positive")));
    }
    let has_witness = |kappa: f64| -> Result<bool> { Ok(falsifier.find_witness(&family.spec(kappa)?)?.is_some()) };
    let bad = |reason: String| Error::BadInitialBracket {
        family: family.name().to_string(),
        dim: family.dim,
        reason,
    };

    let (mut lo, mut hi) = INITIAL_BRACKET;
    if has_witness(lo)? {
        return Err(bad(format!("witness found at kappa = {lo}")));
    }
    if !has_witness(hi)? {
        return Err(bad(format!("no witness at kappa = {hi}; budget too small")));
    }
    let mut steps = Vec::new();
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let witness = has_witness(mid)?;
        steps.push(BisectionStep { kappa: mid, witness });
        if witness {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    debug_assert!(lo <= NECESSARY_KAPPA + tol);
    Ok(BoundaryEstimate {
        family: family.clone(),
        kappa_lo: lo,
        kappa_hi: hi,
        tol,
        steps,
        samples: falsifier.design().len(),
        seed: plan.seed,
    })
}

pub struct SweepRow {
    pub family: String,
    pub dim: usize,
    pub tol: f64,
    pub result: Result<BoundaryEstimate>,
    pub wall_ms: u128,
}

pub const SWEEP_CSV_HEADER: &str = "family,dim,kappa_lo,kappa_hi,tol,samples,seed,wall_ms";

/// One row per `(family, dim)`, families varying fastest. Rows are
/// independent and run concurrently; a failed row does not stop the others.
pub fn sweep(families: &[FamilyKind], dims: &[usize], tol: f64, plan: &SamplePlan) -> Vec<SweepRow> {
    let jobs: Vec<(usize, &FamilyKind)> = dims
        .iter()
        .flat_map(|&n| families.iter().map(move |f| (n, f)))
        .collect();
    jobs.par_iter()
        .map(|&(n, kind)| {
            let start = Instant::now();
            let result = EigenFamily::new(kind.clone(), n).and_then(|fam| probe_boundary(&fam, tol, plan));
            SweepRow {
                family: kind.name().to_string(),
                dim: n,
                tol,
                result,
                wall_ms: start.elapsed().as_millis(),
            }
        })
        .collect()
}

impl SweepRow {
    /// CSV line without trailing newline; failed rows leave the bracket and
    /// sample columns empty.
    pub fn csv_line(&self, seed: u64) -> String {
        match &self.result {
            Ok(e) => format!(
                "{},{},{:.12},{:.12},{},{},{},{}",
                self.family, self.dim, e.kappa_lo, e.kappa_hi, self.tol, e.samples, e.seed, self.wall_ms
            ),
            Err(_) => format!("{},{},,,{},,{},{}", self.family, self.dim, self.tol, seed, self.wall_ms),
        }
    }
}

pub fn sweep_csv(rows: &[SweepRow], seed: u64) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line(seed));
        out.push('\n');
    }
    out
}
