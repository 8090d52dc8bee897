//! Three-way convexity decision for `K(x)` with re-checkable certificates.
//!
//! The ladder:
//! 1. n = 2: convex iff `κ <= 3+2√2`.
//! 2. any n: `κ > 3+2√2` is not convex; the `e_i + e_j` probe usually
//!    supplies an explicit witness.
//! 3. n = 3: `κ <= 2+√3` is convex.
//! 4. any n: `κ <= √(5+2√6)` is convex.
//! 5. otherwise search for a direction where the Hessian is indefinite.
//!    A failed search is reported as undetermined, never as convex.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::kantorovich::k_hessian;
use crate::lmi::lmi_tolerance;
use crate::matrix::min_eigenvalue;
use crate::sampling::{
    h_min_eigenvalue, scan_min_eigenvalue, scan_violations, SamplePlan, SampleReport, SphereDesign,
};
use crate::spd::{MatrixSpec, Point};
use crate::spectral::{delta_from_spec, DeltaVector};

/// `3 + 2√2`: the condition-number ceiling for convexity in every dimension.
pub const NECESSARY_KAPPA: f64 = 5.828_427_124_746_19;
/// `2 + √3`: sufficient in dimension three.
pub const THREE_DIM_KAPPA: f64 = 3.732_050_807_568_877;
/// `√(5 + 2√6) = √2 + √3`: sufficient in every dimension.
pub const GENERAL_KAPPA: f64 = 3.146_264_369_941_972_6;

/// A condition number within this relative distance of a threshold counts
/// as satisfying it.
pub const BOUNDARY_REL_TOL: f64 = 1e-12;

/// The three threshold constants, carried on every verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub general_sufficient: f64,
    pub three_dim_sufficient: f64,
    pub necessary: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            general_sufficient: GENERAL_KAPPA,
            three_dim_sufficient: THREE_DIM_KAPPA,
            necessary: NECESSARY_KAPPA,
        }
    }
}

impl fmt::Display for Thresholds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "  √(5+2√6) = {}  (sufficient, any n)", self.general_sufficient)?;
        writeln!(f, "  2+√3 = {}  (sufficient, n = 3)", self.three_dim_sufficient)?;
        write!(f, "  3+2√2 = {}  (necessary, any n; exact for n = 2)", self.necessary)
    }
}

#[inline]
fn within(kappa: f64, threshold: f64) -> bool {
    kappa <= threshold * (1.0 + BOUNDARY_REL_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Convex,
    NotConvex,
    Undetermined,
}

impl Status {
    /// CLI exit code: 0 convex, 1 not convex, 2 undetermined.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Convex => 0,
            Status::NotConvex => 1,
            Status::Undetermined => 2,
        }
    }
}

/// A point where the Hessian of `f` is indefinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// `x` in the original coordinates (unit norm).
    pub point: Point,
    /// The same direction in eigen-coordinates, `y = Ux`.
    pub eigen_direction: Point,
    /// `λ_min(∇²f(x))` as recomputed from the four-term Hessian.
    pub lambda_min: f64,
}

impl Witness {
    /// Recomputes `λ_min(∇²f(point))` and checks it is below `-eps/2`.
    pub fn revalidate(&self, spec: &MatrixSpec, eps: f64) -> Result<bool> {
        let h = k_hessian(spec, &self.point)?;
        Ok(min_eigenvalue(&h)? < -0.5 * eps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Certificate {
    /// `κ <= √(5+2√6)`.
    GeneralSufficient,
    /// n = 2 and `κ <= 3+2√2` (necessary and sufficient).
    TwoDimExact,
    /// n = 3 and `κ <= 2+√3`.
    ThreeDimSufficient,
    /// `κ > 3+2√2`, equivalently `9 + 3Δ_max − ¾Δ_max² < 0`.
    NecessaryViolated {
        pair: (usize, usize),
        quad_value: f64,
        witness: Option<Witness>,
    },
    WitnessFound(Witness),
    SamplingExhausted(SampleReport),
}

impl Certificate {
    pub fn name(&self) -> &'static str {
        match self {
            Certificate::GeneralSufficient => "GeneralSufficient",
            Certificate::TwoDimExact => "TwoDimExact",
            Certificate::ThreeDimSufficient => "ThreeDimSufficient",
            Certificate::NecessaryViolated { .. } => "NecessaryViolated",
            Certificate::WitnessFound(_) => "WitnessFound",
            Certificate::SamplingExhausted(_) => "SamplingExhausted",
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Certificate::NecessaryViolated { witness, .. } => witness.as_ref(),
            Certificate::WitnessFound(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityVerdict {
    pub status: Status,
    pub certificate: Certificate,
    pub dim: usize,
    pub kappa: f64,
    pub thresholds: Thresholds,
}

impl fmt::Display for ConvexityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict: {:?}", self.status)?;
        writeln!(f, "kappa: {:.15}", self.kappa)?;
        write!(f, "certificate: {}", self.certificate.name())?;
        match &self.certificate {
            Certificate::NecessaryViolated { pair, quad_value, witness } => {
                write!(
                    f,
                    "\n  pair ({}, {}): 9 + 3Δ - 0.75Δ² = {:.6e}",
                    pair.0 + 1,
                    pair.1 + 1,
                    quad_value
                )?;
                if let Some(w) = witness {
                    write!(f, "\n  witness x = {:?}, λ_min = {:.6e}", w.point.coords(), w.lambda_min)?;
                }
            }
            Certificate::WitnessFound(w) => {
                write!(f, "\n  witness x = {:?}, λ_min = {:.6e}", w.point.coords(), w.lambda_min)?;
            }
            Certificate::SamplingExhausted(r) => write!(f, "\n  {r}")?,
            _ => {}
        }
        write!(f, "\nthresholds:\n{}", self.thresholds)
    }
}

/// Result of the `e_i + e_j` test on the largest `Δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NecessaryProbe {
    /// Zero-based pair attaining `Δ_max`; `None` when n = 1.
    pub worst_pair: Option<(usize, usize)>,
    /// `9 + 3Δ_max − ¾Δ_max²`, the determinant of the 2x2 principal block of
    /// `H_n(Δ, e_i + e_j)`.
    pub quad_value: f64,
    pub violated: bool,
}

pub fn necessary_quadratic(delta: f64) -> f64 {
    9.0 + 3.0 * delta - 0.75 * delta * delta
}

pub fn necessary_probe(delta: &DeltaVector) -> NecessaryProbe {
    match delta.max_entry() {
        Some((pair, d)) => {
            let q = necessary_quadratic(d);
            NecessaryProbe {
                worst_pair: Some(pair),
                quad_value: q,
                violated: q < 0.0,
            }
        }
        None => NecessaryProbe {
            worst_pair: None,
            quad_value: necessary_quadratic(2.0),
            violated: false,
        },
    }
}

/// Falsification search over a fixed design, reusable across matrices of
/// one dimension.
pub struct Falsifier {
    design: SphereDesign,
    plan: SamplePlan,
}

/// Full-scan result: the worst sample plus a witness if one was certified.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub report: SampleReport,
    pub witness: Option<Witness>,
}

impl Falsifier {
    pub fn new(n: usize, plan: &SamplePlan) -> Self {
        Self {
            design: SphereDesign::new(n, plan),
            plan: *plan,
        }
    }

    pub fn design(&self) -> &SphereDesign {
        &self.design
    }

    /// Screened scan: only directions that fail a shifted Cholesky get an
    /// eigenvalue. Returns a refined, re-checked witness or `None`.
    pub fn find_witness(&self, spec: &MatrixSpec) -> Result<Option<Witness>> {
        let delta = delta_from_spec(spec);
        let tol = lmi_tolerance(&delta, self.plan.eps_psd);
        match scan_violations(&delta, &self.design, tol)? {
            Some((_, k)) => self.certify(spec, &delta, self.design.point(k), tol),
            None => Ok(None),
        }
    }

    /// Evaluates every direction and reports the worst one.
    pub fn search(&self, spec: &MatrixSpec) -> Result<SearchOutcome> {
        let delta = delta_from_spec(spec);
        let tol = lmi_tolerance(&delta, self.plan.eps_psd);
        let (worst, k) = scan_min_eigenvalue(&delta, &self.design)?;
        let y = self.design.point(k);
        let witness = if worst < -tol {
            self.certify(spec, &delta, y, tol)?
        } else {
            None
        };
        Ok(SearchOutcome {
            report: SampleReport::new(worst, Point::new(y.to_vec())?, &self.design, &self.plan, tol),
            witness,
        })
    }

    fn certify(&self, spec: &MatrixSpec, delta: &DeltaVector, start: &[f64], tol: f64) -> Result<Option<Witness>> {
        let (y, _) = refine_direction(delta, start, self.plan.refine_rounds)?;
        witness_from_direction(spec, y, tol)
    }
}

/// Maps an eigen-coordinate direction back to `x = Uᵀy` and keeps it only if
/// the four-term Hessian there has `λ_min < -tol/2`.
fn witness_from_direction(spec: &MatrixSpec, y: Vec<f64>, tol: f64) -> Result<Option<Witness>> {
    let x = Point::new(spec.spectral.from_eigen_coords(&y))?;
    let lambda_min = min_eigenvalue(&k_hessian(spec, &x)?)?;
    if lambda_min < -0.5 * tol {
        Ok(Some(Witness {
            point: x,
            eigen_direction: Point::new(y)?,
            lambda_min,
        }))
    } else {
        Ok(None)
    }
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let nrm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    if nrm > 0.0 {
        v.iter_mut().for_each(|c| *c /= nrm);
    }
    v
}

const GOLDEN_ITERS: usize = 30;

/// Coordinate-wise golden-section descent on `λ_min(H_n(Δ, y/‖y‖))`.
/// Only improving moves are taken, so the result is never worse than `start`.
pub fn refine_direction(delta: &DeltaVector, start: &[f64], rounds: usize) -> Result<(Vec<f64>, f64)> {
    let n = delta.dim();
    let mut buf = vec![0.0; n * n];
    let mut eval = |y: &[f64]| h_min_eigenvalue(delta, y, &mut buf);

    let mut y = normalized(start.to_vec());
    let mut best = eval(&y)?;
    let mut step = 0.25;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;

    for _ in 0..rounds {
        let mut improved = false;
        for i in 0..n {
            let trial = |t: f64| {
                let mut z = y.clone();
                z[i] += t;
                normalized(z)
            };
            let (mut a, mut b) = (-step, step);
            let mut c = b - inv_phi * (b - a);
            let mut d = a + inv_phi * (b - a);
            let mut fc = eval(&trial(c))?;
            let mut fd = eval(&trial(d))?;
            for _ in 0..GOLDEN_ITERS {
                if fc < fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - inv_phi * (b - a);
                    fc = eval(&trial(c))?;
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + inv_phi * (b - a);
                    fd = eval(&trial(d))?;
                }
            }
            let (t, v) = if fc < fd { (c, fc) } else { (d, fd) };
            if v < best {
                y = trial(t);
                best = v;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok((y, best))
}

/// Looks for an indefinite-Hessian witness within the plan's budget.
pub fn falsify(spec: &MatrixSpec, plan: &SamplePlan) -> Result<Option<Witness>> {
    Falsifier::new(spec.dim(), plan).find_witness(spec)
}

/// The `e_i + e_j` probe for the pair attaining `Δ_max`, as a witness if it
/// certifies.
fn probe_witness(spec: &MatrixSpec, delta: &DeltaVector, pair: (usize, usize), eps: f64) -> Result<Option<Witness>> {
    let mut y = vec![0.0; spec.dim()];
    y[pair.0] = std::f64::consts::FRAC_1_SQRT_2;
    y[pair.1] = std::f64::consts::FRAC_1_SQRT_2;
    witness_from_direction(spec, y, lmi_tolerance(delta, eps))
}

pub fn classify(spec: &MatrixSpec, plan: &SamplePlan) -> Result<ConvexityVerdict> {
    let n = spec.dim();
    let kappa = spec.kappa;
    let verdict = |status, certificate| ConvexityVerdict {
        status,
        certificate,
        dim: n,
        kappa,
        thresholds: Thresholds::default(),
    };

    if n == 1 {
        return Ok(verdict(Status::Convex, Certificate::GeneralSufficient));
    }
    let delta = delta_from_spec(spec);

    if !within(kappa, NECESSARY_KAPPA) {
        let probe = necessary_probe(&delta);
        let pair = probe.worst_pair.expect("n >= 2 has at least one pair");
        let witness = probe_witness(spec, &delta, pair, plan.eps_psd)?;
        return Ok(verdict(
            Status::NotConvex,
            Certificate::NecessaryViolated {
                pair,
                quad_value: probe.quad_value,
                witness,
            },
        ));
    }
    if n == 2 {
        return Ok(verdict(Status::Convex, Certificate::TwoDimExact));
    }
    if n == 3 && within(kappa, THREE_DIM_KAPPA) {
        return Ok(verdict(Status::Convex, Certificate::ThreeDimSufficient));
    }
    if within(kappa, GENERAL_KAPPA) {
        return Ok(verdict(Status::Convex, Certificate::GeneralSufficient));
    }

    let outcome = Falsifier::new(n, plan).search(spec)?;
    Ok(match outcome.witness {
        Some(w) => verdict(Status::NotConvex, Certificate::WitnessFound(w)),
        None => verdict(Status::Undetermined, Certificate::SamplingExhausted(outcome.report)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_constants() {
        assert_eq!(NECESSARY_KAPPA, 3.0 + 2.0 * 2f64.sqrt());
        assert!((THREE_DIM_KAPPA - (2.0 + 3f64.sqrt())).abs() < 1e-15);
        assert!((GENERAL_KAPPA - (5.0 + 2.0 * 6f64.sqrt()).sqrt()).abs() < 1e-15);
        assert!((GENERAL_KAPPA - (2f64.sqrt() + 3f64.sqrt())).abs() < 1e-15);
        // κ + 1/κ images: 6, 4 and 2√3.
        assert!((NECESSARY_KAPPA + 1.0 / NECESSARY_KAPPA - 6.0).abs() < 1e-14);
        assert!((THREE_DIM_KAPPA + 1.0 / THREE_DIM_KAPPA - 4.0).abs() < 1e-14);
        assert!((GENERAL_KAPPA + 1.0 / GENERAL_KAPPA - 2.0 * 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn probe_examples() {
        let p = necessary_probe(&DeltaVector::constant(3, 2.0).unwrap());
        assert_eq!(p.quad_value, 12.0);
        assert!(!p.violated);

        let p = necessary_probe(&DeltaVector::new(3, vec![2.5, 6.0, 3.0]).unwrap());
        assert_eq!(p.worst_pair, Some((0, 2)));
        assert_eq!(p.quad_value, 0.0);
        assert!(!p.violated);

        let p = necessary_probe(&DeltaVector::constant(2, 37.0 / 6.0).unwrap());
        assert!((p.quad_value - (-1.020_833_333_333_333_3)).abs() < 1e-12);
        assert!(p.violated);

        let p = necessary_probe(&DeltaVector::new(1, vec![]).unwrap());
        assert_eq!(p.worst_pair, None);
        assert!(!p.violated);
    }

    #[test]
    fn classify_examples() {
        let plan = SamplePlan::default();
        let v = classify(&MatrixSpec::from_eigenvalues(&[1.0, 6.0]).unwrap(), &plan).unwrap();
        assert_eq!(v.status, Status::NotConvex);
        let w = v.certificate.witness().expect("probe certifies at κ = 6");
        assert!(w.revalidate(&MatrixSpec::from_eigenvalues(&[1.0, 6.0]).unwrap(), 1e-9).unwrap());

        let v = classify(&MatrixSpec::from_eigenvalues(&[1.0, NECESSARY_KAPPA]).unwrap(), &plan).unwrap();
        assert_eq!(v.status, Status::Convex);
        assert_eq!(v.certificate, Certificate::TwoDimExact);

        let v = classify(&MatrixSpec::from_eigenvalues(&[1.0, 2.0, 3.7]).unwrap(), &plan).unwrap();
        assert_eq!(v.status, Status::Convex);
        assert_eq!(v.certificate, Certificate::ThreeDimSufficient);

        let v = classify(&MatrixSpec::from_eigenvalues(&[1.0, 2.0, 4.5]).unwrap(), &plan).unwrap();
        assert_ne!(v.status, Status::Convex);

        let v = classify(&MatrixSpec::from_eigenvalues(&[2.0]).unwrap(), &plan).unwrap();
        assert_eq!(v.status, Status::Convex);

        let v = classify(&MatrixSpec::from_eigenvalues(&[1.0, 1.5, 2.0, 3.0]).unwrap(), &plan).unwrap();
        assert_eq!(v.certificate, Certificate::GeneralSufficient);
    }

    #[test]
    fn falsify_examples() {
        let plan = SamplePlan::default();
        let id = MatrixSpec::from_eigenvalues(&[1.0, 1.0, 1.0]).unwrap();
        assert!(falsify(&id, &plan).unwrap().is_none());

        let spec = MatrixSpec::from_eigenvalues(&[1.0, 6.0]).unwrap();
        let w = falsify(&spec, &plan).unwrap().expect("witness");
        // Rescale to the norm of (1, 1).
        let x = w.point.scaled(2f64.sqrt() / w.point.norm());
        let lmin = min_eigenvalue(&k_hessian(&spec, &x).unwrap()).unwrap();
        assert!(lmin <= -1.0 / 12.0 + 1e-9, "{lmin}");

        let spec = MatrixSpec::from_eigenvalues(&[1.0, 2.0, 3.7]).unwrap();
        assert!(falsify(&spec, &plan).unwrap().is_none());
    }

    #[test]
    fn refine_never_worsens() {
        let delta = DeltaVector::new(3, vec![2.2, 6.5, 5.0]).unwrap();
        let start = [0.6, 0.1, 0.79];
        let mut buf = vec![0.0; 9];
        let v0 = h_min_eigenvalue(&delta, &normalized(start.to_vec()), &mut buf).unwrap();
        let (_, v) = refine_direction(&delta, &start, 20).unwrap();
        assert!(v <= v0);
    }
}
