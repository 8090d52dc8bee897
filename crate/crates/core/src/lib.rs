//! Convexity analysis of the Kantorovich function `K(x) = (xᵀAx)(xᵀA⁻¹x)`.
//!
//! `K` is convex exactly when a family of small matrices `H_n(Δ, y)`, built
//! from the eigenvalue ratios of `A`, is positive semidefinite for every
//! direction `y`. This crate evaluates `K` and its derivatives, decides
//! convexity where a condition-number threshold settles it, searches for
//! counterexamples elsewhere, and runs grid checks of the inequalities that
//! underpin the three-dimensional threshold.
//!
//! ```
//! use kantorovich::{classify, MatrixSpec, SamplePlan, Status};
//!
//! let spec = MatrixSpec::from_eigenvalues(&[1.0, 6.0]).unwrap();
//! let verdict = classify(&spec, &SamplePlan::default()).unwrap();
//! assert_eq!(verdict.status, Status::NotConvex);
//! ```

pub mod boundary;
pub mod classify;
pub mod error;
pub mod io;
pub mod kantorovich;
pub mod lmi;
pub mod matrix;
pub mod poly;
pub mod sampling;
pub mod spd;
pub mod spectral;

pub use boundary::{probe_boundary, sweep, BoundaryEstimate, EigenFamily, FamilyKind};
pub use classify::{
    classify, falsify, necessary_probe, Certificate, ConvexityVerdict, Falsifier, NecessaryProbe, Status,
    Thresholds, Witness,
};
pub use error::{Error, Result};
pub use kantorovich::{f_value, k_gradient, k_hessian, k_value, kantorovich_bound_check, BoundCheck};
pub use lmi::{
    lemma41_grid_check, lemma41_values, lemma42_44_check, robust_psd_grid, verify_h_lmi, Axis, GridReport,
    GridSpec,
};
pub use matrix::{det, eig_sym, is_psd, min_eigenvalue, SpectralData, SymMatrix};
pub use poly::{detm_alpha_poly, AlphaPoly};
pub use sampling::{SamplePlan, SampleReport};
pub use spd::{validate_spd, MatrixSpec, Point};
pub use spectral::{delta_from_spec, h_form, m_form, p_form, q_form, DeltaVector, Form, OmegaBox};
