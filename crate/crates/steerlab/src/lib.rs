//! Numerical toolkit for steering experiments with an imperfectly trusted
//! side: quantifies device trust, bounds the tomography error it induces,
//! inflates local-hidden-state bounds accordingly, and validates every
//! analytic bound by seeded Monte-Carlo.
//!
//! Modules follow the pipeline:
//! - [`matrix`] / [`basis`]: dense complex operators, norms, eigenvalues,
//!   Pauli and Heisenberg-Weyl bases, clock/shift pair.
//! - [`trust`]: the trust quantifier and unitary perturbation sampling at a
//!   prescribed Hilbert-Schmidt deviation.
//! - [`tomography`]: ideal and imprecise state reconstruction plus the
//!   deviation bound and its Monte-Carlo validation.
//! - [`steering`]: steering functionals, exact local bounds by strategy
//!   enumeration, corrected bounds under distrust, and the empirical
//!   corrected-bound search.
//! - [`bd`]: closed-form analysis of the mutually-unbiased-basis steering
//!   family (local/quantum/corrected bounds, trust thresholds, curve data).
//!
//! Monte-Carlo loops are data-parallel via rayon when the `parallel` feature
//! (default) is on; outputs are bit-identical to the sequential fallback.

pub mod basis;
pub mod bd;
pub mod error;
pub mod exec;
pub mod matrix;
pub mod random;
pub mod report;
pub mod steering;
pub mod tomography;
pub mod trust;

pub use basis::{build_basis, build_clock_shift, BasisLabel, ClockShiftPair, UnitaryBasis};
pub use error::{Error, Result};
pub use matrix::{ComplexSquareMatrix, DensityMatrix, HermitianUnitTrace};
