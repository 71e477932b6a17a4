//! Qudit state reconstruction from tomographically complete unitary bases,
//! the deviation bound for imprecise devices, and the seeded Monte-Carlo
//! experiment validating it.
//!
//! With per-observable deviations at most eps (squared Hilbert-Schmidt
//! units), the inferred state stays within
//! `d^3 (d^2 - 1) (eps/2 + sqrt(2 d eps))^2`
//! of the true state in the same squared norm.

use num_complex::Complex64;
use serde::Serialize;

use crate::basis::{build_basis, BasisLabel, UnitaryBasis};
use crate::error::{Error, Result};
use crate::exec;
use crate::matrix::{ComplexSquareMatrix, DensityMatrix, HermitianUnitTrace};
use crate::random::{derived_seed, random_density_matrix, rng_from_seed};
use crate::trust::{perturb_basis, PerturbedBasis};

/// Expansion coefficients of an operator on a unitary basis.
#[derive(Clone, Debug)]
pub struct CoefficientVector {
    pub dim: usize,
    pub basis_label: BasisLabel,
    /// c_i = (1/d) Tr(A sigma_i^dag), i = 0..d^2.
    pub coeffs: Vec<Complex64>,
}

impl CoefficientVector {
    /// Reassemble sum_i c_i sigma_i.
    pub fn recompose(&self, basis: &UnitaryBasis) -> Result<ComplexSquareMatrix> {
        if basis.dim() != self.dim || basis.label() != self.basis_label {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: basis.dim(),
            });
        }
        recompose_raw(&self.coeffs, basis)
    }
}

fn recompose_raw(coeffs: &[Complex64], basis: &UnitaryBasis) -> Result<ComplexSquareMatrix> {
    if coeffs.len() != basis.len() {
        return Err(Error::LengthMismatch {
            expected: basis.len(),
            got: coeffs.len(),
        });
    }
    let mut acc = ComplexSquareMatrix::zeros(basis.dim())?;
    for (c, sigma) in coeffs.iter().zip(basis.elements()) {
        acc = acc.add(&sigma.scale(*c));
    }
    Ok(acc)
}

/// Coefficients of `rho` on the ideal basis: r_i = (1/d) Tr(rho sigma_i^dag).
pub fn decompose(rho: &DensityMatrix, basis: &UnitaryBasis) -> Result<CoefficientVector> {
    if rho.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            got: rho.dim(),
        });
    }
    let d = basis.dim() as f64;
    let coeffs = basis
        .elements()
        .iter()
        .map(|sigma| rho.matrix().hs_inner(sigma) / d)
        .collect();
    Ok(CoefficientVector {
        dim: basis.dim(),
        basis_label: basis.label(),
        coeffs,
    })
}

/// Result of reconstructing one state through an imprecise device.
#[derive(Clone, Debug)]
pub struct TomographyOutcome {
    pub true_state: DensityMatrix,
    pub inferred_state: HermitianUnitTrace,
    /// hs_norm_sq(inferred - true).
    pub deviation: f64,
    /// Analytic cap on `deviation` at the budget below.
    pub fact1_bound: f64,
    /// Worst per-observable deviation of the device used.
    pub epsilon_used: f64,
}

/// Reconstruction when the device implements {tau_i} instead of {sigma_i}:
/// coefficients are read against the actual observables but the state is
/// assembled on the ideal basis.
///
/// The identity coefficient is pinned to 1/d (normalization data is exact)
/// and the assembled operator is symmetrized; positivity is deliberately not
/// repaired.
pub fn imprecise_tomography(rho: &DensityMatrix, pb: &PerturbedBasis) -> Result<TomographyOutcome> {
    if rho.dim() != pb.dim() {
        return Err(Error::DimensionMismatch {
            expected: pb.dim(),
            got: rho.dim(),
        });
    }
    let inferred_matrix = reconstruct_unit_trace(rho.matrix(), pb)?;
    let deviation = inferred_matrix.sub(rho.matrix()).hs_norm_sq();
    let epsilon_used = pb.max_deviation();
    Ok(TomographyOutcome {
        true_state: rho.clone(),
        inferred_state: HermitianUnitTrace::new(inferred_matrix)?,
        deviation,
        fact1_bound: fact1_deviation_bound(pb.dim(), epsilon_used),
        epsilon_used,
    })
}

/// Imprecise reconstruction of an arbitrary unit-trace Hermitian operator;
/// shared with the steering pipeline, where normalized assemblage members
/// need not be positive.
pub(crate) fn reconstruct_unit_trace(
    m: &ComplexSquareMatrix,
    pb: &PerturbedBasis,
) -> Result<ComplexSquareMatrix> {
    let d = pb.dim() as f64;
    let mut coeffs: Vec<Complex64> = pb.actual().iter().map(|tau| m.hs_inner(tau) / d).collect();
    coeffs[0] = Complex64::new(1.0 / d, 0.0);
    let raw = recompose_raw(&coeffs, pb.ideal())?;
    Ok(raw.hermitized())
}

/// `d^3 (d^2 - 1) (eps/2 + sqrt(2 d eps))^2`.
pub fn fact1_deviation_bound(dim: usize, epsilon: f64) -> f64 {
    let d = dim as f64;
    let term = epsilon / 2.0 + (2.0 * d * epsilon).sqrt();
    d.powi(3) * (d * d - 1.0) * term * term
}

/// Absolute floating-point guard when counting bound violations; the analytic
/// bounds hold with large slack, so anything beyond roundoff is a real
/// violation.
const FP_GUARD: f64 = 1e-15;

/// Aggregate of one tomography deviation experiment.
#[derive(Clone, Debug, Serialize)]
pub struct Fact1Summary {
    pub d: usize,
    pub epsilon: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub max_dev: f64,
    pub mean_dev: f64,
    /// The deviation bound at the budget epsilon.
    pub bound: f64,
    /// Samples whose deviation exceeded the bound (must be 0).
    pub violations: usize,
    /// max_dev / bound; 0 when the bound is 0.
    pub slack_ratio: f64,
    /// Samples violating Re Tr(sigma_i tau_i^dag) >= d - eps/2.
    pub rel1_violations: usize,
    /// Samples violating |Re Tr(tau_i sigma_j^dag)| <= eps/2 + sqrt(2 d eps).
    pub rel2_violations: usize,
    /// Samples violating |Re r_i - Re q_i| <= d (eps/2 + sqrt(2 d eps)).
    pub coeff_violations: usize,
}

struct Fact1Sample {
    deviation: f64,
    rel1_ok: bool,
    rel2_ok: bool,
    coeff_ok: bool,
}

/// The canonical basis for experiments: Pauli on qubits, Heisenberg-Weyl
/// above.
pub fn default_basis_label(dim: usize) -> BasisLabel {
    if dim == 2 {
        BasisLabel::Pauli
    } else {
        BasisLabel::HeisenbergWeyl
    }
}

fn fact1_sample(
    basis: &UnitaryBasis,
    epsilon: f64,
    seed: u64,
    index: usize,
) -> Result<Fact1Sample> {
    let d = basis.dim();
    let mut rng = rng_from_seed(derived_seed(seed, 2 * index as u64));
    let rho = random_density_matrix(d, &mut rng)?;
    let pb = perturb_basis(basis, epsilon, derived_seed(seed, 2 * index as u64 + 1))?;
    let outcome = imprecise_tomography(&rho, &pb)?;

    // proof-chain inequalities, checked on the same draw
    let df = d as f64;
    let rel2_limit = epsilon / 2.0 + (2.0 * df * epsilon).sqrt();
    let mut rel1_ok = true;
    let mut rel2_ok = true;
    for (i, tau) in pb.actual().iter().enumerate() {
        let diag = basis.element(i).hs_inner(tau).re;
        if diag < df - epsilon / 2.0 - FP_GUARD || diag > df + FP_GUARD {
            rel1_ok = false;
        }
        for (j, sigma) in basis.elements().iter().enumerate() {
            if i != j && tau.hs_inner(sigma).re.abs() > rel2_limit + FP_GUARD {
                rel2_ok = false;
            }
        }
    }

    let ideal_coeffs = decompose(&rho, basis)?;
    let coeff_limit = df * rel2_limit;
    let mut coeff_ok = true;
    let dm = pb.dim() as f64;
    for (i, (r, tau)) in ideal_coeffs.coeffs.iter().zip(pb.actual()).enumerate() {
        let q = if i == 0 {
            Complex64::new(1.0 / dm, 0.0)
        } else {
            rho.matrix().hs_inner(tau) / dm
        };
        if (r.re - q.re).abs() > coeff_limit + FP_GUARD {
            coeff_ok = false;
        }
    }

    Ok(Fact1Sample {
        deviation: outcome.deviation,
        rel1_ok,
        rel2_ok,
        coeff_ok,
    })
}

fn fact1_summarize(
    d: usize,
    epsilon: f64,
    seed: u64,
    samples: Vec<Result<Fact1Sample>>,
) -> Result<Fact1Summary> {
    let n = samples.len();
    let mut max_dev = 0.0f64;
    let mut sum_dev = 0.0f64;
    let mut violations = 0;
    let mut rel1_violations = 0;
    let mut rel2_violations = 0;
    let mut coeff_violations = 0;
    let bound = fact1_deviation_bound(d, epsilon);
    for sample in samples {
        let s = sample?;
        max_dev = max_dev.max(s.deviation);
        sum_dev += s.deviation;
        if s.deviation > bound + FP_GUARD {
            violations += 1;
        }
        rel1_violations += usize::from(!s.rel1_ok);
        rel2_violations += usize::from(!s.rel2_ok);
        coeff_violations += usize::from(!s.coeff_ok);
    }
    let slack_ratio = if bound > 0.0 { max_dev / bound } else { 0.0 };
    Ok(Fact1Summary {
        d,
        epsilon,
        n_samples: n,
        seed,
        max_dev,
        mean_dev: sum_dev / n as f64,
        bound,
        violations,
        slack_ratio,
        rel1_violations,
        rel2_violations,
        coeff_violations,
    })
}

fn fact1_validate(d: usize, epsilon: f64, n_samples: usize) -> Result<UnitaryBasis> {
    if n_samples == 0 {
        return Err(Error::OutOfRange {
            name: "n_samples",
            value: 0.0,
            constraint: "must be at least 1",
        });
    }
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: epsilon,
            constraint: "must be finite and nonnegative",
        });
    }
    build_basis(d, default_basis_label(d))
}

/// Monte-Carlo validation of the deviation bound: `n_samples` draws of
/// (Hilbert-Schmidt random state, perturbed basis at epsilon), each checked
/// against the bound and the proof-chain inequalities.
pub fn run_fact1_experiment(
    d: usize,
    epsilon: f64,
    n_samples: usize,
    seed: u64,
) -> Result<Fact1Summary> {
    let basis = fact1_validate(d, epsilon, n_samples)?;
    let samples = exec::indexed_map(n_samples, |i| fact1_sample(&basis, epsilon, seed, i));
    fact1_summarize(d, epsilon, seed, samples)
}

/// Sequential twin of [`run_fact1_experiment`]; same output bit for bit.
pub fn run_fact1_experiment_seq(
    d: usize,
    epsilon: f64,
    n_samples: usize,
    seed: u64,
) -> Result<Fact1Summary> {
    let basis = fact1_validate(d, epsilon, n_samples)?;
    let samples = exec::indexed_map_seq(n_samples, |i| fact1_sample(&basis, epsilon, seed, i));
    fact1_summarize(d, epsilon, seed, samples)
}

/// Like [`run_fact1_experiment`] but also returns the per-sample deviations
/// in sample order.
pub fn run_fact1_experiment_full(
    d: usize,
    epsilon: f64,
    n_samples: usize,
    seed: u64,
) -> Result<(Fact1Summary, Vec<f64>)> {
    let basis = fact1_validate(d, epsilon, n_samples)?;
    let samples = exec::indexed_map(n_samples, |i| fact1_sample(&basis, epsilon, seed, i));
    let deviations: Vec<f64> = samples
        .iter()
        .map(|s| s.as_ref().map(|x| x.deviation).unwrap_or(f64::NAN))
        .collect();
    let summary = fact1_summarize(d, epsilon, seed, samples)?;
    Ok((summary, deviations))
}
