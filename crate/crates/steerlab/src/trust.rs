//! Trust quantification for the characterized party's device, and unitary
//! measurement perturbations at a prescribed Hilbert-Schmidt deviation.
//!
//! The trust parameter is
//! `Gamma_A = 1 - (1 / 2dk) sum_i ||sigma_i - tau_i||`,
//! with `||A|| = Tr(A A^dag)` and k the number of measurements. Identical
//! devices give 1; a device that permutes {Z, X, Y} into {X, Y, Z} gives 0.

use num_complex::Complex64;
use serde::Serialize;

use crate::basis::UnitaryBasis;
use crate::error::{Error, Result};
use crate::matrix::{ComplexSquareMatrix, TOL_CONSTRUCT};
use crate::random::{derived_seed, gue_hermitian, rng_from_seed};

/// Trust summary for one device.
#[derive(Clone, Debug, Serialize)]
pub struct TrustReport {
    pub dim: usize,
    /// Number of measurements entering the average.
    pub k: usize,
    /// Per-observable deviation budget (Hilbert-Schmidt-squared units). From
    /// deviation data this is the worst observed deviation; from fidelity it
    /// is the mean deviation 2d(1 - f_avg).
    pub epsilon: f64,
    /// Trust parameter in [0, 1].
    pub gamma: f64,
    /// Average fidelity, when the report came from one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_avg: Option<f64>,
}

/// An ideal basis {sigma_i} together with the observables {tau_i} a device
/// actually implements and their recorded deviations.
#[derive(Clone, Debug, Serialize)]
pub struct PerturbedBasis {
    /// Deviation budget the actual observables were sampled at.
    pub epsilon: f64,
    /// Seed the perturbations were drawn with (absent for measured data).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    ideal: UnitaryBasis,
    actual: Vec<ComplexSquareMatrix>,
    deviations: Vec<f64>,
}

impl PerturbedBasis {
    /// Pair an ideal basis with measured observables. The first actual
    /// observable must be exactly the identity; all must be unitary.
    pub fn from_observables(
        ideal: UnitaryBasis,
        actual: Vec<ComplexSquareMatrix>,
        epsilon: f64,
        seed: Option<u64>,
    ) -> Result<Self> {
        if actual.len() != ideal.len() {
            return Err(Error::LengthMismatch {
                expected: ideal.len(),
                got: actual.len(),
            });
        }
        for tau in &actual {
            if tau.dim() != ideal.dim() {
                return Err(Error::DimensionMismatch {
                    expected: ideal.dim(),
                    got: tau.dim(),
                });
            }
            tau.check_unitary(TOL_CONSTRUCT)?;
        }
        if actual[0].max_abs_diff(ideal.element(0)) != 0.0 {
            return Err(Error::Malformed(
                "the identity observable must be implemented exactly".into(),
            ));
        }
        let deviations = ideal
            .elements()
            .iter()
            .zip(&actual)
            .map(|(s, t)| s.sub(t).hs_norm_sq())
            .collect();
        Ok(Self {
            epsilon,
            seed,
            ideal,
            actual,
            deviations,
        })
    }

    pub fn dim(&self) -> usize {
        self.ideal.dim()
    }

    pub fn len(&self) -> usize {
        self.actual.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actual.is_empty()
    }

    pub fn ideal(&self) -> &UnitaryBasis {
        &self.ideal
    }

    pub fn actual(&self) -> &[ComplexSquareMatrix] {
        &self.actual
    }

    pub fn deviations(&self) -> &[f64] {
        &self.deviations
    }

    /// Worst recorded per-observable deviation.
    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().copied().fold(0.0, f64::max)
    }

    /// Trust report with k = d^2 (every basis element counts as one
    /// measurement).
    pub fn trust_report(&self) -> TrustReport {
        trust_from_deviations(self.ideal.elements(), &self.actual, self.actual.len())
            .expect("lengths match by construction")
    }
}

/// Trust parameter from intended/actual observable pairs.
///
/// `k` must equal the list length; it is explicit because the quantifier
/// normalizes by the number of measurements.
pub fn trust_from_deviations(
    ideal: &[ComplexSquareMatrix],
    actual: &[ComplexSquareMatrix],
    k: usize,
) -> Result<TrustReport> {
    if ideal.is_empty() || actual.len() != ideal.len() {
        return Err(Error::LengthMismatch {
            expected: ideal.len().max(1),
            got: actual.len(),
        });
    }
    if k != ideal.len() {
        return Err(Error::LengthMismatch {
            expected: ideal.len(),
            got: k,
        });
    }
    let dim = ideal[0].dim();
    for m in ideal.iter().chain(actual.iter()) {
        if m.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: m.dim(),
            });
        }
    }
    let deviations: Vec<f64> = ideal
        .iter()
        .zip(actual)
        .map(|(s, t)| s.sub(t).hs_norm_sq())
        .collect();
    let total: f64 = deviations.iter().sum();
    let gamma = (1.0 - total / (2.0 * dim as f64 * k as f64)).clamp(0.0, 1.0);
    let epsilon = deviations.iter().copied().fold(0.0, f64::max);
    Ok(TrustReport {
        dim,
        k,
        epsilon,
        gamma,
        f_avg: None,
    })
}

/// Trust parameter from an average measurement fidelity: gamma = f_avg, with
/// the mean per-observable deviation 2d(1 - f_avg) recorded as epsilon.
pub fn trust_from_fidelity(f_avg: f64, dim: usize) -> Result<TrustReport> {
    if !(0.0..=1.0).contains(&f_avg) {
        return Err(Error::OutOfRange {
            name: "f_avg",
            value: f_avg,
            constraint: "must lie in [0, 1]",
        });
    }
    if dim < 2 {
        return Err(Error::UnsupportedDimension {
            dim,
            reason: "trust needs d >= 2",
        });
    }
    Ok(TrustReport {
        dim,
        // fidelity data aggregates the whole measurement set into one figure
        k: 1,
        epsilon: 2.0 * dim as f64 * (1.0 - f_avg),
        gamma: f_avg,
        f_avg: Some(f_avg),
    })
}

/// Fraction of the budget the sampler may undershoot: the calibrated
/// deviation lands in [0.999 eps, eps].
const CALIBRATION_FLOOR: f64 = 0.999;
const BISECT_MAX_ITERS: usize = 200;
const DIRECTION_ATTEMPTS: usize = 256;

/// Unitary tau near U with `hs_norm_sq(U - tau)` calibrated into
/// `[0.999 * epsilon_target, epsilon_target]`.
///
/// tau = exp(i theta H) U with H a GUE-distributed Hermitian direction of
/// unit Frobenius norm; theta is bisected against the closed-form deviation
/// `sum_k 2 (1 - cos(theta lambda_k))` over H's eigenvalues. Deterministic
/// for a fixed seed.
pub fn perturb_unitary(
    u: &ComplexSquareMatrix,
    epsilon_target: f64,
    rng_seed: u64,
) -> Result<ComplexSquareMatrix> {
    let d = u.dim() as f64;
    if !epsilon_target.is_finite() || epsilon_target < 0.0 {
        return Err(Error::OutOfRange {
            name: "epsilon_target",
            value: epsilon_target,
            constraint: "must be finite and nonnegative",
        });
    }
    if epsilon_target > 4.0 * d {
        // hs_norm_sq between unitaries is at most 4d
        return Err(Error::TargetUnreachable {
            target: epsilon_target,
            max: 4.0 * d,
        });
    }
    if epsilon_target == 0.0 {
        return Ok(u.clone());
    }

    let mut rng = rng_from_seed(rng_seed);
    let mut best_reach = 0.0f64;
    for _ in 0..DIRECTION_ATTEMPTS {
        let h = gue_hermitian(u.dim(), &mut rng)?;
        let (lambdas, vectors) = h.hermitian_eigen_pairs()?;
        let lambda_max = lambdas.iter().map(|l| l.abs()).fold(0.0, f64::max);
        if lambda_max < 1e-12 {
            continue;
        }
        // deviation is monotone in theta while theta*|lambda| stays in [0, pi]
        let theta_cap = std::f64::consts::PI / lambda_max;
        let reach = deviation_at(&lambdas, theta_cap);
        best_reach = best_reach.max(reach);
        if reach < epsilon_target {
            continue; // this direction cannot reach the budget; redraw
        }

        let (mut lo, mut hi) = (0.0f64, theta_cap);
        let floor = CALIBRATION_FLOOR * epsilon_target;
        // aim strictly inside the window to absorb reconstruction roundoff
        let (aim_lo, aim_hi) = (0.9993 * epsilon_target, 0.9998 * epsilon_target);
        let mut theta = hi;
        for _ in 0..BISECT_MAX_ITERS {
            theta = 0.5 * (lo + hi);
            let dev = deviation_at(&lambdas, theta);
            if dev > aim_hi {
                hi = theta;
            } else if dev < aim_lo {
                lo = theta;
            } else {
                break;
            }
        }

        let tau = apply_rotation(&lambdas, &vectors, theta, u);
        let realized = u.sub(&tau).hs_norm_sq();
        if realized >= floor && realized <= epsilon_target {
            return Ok(tau);
        }
        // roundoff pushed the realized deviation out of the window; re-bisect
        // against the realized norm itself
        let (mut lo, mut hi) = (0.0f64, theta_cap);
        for _ in 0..BISECT_MAX_ITERS {
            let mid = 0.5 * (lo + hi);
            let tau = apply_rotation(&lambdas, &vectors, mid, u);
            let realized = u.sub(&tau).hs_norm_sq();
            if realized > aim_hi {
                hi = mid;
            } else if realized < aim_lo {
                lo = mid;
            } else {
                return Ok(tau);
            }
        }
    }
    Err(Error::TargetUnreachable {
        target: epsilon_target,
        max: best_reach,
    })
}

/// hs_norm_sq(U - exp(i theta H) U) = sum_k 2 (1 - cos(theta lambda_k)).
fn deviation_at(lambdas: &[f64], theta: f64) -> f64 {
    lambdas
        .iter()
        .map(|l| 2.0 * (1.0 - (theta * l).cos()))
        .sum()
}

fn apply_rotation(
    lambdas: &[f64],
    vectors: &nalgebra::DMatrix<Complex64>,
    theta: f64,
    u: &ComplexSquareMatrix,
) -> ComplexSquareMatrix {
    let phases = nalgebra::DMatrix::from_fn(lambdas.len(), lambdas.len(), |i, j| {
        if i == j {
            Complex64::from_polar(1.0, theta * lambdas[i])
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let rotation = vectors * phases * vectors.adjoint();
    ComplexSquareMatrix::from_dmatrix(rotation * u.dmatrix())
}

/// Perturb every non-identity basis element independently at the target
/// budget; the identity observable stays exact.
pub fn perturb_basis(basis: &UnitaryBasis, epsilon: f64, rng_seed: u64) -> Result<PerturbedBasis> {
    let mut actual = Vec::with_capacity(basis.len());
    actual.push(basis.element(0).clone());
    for i in 1..basis.len() {
        actual.push(perturb_unitary(
            basis.element(i),
            epsilon,
            derived_seed(rng_seed, i as u64),
        )?);
    }
    PerturbedBasis::from_observables(basis.clone(), actual, epsilon, Some(rng_seed))
}
