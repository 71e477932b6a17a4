//! Steering functionals, exact local-hidden-state bounds by deterministic
//! strategy enumeration, and the corrected bounds when the trusted side's
//! tomography is imprecise.
//!
//! The local bound of `W = sum_{b,y} Tr(F_{b|y} sigma_{b|y})` over LHS-model
//! assemblages reduces to `max_f lambda_max(sum_y F_{f(y)|y})` over response
//! functions f, since deterministic strategies and pure hidden states are the
//! extreme points. Under deviation budget eps the bound inflates by
//! `N d^2 sqrt(d) (eps/2 + sqrt(2 d eps))` with
//! `N = sum_{b,y} p(b|y) ||F_{b|y}||_F`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::build_basis;
use crate::error::{Error, Result};
use crate::exec;
use crate::matrix::{ComplexSquareMatrix, DensityMatrix, TOL_CONSTRUCT};
use crate::random::derived_seed;
use crate::tomography::{default_basis_label, reconstruct_unit_trace};
use crate::trust::perturb_basis;

/// Enumeration guard: number of deterministic strategies we are willing to
/// scan.
pub const STRATEGY_LIMIT: u128 = 10_000_000;

const FP_GUARD: f64 = 1e-15;

/// Shape of a steering experiment: trusted-side dimension, untrusted-side
/// input and outcome counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SteeringScenario {
    pub d_alice: usize,
    pub n_inputs: usize,
    pub n_outcomes: usize,
}

impl SteeringScenario {
    pub fn new(d_alice: usize, n_inputs: usize, n_outcomes: usize) -> Result<Self> {
        if d_alice < 2 {
            return Err(Error::UnsupportedDimension {
                dim: d_alice,
                reason: "trusted side needs d >= 2",
            });
        }
        if n_inputs < 1 {
            return Err(Error::OutOfRange {
                name: "n_inputs",
                value: n_inputs as f64,
                constraint: "must be at least 1",
            });
        }
        if n_outcomes < 2 {
            return Err(Error::OutOfRange {
                name: "n_outcomes",
                value: n_outcomes as f64,
                constraint: "must be at least 2",
            });
        }
        Ok(Self {
            d_alice,
            n_inputs,
            n_outcomes,
        })
    }

    fn ensure_matches(&self, other: &SteeringScenario) -> Result<()> {
        if self != other {
            return Err(Error::ScenarioMismatch(format!(
                "expected (d={}, inputs={}, outcomes={}), got (d={}, inputs={}, outcomes={})",
                self.d_alice,
                self.n_inputs,
                self.n_outcomes,
                other.d_alice,
                other.n_inputs,
                other.n_outcomes
            )));
        }
        Ok(())
    }
}

/// Coefficient matrices F_{b|y}, Hermitian, indexed by (outcome, input).
#[derive(Clone, Debug)]
pub struct SteeringFunctional {
    scenario: SteeringScenario,
    /// coeffs[y][b], symmetrized at construction.
    coeffs: Vec<Vec<ComplexSquareMatrix>>,
}

impl SteeringFunctional {
    /// `coeffs[y][b]` must be n_inputs rows of n_outcomes Hermitian matrices
    /// on the trusted side's space.
    pub fn new(scenario: SteeringScenario, coeffs: Vec<Vec<ComplexSquareMatrix>>) -> Result<Self> {
        check_grid_shape(&scenario, &coeffs)?;
        let mut stored = Vec::with_capacity(coeffs.len());
        for row in coeffs {
            let mut out = Vec::with_capacity(row.len());
            for m in row {
                let dev = m.hermitian_deviation();
                if dev > TOL_CONSTRUCT {
                    return Err(Error::NonHermitianInput { deviation: dev });
                }
                out.push(m.hermitized());
            }
            stored.push(out);
        }
        Ok(Self {
            scenario,
            coeffs: stored,
        })
    }

    pub fn scenario(&self) -> &SteeringScenario {
        &self.scenario
    }

    pub fn coeff(&self, outcome: usize, input: usize) -> &ComplexSquareMatrix {
        &self.coeffs[input][outcome]
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: FunctionalFile =
            serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        let coeffs = grid_from_map(&file.scenario, file.coefficients)?;
        Self::new(file.scenario, coeffs)
    }

    pub fn to_json(&self) -> String {
        let file = FunctionalFile {
            scenario: self.scenario,
            coefficients: grid_to_map(&self.coeffs),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }
}

/// Subnormalized steered states sigma_{b|y}: Hermitian PSD, normalized per
/// input, and no-signaling across inputs.
#[derive(Clone, Debug)]
pub struct Assemblage {
    scenario: SteeringScenario,
    /// members[y][b].
    members: Vec<Vec<ComplexSquareMatrix>>,
}

impl Assemblage {
    pub fn new(scenario: SteeringScenario, members: Vec<Vec<ComplexSquareMatrix>>) -> Result<Self> {
        check_grid_shape(&scenario, &members)?;
        for row in &members {
            for m in row {
                let dev = m.hermitian_deviation();
                if dev > TOL_CONSTRUCT {
                    return Err(Error::NonHermitianInput { deviation: dev });
                }
                let min = m.hermitian_eigenvalues()?[0];
                if min < -TOL_CONSTRUCT {
                    return Err(Error::NotPositiveSemidefinite {
                        min_eigenvalue: min,
                    });
                }
            }
        }
        let mut totals = Vec::with_capacity(members.len());
        for row in &members {
            let mut total = ComplexSquareMatrix::zeros(scenario.d_alice)?;
            for m in row {
                total = total.add(m);
            }
            let tr = total.trace();
            if (tr.re - 1.0).abs() > TOL_CONSTRUCT || tr.im.abs() > TOL_CONSTRUCT {
                return Err(Error::TraceNotOne { trace: tr.re });
            }
            totals.push(total);
        }
        for total in &totals[1..] {
            if total.max_abs_diff(&totals[0]) > TOL_CONSTRUCT {
                return Err(Error::Malformed(
                    "assemblage signals: reduced states differ across inputs".into(),
                ));
            }
        }
        Ok(Self { scenario, members })
    }

    pub fn scenario(&self) -> &SteeringScenario {
        &self.scenario
    }

    pub fn member(&self, outcome: usize, input: usize) -> &ComplexSquareMatrix {
        &self.members[input][outcome]
    }

    pub(crate) fn members(&self) -> &[Vec<ComplexSquareMatrix>] {
        &self.members
    }

    /// p(b|y) = Tr(sigma_{b|y}).
    pub fn probability(&self, outcome: usize, input: usize) -> f64 {
        self.members[input][outcome].trace().re
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: AssemblageFile =
            serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        let members = grid_from_map(&file.scenario, file.members)?;
        Self::new(file.scenario, members)
    }

    pub fn to_json(&self) -> String {
        let file = AssemblageFile {
            scenario: self.scenario,
            members: grid_to_map(&self.members),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }
}

fn check_grid_shape(scenario: &SteeringScenario, grid: &[Vec<ComplexSquareMatrix>]) -> Result<()> {
    if grid.len() != scenario.n_inputs {
        return Err(Error::LengthMismatch {
            expected: scenario.n_inputs,
            got: grid.len(),
        });
    }
    for row in grid {
        if row.len() != scenario.n_outcomes {
            return Err(Error::LengthMismatch {
                expected: scenario.n_outcomes,
                got: row.len(),
            });
        }
        for m in row {
            if m.dim() != scenario.d_alice {
                return Err(Error::DimensionMismatch {
                    expected: scenario.d_alice,
                    got: m.dim(),
                });
            }
        }
    }
    Ok(())
}

// File layout: {"scenario": {...}, "F" or "sigma": {"b,y": matrix, ...}} with
// 0-based outcome b and input y; omitted pairs are zero matrices.
#[derive(Serialize, Deserialize)]
struct FunctionalFile {
    scenario: SteeringScenario,
    #[serde(rename = "F")]
    coefficients: BTreeMap<String, ComplexSquareMatrix>,
}

#[derive(Serialize, Deserialize)]
struct AssemblageFile {
    scenario: SteeringScenario,
    #[serde(rename = "sigma")]
    members: BTreeMap<String, ComplexSquareMatrix>,
}

fn grid_from_map(
    scenario: &SteeringScenario,
    map: BTreeMap<String, ComplexSquareMatrix>,
) -> Result<Vec<Vec<ComplexSquareMatrix>>> {
    let zero = ComplexSquareMatrix::zeros(scenario.d_alice)?;
    let mut grid = vec![vec![zero; scenario.n_outcomes]; scenario.n_inputs];
    for (key, matrix) in map {
        let (b, y) = key
            .split_once(',')
            .and_then(|(b, y)| {
                Some((
                    b.trim().parse::<usize>().ok()?,
                    y.trim().parse::<usize>().ok()?,
                ))
            })
            .ok_or_else(|| Error::Malformed(format!("key {key:?} is not \"b,y\"")))?;
        if b >= scenario.n_outcomes || y >= scenario.n_inputs {
            return Err(Error::Malformed(format!(
                "key {key:?} outside scenario with {} outcomes, {} inputs",
                scenario.n_outcomes, scenario.n_inputs
            )));
        }
        grid[y][b] = matrix;
    }
    Ok(grid)
}

fn grid_to_map(grid: &[Vec<ComplexSquareMatrix>]) -> BTreeMap<String, ComplexSquareMatrix> {
    let mut map = BTreeMap::new();
    for (y, row) in grid.iter().enumerate() {
        for (b, m) in row.iter().enumerate() {
            map.insert(format!("{b},{y}"), m.clone());
        }
    }
    map
}

/// Response function y -> b; the extreme points of the LHS polytope.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DeterministicStrategy {
    outcomes: Vec<usize>,
}

impl DeterministicStrategy {
    pub fn new(scenario: &SteeringScenario, outcomes: Vec<usize>) -> Result<Self> {
        if outcomes.len() != scenario.n_inputs {
            return Err(Error::LengthMismatch {
                expected: scenario.n_inputs,
                got: outcomes.len(),
            });
        }
        if let Some(&bad) = outcomes.iter().find(|&&b| b >= scenario.n_outcomes) {
            return Err(Error::OutOfRange {
                name: "outcome",
                value: bad as f64,
                constraint: "must be below n_outcomes",
            });
        }
        Ok(Self { outcomes })
    }

    pub fn outcome_for(&self, input: usize) -> usize {
        self.outcomes[input]
    }

    pub fn outcomes(&self) -> &[usize] {
        &self.outcomes
    }
}

/// Exact local bound and the strategy/state/assemblage attaining it.
#[derive(Clone, Debug)]
pub struct LocalBoundResult {
    pub beta_l: f64,
    pub optimal_strategy: DeterministicStrategy,
    /// Rank-1 state built from the top eigenvector of the optimal strategy
    /// operator.
    pub optimal_state: DensityMatrix,
    pub attaining_assemblage: Assemblage,
}

/// W = sum_{b,y} Tr(F_{b|y} sigma_{b|y}); errors if the imaginary residue
/// exceeds 1e-9.
pub fn evaluate(functional: &SteeringFunctional, assemblage: &Assemblage) -> Result<f64> {
    functional.scenario.ensure_matches(&assemblage.scenario)?;
    evaluate_members(functional, assemblage.members())
}

pub(crate) fn evaluate_members(
    functional: &SteeringFunctional,
    members: &[Vec<ComplexSquareMatrix>],
) -> Result<f64> {
    let mut total = Complex64::new(0.0, 0.0);
    for (row_f, row_s) in functional.coeffs.iter().zip(members) {
        for (f, s) in row_f.iter().zip(row_s) {
            total += f.trace_product(s);
        }
    }
    if total.im.abs() > 1e-9 {
        return Err(Error::NonRealValue {
            imaginary: total.im,
        });
    }
    Ok(total.re)
}

fn strategy_count(scenario: &SteeringScenario) -> Result<usize> {
    let count = (scenario.n_outcomes as u128)
        .checked_pow(scenario.n_inputs as u32)
        .unwrap_or(u128::MAX);
    if count > STRATEGY_LIMIT {
        return Err(Error::EnumerationTooLarge {
            count,
            limit: STRATEGY_LIMIT,
        });
    }
    Ok(count as usize)
}

/// Outcome assignment of strategy `index`: digits of `index` base n_outcomes,
/// input 0 most significant, so index order is lexicographic order.
fn strategy_outcomes(scenario: &SteeringScenario, index: usize) -> Vec<usize> {
    let n = scenario.n_inputs;
    let base = scenario.n_outcomes;
    let mut outcomes = vec![0usize; n];
    let mut rest = index;
    for y in (0..n).rev() {
        outcomes[y] = rest % base;
        rest /= base;
    }
    outcomes
}

fn strategy_operator(functional: &SteeringFunctional, outcomes: &[usize]) -> ComplexSquareMatrix {
    let mut acc = functional.coeffs[0][outcomes[0]].clone();
    for (y, &b) in outcomes.iter().enumerate().skip(1) {
        acc = acc.add(&functional.coeffs[y][b]);
    }
    acc
}

fn best_strategy(functional: &SteeringFunctional, count: usize) -> (f64, usize) {
    let score = |index: usize| {
        let outcomes = strategy_outcomes(&functional.scenario, index);
        let beta = strategy_operator(functional, &outcomes)
            .max_eigenvalue()
            .expect("strategy operators are Hermitian by construction");
        (beta, index)
    };
    // max by value, ties to the lexicographically lowest strategy; a total
    // order, so the parallel reduction is schedule-independent
    let pick = |a: (f64, usize), b: (f64, usize)| {
        if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
            b
        } else {
            a
        }
    };
    exec::indexed_reduce(count, score, (f64::NEG_INFINITY, usize::MAX), pick)
}

fn best_strategy_seq(functional: &SteeringFunctional, count: usize) -> (f64, usize) {
    let score = |index: usize| {
        let outcomes = strategy_outcomes(&functional.scenario, index);
        let beta = strategy_operator(functional, &outcomes)
            .max_eigenvalue()
            .expect("strategy operators are Hermitian by construction");
        (beta, index)
    };
    let pick = |a: (f64, usize), b: (f64, usize)| {
        if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
            b
        } else {
            a
        }
    };
    exec::indexed_reduce_seq(count, score, (f64::NEG_INFINITY, usize::MAX), pick)
}

fn finish_local_bound(
    functional: &SteeringFunctional,
    beta_l: f64,
    index: usize,
) -> Result<LocalBoundResult> {
    let scenario = functional.scenario;
    let outcomes = strategy_outcomes(&scenario, index);
    let operator = strategy_operator(functional, &outcomes);
    let psi = operator.top_eigenvector()?;
    let optimal_state = DensityMatrix::pure(&psi)?;
    let projector = optimal_state.matrix().clone();
    let zero = ComplexSquareMatrix::zeros(scenario.d_alice)?;
    let members: Vec<Vec<ComplexSquareMatrix>> = (0..scenario.n_inputs)
        .map(|y| {
            (0..scenario.n_outcomes)
                .map(|b| {
                    if b == outcomes[y] {
                        projector.clone()
                    } else {
                        zero.clone()
                    }
                })
                .collect()
        })
        .collect();
    let attaining_assemblage = Assemblage::new(scenario, members)?;
    Ok(LocalBoundResult {
        beta_l,
        optimal_strategy: DeterministicStrategy::new(&scenario, outcomes)?,
        optimal_state,
        attaining_assemblage,
    })
}

/// Exact local bound by exhaustive strategy enumeration: for each response
/// function take the top eigenvalue of its strategy operator.
pub fn lhs_bound(functional: &SteeringFunctional) -> Result<LocalBoundResult> {
    let count = strategy_count(&functional.scenario)?;
    let (beta_l, index) = best_strategy(functional, count);
    finish_local_bound(functional, beta_l, index)
}

/// Sequential twin of [`lhs_bound`]; same result bit for bit.
pub fn lhs_bound_seq(functional: &SteeringFunctional) -> Result<LocalBoundResult> {
    let count = strategy_count(&functional.scenario)?;
    let (beta_l, index) = best_strategy_seq(functional, count);
    finish_local_bound(functional, beta_l, index)
}

/// N = sum_{b,y} p(b|y) ||F_{b|y}||_F with probabilities read off the
/// assemblage.
pub fn fact2_norm_factor(functional: &SteeringFunctional, assemblage: &Assemblage) -> Result<f64> {
    functional.scenario.ensure_matches(&assemblage.scenario)?;
    let mut total = 0.0;
    for y in 0..functional.scenario.n_inputs {
        for b in 0..functional.scenario.n_outcomes {
            total += assemblage.probability(b, y) * functional.coeff(b, y).frobenius_norm();
        }
    }
    Ok(total)
}

fn correction_scale(epsilon: f64, d: f64, sharp: bool) -> f64 {
    let term = epsilon / 2.0 + (2.0 * d * epsilon).sqrt();
    let dim_factor = if sharp {
        // keeps the sqrt(d^2 - 1) factor instead of relaxing it to d
        d * d.sqrt() * (d * d - 1.0).sqrt() / d
    } else {
        d * d * d.sqrt()
    };
    dim_factor * term
}

/// The additive correction `N d^2 sqrt(d) (eps/2 + sqrt(2 d eps))` to the
/// local bound at deviation budget eps.
pub fn fact2_correction(
    functional: &SteeringFunctional,
    assemblage: &Assemblage,
    epsilon: f64,
) -> Result<f64> {
    fact2_correction_impl(functional, assemblage, epsilon, false)
}

/// Variant keeping the sharper `d sqrt(d) sqrt(d^2 - 1)` dimensional factor.
pub fn fact2_correction_sharp(
    functional: &SteeringFunctional,
    assemblage: &Assemblage,
    epsilon: f64,
) -> Result<f64> {
    fact2_correction_impl(functional, assemblage, epsilon, true)
}

fn fact2_correction_impl(
    functional: &SteeringFunctional,
    assemblage: &Assemblage,
    epsilon: f64,
    sharp: bool,
) -> Result<f64> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: epsilon,
            constraint: "must be finite and nonnegative",
        });
    }
    let n = fact2_norm_factor(functional, assemblage)?;
    Ok(n * correction_scale(epsilon, functional.scenario.d_alice as f64, sharp))
}

/// Local bound together with its corrected value at budget eps; the
/// correction is evaluated at the enumerated attaining assemblage.
#[derive(Clone, Debug)]
pub struct CorrectedBound {
    pub local: LocalBoundResult,
    pub correction: f64,
    pub beta_l_corr: f64,
}

pub fn corrected_local_bound(
    functional: &SteeringFunctional,
    epsilon: f64,
) -> Result<CorrectedBound> {
    let local = lhs_bound(functional)?;
    let correction = fact2_correction(functional, &local.attaining_assemblage, epsilon)?;
    Ok(CorrectedBound {
        beta_l_corr: local.beta_l + correction,
        correction,
        local,
    })
}

/// Outcome of the Monte-Carlo corrected-bound search.
#[derive(Clone, Debug, Serialize)]
pub struct EmpiricalBound {
    pub epsilon: f64,
    pub n_samples: usize,
    pub seed: u64,
    /// Functional value on the supplied (bound-attaining) assemblage.
    pub beta_l: f64,
    /// Largest inferred functional value observed; a lower estimate of the
    /// tight corrected bound.
    pub empirical_max: f64,
    pub empirical_mean: f64,
    /// Analytic corrected bound beta_L + correction for comparison.
    pub fact2_bound: f64,
    /// Samples exceeding the analytic bound (must be 0).
    pub violations: usize,
}

/// Monte-Carlo maximization of the functional over imprecise reconstructions
/// of `assemblage`: per sample, draw a perturbed basis at budget eps,
/// tomograph every normalized member, rescale by p(b|y), and evaluate.
pub fn empirical_corrected_bound(
    functional: &SteeringFunctional,
    assemblage: &Assemblage,
    epsilon: f64,
    n_samples: usize,
    seed: u64,
) -> Result<EmpiricalBound> {
    let ctx = EmpiricalContext::prepare(functional, assemblage, epsilon, n_samples)?;
    let values = exec::indexed_map(n_samples, |i| ctx.sample(i, seed));
    ctx.summarize(values, seed)
}

/// Sequential twin of [`empirical_corrected_bound`]; same output bit for bit.
pub fn empirical_corrected_bound_seq(
    functional: &SteeringFunctional,
    assemblage: &Assemblage,
    epsilon: f64,
    n_samples: usize,
    seed: u64,
) -> Result<EmpiricalBound> {
    let ctx = EmpiricalContext::prepare(functional, assemblage, epsilon, n_samples)?;
    let values = exec::indexed_map_seq(n_samples, |i| ctx.sample(i, seed));
    ctx.summarize(values, seed)
}

struct EmpiricalContext<'a> {
    functional: &'a SteeringFunctional,
    assemblage: &'a Assemblage,
    basis: crate::basis::UnitaryBasis,
    epsilon: f64,
    beta_l: f64,
    fact2_bound: f64,
}

impl<'a> EmpiricalContext<'a> {
    fn prepare(
        functional: &'a SteeringFunctional,
        assemblage: &'a Assemblage,
        epsilon: f64,
        n_samples: usize,
    ) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::OutOfRange {
                name: "n_samples",
                value: 0.0,
                constraint: "must be at least 1",
            });
        }
        let beta_l = evaluate(functional, assemblage)?;
        let correction = fact2_correction(functional, assemblage, epsilon)?;
        let basis = build_basis(
            functional.scenario.d_alice,
            default_basis_label(functional.scenario.d_alice),
        )?;
        Ok(Self {
            functional,
            assemblage,
            basis,
            epsilon,
            beta_l,
            fact2_bound: beta_l + correction,
        })
    }

    fn sample(&self, index: usize, seed: u64) -> Result<f64> {
        let pb = perturb_basis(&self.basis, self.epsilon, derived_seed(seed, index as u64))?;
        let scenario = self.functional.scenario;
        let mut inferred: Vec<Vec<ComplexSquareMatrix>> = Vec::with_capacity(scenario.n_inputs);
        for y in 0..scenario.n_inputs {
            let mut row = Vec::with_capacity(scenario.n_outcomes);
            for b in 0..scenario.n_outcomes {
                let p = self.assemblage.probability(b, y);
                if p > 1e-12 {
                    // tomograph the normalized member, then restore its weight;
                    // the probability itself is trusted data
                    let normalized = self.assemblage.member(b, y).scale_re(1.0 / p);
                    row.push(reconstruct_unit_trace(&normalized, &pb)?.scale_re(p));
                } else {
                    row.push(ComplexSquareMatrix::zeros(scenario.d_alice)?);
                }
            }
            inferred.push(row);
        }
        evaluate_members(self.functional, &inferred)
    }

    fn summarize(&self, values: Vec<Result<f64>>, seed: u64) -> Result<EmpiricalBound> {
        let n = values.len();
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        let mut violations = 0;
        for v in values {
            let w = v?;
            max = max.max(w);
            sum += w;
            if w > self.fact2_bound + FP_GUARD {
                violations += 1;
            }
        }
        Ok(EmpiricalBound {
            epsilon: self.epsilon,
            n_samples: n,
            seed,
            beta_l: self.beta_l,
            empirical_max: max,
            empirical_mean: sum / n as f64,
            fact2_bound: self.fact2_bound,
            violations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn projector(amplitudes: [f64; 2]) -> ComplexSquareMatrix {
        ComplexSquareMatrix::outer(&[c(amplitudes[0], 0.0), c(amplitudes[1], 0.0)]).unwrap()
    }

    /// F_{0|0} = |0><0|, F_{1|0} = |1><1|, F_{0|1} = |+><+|, F_{1|1} = |-><-|.
    fn qubit_example() -> SteeringFunctional {
        let scenario = SteeringScenario::new(2, 2, 2).unwrap();
        let s = 0.5f64.sqrt();
        SteeringFunctional::new(
            scenario,
            vec![
                vec![projector([1.0, 0.0]), projector([0.0, 1.0])],
                vec![projector([s, s]), projector([s, -s])],
            ],
        )
        .unwrap()
    }

    /// sigma_{0|y} = |0bar><0bar| with |0bar> = cos(pi/8)|0> + sin(pi/8)|1>.
    fn qubit_attaining_assemblage() -> Assemblage {
        let scenario = SteeringScenario::new(2, 2, 2).unwrap();
        let angle = std::f64::consts::PI / 8.0;
        let p = projector([angle.cos(), angle.sin()]);
        let zero = ComplexSquareMatrix::zeros(2).unwrap();
        Assemblage::new(scenario, vec![vec![p.clone(), zero.clone()], vec![p, zero]]).unwrap()
    }

    const BETA_L_QUBIT: f64 = 1.7071067811865475; // 1 + 1/sqrt(2)

    #[test]
    fn evaluate_on_paper_assemblage() {
        let w = evaluate(&qubit_example(), &qubit_attaining_assemblage()).unwrap();
        assert_abs_diff_eq!(w, BETA_L_QUBIT, epsilon = 1e-12);
    }

    #[test]
    fn evaluate_is_linear() {
        let f = qubit_example();
        let a1 = qubit_attaining_assemblage();
        // second assemblage: same pure state for every input at outcome 1
        let scenario = *f.scenario();
        let p = projector([0.6, 0.8]);
        let zero = ComplexSquareMatrix::zeros(2).unwrap();
        let a2 =
            Assemblage::new(scenario, vec![vec![zero.clone(), p.clone()], vec![zero, p]]).unwrap();
        let mix_members: Vec<Vec<ComplexSquareMatrix>> = (0..2)
            .map(|y| {
                (0..2)
                    .map(|b| {
                        a1.member(b, y)
                            .scale_re(0.5)
                            .add(&a2.member(b, y).scale_re(0.5))
                    })
                    .collect()
            })
            .collect();
        let mix = Assemblage::new(scenario, mix_members).unwrap();
        let w_mix = evaluate(&f, &mix).unwrap();
        let w1 = evaluate(&f, &a1).unwrap();
        let w2 = evaluate(&f, &a2).unwrap();
        assert_abs_diff_eq!(w_mix, 0.5 * (w1 + w2), epsilon = 1e-12);
    }

    #[test]
    fn lhs_bound_qubit_example() {
        let result = lhs_bound(&qubit_example()).unwrap();
        assert_abs_diff_eq!(result.beta_l, BETA_L_QUBIT, epsilon = 1e-10);
        assert_eq!(result.optimal_strategy.outcomes(), &[0, 0]);
        // the optimal hidden state is |0bar>
        let angle = std::f64::consts::PI / 8.0;
        let expected = projector([angle.cos(), angle.sin()]);
        assert!(result.optimal_state.matrix().max_abs_diff(&expected) < 1e-10);
        // attaining assemblage reproduces beta_L under evaluate
        let w = evaluate(&qubit_example(), &result.attaining_assemblage).unwrap();
        assert_abs_diff_eq!(w, result.beta_l, epsilon = 1e-9);
    }

    #[test]
    fn lhs_bound_uniform_identity_functional() {
        // F_{b|y} = I gives every strategy operator = n_inputs * I
        let scenario = SteeringScenario::new(2, 3, 2).unwrap();
        let id = ComplexSquareMatrix::identity(2).unwrap();
        let coeffs = vec![vec![id.clone(); 2]; 3];
        let f = SteeringFunctional::new(scenario, coeffs).unwrap();
        let result = lhs_bound(&f).unwrap();
        assert_abs_diff_eq!(result.beta_l, 3.0, epsilon = 1e-10);
        // lexicographically lowest strategy wins the tie
        assert_eq!(result.optimal_strategy.outcomes(), &[0, 0, 0]);
    }

    #[test]
    fn lhs_bound_enumeration_guard() {
        let scenario = SteeringScenario::new(2, 30, 4).unwrap();
        let zero = ComplexSquareMatrix::zeros(2).unwrap();
        let f = SteeringFunctional::new(scenario, vec![vec![zero; 4]; 30]).unwrap();
        assert!(matches!(
            lhs_bound(&f),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn lhs_bound_invariant_under_relabeling() {
        let f = qubit_example();
        let base = lhs_bound(&f).unwrap().beta_l;
        // swap inputs, and swap outcomes of input 0
        let swapped = SteeringFunctional::new(
            *f.scenario(),
            vec![
                vec![f.coeff(0, 1).clone(), f.coeff(1, 1).clone()],
                vec![f.coeff(1, 0).clone(), f.coeff(0, 0).clone()],
            ],
        )
        .unwrap();
        let relabeled = lhs_bound(&swapped).unwrap().beta_l;
        assert_abs_diff_eq!(base, relabeled, epsilon = 1e-10);
    }

    #[test]
    fn evaluate_invariant_under_conjugation() {
        let f = qubit_example();
        let a = qubit_attaining_assemblage();
        let theta = 0.7f64;
        let u = ComplexSquareMatrix::from_rows(&[
            vec![c(theta.cos(), 0.0), c(-theta.sin(), 0.0)],
            vec![c(theta.sin(), 0.0), c(theta.cos(), 0.0)],
        ])
        .unwrap();
        let conj = |m: &ComplexSquareMatrix| u.mul(m).mul(&u.adjoint());
        let f2 = SteeringFunctional::new(
            *f.scenario(),
            (0..2)
                .map(|y| (0..2).map(|b| conj(f.coeff(b, y))).collect())
                .collect(),
        )
        .unwrap();
        let a2 = Assemblage::new(
            *a.scenario(),
            (0..2)
                .map(|y| (0..2).map(|b| conj(a.member(b, y))).collect())
                .collect(),
        )
        .unwrap();
        assert_abs_diff_eq!(
            evaluate(&f, &a).unwrap(),
            evaluate(&f2, &a2).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn norm_factor_and_correction() {
        let f = qubit_example();
        let a = qubit_attaining_assemblage();
        assert_abs_diff_eq!(fact2_norm_factor(&f, &a).unwrap(), 2.0, epsilon = 1e-12);
        assert_eq!(fact2_correction(&f, &a, 0.0).unwrap(), 0.0);
        // 2 * 4 * sqrt(2) * (0.005 + 0.2)
        assert_abs_diff_eq!(
            fact2_correction(&f, &a, 0.01).unwrap(),
            2.319310242291876,
            epsilon = 1e-10
        );
        assert!(
            fact2_correction_sharp(&f, &a, 0.01).unwrap() < fact2_correction(&f, &a, 0.01).unwrap()
        );
    }

    #[test]
    fn correction_is_monotone_in_epsilon() {
        let f = qubit_example();
        let a = qubit_attaining_assemblage();
        let mut last = -1.0;
        for eps in [0.0, 1e-4, 1e-3, 1e-2, 0.1, 0.5] {
            let corr = fact2_correction(&f, &a, eps).unwrap();
            assert!(corr > last || (corr == 0.0 && last < 0.0));
            last = corr;
        }
    }

    #[test]
    fn corrected_bound_qubit_values() {
        let result = corrected_local_bound(&qubit_example(), 0.01).unwrap();
        assert_abs_diff_eq!(result.local.beta_l, BETA_L_QUBIT, epsilon = 1e-10);
        assert_abs_diff_eq!(result.beta_l_corr, 4.026417023478424, epsilon = 1e-9);
        let zero = corrected_local_bound(&qubit_example(), 0.0).unwrap();
        assert_eq!(zero.beta_l_corr, zero.local.beta_l);
    }

    #[test]
    fn empirical_bound_zero_budget_recovers_beta_l() {
        let f = qubit_example();
        let a = qubit_attaining_assemblage();
        let summary = empirical_corrected_bound(&f, &a, 0.0, 20, 1).unwrap();
        assert_abs_diff_eq!(summary.empirical_max, summary.beta_l, epsilon = 1e-12);
        assert_abs_diff_eq!(summary.empirical_mean, summary.beta_l, epsilon = 1e-12);
        assert_eq!(summary.violations, 0);
    }

    #[test]
    fn empirical_bound_sandwiched() {
        let f = qubit_example();
        let a = qubit_attaining_assemblage();
        let summary = empirical_corrected_bound(&f, &a, 0.01, 200, 7).unwrap();
        assert!(summary.empirical_max > summary.beta_l);
        assert!(summary.empirical_max <= summary.fact2_bound);
        assert_eq!(summary.violations, 0);
    }

    #[test]
    fn empirical_bound_monotone_in_epsilon() {
        let f = qubit_example();
        let a = qubit_attaining_assemblage();
        let mut last = f64::NEG_INFINITY;
        for eps in [0.001, 0.01, 0.05] {
            let summary = empirical_corrected_bound(&f, &a, eps, 200, 11).unwrap();
            assert!(summary.empirical_max > last);
            last = summary.empirical_max;
        }
    }

    #[test]
    fn empirical_matches_sequential() {
        let f = qubit_example();
        let a = qubit_attaining_assemblage();
        let par = empirical_corrected_bound(&f, &a, 0.02, 50, 3).unwrap();
        let seq = empirical_corrected_bound_seq(&f, &a, 0.02, 50, 3).unwrap();
        assert_eq!(par.empirical_max.to_bits(), seq.empirical_max.to_bits());
        assert_eq!(par.empirical_mean.to_bits(), seq.empirical_mean.to_bits());
    }

    #[test]
    fn reconstruction_preserves_no_signaling() {
        // push every member through the pipeline; the inferred assemblage
        // must still have input-independent reduced states
        let a = qubit_attaining_assemblage();
        let basis = build_basis(2, default_basis_label(2)).unwrap();
        let pb = perturb_basis(&basis, 0.05, 21).unwrap();
        let mut totals = Vec::new();
        for y in 0..2 {
            let mut total = ComplexSquareMatrix::zeros(2).unwrap();
            for b in 0..2 {
                let p = a.probability(b, y);
                if p > 1e-12 {
                    let normalized = a.member(b, y).scale_re(1.0 / p);
                    total = total.add(
                        &reconstruct_unit_trace(&normalized, &pb)
                            .unwrap()
                            .scale_re(p),
                    );
                }
            }
            totals.push(total);
        }
        assert!(totals[1].max_abs_diff(&totals[0]) < 1e-10);
    }

    #[test]
    fn assemblage_validation_catches_signaling() {
        let scenario = SteeringScenario::new(2, 2, 2).unwrap();
        let zero = ComplexSquareMatrix::zeros(2).unwrap();
        let members = vec![
            vec![projector([1.0, 0.0]), zero.clone()],
            vec![projector([0.0, 1.0]), zero],
        ];
        assert!(matches!(
            Assemblage::new(scenario, members),
            Err(Error::Malformed(_))
        ));
    }

    #[test]
    fn assemblage_validation_catches_bad_normalization() {
        let scenario = SteeringScenario::new(2, 1, 2).unwrap();
        let members = vec![vec![projector([1.0, 0.0]), projector([0.0, 1.0])]];
        // total trace 2, not 1
        assert!(matches!(
            Assemblage::new(scenario, members),
            Err(Error::TraceNotOne { .. })
        ));
    }

    #[test]
    fn functional_json_round_trip() {
        let f = qubit_example();
        let text = f.to_json();
        let back = SteeringFunctional::from_json(&text).unwrap();
        for y in 0..2 {
            for b in 0..2 {
                assert_eq!(f.coeff(b, y).max_abs_diff(back.coeff(b, y)), 0.0);
            }
        }
        assert!(SteeringFunctional::from_json("{not json").is_err());
    }

    #[test]
    fn assemblage_json_accepts_sparse_members() {
        let a = qubit_attaining_assemblage();
        let text = a.to_json();
        // drop the zero members; they default back to zero
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let members = v["sigma"].as_object_mut().unwrap();
        members.remove("1,0");
        members.remove("1,1");
        let back = Assemblage::from_json(&serde_json::to_string(&v).unwrap()).unwrap();
        for y in 0..2 {
            for b in 0..2 {
                assert!(a.member(b, y).max_abs_diff(back.member(b, y)) < 1e-15);
            }
        }
    }

    #[test]
    fn scenario_mismatch_is_rejected() {
        let f = qubit_example();
        let other = SteeringScenario::new(2, 1, 2).unwrap();
        let a = Assemblage::new(
            other,
            vec![vec![
                projector([1.0, 0.0]),
                ComplexSquareMatrix::zeros(2).unwrap(),
            ]],
        )
        .unwrap();
        assert!(matches!(evaluate(&f, &a), Err(Error::ScenarioMismatch(_))));
    }
}
