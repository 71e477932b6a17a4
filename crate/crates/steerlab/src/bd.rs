//! Closed-form analysis of the mutually-unbiased-basis steering family
//! B_d = sum_k <Z_d^(k) x B_1^(k)> + <X_d^(k) x B_2^(k)>.
//!
//! All three bounds are closed forms in (d, eps): local bound sqrt(2)(d-1),
//! quantum bound 2(d-1), corrected local bound (d-1)(sqrt(2) + sqrt(eps)).
//! The untrusted side's observables are labels only and are never
//! instantiated.

use std::io::Write;

use serde::Serialize;

use crate::basis::build_clock_shift;
use crate::error::{Error, Result};
use crate::matrix::ComplexSquareMatrix;
use crate::report::fmt_g15;

/// Bounds of the family at one (d, eps) point.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BdAnalysis {
    pub d: usize,
    pub epsilon: f64,
    /// Trust parameter 1 - eps/(2d) (may go negative for budgets past 2d).
    pub gamma: f64,
    /// sqrt(2) (d - 1).
    pub beta_l: f64,
    /// 2 (d - 1).
    pub beta_q: f64,
    /// (d - 1) (sqrt(2) + sqrt(eps)).
    pub beta_l_corr: f64,
    /// beta_l_corr / beta_q = (sqrt(2) + sqrt(eps)) / 2.
    pub ratio: f64,
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::UnsupportedDimension {
            dim: d,
            reason: "the family needs d >= 2",
        });
    }
    Ok(())
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: epsilon,
            constraint: "must be finite and nonnegative",
        });
    }
    Ok(())
}

pub fn bd_bounds(d: usize, epsilon: f64) -> Result<BdAnalysis> {
    check_d(d)?;
    check_epsilon(epsilon)?;
    let dm1 = (d - 1) as f64;
    let sqrt2 = 2f64.sqrt();
    Ok(BdAnalysis {
        d,
        epsilon,
        gamma: 1.0 - epsilon / (2.0 * d as f64),
        beta_l: sqrt2 * dm1,
        beta_q: 2.0 * dm1,
        beta_l_corr: dm1 * (sqrt2 + epsilon.sqrt()),
        ratio: (sqrt2 + epsilon.sqrt()) / 2.0,
    })
}

/// Minimum trust at which the corrected local bound stays below the quantum
/// bound: Gamma*(d) = 1 - (2 - sqrt(2))^2 / (2d). Below it no steerability is
/// witnessable with this family.
pub fn bd_trust_threshold(d: usize) -> Result<f64> {
    check_d(d)?;
    let eps_star = (2.0 - 2f64.sqrt()).powi(2);
    Ok(1.0 - eps_star / (2.0 * d as f64))
}

/// One row of the ratio-versus-trust curve.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BdCurveRow {
    pub d: usize,
    pub gamma: f64,
    pub epsilon: f64,
    pub ratio_raw: f64,
    /// min(1, ratio_raw); 1 marks the region where no steerability can be
    /// witnessed.
    pub ratio_clamped: f64,
    pub beta_l: f64,
    pub beta_q: f64,
    pub beta_l_corr: f64,
}

fn curve_row(d: usize, gamma: f64, epsilon: f64) -> Result<BdCurveRow> {
    let analysis = bd_bounds(d, epsilon)?;
    Ok(BdCurveRow {
        d,
        gamma,
        epsilon,
        ratio_raw: analysis.ratio,
        ratio_clamped: analysis.ratio.min(1.0),
        beta_l: analysis.beta_l,
        beta_q: analysis.beta_q,
        beta_l_corr: analysis.beta_l_corr,
    })
}

/// Curve rows over a (dimension, trust) grid, ordered by (d, gamma). The
/// per-measurement budget is eps = 2d(1 - gamma).
pub fn bd_curve(dims: &[usize], gamma_grid: &[f64]) -> Result<Vec<BdCurveRow>> {
    if dims.is_empty() || gamma_grid.is_empty() {
        return Err(Error::OutOfRange {
            name: "grid",
            value: 0.0,
            constraint: "dims and gamma grid must be nonempty",
        });
    }
    for &g in gamma_grid {
        if !(0.0..=1.0).contains(&g) {
            return Err(Error::OutOfRange {
                name: "gamma",
                value: g,
                constraint: "must lie in [0, 1]",
            });
        }
    }
    let mut dims = dims.to_vec();
    dims.sort_unstable();
    let mut gammas = gamma_grid.to_vec();
    gammas.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut rows = Vec::with_capacity(dims.len() * gammas.len());
    for &d in &dims {
        for &gamma in &gammas {
            let epsilon = 2.0 * d as f64 * (1.0 - gamma);
            rows.push(curve_row(d, gamma, epsilon)?);
        }
    }
    Ok(rows)
}

/// Curve rows over a (dimension, budget) grid, ordered by (d, epsilon).
pub fn bd_curve_from_epsilons(dims: &[usize], eps_grid: &[f64]) -> Result<Vec<BdCurveRow>> {
    if dims.is_empty() || eps_grid.is_empty() {
        return Err(Error::OutOfRange {
            name: "grid",
            value: 0.0,
            constraint: "dims and epsilon grid must be nonempty",
        });
    }
    let mut dims = dims.to_vec();
    dims.sort_unstable();
    let mut epsilons = eps_grid.to_vec();
    epsilons.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut rows = Vec::with_capacity(dims.len() * epsilons.len());
    for &d in &dims {
        for &epsilon in &epsilons {
            check_epsilon(epsilon)?;
            let gamma = 1.0 - epsilon / (2.0 * d as f64);
            rows.push(curve_row(d, gamma, epsilon)?);
        }
    }
    Ok(rows)
}

pub const CURVE_CSV_HEADER: &str =
    "d,gamma,epsilon,ratio_raw,ratio_clamped,beta_L,beta_Q,beta_L_corr";

/// Curve table as CSV, floats at 15 significant digits.
pub fn write_curve_csv<W: Write>(rows: &[BdCurveRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CURVE_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.d,
            fmt_g15(r.gamma),
            fmt_g15(r.epsilon),
            fmt_g15(r.ratio_raw),
            fmt_g15(r.ratio_clamped),
            fmt_g15(r.beta_l),
            fmt_g15(r.beta_q),
            fmt_g15(r.beta_l_corr)
        )?;
    }
    Ok(())
}

/// The trusted side's operator pairs (Z_d^k, X_d^k), k = 1..d-1.
pub fn bd_alice_operators(d: usize) -> Result<Vec<(ComplexSquareMatrix, ComplexSquareMatrix)>> {
    check_d(d)?;
    let pair = build_clock_shift(d)?;
    Ok((1..d).map(|k| (pair.z.pow(k), pair.x.pow(k))).collect())
}
