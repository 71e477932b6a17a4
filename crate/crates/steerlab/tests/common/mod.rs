//! Shared fixtures and the independent brute-force oracle for local bounds.
#![allow(dead_code)] // each test binary uses a different subset

use num_complex::Complex64;

use steerlab::matrix::ComplexSquareMatrix;
use steerlab::steering::{Assemblage, SteeringFunctional, SteeringScenario};

pub fn projector(amplitudes: [f64; 2]) -> ComplexSquareMatrix {
    ComplexSquareMatrix::outer(&[
        Complex64::new(amplitudes[0], 0.0),
        Complex64::new(amplitudes[1], 0.0),
    ])
    .unwrap()
}

/// The two-input/two-outcome qubit functional with projective coefficients
/// F_{0|0} = |0><0|, F_{1|0} = |1><1|, F_{0|1} = |+><+|, F_{1|1} = |-><-|.
pub fn qubit_functional() -> SteeringFunctional {
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

/// Its bound-attaining assemblage: sigma_{0|y} = |0bar><0bar| with
/// |0bar> = cos(pi/8)|0> + sin(pi/8)|1>, sigma_{1|y} = 0.
pub fn qubit_attaining_assemblage() -> Assemblage {
    let scenario = SteeringScenario::new(2, 2, 2).unwrap();
    let angle = std::f64::consts::PI / 8.0;
    let p = projector([angle.cos(), angle.sin()]);
    let zero = ComplexSquareMatrix::zeros(2).unwrap();
    Assemblage::new(scenario, vec![vec![p.clone(), zero.clone()], vec![p, zero]]).unwrap()
}

pub const BETA_L_QUBIT: f64 = 1.7071067811865475; // 1 + 1/sqrt(2)

/// <psi(theta, phi)| M |psi(theta, phi)> on the Bloch sphere:
/// |psi> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
fn bloch_expectation(m: &ComplexSquareMatrix, theta: f64, phi: f64) -> f64 {
    let psi = [
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ];
    m.expectation(&psi).re
}

/// Brute-force maximum of <psi| M |psi> over pure qubit states: a full
/// n_theta x n_phi grid scan followed by local grid refinement around the
/// best point. Independent of any eigensolver.
pub fn bloch_grid_max(
    m: &ComplexSquareMatrix,
    n_theta: usize,
    n_phi: usize,
    refinements: usize,
) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut best = f64::NEG_INFINITY;
    let mut best_theta = 0.0;
    let mut best_phi = 0.0;
    for i in 0..n_theta {
        let theta = PI * i as f64 / (n_theta - 1) as f64;
        for j in 0..n_phi {
            let phi = TAU * j as f64 / n_phi as f64;
            let value = bloch_expectation(m, theta, phi);
            if value > best {
                best = value;
                best_theta = theta;
                best_phi = phi;
            }
        }
    }

    let mut half_theta = PI / (n_theta - 1) as f64;
    let mut half_phi = TAU / n_phi as f64;
    for _ in 0..refinements {
        let steps = 12i32;
        for i in -steps..=steps {
            let theta = (best_theta + half_theta * i as f64 / steps as f64).clamp(0.0, PI);
            for j in -steps..=steps {
                let phi = best_phi + half_phi * j as f64 / steps as f64;
                let value = bloch_expectation(m, theta, phi);
                if value > best {
                    best = value;
                    best_theta = theta;
                    best_phi = phi;
                }
            }
        }
        half_theta /= steps as f64;
        half_phi /= steps as f64;
    }
    best
}
