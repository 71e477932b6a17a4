//! Wire-format invariants: JSON round-trips are lossless.

mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use steerlab::matrix::ComplexSquareMatrix;
use steerlab::steering::{SteeringFunctional, SteeringScenario};

fn matrix_strategy(dim: usize) -> impl Strategy<Value = ComplexSquareMatrix> {
    prop::collection::vec(-10.0f64..10.0, dim * dim * 2).prop_map(move |values| {
        ComplexSquareMatrix::from_fn(dim, |i, j| {
            let k = 2 * (i * dim + j);
            Complex64::new(values[k], values[k + 1])
        })
        .unwrap()
    })
}

proptest! {
    #[test]
    fn matrix_json_round_trip_is_exact(dim in 2usize..=6, seed_values in prop::collection::vec(-10.0f64..10.0, 72)) {
        let m = ComplexSquareMatrix::from_fn(dim, |i, j| {
            let k = 2 * (i * dim + j);
            Complex64::new(seed_values[k % 72], seed_values[(k + 1) % 72])
        }).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        let back: ComplexSquareMatrix = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(m.max_abs_diff(&back), 0.0);
    }

    #[test]
    fn functional_file_round_trip_is_exact(m00 in matrix_strategy(2), m10 in matrix_strategy(2), m01 in matrix_strategy(2), m11 in matrix_strategy(2)) {
        let scenario = SteeringScenario::new(2, 2, 2).unwrap();
        // symmetrize so the inputs pass the Hermiticity gate
        let coeffs = vec![
            vec![m00.hermitized(), m10.hermitized()],
            vec![m01.hermitized(), m11.hermitized()],
        ];
        let functional = SteeringFunctional::new(scenario, coeffs).unwrap();
        let back = SteeringFunctional::from_json(&functional.to_json()).unwrap();
        for y in 0..2 {
            for b in 0..2 {
                prop_assert_eq!(functional.coeff(b, y).max_abs_diff(back.coeff(b, y)), 0.0);
            }
        }
    }
}

#[test]
fn attaining_assemblage_file_round_trip() {
    let a = common::qubit_attaining_assemblage();
    let back = steerlab::steering::Assemblage::from_json(&a.to_json()).unwrap();
    for y in 0..2 {
        for b in 0..2 {
            assert_eq!(a.member(b, y).max_abs_diff(back.member(b, y)), 0.0);
        }
    }
}
