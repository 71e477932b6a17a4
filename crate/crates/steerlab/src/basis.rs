//! Tomographically complete unitary operator bases and the clock/shift pair.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::matrix::{ComplexSquareMatrix, TOL_CONSTRUCT};

/// Which operator family a basis was built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisLabel {
    /// {I, X, Y, Z}; qubits only.
    Pauli,
    /// {X^a Z^b}, (a, b) lexicographic with (0, 0) first; any dimension.
    HeisenbergWeyl,
}

/// Ordered set {sigma_i}, i = 1..d^2, of d x d unitaries with sigma_1 = I and
/// Tr(sigma_i sigma_j^dag) = d delta_ij.
#[derive(Clone, Debug, Serialize)]
pub struct UnitaryBasis {
    dim: usize,
    label: BasisLabel,
    elements: Vec<ComplexSquareMatrix>,
}

impl UnitaryBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> BasisLabel {
        self.label
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, i: usize) -> &ComplexSquareMatrix {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[ComplexSquareMatrix] {
        &self.elements
    }
}

/// Clock Z_d = sum_i omega^i |i><i| and shift X_d = sum_i |i+1 mod d><i|,
/// omega = exp(2 pi i / d).
#[derive(Clone, Debug)]
pub struct ClockShiftPair {
    pub dim: usize,
    pub z: ComplexSquareMatrix,
    pub x: ComplexSquareMatrix,
    pub omega: Complex64,
}

/// The standard tomographically complete basis for dimension d.
///
/// `Pauli` is only defined for d = 2. Heisenberg-Weyl elements are X^a Z^b
/// ordered lexicographically in (a, b) with the identity (0, 0) first.
pub fn build_basis(dim: usize, label: BasisLabel) -> Result<UnitaryBasis> {
    if dim < 2 {
        return Err(Error::UnsupportedDimension {
            dim,
            reason: "bases need d >= 2",
        });
    }
    let elements = match label {
        BasisLabel::Pauli => {
            if dim != 2 {
                return Err(Error::UnsupportedDimension {
                    dim,
                    reason: "the Pauli basis is qubit-only",
                });
            }
            pauli_elements()?
        }
        BasisLabel::HeisenbergWeyl => {
            let pair = build_clock_shift(dim)?;
            let mut out = Vec::with_capacity(dim * dim);
            for a in 0..dim {
                let xa = pair.x.pow(a);
                for b in 0..dim {
                    out.push(xa.mul(&pair.z.pow(b)));
                }
            }
            out
        }
    };
    let basis = UnitaryBasis {
        dim,
        label,
        elements,
    };
    validate_basis(&basis)?;
    Ok(basis)
}

fn pauli_elements() -> Result<Vec<ComplexSquareMatrix>> {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    Ok(vec![
        ComplexSquareMatrix::from_rows(&[vec![one, z], vec![z, one]])?,
        ComplexSquareMatrix::from_rows(&[vec![z, one], vec![one, z]])?,
        ComplexSquareMatrix::from_rows(&[vec![z, -i], vec![i, z]])?,
        ComplexSquareMatrix::from_rows(&[vec![one, z], vec![z, -one]])?,
    ])
}

fn validate_basis(basis: &UnitaryBasis) -> Result<()> {
    let d = basis.dim;
    let id = ComplexSquareMatrix::identity(d)?;
    if basis.elements[0].max_abs_diff(&id) > TOL_CONSTRUCT {
        return Err(Error::Malformed(
            "basis element 0 is not the identity".into(),
        ));
    }
    for el in &basis.elements {
        el.check_unitary(TOL_CONSTRUCT)?;
    }
    for (i, a) in basis.elements.iter().enumerate() {
        for (j, b) in basis.elements.iter().enumerate() {
            let ip = a.hs_inner(b);
            let expected = if i == j { d as f64 } else { 0.0 };
            if (ip.re - expected).abs() > TOL_CONSTRUCT || ip.im.abs() > TOL_CONSTRUCT {
                return Err(Error::Malformed(format!(
                    "basis elements {i}, {j} violate Hilbert-Schmidt orthogonality"
                )));
            }
        }
    }
    Ok(())
}

/// Clock and shift matrices for dimension d.
pub fn build_clock_shift(dim: usize) -> Result<ClockShiftPair> {
    if dim < 2 {
        return Err(Error::UnsupportedDimension {
            dim,
            reason: "clock/shift need d >= 2",
        });
    }
    let omega = Complex64::from_polar(1.0, TAU / dim as f64);
    let z = ComplexSquareMatrix::from_fn(dim, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, TAU * i as f64 / dim as f64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })?;
    let x = ComplexSquareMatrix::from_fn(dim, |i, j| {
        if i == (j + 1) % dim {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })?;
    Ok(ClockShiftPair { dim, z, x, omega })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pauli_is_the_standard_set() {
        let basis = build_basis(2, BasisLabel::Pauli).unwrap();
        assert_eq!(basis.len(), 4);
        // order I, X, Y, Z
        assert_abs_diff_eq!(basis.element(1).get(0, 1).re, 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(basis.element(2).get(1, 0).im, 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(basis.element(3).get(1, 1).re, -1.0, epsilon = 0.0);
    }

    #[test]
    fn pauli_requires_qubit() {
        assert!(matches!(
            build_basis(3, BasisLabel::Pauli),
            Err(Error::UnsupportedDimension { .. })
        ));
        assert!(build_basis(1, BasisLabel::HeisenbergWeyl).is_err());
    }

    #[test]
    fn heisenberg_weyl_d2_ordering() {
        // {I, Z, X, XZ}
        let basis = build_basis(2, BasisLabel::HeisenbergWeyl).unwrap();
        assert_abs_diff_eq!(basis.element(1).get(1, 1).re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(basis.element(2).get(0, 1).re, 1.0, epsilon = 1e-12);
        // XZ = [[0, -1], [1, 0]]
        assert_abs_diff_eq!(basis.element(3).get(0, 1).re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(basis.element(3).get(1, 0).re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn orthogonality_all_dims_both_labels() {
        for d in 2..=8 {
            let basis = build_basis(d, BasisLabel::HeisenbergWeyl).unwrap();
            for i in 0..basis.len() {
                for j in 0..basis.len() {
                    let ip = basis.element(i).hs_inner(basis.element(j));
                    let expected = if i == j { d as f64 } else { 0.0 };
                    assert_abs_diff_eq!(ip.re, expected, epsilon = 1e-10);
                    assert_abs_diff_eq!(ip.im, 0.0, epsilon = 1e-10);
                }
            }
        }
        build_basis(2, BasisLabel::Pauli).unwrap(); // validated at construction
    }

    #[test]
    fn distinct_elements_are_2d_apart() {
        for d in [2, 3, 5] {
            let basis = build_basis(d, BasisLabel::HeisenbergWeyl).unwrap();
            for i in 0..basis.len() {
                for j in 0..basis.len() {
                    if i != j {
                        let diff = basis.element(j).sub(basis.element(i));
                        assert_abs_diff_eq!(diff.hs_norm_sq(), 2.0 * d as f64, epsilon = 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn clock_shift_qubit_reduces_to_pauli() {
        let pair = build_clock_shift(2).unwrap();
        assert_abs_diff_eq!(pair.z.get(0, 0).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pair.z.get(1, 1).re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pair.x.get(0, 1).re, 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(pair.x.get(1, 0).re, 1.0, epsilon = 0.0);
    }

    #[test]
    fn clock_shift_order_d() {
        for d in 2..=8 {
            let pair = build_clock_shift(d).unwrap();
            let id = ComplexSquareMatrix::identity(d).unwrap();
            assert!(pair.z.pow(d).max_abs_diff(&id) < 1e-12);
            assert!(pair.x.pow(d).max_abs_diff(&id) < 1e-12);
        }
    }

    #[test]
    fn clock_powers_are_traceless() {
        for d in 2..=8 {
            let pair = build_clock_shift(d).unwrap();
            for k in 1..d {
                assert!(pair.z.pow(k).trace().norm() < 1e-10);
                assert!(pair.x.pow(k).trace().norm() < 1e-10);
            }
        }
    }
}
