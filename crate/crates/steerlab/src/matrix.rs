//! Dense complex square matrices, the norm conventions used throughout, and
//! Hermitian eigenvalue extraction.
//!
//! The norm written `hs_norm_sq` is `Tr(A A^dag)`, the *squared* Frobenius
//! norm. Every deviation budget in this crate is expressed in these squared
//! units; `frobenius_norm` is its square root.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Max entrywise |A - A^dag| accepted before Hermitian-dependent operations refuse.
pub const TOL_HERMITIAN: f64 = 1e-10;
/// Max entrywise |A - A^dag| accepted when constructing state types.
pub const TOL_HERMITIAN_STATE: f64 = 1e-12;
/// Construction-time checks (unitarity, orthogonality).
pub const TOL_CONSTRUCT: f64 = 1e-10;
/// Eigenvalues of a density matrix may dip this far below zero.
pub const PSD_SLACK: f64 = 1e-10;

/// A d x d complex matrix, d >= 2, stored dense.
///
/// Row-major in the serialized form; entry (i, j) is row i, column j.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSquareMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexSquareMatrix {
    /// Build from a row-major closure over (row, col).
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            inner: DMatrix::from_fn(dim, dim, f),
        })
    }

    /// Build from row-major nested vectors.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        check_dim(dim)?;
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
        }
        Self::from_fn(dim, |i, j| rows[i][j])
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            inner: DMatrix::identity(dim, dim),
        })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            inner: DMatrix::zeros(dim, dim),
        })
    }

    /// |psi><psi| for a (not necessarily normalized) state vector.
    pub fn outer(psi: &[Complex64]) -> Result<Self> {
        check_dim(psi.len())?;
        let v = DVector::from_column_slice(psi);
        Ok(Self {
            inner: &v * v.adjoint(),
        })
    }

    pub(crate) fn from_dmatrix(inner: DMatrix<Complex64>) -> Self {
        debug_assert!(inner.is_square() && inner.nrows() >= 2);
        Self { inner }
    }

    pub(crate) fn dmatrix(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.inner[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            inner: &self.inner + &rhs.inner,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            inner: &self.inner - &rhs.inner,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            inner: &self.inner * &rhs.inner,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            inner: self.inner.map(|x| x * c),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// A^k by repeated multiplication (k small here).
    pub fn pow(&self, k: usize) -> Self {
        let mut acc = DMatrix::identity(self.dim(), self.dim());
        for _ in 0..k {
            acc = &acc * &self.inner;
        }
        Self { inner: acc }
    }

    /// Tr(A B), no conjugation.
    pub fn trace_product(&self, rhs: &Self) -> Complex64 {
        let d = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += self.inner[(i, j)] * rhs.inner[(j, i)];
            }
        }
        acc
    }

    /// Hilbert-Schmidt inner product Tr(A B^dag) = sum_ij A_ij conj(B_ij).
    pub fn hs_inner(&self, rhs: &Self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.inner.iter().zip(rhs.inner.iter()) {
            acc += a * b.conj();
        }
        acc
    }

    /// ||A|| = Tr(A A^dag), the squared Frobenius norm.
    pub fn hs_norm_sq(&self) -> f64 {
        self.inner.iter().map(|x| x.norm_sqr()).sum()
    }

    /// ||A||_F = sqrt(Tr(A A^dag)).
    pub fn frobenius_norm(&self) -> f64 {
        self.hs_norm_sq().sqrt()
    }

    /// Largest entrywise |self - rhs|.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        self.inner
            .iter()
            .zip(rhs.inner.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise |A - A^dag|.
    pub fn hermitian_deviation(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.inner[(i, j)] - self.inner[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// (A + A^dag) / 2.
    pub fn hermitized(&self) -> Self {
        Self {
            inner: (&self.inner + self.inner.adjoint()).map(|x| x * 0.5),
        }
    }

    /// Largest entrywise |U U^dag - I|.
    pub fn unitary_deviation(&self) -> f64 {
        let prod = &self.inner * self.inner.adjoint();
        let id = DMatrix::<Complex64>::identity(self.dim(), self.dim());
        prod.iter()
            .zip(id.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn check_unitary(&self, tol: f64) -> Result<()> {
        let dev = self.unitary_deviation();
        if dev > tol {
            return Err(Error::NonUnitary { deviation: dev });
        }
        Ok(())
    }

    /// <psi| A |psi>.
    pub fn expectation(&self, psi: &[Complex64]) -> Complex64 {
        let d = self.dim();
        assert_eq!(psi.len(), d, "state dimension mismatch");
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += psi[i].conj() * self.inner[(i, j)] * psi[j];
            }
        }
        acc
    }

    /// Eigenvalues of a Hermitian matrix, ascending. Symmetrizes first when
    /// the deviation is within `TOL_HERMITIAN`, refuses beyond it.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        let dev = self.hermitian_deviation();
        if dev > TOL_HERMITIAN {
            return Err(Error::NonHermitianInput { deviation: dev });
        }
        let sym = self.hermitized();
        let mut vals: Vec<f64> = sym
            .inner
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(vals)
    }

    /// Largest eigenvalue of a Hermitian matrix.
    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(*self
            .hermitian_eigenvalues()?
            .last()
            .expect("dim >= 2 guarantees eigenvalues"))
    }

    /// (eigenvalues ascending, unit eigenvector columns in matching order).
    pub(crate) fn hermitian_eigen_pairs(&self) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
        let dev = self.hermitian_deviation();
        if dev > TOL_HERMITIAN {
            return Err(Error::NonHermitianInput { deviation: dev });
        }
        let decomp = self.hermitized().inner.symmetric_eigen();
        let mut order: Vec<usize> = (0..decomp.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| {
            decomp.eigenvalues[a]
                .partial_cmp(&decomp.eigenvalues[b])
                .unwrap()
        });
        let vals: Vec<f64> = order.iter().map(|&i| decomp.eigenvalues[i]).collect();
        let cols: Vec<_> = order
            .iter()
            .map(|&i| decomp.eigenvectors.column(i).into_owned())
            .collect();
        Ok((vals, DMatrix::from_columns(&cols)))
    }

    /// Unit eigenvector of the largest eigenvalue.
    pub fn top_eigenvector(&self) -> Result<Vec<Complex64>> {
        let (_, vectors) = self.hermitian_eigen_pairs()?;
        Ok(vectors
            .column(vectors.ncols() - 1)
            .iter()
            .copied()
            .collect())
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::UnsupportedDimension {
            dim,
            reason: "matrices must be at least 2 x 2",
        });
    }
    Ok(())
}

// Wire format shared by every module: {"dim": d, "entries": [[[re, im], ...], ...]},
// row-major.
#[derive(Serialize, Deserialize)]
struct MatrixWire {
    dim: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

impl Serialize for ComplexSquareMatrix {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let d = self.dim();
        let entries = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| [self.get(i, j).re, self.get(i, j).im])
                    .collect()
            })
            .collect();
        MatrixWire { dim: d, entries }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexSquareMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let wire = MatrixWire::deserialize(deserializer)?;
        if wire.entries.len() != wire.dim {
            return Err(DeError::custom(format!(
                "matrix declares dim {} but has {} rows",
                wire.dim,
                wire.entries.len()
            )));
        }
        for (i, row) in wire.entries.iter().enumerate() {
            if row.len() != wire.dim {
                return Err(DeError::custom(format!(
                    "matrix row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    wire.dim
                )));
            }
        }
        ComplexSquareMatrix::from_fn(wire.dim, |i, j| {
            Complex64::new(wire.entries[i][j][0], wire.entries[i][j][1])
        })
        .map_err(DeError::custom)
    }
}

/// Hermitian, unit-trace, positive-semidefinite operator.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DensityMatrix {
    matrix: ComplexSquareMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexSquareMatrix) -> Result<Self> {
        let dev = matrix.hermitian_deviation();
        if dev > TOL_HERMITIAN_STATE {
            return Err(Error::NonHermitianInput { deviation: dev });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::TraceNotOne { trace: tr.re });
        }
        let min = matrix
            .hermitian_eigenvalues()?
            .first()
            .copied()
            .expect("dim >= 2");
        if min < -PSD_SLACK {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min,
            });
        }
        Ok(Self { matrix })
    }

    /// |psi><psi| from a state vector, normalizing it first.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::OutOfRange {
                name: "state norm",
                value: 0.0,
                constraint: "must be nonzero",
            });
        }
        let normalized: Vec<Complex64> = psi.iter().map(|c| c / norm).collect();
        Self::new(ComplexSquareMatrix::outer(&normalized)?)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(ComplexSquareMatrix::identity(dim)?.scale_re(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &ComplexSquareMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Hermitian unit-trace operator; positivity is *not* required. This is the
/// home of inferred states, where imprecision can break positivity.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct HermitianUnitTrace {
    matrix: ComplexSquareMatrix,
}

impl HermitianUnitTrace {
    pub fn new(matrix: ComplexSquareMatrix) -> Result<Self> {
        let dev = matrix.hermitian_deviation();
        if dev > TOL_HERMITIAN_STATE {
            return Err(Error::NonHermitianInput { deviation: dev });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::TraceNotOne { trace: tr.re });
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ComplexSquareMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}
