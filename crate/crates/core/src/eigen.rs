//! Thin wrappers over `nalgebra` spectral routines.

use nalgebra::{Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 10_000;

/// Eigenvalues of a hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &SquareMatrix) -> Vec<f64> {
    let mut values: Vec<f64> = SymmetricEigen::new(m.to_nalgebra())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    values
}

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: Complex64,
    pub vector: Vec<Complex64>,
}

/// Eigenpairs of a normal (e.g. unitary) matrix from its complex Schur form.
///
/// For normal matrices the triangular factor is diagonal, so the Schur
/// vectors are an orthonormal eigenbasis even inside degenerate eigenspaces.
/// Each pair is checked; a residual above `tol` is reported as an error.
pub fn normal_eigenpairs(m: &SquareMatrix, tol: f64) -> Result<Vec<Eigenpair>> {
    let schur = Schur::try_new(m.to_nalgebra(), SCHUR_EPS, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::Eigen("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let n = m.dim();
    let mut pairs = Vec::with_capacity(n);
    for j in 0..n {
        let value = t[(j, j)];
        let vector: Vec<Complex64> = (0..n).map(|r| q[(r, j)]).collect();
        let mv = m.mul_vec(&vector);
        let residual = mv
            .iter()
            .zip(&vector)
            .map(|(a, b)| (a - value * b).norm())
            .fold(0.0, f64::max);
        if residual > tol {
            return Err(Error::Eigen(format!(
                "eigenpair {j} residual {residual:.3e} exceeds {tol:.1e}"
            )));
        }
        pairs.push(Eigenpair { value, vector });
    }
    Ok(pairs)
}
