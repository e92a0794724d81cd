//! Dense complex linear algebra shared by the rest of the crate.

use alloc::vec::Vec;

use nalgebra::storage::RawStorage;
use nalgebra::{DMatrix, DVector, Dim, Matrix, Matrix2, SymmetricEigen};
use num_complex::Complex64;

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type Matrix2c = Matrix2<Complex64>;

/// Relative Hermiticity tolerance accepted by [`eigh`].
pub const HERMITIAN_TOL: f64 = 1e-12;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: CMatrix,
}

pub fn max_abs<R: Dim, C: Dim, S: RawStorage<Complex64, R, C>>(m: &Matrix<Complex64, R, C, S>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest entry of `m - m†`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(m: &CMatrix, rel_tol: f64) -> bool {
    m.is_square() && hermitian_deviation(m) <= rel_tol * max_abs(m).max(1.0)
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    if is_hermitian(m, HERMITIAN_TOL) {
        Ok(())
    } else {
        Err(Error::validation(alloc::format!(
            "matrix is not Hermitian (deviation {:.3e})",
            hermitian_deviation(m)
        )))
    }
}

fn real_part(m: &CMatrix) -> Option<DMatrix<f64>> {
    let n = m.nrows();
    m.iter()
        .all(|z| z.im == 0.0)
        .then(|| DMatrix::<f64>::from_fn(n, n, |i, j| 0.5 * (m[(i, j)].re + m[(j, i)].re)))
}

fn symmetrized(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    CMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj()))
}

/// Hermitian eigendecomposition.
///
/// Matrices whose entries are all exactly real take the real-symmetric
/// path, which is several times faster than the complex one.
pub fn eigh(m: &CMatrix) -> Result<Eigen> {
    check_hermitian(m)?;
    let n = m.nrows();
    let (raw_values, raw_vectors): (Vec<f64>, CMatrix) = match real_part(m) {
        Some(real) => {
            let eig = SymmetricEigen::new(real);
            (
                eig.eigenvalues.iter().copied().collect(),
                eig.eigenvectors.map(|x| Complex64::new(x, 0.0)),
            )
        }
        None => {
            let eig = SymmetricEigen::new(symmetrized(m));
            (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
        }
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| raw_values[a].total_cmp(&raw_values[b]));
    let values = order.iter().map(|&k| raw_values[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| raw_vectors[(i, order[j])]);
    Ok(Eigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(m: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let mut values: Vec<f64> = match real_part(m) {
        Some(real) => real.symmetric_eigenvalues().iter().copied().collect(),
        None => symmetrized(m).symmetric_eigenvalues().iter().copied().collect(),
    };
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// `exp(-i H t)` for Hermitian `H`.
pub fn unitary_propagator(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let eig = eigh(h)?;
    Ok(propagator_from_eigen(&eig, t))
}

pub(crate) fn propagator_from_eigen(eig: &Eigen, t: f64) -> CMatrix {
    let n = eig.values.len();
    let phases: Vec<Complex64> = eig
        .values
        .iter()
        .map(|&e| Complex64::from_polar(1.0, -e * t))
        .collect();
    let scaled = CMatrix::from_fn(n, n, |i, k| eig.vectors[(i, k)] * phases[k]);
    scaled * eig.vectors.adjoint()
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}
