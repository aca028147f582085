//! Small dense helpers shared by the solvers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type RMatrix = DMatrix<f64>;
pub type RVector = DVector<f64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Real representation of a Hermitian form: `pᴴAp = xᵀMx` with
/// `x = [Re p; Im p]` and `M = [[Re A, −Im A], [Im A, Re A]]`.
/// The block is added into `out` at `offset` scaled by `scale`.
pub fn add_hermitian_block(out: &mut RMatrix, offset: usize, a: &CMatrix, scale: f64) {
    let n = a.nrows();
    for i in 0..n {
        for j in 0..n {
            let v = a[(i, j)] * scale;
            out[(offset + i, offset + j)] += v.re;
            out[(offset + n + i, offset + n + j)] += v.re;
            out[(offset + i, offset + n + j)] -= v.im;
            out[(offset + n + i, offset + j)] += v.im;
        }
    }
}

/// Real coefficients of `Re(bᴴp)` in the `[Re p; Im p]` layout, added at
/// `offset` scaled by `scale`.
pub fn add_linear_block(out: &mut RVector, offset: usize, b: &CVector, scale: f64) {
    let n = b.len();
    for i in 0..n {
        out[offset + i] += scale * b[i].re;
        out[offset + n + i] += scale * b[i].im;
    }
}

/// Solves `A x = b` for symmetric positive semidefinite `A`. Falls back to
/// the minimum-norm least-squares solution when `A` is singular.
pub fn solve_psd(a: &RMatrix, b: &RVector) -> RVector {
    if let Some(chol) = a.clone().cholesky() {
        let x = chol.solve(b);
        if x.iter().all(|v| v.is_finite()) {
            return x;
        }
    }
    pinv_solve(a, b)
}

/// Minimum-norm solution of a symmetric system through its eigenvalues.
pub fn pinv_solve(a: &RMatrix, b: &RVector) -> RVector {
    let eig = a.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cutoff = max * 1e-12 * a.nrows() as f64;
    let mut coeffs = eig.eigenvectors.transpose() * b;
    for (c, &lam) in coeffs.iter_mut().zip(eig.eigenvalues.iter()) {
        *c = if lam.abs() > cutoff { *c / lam } else { 0.0 };
    }
    &eig.eigenvectors * coeffs
}

/// `aᴴ b`
pub fn dotc(a: &CVector, b: &CVector) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted in
/// decreasing order.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.nrows();
    let sym = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}
