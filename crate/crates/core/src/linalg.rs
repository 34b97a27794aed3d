//! Thin wrappers over nalgebra's complex kernels with the conventions the
//! rest of the crate relies on (descending order, explicit failures).

use nalgebra::{Cholesky, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::adjoint::CMatrix;
use crate::error::{Error, Result};

pub type CVector = DVector<Complex64>;

/// Thin SVD `C = L diag(s) Rᴴ` with `s` sorted non-increasing.
pub struct SortedSvd {
    pub left: CMatrix,
    pub singular_values: Vec<f64>,
    pub right_adj: CMatrix,
}

pub fn svd_sorted(c: &CMatrix) -> Result<SortedSvd> {
    let svd = SVD::try_new(c.clone(), true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    let s = svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let left = CMatrix::from_fn(u.nrows(), order.len(), |r, k| u[(r, order[k])]);
    let right_adj = CMatrix::from_fn(order.len(), v_t.ncols(), |k, c| v_t[(order[k], c)]);
    Ok(SortedSvd {
        left,
        singular_values: order.iter().map(|&i| s[i]).collect(),
        right_adj,
    })
}

/// Singular values only, sorted non-increasing.
pub fn singular_values_sorted(c: &CMatrix) -> Result<Vec<f64>> {
    let svd = SVD::try_new(c.clone(), false, false, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues non-increasing.
pub fn hermitian_eigen_desc(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vecs = CMatrix::from_fn(h.nrows(), order.len(), |r, k| eig.eigenvectors[(r, order[k])]);
    (order.iter().map(|&i| eig.eigenvalues[i]).collect(), vecs)
}

/// Eigenvalues of a Hermitian matrix, non-increasing.
pub fn hermitian_eigenvalues_desc(h: &CMatrix) -> Vec<f64> {
    let mut vals: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

/// Moore-Penrose pseudoinverse of a Hermitian positive semi-definite
/// matrix; eigenvalues at or below `rel_tol * max` are treated as zero.
pub fn hermitian_pinv(h: &CMatrix, rel_tol: f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen_desc(h);
    let cutoff = vals.first().copied().unwrap_or(0.0).max(0.0) * rel_tol;
    let mut scaled = vecs.clone();
    for (k, &v) in vals.iter().enumerate() {
        let inv = if v > cutoff && v > 0.0 { 1.0 / v } else { 0.0 };
        scaled.column_mut(k).scale_mut(inv);
    }
    scaled * vecs.adjoint()
}

/// Solves `X A = B` for Hermitian positive definite `A`.
pub fn solve_right_hpd(b: &CMatrix, a: &CMatrix) -> Result<CMatrix> {
    let chol = Cholesky::new(a.clone())
        .ok_or_else(|| Error::Numerical("regularized Gram matrix is not positive definite".into()))?;
    // X A = B  <=>  A Xᴴ = Bᴴ
    Ok(chol.solve(&b.adjoint()).adjoint())
}

/// Solves `A X = B` for Hermitian positive definite `A`.
pub fn solve_left_hpd(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let chol = Cholesky::new(a.clone())
        .ok_or_else(|| Error::Numerical("regularized Gram matrix is not positive definite".into()))?;
    Ok(chol.solve(b))
}

/// Number of singular values above `tol * s[0]` in a non-increasing list.
pub fn numerical_rank(sorted_singular_values: &[f64], tol: f64) -> usize {
    match sorted_singular_values.first() {
        Some(&s1) if s1 > 0.0 => sorted_singular_values.iter().filter(|&&s| s > tol * s1).count(),
        _ => 0,
    }
}
