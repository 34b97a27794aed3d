//! The complex adjoint representation of quaternion matrices.
//!
//! A quaternion matrix is written `Q = Qa + Qb j` with complex `Qa`, `Qb`,
//! and represented by the `2M x 2N` complex block matrix
//!
//! ```text
//! f(Q) = [  Qa       Qb     ]
//!        [ -conj(Qb) conj(Qa) ]
//! ```
//!
//! `f` is an injective algebra homomorphism, so products, sums, conjugate
//! transposes and inverses of quaternion matrices can all be computed in
//! the complex domain. [`AdjointMatrix`] stores only the two top blocks;
//! the full matrix is built on demand by [`AdjointMatrix::to_full`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{dim_err, Error, Result};
use crate::qmatrix::QuaternionMatrix;

pub type CMatrix = DMatrix<Complex64>;

#[derive(Clone, Debug, PartialEq)]
pub struct AdjointMatrix {
    qa: CMatrix,
    qb: CMatrix,
}

impl AdjointMatrix {
    pub fn from_blocks(qa: CMatrix, qb: CMatrix) -> Result<Self> {
        if qa.shape() != qb.shape() {
            return Err(dim_err(format!(
                "adjoint blocks {:?} and {:?} differ in shape",
                qa.shape(),
                qb.shape()
            )));
        }
        Ok(AdjointMatrix { qa, qb })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        AdjointMatrix {
            qa: CMatrix::zeros(rows, cols),
            qb: CMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        AdjointMatrix {
            qa: CMatrix::identity(n, n),
            qb: CMatrix::zeros(n, n),
        }
    }

    /// Quaternion row count `M`; the full matrix has `2M` rows.
    pub fn rows(&self) -> usize {
        self.qa.nrows()
    }

    /// Quaternion column count `N`; the full matrix has `2N` columns.
    pub fn cols(&self) -> usize {
        self.qa.ncols()
    }

    pub fn full_shape(&self) -> (usize, usize) {
        (2 * self.rows(), 2 * self.cols())
    }

    pub fn qa(&self) -> &CMatrix {
        &self.qa
    }

    pub fn qb(&self) -> &CMatrix {
        &self.qb
    }

    /// Materializes the `2M x 2N` block matrix.
    pub fn to_full(&self) -> CMatrix {
        let (m, n) = (self.rows(), self.cols());
        let mut full = CMatrix::zeros(2 * m, 2 * n);
        full.view_mut((0, 0), (m, n)).copy_from(&self.qa);
        full.view_mut((0, n), (m, n)).copy_from(&self.qb);
        full.view_mut((m, 0), (m, n)).copy_from(&self.qb.map(|z| -z.conj()));
        full.view_mut((m, n), (m, n)).copy_from(&self.qa.map(|z| z.conj()));
        full
    }

    /// Squared Frobenius norm of the full matrix, `2 (|Qa|^2 + |Qb|^2)`.
    pub fn frobenius_norm_sqr(&self) -> f64 {
        2.0 * (self.qa.norm_squared() + self.qb.norm_squared())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    /// `f(P)ᴴ = f(Pᴴ)`.
    pub fn adjoint_transpose(&self) -> Self {
        AdjointMatrix {
            qa: self.qa.adjoint(),
            qb: -self.qb.transpose(),
        }
    }

    /// `f(P) f(Q) = f(PQ)` computed on the blocks:
    /// `(Pa Qa - Pb conj(Qb)) + (Pa Qb + Pb conj(Qa)) j`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(dim_err(format!(
                "cannot multiply {}x{} by {}x{} quaternion matrices",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        let oa_conj = other.qa.map(|z| z.conj());
        let ob_conj = other.qb.map(|z| z.conj());
        let qa = &self.qa * &other.qa - &self.qb * ob_conj;
        let qb = &self.qa * &other.qb + &self.qb * oa_conj;
        Ok(AdjointMatrix { qa, qb })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(AdjointMatrix {
            qa: &self.qa + &other.qa,
            qb: &self.qb + &other.qb,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(AdjointMatrix {
            qa: &self.qa - &other.qa,
            qb: &self.qb - &other.qb,
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        AdjointMatrix {
            qa: self.qa.map(|z| z * s),
            qb: self.qb.map(|z| z * s),
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.qa.shape() != other.qa.shape() {
            return Err(dim_err(format!(
                "{:?} vs {:?}",
                self.qa.shape(),
                other.qa.shape()
            )));
        }
        Ok(())
    }

    /// Keeps the leading `k` quaternion columns (the full matrix keeps
    /// columns `0..k` and `N..N+k`).
    pub fn leading_cols(&self, k: usize) -> Self {
        AdjointMatrix {
            qa: self.qa.columns(0, k).into_owned(),
            qb: self.qb.columns(0, k).into_owned(),
        }
    }

    /// Keeps the leading `k` quaternion rows.
    pub fn leading_rows(&self, k: usize) -> Self {
        AdjointMatrix {
            qa: self.qa.rows(0, k).into_owned(),
            qb: self.qb.rows(0, k).into_owned(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.qa.iter().chain(self.qb.iter()).all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Inverse via the complex representation, `f(P⁻¹) = f(P)⁻¹`.
    pub fn try_inverse(&self) -> Result<Self> {
        if self.rows() != self.cols() {
            return Err(dim_err("only square matrices are invertible"));
        }
        let inv = self
            .to_full()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("matrix is singular".into()))?;
        structure_project(&inv)
    }
}

/// The map `f`: quaternion matrix to its complex adjoint.
pub fn adjoint(q: &QuaternionMatrix) -> AdjointMatrix {
    let (m, n) = q.shape();
    let [p0, p1, p2, p3] = [q.plane(0), q.plane(1), q.plane(2), q.plane(3)];
    // nalgebra is column-major, the planes are row-major
    let qa = CMatrix::from_fn(m, n, |r, c| Complex64::new(p0[r * n + c], p1[r * n + c]));
    let qb = CMatrix::from_fn(m, n, |r, c| Complex64::new(p2[r * n + c], p3[r * n + c]));
    AdjointMatrix { qa, qb }
}

/// The inverse map `f⁻¹`.
pub fn adjoint_inverse(c: &AdjointMatrix) -> QuaternionMatrix {
    let (m, n) = (c.rows(), c.cols());
    let mut planes: [Vec<f64>; 4] = std::array::from_fn(|_| Vec::with_capacity(m * n));
    for r in 0..m {
        for col in 0..n {
            let a = c.qa[(r, col)];
            let b = c.qb[(r, col)];
            planes[0].push(a.re);
            planes[1].push(a.im);
            planes[2].push(b.re);
            planes[3].push(b.im);
        }
    }
    QuaternionMatrix::from_planes(m, n, planes).expect("plane sizes follow from the block shape")
}

/// Nearest adjoint-structured matrix to a raw `2M x 2N` complex matrix:
/// `Qa = (C11 + conj(C22)) / 2`, `Qb = (C12 - conj(C21)) / 2`.
///
/// This is the orthogonal projection onto the (real-linear) subspace of
/// structured matrices, so it is a fixed point on structured input.
pub fn structure_project(c: &CMatrix) -> Result<AdjointMatrix> {
    let (rr, cc) = c.shape();
    if rr % 2 != 0 || cc % 2 != 0 {
        return Err(dim_err(format!(
            "adjoint structure needs even dimensions, got {rr}x{cc}"
        )));
    }
    let (m, n) = (rr / 2, cc / 2);
    let c11 = c.view((0, 0), (m, n));
    let c12 = c.view((0, n), (m, n));
    let c21 = c.view((m, 0), (m, n));
    let c22 = c.view((m, n), (m, n));
    let qa = CMatrix::from_fn(m, n, |r, k| (c11[(r, k)] + c22[(r, k)].conj()) * 0.5);
    let qb = CMatrix::from_fn(m, n, |r, k| (c12[(r, k)] - c21[(r, k)].conj()) * 0.5);
    Ok(AdjointMatrix { qa, qb })
}

/// Relative distance of a raw complex matrix from the adjoint structure,
/// `|C - P(C)|_F / |C|_F` (zero for the zero matrix).
pub fn structure_defect(c: &CMatrix) -> Result<f64> {
    let projected = structure_project(c)?.to_full();
    let norm = c.norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok((c - projected).norm() / norm)
}

/// Quaternion matrix product, computed through the adjoint.
pub fn qmat_mul(p: &QuaternionMatrix, q: &QuaternionMatrix) -> Result<QuaternionMatrix> {
    Ok(adjoint_inverse(&adjoint(p).mul(&adjoint(q))?))
}

/// Quaternion inverse of a square matrix, computed through the adjoint.
pub fn qmat_inverse(p: &QuaternionMatrix) -> Result<QuaternionMatrix> {
    Ok(adjoint_inverse(&adjoint(p).try_inverse()?))
}
