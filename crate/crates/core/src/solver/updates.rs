//! The closed-form block updates of the alternating scheme.
//!
//! With `G(U, V, X) = ½|f(U)f(V) - f(X)|² + (λ/2)(|f(U)|² + |f(V)|²)`:
//!
//! - `f(U) ← f(X) f(V)ᴴ (f(V) f(V)ᴴ + λI)⁻¹`
//! - `f(V) ← (f(U)ᴴ f(U) + λI)⁻¹ f(U)ᴴ f(X)`
//! - `X ← P_Ωᶜ(f⁻¹(f(U) f(V))) + P_Ω(T)`
//!
//! Products and inverses of adjoint-structured matrices stay structured, so
//! the raw updates are structured up to rounding; they are passed through
//! [`structure_project`] to make that exact.

use num_complex::Complex64;

use super::FactorPair;
use crate::adjoint::{adjoint, adjoint_inverse, structure_project, AdjointMatrix, CMatrix};
use crate::error::{dim_err, Result};
use crate::imaging::{project_omega, ObservationMask};
use crate::linalg::{hermitian_pinv, solve_left_hpd, solve_right_hpd};
use crate::qmatrix::QuaternionMatrix;

/// Eigenvalues at or below this fraction of the largest are dropped by the
/// pseudoinverse used when `λ = 0`.
pub const PINV_REL_TOL: f64 = 1e-12;

fn add_ridge(mut gram: CMatrix, lambda: f64) -> CMatrix {
    for i in 0..gram.nrows() {
        gram[(i, i)] += Complex64::new(lambda, 0.0);
    }
    gram
}

fn check_shapes(pair: &FactorPair, x: &QuaternionMatrix) -> Result<()> {
    if pair.u.rows() != x.rows() || pair.v.cols() != x.cols() || pair.u.cols() != pair.v.rows() {
        return Err(dim_err(format!(
            "factors {}x{} · {}x{} do not match a {}x{} matrix",
            pair.u.rows(),
            pair.u.cols(),
            pair.v.rows(),
            pair.v.cols(),
            x.rows(),
            x.cols()
        )));
    }
    Ok(())
}

/// `X` equal to `T` on Ω and zero elsewhere.
pub fn zero_fill(t: &QuaternionMatrix, omega: &ObservationMask) -> Result<QuaternionMatrix> {
    project_omega(t, omega)
}

/// The lifted objective `G`.
pub fn objective(pair: &FactorPair, x: &QuaternionMatrix, lambda: f64) -> Result<f64> {
    check_shapes(pair, x)?;
    let residual = pair.u.mul(&pair.v)?.sub(&adjoint(x))?;
    Ok(0.5 * residual.frobenius_norm_sqr()
        + 0.5 * lambda * (pair.u.frobenius_norm_sqr() + pair.v.frobenius_norm_sqr()))
}

/// The `U` update before structure projection, as a full `2M x r` matrix.
pub(crate) fn update_factor_u_raw(pair: &FactorPair, x: &QuaternionMatrix, lambda: f64) -> Result<CMatrix> {
    check_shapes(pair, x)?;
    let vh = pair.v.adjoint_transpose();
    let rhs = adjoint(x).mul(&vh)?.to_full();
    let gram = pair.v.mul(&vh)?.to_full();
    if lambda > 0.0 {
        solve_right_hpd(&rhs, &add_ridge(gram, lambda))
    } else {
        Ok(rhs * hermitian_pinv(&gram, PINV_REL_TOL))
    }
}

/// The `V` update before structure projection, as a full `r x 2N` matrix.
pub(crate) fn update_factor_v_raw(pair: &FactorPair, x: &QuaternionMatrix, lambda: f64) -> Result<CMatrix> {
    check_shapes(pair, x)?;
    let uh = pair.u.adjoint_transpose();
    let rhs = uh.mul(&adjoint(x))?.to_full();
    let gram = uh.mul(&pair.u)?.to_full();
    if lambda > 0.0 {
        solve_left_hpd(&add_ridge(gram, lambda), &rhs)
    } else {
        Ok(hermitian_pinv(&gram, PINV_REL_TOL) * rhs)
    }
}

/// Minimizer of `G` over `f(U)` with `V` and `X` fixed.
pub fn update_factor_u(pair: &FactorPair, x: &QuaternionMatrix, lambda: f64) -> Result<AdjointMatrix> {
    structure_project(&update_factor_u_raw(pair, x, lambda)?)
}

/// Minimizer of `G` over `f(V)` with `U` and `X` fixed.
pub fn update_factor_v(pair: &FactorPair, x: &QuaternionMatrix, lambda: f64) -> Result<AdjointMatrix> {
    structure_project(&update_factor_v_raw(pair, x, lambda)?)
}

/// Minimizer of `G` over `X` subject to `P_Ω(X - T) = 0`: observed entries
/// are copied from `T`, missing ones from the low-rank product.
pub fn update_completion(pair: &FactorPair, t: &QuaternionMatrix, omega: &ObservationMask) -> Result<QuaternionMatrix> {
    check_shapes(pair, t)?;
    if omega.dims() != t.shape() {
        return Err(dim_err("mask and data differ in shape"));
    }
    let low_rank = adjoint_inverse(&pair.u.mul(&pair.v)?);
    let (m, n) = t.shape();
    let flags = omega.as_slice();
    let planes = std::array::from_fn(|l| {
        t.plane(l)
            .iter()
            .zip(low_rank.plane(l))
            .zip(flags)
            .map(|((&obs, &fill), &known)| if known { obs } else { fill })
            .collect()
    });
    QuaternionMatrix::from_planes(m, n, planes)
}

/// Frobenius norms of the two stationarity conditions
/// `(f(U)f(V) - f(X)) f(V)ᴴ + λ f(U)` and `f(U)ᴴ (f(U)f(V) - f(X)) + λ f(V)`.
pub fn kkt_residuals(pair: &FactorPair, x: &QuaternionMatrix, lambda: f64) -> Result<(f64, f64)> {
    check_shapes(pair, x)?;
    let residual = pair.u.mul(&pair.v)?.sub(&adjoint(x))?;
    let ru = residual.mul(&pair.v.adjoint_transpose())?.add(&pair.u.scale(lambda))?;
    let rv = pair.u.adjoint_transpose().mul(&residual)?.add(&pair.v.scale(lambda))?;
    Ok((ru.frobenius_norm(), rv.frobenius_norm()))
}
