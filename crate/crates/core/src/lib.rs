//! Low-rank quaternion matrix completion for color images.
//!
//! A color image is encoded as a pure quaternion matrix (`r i + g j + b k`
//! per pixel). Missing pixels are recovered by alternating regularized
//! least-squares updates of a low-rank factorization carried out on the
//! complex adjoint representation, with a rank-decreasing heuristic that
//! estimates the rank on the fly.
//!
//! Module map:
//! - [`quaternion`], [`qmatrix`], [`adjoint`], [`qsvd`]: the algebra.
//! - [`solver`]: the completion algorithm.
//! - [`imaging`]: image codec, observation masks, projections.
//! - [`metrics`]: RSE, PSNR, SSIM and FSIM.

pub mod adjoint;
pub mod error;
pub mod imaging;
pub mod linalg;
pub mod metrics;
pub mod qmatrix;
pub mod qsvd;
pub mod quaternion;
pub mod solver;

pub use adjoint::{adjoint, adjoint_inverse, qmat_inverse, qmat_mul, structure_project, AdjointMatrix, CMatrix};
pub use error::{Error, Result};
pub use imaging::{ColorImage, ObservationMask};
pub use qmatrix::{frobenius_norm, QuaternionMatrix};
pub use qsvd::{qrank, qsvd, QsvdResult, DEFAULT_RANK_TOL};
pub use quaternion::{quat_conj, quat_modulus, quat_mul, Quaternion};
pub use solver::{solve, solve_observed, FactorPair, SolveOutput, SolverConfig, SolverTrace};
