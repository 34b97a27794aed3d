//! Low-rank quaternion matrix completion by alternating minimization.
//!
//! Each iteration updates `f(U)`, then `f(V)`, then the completed matrix
//! `X`, and finally checks the eigenvalue-gap statistic of `f(U)ᴴ f(U)`,
//! cutting the working rank when the statistic crosses
//! [`SolverConfig::mu_threshold`]. Iteration stops when the norm of the
//! filled-in entries changes by less than the tolerance between two
//! consecutive iterations.

mod rank;
mod updates;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use rank::{factor_gap, rank_gap_statistic, shrink_rank, RankGapReport, EIGEN_FLOOR};
pub use updates::{
    kkt_residuals, objective, update_completion, update_factor_u, update_factor_v, zero_fill, PINV_REL_TOL,
};

use crate::adjoint::{adjoint, AdjointMatrix};
use crate::error::{dim_err, Error, Result};
use crate::imaging::{project_omega, ObservationMask};
use crate::qmatrix::QuaternionMatrix;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Regularization weight λ.
    pub lambda: f64,
    /// Initial complex rank of the factorization; must be even.
    pub init_rank: usize,
    /// Stopping threshold on `|ε^τ - ε^{τ+1}|`.
    pub tol: f64,
    /// Scale `tol` by `|P_Ω(T)|_F`.
    pub relative_tol: bool,
    pub max_iters: usize,
    /// Rank is cut when the gap statistic reaches this value.
    pub mu_threshold: f64,
    /// Seed for the random initial factors.
    pub seed: u64,
    pub allow_multiple_rank_drops: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            lambda: 0.5,
            init_rank: 50,
            tol: 1e-3,
            relative_tol: false,
            max_iters: 1000,
            mu_threshold: 10.0,
            seed: 0,
            allow_multiple_rank_drops: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, rows: usize, cols: usize) -> Result<()> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::Config(format!("lambda must be finite and >= 0, got {}", self.lambda)));
        }
        if self.init_rank == 0 || self.init_rank % 2 != 0 {
            return Err(Error::Config(format!(
                "initial rank must be a positive even number, got {}",
                self.init_rank
            )));
        }
        if self.init_rank > 2 * rows.min(cols) {
            return Err(Error::Config(format!(
                "initial rank {} exceeds 2·min({rows}, {cols})",
                self.init_rank
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tolerance must be > 0, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be positive".into()));
        }
        if self.mu_threshold.is_nan() {
            return Err(Error::Config("mu threshold is NaN".into()));
        }
        Ok(())
    }
}

/// `f(U)` (logical `2M x r`) and `f(V)` (logical `r x 2N`).
#[derive(Clone, Debug, PartialEq)]
pub struct FactorPair {
    pub u: AdjointMatrix,
    pub v: AdjointMatrix,
}

impl FactorPair {
    pub fn new(u: AdjointMatrix, v: AdjointMatrix) -> Result<Self> {
        if u.cols() != v.rows() {
            return Err(dim_err(format!(
                "inner dimensions {} and {} differ",
                u.cols(),
                v.rows()
            )));
        }
        Ok(FactorPair { u, v })
    }

    /// Adjoints of quaternion factors with i.i.d. N(0, 1) components.
    pub fn random(rows: usize, cols: usize, complex_rank: usize, seed: u64) -> Result<Self> {
        if complex_rank % 2 != 0 {
            return Err(Error::Config("complex rank must be even".into()));
        }
        let k = complex_rank / 2;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = QuaternionMatrix::random_normal(rows, k, &mut rng);
        let v = QuaternionMatrix::random_normal(k, cols, &mut rng);
        FactorPair::new(adjoint(&u), adjoint(&v))
    }

    /// Balanced factorization `U = A Σ^½`, `V = Σ^½ B` of `x` from its
    /// QSVD, keeping the singular values above `tol · σ1`. For this pair
    /// `½(|f(U)|² + |f(V)|²)` equals the nuclear norm of `f(x)`.
    pub fn balanced(x: &QuaternionMatrix, tol: f64) -> Result<Self> {
        let (m, n) = x.shape();
        let triples = crate::qsvd::paired_triples(&adjoint(x).to_full(), m.min(n), tol)?;
        let (u, v) = triples.balanced_factors(m, n);
        FactorPair::new(u, v)
    }

    /// Complex rank `r` (twice the quaternion rank).
    pub fn rank(&self) -> usize {
        2 * self.u.cols()
    }

    /// `f⁻¹(f(U) f(V))`.
    pub fn product(&self) -> Result<QuaternionMatrix> {
        Ok(crate::adjoint::adjoint_inverse(&self.u.mul(&self.v)?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Tolerance,
    MaxIters,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankDrop {
    /// 1-based iteration at which the cut happened.
    pub iteration: usize,
    pub from: usize,
    pub to: usize,
    pub mu: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolverTrace {
    /// `G` at the initial point.
    pub initial_objective: f64,
    /// `G` after the `X` update of each iteration.
    pub objective: Vec<f64>,
    /// `ε^τ = |P_Ωᶜ(X^τ)|_F`, starting with `ε^0`.
    pub epsilon: Vec<f64>,
    /// Complex rank at the end of each iteration.
    pub ranks: Vec<usize>,
    /// Gap statistic evaluated at each iteration (0 once checks stop).
    pub mu: Vec<f64>,
    pub rank_drops: Vec<RankDrop>,
    pub iteration_seconds: Vec<f64>,
    pub termination: Termination,
}

impl SolverTrace {
    pub fn iterations(&self) -> usize {
        self.objective.len()
    }

    pub fn final_rank(&self) -> usize {
        self.ranks.last().copied().unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutput {
    pub x: QuaternionMatrix,
    pub factors: FactorPair,
    pub trace: SolverTrace,
}

/// State handed to a [`solve_observed`] callback at the end of each iteration.
pub struct IterationState<'a> {
    pub iteration: usize,
    pub x: &'a QuaternionMatrix,
    pub factors: &'a FactorPair,
    pub objective: f64,
    pub epsilon: f64,
}

/// Completes `t` from its entries on `omega`.
pub fn solve(t: &QuaternionMatrix, omega: &ObservationMask, cfg: &SolverConfig) -> Result<SolveOutput> {
    solve_observed(t, omega, cfg, |_| {})
}

/// [`solve`] with a callback invoked after every iteration.
pub fn solve_observed(
    t: &QuaternionMatrix,
    omega: &ObservationMask,
    cfg: &SolverConfig,
    mut observer: impl FnMut(&IterationState),
) -> Result<SolveOutput> {
    let (m, n) = t.shape();
    if omega.dims() != (m, n) {
        return Err(dim_err(format!(
            "mask is {}x{} but the data is {m}x{n}",
            omega.rows(),
            omega.cols()
        )));
    }
    cfg.validate(m, n)?;
    if omega.count() == 0 {
        return Err(Error::Config("no observed entries".into()));
    }
    if !t.is_finite() {
        return Err(Error::Input("data contains non-finite values".into()));
    }

    let observed = project_omega(t, omega)?;
    let missing = omega.complement();
    let threshold = if cfg.relative_tol {
        cfg.tol * observed.frobenius_norm()
    } else {
        cfg.tol
    };

    let mut pair = FactorPair::random(m, n, cfg.init_rank, cfg.seed)?;
    let mut x = observed.clone();
    let mut eps = project_omega(&x, &missing)?.frobenius_norm();

    let mut trace = SolverTrace {
        initial_objective: objective(&pair, &x, cfg.lambda)?,
        objective: Vec::new(),
        epsilon: vec![eps],
        ranks: Vec::new(),
        mu: Vec::new(),
        rank_drops: Vec::new(),
        iteration_seconds: Vec::new(),
        termination: Termination::MaxIters,
    };
    let mut checking_rank = true;

    for iter in 1..=cfg.max_iters {
        let started = Instant::now();

        let u = update_factor_u(&pair, &x, cfg.lambda)?;
        pair = FactorPair::new(u, pair.v)?;
        let v = update_factor_v(&pair, &x, cfg.lambda)?;
        pair = FactorPair::new(pair.u, v)?;
        x = update_completion(&pair, &observed, omega)?;
        if !x.is_finite() {
            return Err(Error::Numerical(format!("iterate became non-finite at iteration {iter}")));
        }
        trace.objective.push(objective(&pair, &x, cfg.lambda)?);

        let mut mu = 0.0;
        if checking_rank {
            let gap = factor_gap(&pair)?;
            mu = gap.mu;
            let target = gap.even_gap();
            if gap.mu >= cfg.mu_threshold && target > 0 && target < pair.rank() {
                let from = pair.rank();
                pair = shrink_rank(&pair, target)?;
                log::debug!("iteration {iter}: rank {from} -> {} (mu = {:.3})", pair.rank(), gap.mu);
                trace.rank_drops.push(RankDrop {
                    iteration: iter,
                    from,
                    to: pair.rank(),
                    mu: gap.mu,
                });
                if !cfg.allow_multiple_rank_drops {
                    checking_rank = false;
                }
            }
        }
        trace.mu.push(mu);
        trace.ranks.push(pair.rank());

        let next_eps = project_omega(&x, &missing)?.frobenius_norm();
        trace.epsilon.push(next_eps);
        trace.iteration_seconds.push(started.elapsed().as_secs_f64());
        observer(&IterationState {
            iteration: iter,
            x: &x,
            factors: &pair,
            objective: trace.objective[iter - 1],
            epsilon: next_eps,
        });
        let converged = (eps - next_eps).abs() < threshold;
        eps = next_eps;
        if converged {
            trace.termination = Termination::Tolerance;
            break;
        }
    }

    Ok(SolveOutput { x, factors: pair, trace })
}
