//! Rank-decreasing estimation.
//!
//! The eigenvalues `d_1 >= ... >= d_r` of `f(U)ᴴ f(U)` are turned into the
//! quotient sequence `d̂_m = d_m / d_{m+1}`. With `p = argmax d̂` the
//! statistic `μ = (r - 1) d̂_p / Σ_{m≠p} d̂_m` measures how much the largest
//! drop stands out; a large `μ` means the working rank can be cut to `p`.

use serde::Serialize;

use super::FactorPair;
use crate::error::Result;
use crate::linalg::hermitian_eigenvalues_desc;
use crate::qsvd::paired_triples;

/// Eigenvalues below this fraction of the largest are ignored.
pub const EIGEN_FLOOR: f64 = 1e-12;

// Relative threshold below which product singular values are treated as
// zero when re-factoring after a rank cut.
const SHRINK_RANK_TOL: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankGapReport {
    /// Usable eigenvalues, non-increasing.
    pub eigenvalues: Vec<f64>,
    /// `d_m / d_{m+1}`.
    pub quotients: Vec<f64>,
    /// 1-based position of the largest quotient, i.e. the number of
    /// eigenvalues before the drop. Zero when no drop can be computed.
    pub gap_index: usize,
    pub mu: f64,
}

impl RankGapReport {
    fn no_drop(eigenvalues: Vec<f64>) -> Self {
        RankGapReport {
            eigenvalues,
            quotients: Vec::new(),
            gap_index: 0,
            mu: 0.0,
        }
    }

    /// The gap index rounded up to an even complex rank.
    pub fn even_gap(&self) -> usize {
        self.gap_index + self.gap_index % 2
    }
}

/// Gap statistic of a non-increasing eigenvalue sequence.
pub fn rank_gap_statistic(d: &[f64]) -> RankGapReport {
    let d1 = d.first().copied().unwrap_or(0.0);
    if !(d1 > 0.0) {
        return RankGapReport::no_drop(Vec::new());
    }
    let usable: Vec<f64> = d.iter().copied().take_while(|&v| v >= EIGEN_FLOOR * d1).collect();
    if usable.len() < 2 {
        return RankGapReport::no_drop(usable);
    }
    let quotients: Vec<f64> = usable.windows(2).map(|w| w[0] / w[1]).collect();
    // first maximum on ties
    let (p0, &best) = quotients
        .iter()
        .enumerate()
        .fold((0, &quotients[0]), |acc, (i, q)| if *q > *acc.1 { (i, q) } else { acc });
    let rest: f64 = quotients.iter().enumerate().filter(|&(i, _)| i != p0).map(|(_, q)| q).sum();
    let r = usable.len() as f64;
    let mu = if rest > 0.0 { (r - 1.0) * best / rest } else { f64::INFINITY };
    RankGapReport {
        eigenvalues: usable,
        quotients,
        gap_index: p0 + 1,
        mu,
    }
}

/// Gap statistic of the current left factor's Gram matrix.
pub fn factor_gap(pair: &FactorPair) -> Result<RankGapReport> {
    let gram = pair.u.adjoint_transpose().mul(&pair.u)?.to_full();
    Ok(rank_gap_statistic(&hermitian_eigenvalues_desc(&gram)))
}

/// Cuts the factorization to complex rank `p` (rounded up to even).
///
/// The product `f(U) f(V)` is re-factored from its SVD as `f(U) = L_p Σ_p`,
/// `f(V) = (Rᴴ)_p`, with paired singular vectors arranged so that both
/// factors keep the adjoint structure. `p >= r` leaves the pair unchanged.
pub fn shrink_rank(pair: &FactorPair, p: usize) -> Result<FactorPair> {
    let p_even = p + p % 2;
    if p_even == 0 || p_even >= pair.rank() {
        return Ok(pair.clone());
    }
    let product = pair.u.mul(&pair.v)?;
    let triples = paired_triples(&product.to_full(), p_even / 2, SHRINK_RANK_TOL)?;
    let (u, v) = triples.factors(pair.u.rows(), pair.v.cols());
    FactorPair::new(u, v)
}
