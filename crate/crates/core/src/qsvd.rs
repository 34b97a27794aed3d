//! Quaternion singular value decomposition through the complex adjoint.
//!
//! For `C = f(Q)` the antilinear map `J(x; y) = (-conj(y); conj(x))` commutes
//! with `C` and `Cᴴ`, so every singular triple `(s, l, r)` of `C` has a
//! partner `(s, Jl, Jr)` with `Jl ⟂ l`. Singular values therefore come in
//! pairs, and a complex vector `v = (x; y)` of length `2M` is the first
//! column of the adjoint of the quaternion column `x - conj(y) j`.
//!
//! Inside a (near-)degenerate cluster the complex SVD returns an arbitrary
//! unitary mix of the paired vectors, so quaternion singular vectors are
//! extracted with a pivoted Gram-Schmidt that accepts `v` and `Jv`
//! together.

use num_complex::Complex64;

use crate::adjoint::{adjoint, AdjointMatrix, CMatrix};
use crate::error::Result;
use crate::linalg::{singular_values_sorted, svd_sorted, CVector};
use crate::qmatrix::QuaternionMatrix;
use crate::quaternion::Quaternion;

/// Default relative threshold for numerical rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

// Singular values closer than this (relative to the largest) are treated as
// one cluster when pairing singular vectors.
const CLUSTER_TOL: f64 = 1e-8;

// Residual norm below which a candidate vector is considered dependent.
const DEPENDENT_TOL: f64 = 1e-6;

/// `Q = A · diag(σ) · B` with unitary `A` (M×M) and `B` (N×N).
#[derive(Clone, Debug)]
pub struct QsvdResult {
    pub left: QuaternionMatrix,
    pub singular_values: Vec<f64>,
    pub right: QuaternionMatrix,
    pub rank: usize,
}

impl QsvdResult {
    /// The `M x N` real diagonal matrix holding the singular values.
    pub fn sigma_matrix(&self) -> QuaternionMatrix {
        let diag: Vec<Quaternion> = self.singular_values.iter().map(|&s| Quaternion::real(s)).collect();
        QuaternionMatrix::diagonal(self.left.rows(), self.right.rows(), &diag)
    }

    pub fn reconstruct(&self) -> QuaternionMatrix {
        let a = adjoint(&self.left);
        let s = adjoint(&self.sigma_matrix());
        let b = adjoint(&self.right);
        crate::adjoint::adjoint_inverse(&a.mul(&s).and_then(|x| x.mul(&b)).expect("shapes agree by construction"))
    }
}

/// `J(x; y) = (-conj(y); conj(x))`.
fn j_map(v: &CVector) -> CVector {
    let h = v.len() / 2;
    CVector::from_fn(v.len(), |i, _| if i < h { -v[i + h].conj() } else { v[i - h].conj() })
}

/// Orthonormal set closed under `J`, stored as `[v1, Jv1, v2, Jv2, ...]`.
struct JBasis {
    vecs: Vec<CVector>,
}

impl JBasis {
    fn new() -> Self {
        JBasis { vecs: Vec::new() }
    }

    fn orthogonalize(&self, v: &mut CVector) {
        for u in &self.vecs {
            let proj = u.dotc(v);
            v.axpy(-proj, u, Complex64::new(1.0, 0.0));
        }
    }

    /// Accepts `v` (already orthogonal to the set) and its partner.
    fn push_pair(&mut self, mut v: CVector) -> CVector {
        // second pass for numerical orthogonality
        self.orthogonalize(&mut v);
        let n = v.norm();
        v.unscale_mut(n);
        let jv = j_map(&v);
        self.vecs.push(v.clone());
        self.vecs.push(jv);
        v
    }

    /// Pivoted extraction of up to `count` new pairs from `candidates`.
    /// Returns the accepted primary vectors in acceptance order.
    fn extract(&mut self, mut candidates: Vec<CVector>, count: usize) -> Vec<CVector> {
        for c in candidates.iter_mut() {
            self.orthogonalize(c);
        }
        let mut taken = Vec::with_capacity(count);
        let mut alive = vec![true; candidates.len()];
        while taken.len() < count {
            let best = candidates
                .iter()
                .enumerate()
                .filter(|(i, _)| alive[*i])
                .map(|(i, c)| (i, c.norm()))
                .max_by(|a, b| a.1.total_cmp(&b.1));
            let Some((idx, norm)) = best else { break };
            if norm < DEPENDENT_TOL {
                break;
            }
            alive[idx] = false;
            let v = self.push_pair(candidates[idx].unscale(norm));
            let jv = self.vecs.last().expect("just pushed").clone();
            for (i, c) in candidates.iter_mut().enumerate() {
                if alive[i] {
                    let pv = v.dotc(c);
                    c.axpy(-pv, &v, Complex64::new(1.0, 0.0));
                    let pj = jv.dotc(c);
                    c.axpy(-pj, &jv, Complex64::new(1.0, 0.0));
                }
            }
            taken.push(v);
        }
        taken
    }

    /// Fills the basis up to `half` pairs, preferring `preferred` candidates
    /// and falling back to the standard basis.
    fn complete(&mut self, preferred: Vec<CVector>, half: usize) -> Vec<CVector> {
        let mut out = Vec::new();
        let need = half.saturating_sub(self.vecs.len() / 2);
        if need == 0 {
            return out;
        }
        out.extend(self.extract(preferred, need));
        let need = half.saturating_sub(self.vecs.len() / 2);
        if need > 0 {
            let std_basis: Vec<CVector> = (0..2 * half)
                .map(|i| CVector::from_fn(2 * half, |r, _| if r == i { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }))
                .collect();
            out.extend(self.extract(std_basis, need));
        }
        out
    }
}

/// Quaternion column vectors (as complex `(x; y)` vectors) to the adjoint
/// blocks of the `half x k` quaternion matrix with those columns.
fn columns_to_adjoint(cols: &[CVector], half: usize) -> AdjointMatrix {
    let k = cols.len();
    let qa = CMatrix::from_fn(half, k, |r, c| cols[c][r]);
    let qb = CMatrix::from_fn(half, k, |r, c| -cols[c][r + half].conj());
    AdjointMatrix::from_blocks(qa, qb).expect("blocks share a shape")
}

/// Leading quaternion singular triples of a structured complex matrix.
pub(crate) struct PairedTriples {
    /// Left singular vectors, one per quaternion singular value.
    pub left: Vec<CVector>,
    pub singular_values: Vec<f64>,
    /// Right singular vectors `Cᴴ l / s`, re-orthonormalized.
    pub right: Vec<CVector>,
    pub svd_left_tail: Vec<CVector>,
    pub svd_right_tail: Vec<CVector>,
}

/// Extracts the leading `k_max` quaternion singular triples of `c = f(Q)`
/// (fewer when the matrix is rank deficient at `tol`).
pub(crate) fn paired_triples(c: &CMatrix, k_max: usize, tol: f64) -> Result<PairedTriples> {
    let svd = svd_sorted(c)?;
    let s = &svd.singular_values;
    let s1 = s.first().copied().unwrap_or(0.0);
    // one representative per pair
    let mut k = 0;
    while k < k_max && 2 * k < s.len() && s1 > 0.0 && s[2 * k] > tol * s1 {
        k += 1;
    }
    let take = (2 * k).min(s.len());

    let mut basis = JBasis::new();
    let mut left = Vec::with_capacity(k);
    let mut sigma = Vec::with_capacity(k);
    let mut start = 0;
    while start < take {
        let mut end = start + 1;
        while end < take && s[end - 1] - s[end] <= CLUSTER_TOL * s1 {
            end += 1;
        }
        let cands: Vec<CVector> = (start..end).map(|i| svd.left.column(i).into_owned()).collect();
        let want = (end - start).div_ceil(2).min(k - left.len());
        let got = basis.extract(cands, want);
        for (t, v) in got.into_iter().enumerate() {
            // values within a cluster agree to CLUSTER_TOL; use the pair mean
            let i0 = start + 2 * t;
            let sv = if i0 + 1 < end { 0.5 * (s[i0] + s[i0 + 1]) } else { s[i0.min(end - 1)] };
            left.push(v);
            sigma.push(sv);
        }
        start = end;
    }

    let ch = c.adjoint();
    let mut rbasis = JBasis::new();
    let mut right = Vec::with_capacity(left.len());
    for (l, &sv) in left.iter().zip(&sigma) {
        let w = (&ch * l).unscale(sv);
        let mut got = rbasis.extract(vec![w], 1);
        right.push(got.pop().expect("right singular vectors are independent"));
    }

    let svd_left_tail = (take..svd.left.ncols()).map(|i| svd.left.column(i).into_owned()).collect();
    let svd_right_tail = (take..svd.right_adj.nrows())
        .map(|i| svd.right_adj.row(i).adjoint())
        .collect();

    Ok(PairedTriples {
        left,
        singular_values: sigma,
        right,
        svd_left_tail,
        svd_right_tail,
    })
}

impl PairedTriples {
    /// `f(A_k Σ_k)` of shape `M x k` and `f(B_k)` of shape `k x N`.
    pub(crate) fn factors(&self, rows: usize, cols: usize) -> (AdjointMatrix, AdjointMatrix) {
        self.split(rows, cols, 1.0)
    }

    /// `f(A_k Σ_k^½)` and `f(Σ_k^½ B_k)`.
    pub(crate) fn balanced_factors(&self, rows: usize, cols: usize) -> (AdjointMatrix, AdjointMatrix) {
        self.split(rows, cols, 0.5)
    }

    // left gets Σ^p, right gets Σ^(1-p)
    fn split(&self, rows: usize, cols: usize, p: f64) -> (AdjointMatrix, AdjointMatrix) {
        let scale = |vs: &[CVector], e: f64| -> Vec<CVector> {
            vs.iter().zip(&self.singular_values).map(|(v, &s)| v.scale(s.powf(e))).collect()
        };
        let u = columns_to_adjoint(&scale(&self.left, p), rows);
        let w = columns_to_adjoint(&scale(&self.right, 1.0 - p), cols);
        (u, w.adjoint_transpose())
    }
}

/// Full QSVD. `rank` counts singular values above `tol * σ1`.
pub fn qsvd(q: &QuaternionMatrix, tol: f64) -> Result<QsvdResult> {
    let (m, n) = q.shape();
    let c = adjoint(q).to_full();
    if q.frobenius_norm() == 0.0 {
        return Ok(QsvdResult {
            left: QuaternionMatrix::identity(m),
            singular_values: Vec::new(),
            right: QuaternionMatrix::identity(n),
            rank: 0,
        });
    }
    let triples = paired_triples(&c, m.min(n), tol)?;
    let k = triples.left.len();

    let mut lbasis = JBasis::new();
    for v in &triples.left {
        lbasis.vecs.push(v.clone());
        lbasis.vecs.push(j_map(v));
    }
    let mut left_cols = triples.left.clone();
    left_cols.extend(lbasis.complete(triples.svd_left_tail.clone(), m));

    let mut rbasis = JBasis::new();
    for v in &triples.right {
        rbasis.vecs.push(v.clone());
        rbasis.vecs.push(j_map(v));
    }
    let mut right_cols = triples.right.clone();
    right_cols.extend(rbasis.complete(triples.svd_right_tail.clone(), n));

    let a = crate::adjoint::adjoint_inverse(&columns_to_adjoint(&left_cols, m));
    let w = crate::adjoint::adjoint_inverse(&columns_to_adjoint(&right_cols, n));
    Ok(QsvdResult {
        left: a,
        singular_values: triples.singular_values,
        right: w.conj_transpose(),
        rank: k,
    })
}

/// Quaternion singular values (one per adjoint pair), non-increasing.
/// Cheaper than [`qsvd`] since no vectors are formed.
pub fn quaternion_singular_values(q: &QuaternionMatrix) -> Result<Vec<f64>> {
    let s = singular_values_sorted(&adjoint(q).to_full())?;
    Ok(s.chunks(2).map(|p| p.iter().sum::<f64>() / p.len() as f64).collect())
}

/// Quaternion rank: half the numerical rank of the adjoint.
pub fn qrank(q: &QuaternionMatrix, tol: f64) -> Result<usize> {
    let s = singular_values_sorted(&adjoint(q).to_full())?;
    Ok(crate::linalg::numerical_rank(&s, tol) / 2)
}
