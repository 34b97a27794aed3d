//! Dense quaternion matrices.
//!
//! Storage is component-major: four real planes (`Q0..Q3`), each row-major,
//! so `Q = Q0 + Q1 i + Q2 j + Q3 k`. Splitting into the complex pair
//! `Qa = Q0 + Q1 i`, `Qb = Q2 + Q3 i` is then a plane-wise zip.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{dim_err, Result};
use crate::quaternion::Quaternion;

#[derive(Clone, Debug, PartialEq)]
pub struct QuaternionMatrix {
    rows: usize,
    cols: usize,
    planes: [Vec<f64>; 4],
}

impl QuaternionMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let n = rows * cols;
        QuaternionMatrix {
            rows,
            cols,
            planes: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Quaternion::ONE);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    /// Builds a matrix from four row-major planes of length `rows * cols`.
    pub fn from_planes(rows: usize, cols: usize, planes: [Vec<f64>; 4]) -> Result<Self> {
        if planes.iter().any(|p| p.len() != rows * cols) {
            return Err(dim_err(format!(
                "planes must each hold {rows}x{cols} = {} values",
                rows * cols
            )));
        }
        Ok(QuaternionMatrix { rows, cols, planes })
    }

    /// Diagonal matrix with the given quaternions on the main diagonal.
    pub fn diagonal(rows: usize, cols: usize, diag: &[Quaternion]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, &d) in diag.iter().enumerate().take(rows.min(cols)) {
            m.set(i, i, d);
        }
        m
    }

    /// Entries with all four components drawn i.i.d. from N(0, 1).
    pub fn random_normal<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Self::from_fn(rows, cols, |_, _| {
            Quaternion::new(
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            )
        })
    }

    /// Product of random `rows x rank` and `rank x cols` normal factors;
    /// quaternion rank `rank` with probability one.
    pub fn random_low_rank<R: Rng + ?Sized>(rows: usize, cols: usize, rank: usize, rng: &mut R) -> Self {
        let a = Self::random_normal(rows, rank, rng);
        let b = Self::random_normal(rank, cols, rng);
        crate::adjoint::qmat_mul(&a, &b).expect("inner dimensions agree")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    fn idx(&self, r: usize, c: usize) -> usize {
        debug_assert!(r < self.rows && c < self.cols);
        r * self.cols + c
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Quaternion {
        let i = self.idx(r, c);
        Quaternion::new(
            self.planes[0][i],
            self.planes[1][i],
            self.planes[2][i],
            self.planes[3][i],
        )
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, q: Quaternion) {
        let i = self.idx(r, c);
        self.planes[0][i] = q.q0;
        self.planes[1][i] = q.q1;
        self.planes[2][i] = q.q2;
        self.planes[3][i] = q.q3;
    }

    /// Row-major plane of component `l` (0 = real, 1 = i, 2 = j, 3 = k).
    pub fn plane(&self, l: usize) -> &[f64] {
        &self.planes[l]
    }

    pub fn into_planes(self) -> [Vec<f64>; 4] {
        self.planes
    }

    /// True iff every entry has zero real part.
    pub fn is_pure(&self) -> bool {
        self.planes[0].iter().all(|&v| v == 0.0)
    }

    /// Largest magnitude of a real component.
    pub fn real_residue(&self) -> f64 {
        self.planes[0].iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.planes.iter().all(|p| p.iter().all(|v| v.is_finite()))
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.planes.iter().flatten().map(|v| v * v).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    /// Quaternion conjugate transpose `Qᴴ`.
    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_planes(|_, v| v * s)
    }

    fn map_planes(&self, f: impl Fn(usize, f64) -> f64) -> Self {
        let planes = std::array::from_fn(|l| self.planes[l].iter().map(|&v| f(l, v)).collect());
        QuaternionMatrix {
            rows: self.rows,
            cols: self.cols,
            planes,
        }
    }

    fn zip_planes(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(dim_err(format!(
                "{:?} vs {:?} in elementwise operation",
                self.shape(),
                other.shape()
            )));
        }
        let planes = std::array::from_fn(|l| {
            self.planes[l]
                .iter()
                .zip(&other.planes[l])
                .map(|(&a, &b)| f(a, b))
                .collect()
        });
        Ok(QuaternionMatrix {
            rows: self.rows,
            cols: self.cols,
            planes,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_planes(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_planes(other, |a, b| a - b)
    }

    /// Largest entrywise quaternion modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let d = self.sub(other)?;
        Ok((0..d.rows * d.cols)
            .map(|i| {
                (0..4)
                    .map(|l| d.planes[l][i] * d.planes[l][i])
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max))
    }

    /// Submatrix of the leading `rows x cols` block.
    pub fn top_left(&self, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows.min(self.rows), cols.min(self.cols), |r, c| self.get(r, c))
    }
}

/// Frobenius norm `sqrt(sum |q_mn|^2)`.
pub fn frobenius_norm(q: &QuaternionMatrix) -> f64 {
    q.frobenius_norm()
}
