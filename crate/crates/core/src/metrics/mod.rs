//! Image quality indexes between a recovered image `X` and a reference `T`.
//!
//! All functions are pure. Results that would be infinite for identical
//! inputs are clamped to [`RSE_FLOOR_DB`] / [`PSNR_CAP_DB`] so reports stay
//! finite.

mod fsim;
mod ssim;

use serde::Serialize;

pub use fsim::{fsim, phase_congruency, FsimParams};
pub use ssim::ssim;

use crate::error::{dim_err, Error, Result};
use crate::imaging::ColorImage;
use crate::qmatrix::QuaternionMatrix;

/// Reported RSE when `X = T`.
pub const RSE_FLOOR_DB: f64 = -300.0;
/// Reported PSNR when `X = T`.
pub const PSNR_CAP_DB: f64 = 300.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsConfig {
    /// Dynamic range `L` of the pixel values.
    pub peakval: f64,
    pub ssim_window: usize,
    pub ssim_sigma: f64,
    pub fsim: FsimParams,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            peakval: 255.0,
            ssim_window: 11,
            ssim_sigma: 1.5,
            fsim: FsimParams::default(),
        }
    }
}

impl MetricsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.peakval > 0.0) || !self.peakval.is_finite() {
            return Err(Error::Config(format!("peakval must be positive, got {}", self.peakval)));
        }
        if self.ssim_window % 2 == 0 {
            return Err(Error::Config(format!("SSIM window must be odd, got {}", self.ssim_window)));
        }
        if !(self.ssim_sigma > 0.0) {
            return Err(Error::Config("SSIM sigma must be positive".into()));
        }
        self.fsim.validate()
    }

    pub fn c1(&self) -> f64 {
        (0.01 * self.peakval).powi(2)
    }

    pub fn c2(&self) -> f64 {
        (0.03 * self.peakval).powi(2)
    }
}

/// All four indexes at once.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QualityReport {
    pub rse: f64,
    pub psnr: f64,
    pub ssim: f64,
    pub fsim: f64,
}

pub fn evaluate(x: &ColorImage, t: &ColorImage, cfg: &MetricsConfig) -> Result<QualityReport> {
    Ok(QualityReport {
        rse: rse(x, t)?,
        psnr: psnr(x, t, cfg)?,
        ssim: ssim(x, t, cfg)?,
        fsim: fsim(x, t, cfg)?,
    })
}

pub(crate) fn same_dims(x: &ColorImage, t: &ColorImage) -> Result<()> {
    if x.dims() != t.dims() {
        return Err(dim_err(format!(
            "images differ in size: {}x{} vs {}x{}",
            x.height(),
            x.width(),
            t.height(),
            t.width()
        )));
    }
    Ok(())
}

fn all_values(img: &ColorImage) -> impl Iterator<Item = f64> + '_ {
    (0..3).flat_map(move |c| img.channel(c).iter().copied())
}

fn rse_from_norms(diff: f64, reference: f64) -> Result<f64> {
    if reference == 0.0 {
        return Err(Error::Input("relative error is undefined for an all-zero reference".into()));
    }
    if diff == 0.0 {
        return Ok(RSE_FLOOR_DB);
    }
    Ok((10.0 * (diff / reference).log10()).max(RSE_FLOOR_DB))
}

/// `10 log10(|X - T|_F / |T|_F)`. Note the norm ratio is not squared.
pub fn rse(x: &ColorImage, t: &ColorImage) -> Result<f64> {
    same_dims(x, t)?;
    let diff: f64 = all_values(x).zip(all_values(t)).map(|(a, b)| (a - b) * (a - b)).sum();
    let reference: f64 = all_values(t).map(|v| v * v).sum();
    rse_from_norms(diff.sqrt(), reference.sqrt())
}

/// [`rse`] on quaternion matrices (all four components).
pub fn rse_matrix(x: &QuaternionMatrix, t: &QuaternionMatrix) -> Result<f64> {
    if x.shape() != t.shape() {
        return Err(dim_err("matrices differ in shape"));
    }
    rse_from_norms(x.sub(t)?.frobenius_norm(), t.frobenius_norm())
}

/// `10 log10(peak² / MSE)` with the MSE over all `3MN` values.
pub fn psnr(x: &ColorImage, t: &ColorImage, cfg: &MetricsConfig) -> Result<f64> {
    same_dims(x, t)?;
    cfg.validate()?;
    let (h, w) = x.dims();
    let sse: f64 = all_values(x).zip(all_values(t)).map(|(a, b)| (a - b) * (a - b)).sum();
    if sse == 0.0 {
        return Ok(PSNR_CAP_DB);
    }
    let mse = sse / (3 * h * w) as f64;
    Ok((10.0 * (cfg.peakval * cfg.peakval / mse).log10()).min(PSNR_CAP_DB))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noisy(base: &ColorImage, amp: f64, seed: u64) -> ColorImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise: [Vec<f64>; 3] =
            std::array::from_fn(|_| (0..base.height() * base.width()).map(|_| rng.random_range(-1.0..1.0)).collect());
        let ch = std::array::from_fn(|c| base.channel(c).iter().zip(&noise[c]).map(|(v, n)| v + amp * n).collect());
        ColorImage::new(base.height(), base.width(), ch).unwrap()
    }

    fn textured(h: usize, w: usize) -> ColorImage {
        let ch = std::array::from_fn(|c| {
            (0..h * w)
                .map(|i| {
                    let (r, col) = ((i / w) as f64, (i % w) as f64);
                    128.0 + 60.0 * (0.3 * r + 0.1 * c as f64).sin() * (0.2 * col).cos() + 30.0 * ((r * col) / 50.0).sin()
                })
                .collect()
        });
        ColorImage::new(h, w, ch).unwrap()
    }

    #[test]
    fn rse_of_ten_percent_offset() {
        let t = ColorImage::filled(2, 2, [1.0; 3]).unwrap();
        let x = t.map(|v| v + 0.1).unwrap();
        assert!((rse(&x, &t).unwrap() + 10.0).abs() < 1e-9);
        assert_eq!(rse(&t, &t).unwrap(), RSE_FLOOR_DB);
    }

    #[test]
    fn rse_rejects_zero_reference_and_mismatch() {
        let z = ColorImage::filled(2, 2, [0.0; 3]).unwrap();
        assert!(matches!(rse(&z, &z), Err(Error::Input(_))));
        let a = ColorImage::filled(2, 3, [1.0; 3]).unwrap();
        assert!(matches!(rse(&a, &ColorImage::filled(3, 2, [1.0; 3]).unwrap()), Err(Error::Dimension(_))));
    }

    #[test]
    fn psnr_of_constant_offset() {
        let t = ColorImage::filled(4, 5, [100.0, 20.0, 200.0]).unwrap();
        let x = t.map(|v| v + 16.0).unwrap();
        let expected = 10.0 * (65025.0f64 / 256.0).log10();
        let got = psnr(&x, &t, &MetricsConfig::default()).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 24.0486).abs() < 1e-3);
        assert_eq!(psnr(&t, &t, &MetricsConfig::default()).unwrap(), PSNR_CAP_DB);
    }

    #[test]
    fn rse_and_psnr_move_together() {
        let t = textured(24, 24);
        let cfg = MetricsConfig::default();
        let mut last = (f64::NEG_INFINITY, f64::INFINITY);
        for amp in [1.0, 4.0, 16.0, 40.0] {
            let x = noisy(&t, amp, 5);
            let pair = (rse(&x, &t).unwrap(), psnr(&x, &t, &cfg).unwrap());
            assert!(pair.0 > last.0 && pair.1 < last.1);
            last = pair;
        }
    }

    #[test]
    fn rse_matrix_matches_image_rse() {
        let t = textured(6, 7);
        let x = noisy(&t, 3.0, 1);
        let q = |img: &ColorImage| crate::imaging::encode_image(img);
        let a = rse(&x, &t).unwrap();
        let b = rse_matrix(&q(&x), &q(&t)).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn noise_degrades_psnr_and_ssim() {
        let t = textured(40, 40);
        let cfg = MetricsConfig::default();
        let scores: Vec<(f64, f64)> = [5.0, 15.0, 45.0]
            .iter()
            .map(|&a| {
                let x = noisy(&t, a, 9);
                (psnr(&x, &t, &cfg).unwrap(), ssim(&x, &t, &cfg).unwrap())
            })
            .collect();
        for w in scores.windows(2) {
            assert!(w[1].0 < w[0].0);
            assert!(w[1].1 <= w[0].1);
        }
    }

    #[test]
    fn config_validation() {
        assert!(MetricsConfig::default().validate().is_ok());
        assert!(MetricsConfig { peakval: 0.0, ..Default::default() }.validate().is_err());
        assert!(MetricsConfig { ssim_window: 10, ..Default::default() }.validate().is_err());
        let c = MetricsConfig::default();
        assert!((c.c1() - 6.5025).abs() < 1e-12);
        assert!((c.c2() - 58.5225).abs() < 1e-12);
    }
}
