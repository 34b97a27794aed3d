//! Mean SSIM with a Gaussian window over the 'valid' region, averaged over
//! the three channels. Uses the two-term form
//! `(2 μx μt + C1)(2 σxt + C2) / ((μx² + μt² + C1)(σx² + σt² + C2))`.

use super::{same_dims, MetricsConfig};
use crate::error::{Error, Result};
use crate::imaging::ColorImage;

fn gaussian_window(size: usize, sigma: f64) -> Vec<f64> {
    let half = (size / 2) as f64;
    let mut w: Vec<f64> = (0..size * size)
        .map(|i| {
            let (y, x) = ((i / size) as f64 - half, (i % size) as f64 - half);
            (-(x * x + y * y) / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// Weighted local sums over every fully contained window position.
fn filter_valid(img: &[f64], h: usize, w: usize, win: &[f64], size: usize) -> Vec<f64> {
    let (oh, ow) = (h - size + 1, w - size + 1);
    let mut out = vec![0.0; oh * ow];
    for r in 0..oh {
        for c in 0..ow {
            let mut acc = 0.0;
            for dy in 0..size {
                let row = &img[(r + dy) * w + c..(r + dy) * w + c + size];
                let wrow = &win[dy * size..(dy + 1) * size];
                acc += row.iter().zip(wrow).map(|(a, b)| a * b).sum::<f64>();
            }
            out[r * ow + c] = acc;
        }
    }
    out
}

fn channel_ssim(x: &[f64], t: &[f64], h: usize, w: usize, win: &[f64], cfg: &MetricsConfig) -> f64 {
    let size = cfg.ssim_window;
    let f = |v: &[f64]| filter_valid(v, h, w, win, size);
    let prod = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).collect::<Vec<_>>();
    let (mx, mt) = (f(x), f(t));
    let (sxx, stt, sxt) = (f(&prod(x, x)), f(&prod(t, t)), f(&prod(x, t)));
    let (c1, c2) = (cfg.c1(), cfg.c2());
    let n = mx.len();
    let total: f64 = (0..n)
        .map(|i| {
            let (mxx, mtt, mxt) = (mx[i] * mx[i], mt[i] * mt[i], mx[i] * mt[i]);
            let (vx, vt, cov) = (sxx[i] - mxx, stt[i] - mtt, sxt[i] - mxt);
            ((2.0 * mxt + c1) * (2.0 * cov + c2)) / ((mxx + mtt + c1) * (vx + vt + c2))
        })
        .sum();
    total / n as f64
}

pub fn ssim(x: &ColorImage, t: &ColorImage, cfg: &MetricsConfig) -> Result<f64> {
    same_dims(x, t)?;
    cfg.validate()?;
    let (h, w) = x.dims();
    if h.min(w) < cfg.ssim_window {
        return Err(Error::Input(format!(
            "SSIM needs images at least {0}x{0}, got {h}x{w}",
            cfg.ssim_window
        )));
    }
    let win = gaussian_window(cfg.ssim_window, cfg.ssim_sigma);
    let sum: f64 = (0..3).map(|c| channel_ssim(x.channel(c), t.channel(c), h, w, &win, cfg)).sum();
    Ok(sum / 3.0)
}
