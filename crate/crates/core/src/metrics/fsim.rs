//! Feature similarity (FSIM) on the luminance channel.
//!
//! Phase congruency comes from a log-Gabor filter bank evaluated in the
//! frequency domain, with the usual noise compensation driven by the median
//! response of the finest scale. Gradient magnitude uses the 3x3 Scharr
//! stencil. Images larger than 256 pixels on the short side are box-filtered
//! and decimated first, as in the reference FSIM code.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use super::{same_dims, MetricsConfig};
use crate::error::{Error, Result};
use crate::imaging::ColorImage;

/// Smallest image side accepted by [`fsim`].
pub const FSIM_MIN_SIDE: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FsimParams {
    pub scales: usize,
    pub orientations: usize,
    pub min_wavelength: f64,
    pub mult: f64,
    /// Ratio of the log-Gabor bandwidth to the centre frequency.
    pub sigma_on_f: f64,
    /// Angular spacing over angular spread.
    pub d_theta_on_sigma: f64,
    /// Standard deviations of noise energy above the mean to reject.
    pub noise_k: f64,
    /// Phase congruency similarity constant.
    pub t1: f64,
    /// Gradient similarity constant.
    pub t2: f64,
}

impl Default for FsimParams {
    fn default() -> Self {
        FsimParams {
            scales: 4,
            orientations: 4,
            min_wavelength: 6.0,
            mult: 2.0,
            sigma_on_f: 0.55,
            d_theta_on_sigma: 1.2,
            noise_k: 2.0,
            t1: 0.85,
            t2: 160.0,
        }
    }
}

impl FsimParams {
    pub fn validate(&self) -> Result<()> {
        if self.scales == 0 || self.orientations == 0 {
            return Err(Error::Config("FSIM needs at least one scale and orientation".into()));
        }
        let positive = [self.min_wavelength, self.mult, self.sigma_on_f, self.d_theta_on_sigma];
        if positive.iter().any(|v| !(*v > 0.0)) || !(self.t1 > 0.0) || !(self.t2 > 0.0) {
            return Err(Error::Config("FSIM filter parameters must be positive".into()));
        }
        Ok(())
    }
}

const EPSILON: f64 = 1e-4;
const LOWPASS_CUTOFF: f64 = 0.45;
const LOWPASS_ORDER: i32 = 15;
// Empirical rescaling of the noise threshold used by the reference FSIM code.
const NOISE_DIVISOR: f64 = 1.7;

struct Fft2 {
    rows: usize,
    cols: usize,
    row_fwd: std::sync::Arc<dyn rustfft::Fft<f64>>,
    row_inv: std::sync::Arc<dyn rustfft::Fft<f64>>,
    col_fwd: std::sync::Arc<dyn rustfft::Fft<f64>>,
    col_inv: std::sync::Arc<dyn rustfft::Fft<f64>>,
}

impl Fft2 {
    fn new(rows: usize, cols: usize) -> Self {
        let mut p = FftPlanner::new();
        Fft2 {
            rows,
            cols,
            row_fwd: p.plan_fft_forward(cols),
            row_inv: p.plan_fft_inverse(cols),
            col_fwd: p.plan_fft_forward(rows),
            col_inv: p.plan_fft_inverse(rows),
        }
    }

    fn run(&self, data: &mut [Complex64], inverse: bool) {
        let (row_plan, col_plan) = if inverse {
            (&self.row_inv, &self.col_inv)
        } else {
            (&self.row_fwd, &self.col_fwd)
        };
        for row in data.chunks_exact_mut(self.cols) {
            row_plan.process(row);
        }
        let mut column = vec![Complex64::default(); self.rows];
        for c in 0..self.cols {
            for r in 0..self.rows {
                column[r] = data[r * self.cols + c];
            }
            col_plan.process(&mut column);
            for r in 0..self.rows {
                data[r * self.cols + c] = column[r];
            }
        }
        if inverse {
            let s = 1.0 / (self.rows * self.cols) as f64;
            data.iter_mut().for_each(|v| *v *= s);
        }
    }
}

/// Normalized frequency coordinates `-0.5..0.5` along one axis, before the
/// quadrant shift.
fn freq_range(n: usize) -> Vec<f64> {
    if n % 2 == 1 {
        let half = (n as f64 - 1.0) / 2.0;
        let denom = (n as f64 - 1.0).max(1.0);
        (0..n).map(|i| (i as f64 - half) / denom).collect()
    } else {
        (0..n).map(|i| (i as f64 - (n / 2) as f64) / n as f64).collect()
    }
}

/// Moves the centre of an `rows x cols` grid to the origin.
fn ifftshift(grid: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let (sr, sc) = (rows / 2, cols / 2);
    let mut out = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            out[r * cols + c] = grid[((r + sr) % rows) * cols + (c + sc) % cols];
        }
    }
    out
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Phase congruency map of a grayscale image (row-major).
pub fn phase_congruency(img: &[f64], rows: usize, cols: usize, p: &FsimParams) -> Vec<f64> {
    let n = rows * cols;
    let fft = Fft2::new(rows, cols);
    let mut spectrum: Vec<Complex64> = img.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.run(&mut spectrum, false);

    let (xr, yr) = (freq_range(cols), freq_range(rows));
    let mut radius = vec![0.0; n];
    let mut theta = vec![0.0; n];
    for r in 0..rows {
        for c in 0..cols {
            radius[r * cols + c] = xr[c].hypot(yr[r]);
            theta[r * cols + c] = (-yr[r]).atan2(xr[c]);
        }
    }
    let lowpass = ifftshift(
        &radius
            .iter()
            .map(|&rad| 1.0 / (1.0 + (rad / LOWPASS_CUTOFF).powi(2 * LOWPASS_ORDER)))
            .collect::<Vec<_>>(),
        rows,
        cols,
    );
    let mut radius = ifftshift(&radius, rows, cols);
    let theta = ifftshift(&theta, rows, cols);
    radius[0] = 1.0;

    let log_sigma = p.sigma_on_f.ln();
    let log_gabor: Vec<Vec<f64>> = (0..p.scales)
        .map(|s| {
            let fo = 1.0 / (p.min_wavelength * p.mult.powi(s as i32));
            let mut g: Vec<f64> = radius
                .iter()
                .zip(&lowpass)
                .map(|(&rad, &lp)| (-(rad / fo).ln().powi(2) / (2.0 * log_sigma * log_sigma)).exp() * lp)
                .collect();
            g[0] = 0.0;
            g
        })
        .collect();

    let theta_sigma = PI / p.orientations as f64 / p.d_theta_on_sigma;
    let mut energy_all = vec![0.0; n];
    let mut an_all = vec![0.0; n];

    for o in 0..p.orientations {
        let angle = o as f64 * PI / p.orientations as f64;
        let (sa, ca) = angle.sin_cos();
        let spread: Vec<f64> = theta
            .iter()
            .map(|&th| {
                let (st, ct) = th.sin_cos();
                let dtheta = (st * ca - ct * sa).atan2(ct * ca + st * sa).abs();
                (-dtheta * dtheta / (2.0 * theta_sigma * theta_sigma)).exp()
            })
            .collect();

        let mut sum_e = vec![0.0; n];
        let mut sum_o = vec![0.0; n];
        let mut responses = Vec::with_capacity(p.scales);
        let mut spatial_filters = Vec::with_capacity(p.scales);
        let mut finest_filter_energy = 0.0;
        for (s, gabor) in log_gabor.iter().enumerate() {
            let filter: Vec<f64> = gabor.iter().zip(&spread).map(|(g, sp)| g * sp).collect();
            if s == 0 {
                finest_filter_energy = filter.iter().map(|v| v * v).sum();
            }
            let mut spatial: Vec<Complex64> = filter.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            fft.run(&mut spatial, true);
            let root_n = (n as f64).sqrt();
            spatial_filters.push(spatial.iter().map(|v| v.re * root_n).collect::<Vec<f64>>());

            let mut eo: Vec<Complex64> = spectrum.iter().zip(&filter).map(|(v, f)| v * f).collect();
            fft.run(&mut eo, true);
            for i in 0..n {
                an_all[i] += eo[i].norm();
                sum_e[i] += eo[i].re;
                sum_o[i] += eo[i].im;
            }
            responses.push(eo);
        }

        let mut energy = vec![0.0; n];
        for i in 0..n {
            let x_energy = sum_e[i].hypot(sum_o[i]) + EPSILON;
            let (mean_e, mean_o) = (sum_e[i] / x_energy, sum_o[i] / x_energy);
            for eo in &responses {
                let (e, od) = (eo[i].re, eo[i].im);
                energy[i] += e * mean_e + od * mean_o - (e * mean_o - od * mean_e).abs();
            }
        }

        // noise statistics from the finest scale, assumed Rayleigh distributed
        let median_e2n = median(responses[0].iter().map(|v| v.norm_sqr()).collect());
        let mean_e2n = -median_e2n / 0.5f64.ln();
        let noise_power = mean_e2n / finest_filter_energy;
        let mut sum_an2 = 0.0;
        let mut sum_aiaj = 0.0;
        for i in 0..p.scales {
            sum_an2 += spatial_filters[i].iter().map(|v| v * v).sum::<f64>();
            for j in i + 1..p.scales {
                sum_aiaj += spatial_filters[i].iter().zip(&spatial_filters[j]).map(|(a, b)| a * b).sum::<f64>();
            }
        }
        let noise_energy2 = 2.0 * noise_power * sum_an2 + 4.0 * noise_power * sum_aiaj;
        let tau = (noise_energy2 / 2.0).sqrt();
        let noise_mean = tau * (PI / 2.0).sqrt();
        let noise_sigma = ((2.0 - PI / 2.0) * tau * tau).sqrt();
        let threshold = (noise_mean + p.noise_k * noise_sigma) / NOISE_DIVISOR;

        for i in 0..n {
            energy_all[i] += (energy[i] - threshold).max(0.0);
        }
    }

    energy_all.iter().zip(&an_all).map(|(e, a)| e / a).collect()
}

/// 'same'-size 2-D convolution with zero padding.
fn conv2_same(img: &[f64], rows: usize, cols: usize, kernel: &[f64], k: usize) -> Vec<f64> {
    let off = (k / 2) as isize;
    let mut out = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let mut acc = 0.0;
            for i in 0..k {
                let rr = r as isize + off - i as isize;
                if rr < 0 || rr >= rows as isize {
                    continue;
                }
                for j in 0..k {
                    let cc = c as isize + off - j as isize;
                    if cc < 0 || cc >= cols as isize {
                        continue;
                    }
                    acc += img[rr as usize * cols + cc as usize] * kernel[i * k + j];
                }
            }
            out[r * cols + c] = acc;
        }
    }
    out
}

fn gradient_magnitude(img: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let dx = [3.0, 0.0, -3.0, 10.0, 0.0, -10.0, 3.0, 0.0, -3.0].map(|v| v / 16.0);
    let dy = [3.0, 10.0, 3.0, 0.0, 0.0, 0.0, -3.0, -10.0, -3.0].map(|v| v / 16.0);
    let gx = conv2_same(img, rows, cols, &dx, 3);
    let gy = conv2_same(img, rows, cols, &dy, 3);
    gx.iter().zip(&gy).map(|(a, b)| a.hypot(*b)).collect()
}

/// Box filter of width `f` followed by keeping every `f`-th sample.
fn downsample(img: &[f64], rows: usize, cols: usize, f: usize) -> (Vec<f64>, usize, usize) {
    if f <= 1 {
        return (img.to_vec(), rows, cols);
    }
    let kernel = vec![1.0 / (f * f) as f64; f * f];
    let smooth = conv2_same(img, rows, cols, &kernel, f);
    let (nr, nc) = (rows.div_ceil(f), cols.div_ceil(f));
    let out = (0..nr)
        .flat_map(|r| (0..nc).map(move |c| (r, c)))
        .map(|(r, c)| smooth[r * f * cols + c * f])
        .collect();
    (out, nr, nc)
}

/// FSIM between the luminance channels of `x` and `t`.
pub fn fsim(x: &ColorImage, t: &ColorImage, cfg: &MetricsConfig) -> Result<f64> {
    same_dims(x, t)?;
    cfg.validate()?;
    let (rows, cols) = x.dims();
    if rows.min(cols) < FSIM_MIN_SIDE {
        return Err(Error::Input(format!(
            "FSIM needs images at least {FSIM_MIN_SIDE}x{FSIM_MIN_SIDE}, got {rows}x{cols}"
        )));
    }
    let f = ((rows.min(cols) as f64 / 256.0).round() as usize).max(1);
    let (y1, r, c) = downsample(&x.luminance(), rows, cols, f);
    let (y2, _, _) = downsample(&t.luminance(), rows, cols, f);

    let p = &cfg.fsim;
    let pc1 = phase_congruency(&y1, r, c, p);
    let pc2 = phase_congruency(&y2, r, c, p);
    let g1 = gradient_magnitude(&y1, r, c);
    let g2 = gradient_magnitude(&y2, r, c);

    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..r * c {
        let s_pc = (2.0 * pc1[i] * pc2[i] + p.t1) / (pc1[i] * pc1[i] + pc2[i] * pc2[i] + p.t1);
        let s_g = (2.0 * g1[i] * g2[i] + p.t2) / (g1[i] * g1[i] + g2[i] * g2[i] + p.t2);
        let pcm = pc1[i].max(pc2[i]);
        num += s_pc * s_g * pcm;
        den += pcm;
    }
    if den == 0.0 {
        // no phase-congruent features anywhere: nothing to disagree on
        return Ok(1.0);
    }
    Ok(num / den)
}
