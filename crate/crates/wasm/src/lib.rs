//! Browser bindings. Pixels come in as the RGBA bytes of a canvas
//! `ImageData`; alpha is ignored on input and set opaque on output.

use quatfill::imaging::{decode_image, encode_image, observed_image, sample_mask};
use quatfill::metrics::{psnr, MetricsConfig};
use quatfill::qsvd::quaternion_singular_values;
use quatfill::solver::rank_gap_statistic;
use quatfill::{solve, ColorImage, SolverConfig};
use wasm_bindgen::prelude::*;

fn js_err(e: quatfill::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn to_rgba(img: &ColorImage) -> Vec<u8> {
    img.to_rgb8().chunks(3).flat_map(|p| [p[0], p[1], p[2], 255]).collect()
}

fn load(rgba: &[u8], width: usize, height: usize) -> Result<ColorImage, JsError> {
    ColorImage::from_rgba8(height, width, rgba).map_err(js_err)
}

/// Result of [`complete_rgba`].
#[wasm_bindgen]
pub struct Completion {
    recovered: Vec<u8>,
    observed: Vec<u8>,
    iterations: usize,
    rank: usize,
    psnr_recovered: f64,
    psnr_observed: f64,
}

#[wasm_bindgen]
impl Completion {
    /// Recovered image as RGBA bytes.
    pub fn recovered(&self) -> Vec<u8> {
        self.recovered.clone()
    }

    /// Zero-filled observation as RGBA bytes.
    pub fn observed(&self) -> Vec<u8> {
        self.observed.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Final quaternion rank.
    #[wasm_bindgen(getter)]
    pub fn rank(&self) -> usize {
        self.rank / 2
    }

    #[wasm_bindgen(getter, js_name = psnrRecovered)]
    pub fn psnr_recovered(&self) -> f64 {
        self.psnr_recovered
    }

    #[wasm_bindgen(getter, js_name = psnrObserved)]
    pub fn psnr_observed(&self) -> f64 {
        self.psnr_observed
    }
}

/// Drops all but a fraction `sr` of the pixels and recovers them.
///
/// Values are scaled to [0, 1] before solving; with raw [0, 255] values the
/// regularizer is too weak for the rank estimate to kick in on small images.
#[wasm_bindgen(js_name = completeRgba)]
#[allow(clippy::too_many_arguments)]
pub fn complete_rgba(
    rgba: &[u8],
    width: usize,
    height: usize,
    sr: f64,
    seed: u64,
    lambda: f64,
    init_rank: usize,
    max_iters: usize,
) -> Result<Completion, JsError> {
    let img = load(rgba, width, height)?;
    let omega = sample_mask(height, width, sr, seed).map_err(js_err)?;
    let cfg = SolverConfig {
        lambda,
        init_rank: init_rank.min(2 * width.min(height)),
        max_iters,
        seed,
        ..Default::default()
    };
    let out = solve(&encode_image(&img).scale(1.0 / 255.0), &omega, &cfg).map_err(js_err)?;
    let recovered = decode_image(&out.x.scale(255.0));
    let observed = observed_image(&img, &omega).map_err(js_err)?;
    let mcfg = MetricsConfig::default();
    Ok(Completion {
        psnr_recovered: psnr(&recovered, &img, &mcfg).map_err(js_err)?,
        psnr_observed: psnr(&observed, &img, &mcfg).map_err(js_err)?,
        recovered: to_rgba(&recovered),
        observed: to_rgba(&observed),
        iterations: out.trace.iterations(),
        rank: out.trace.final_rank(),
    })
}

/// Quaternion singular values of the image, largest first.
#[wasm_bindgen(js_name = singularSpectrum)]
pub fn singular_spectrum(rgba: &[u8], width: usize, height: usize) -> Result<Vec<f64>, JsError> {
    let img = load(rgba, width, height)?;
    quaternion_singular_values(&encode_image(&img)).map_err(js_err)
}

/// Rank-gap statistic of a non-increasing sequence: returns
/// `[gap_index, mu]`.
#[wasm_bindgen(js_name = rankGap)]
pub fn rank_gap(values: &[f64]) -> Vec<f64> {
    let r = rank_gap_statistic(values);
    vec![r.gap_index as f64, r.mu]
}
