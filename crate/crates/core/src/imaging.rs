//! Color image <-> pure quaternion matrix codec, observation masks and the
//! projection onto observed entries.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{dim_err, Error, Result};
use crate::qmatrix::QuaternionMatrix;

/// Real parts larger than this are reported when decoding.
pub const REAL_RESIDUE_WARN: f64 = 1e-6;

/// An RGB image with channel values in `[0, 255]`, stored as three
/// row-major planes.
#[derive(Clone, Debug, PartialEq)]
pub struct ColorImage {
    height: usize,
    width: usize,
    channels: [Vec<f64>; 3],
}

impl ColorImage {
    pub fn new(height: usize, width: usize, channels: [Vec<f64>; 3]) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::Input("image must be non-empty".into()));
        }
        if channels.iter().any(|c| c.len() != height * width) {
            return Err(dim_err(format!("channels must hold {height}x{width} values")));
        }
        if channels.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Input("image contains non-finite values".into()));
        }
        Ok(ColorImage { height, width, channels })
    }

    /// All pixels set to `rgb`.
    pub fn filled(height: usize, width: usize, rgb: [f64; 3]) -> Result<Self> {
        Self::new(height, width, rgb.map(|v| vec![v; height * width]))
    }

    /// From interleaved 8-bit RGB bytes.
    pub fn from_rgb8(height: usize, width: usize, data: &[u8]) -> Result<Self> {
        Self::from_interleaved(height, width, data, 3)
    }

    /// From interleaved 8-bit RGBA bytes; alpha is ignored.
    pub fn from_rgba8(height: usize, width: usize, data: &[u8]) -> Result<Self> {
        Self::from_interleaved(height, width, data, 4)
    }

    fn from_interleaved(height: usize, width: usize, data: &[u8], stride: usize) -> Result<Self> {
        if data.len() != height * width * stride {
            return Err(dim_err(format!(
                "expected {} bytes for a {height}x{width} image, got {}",
                height * width * stride,
                data.len()
            )));
        }
        let channels = std::array::from_fn(|ch| data.chunks_exact(stride).map(|px| px[ch] as f64).collect());
        Self::new(height, width, channels)
    }

    /// Interleaved 8-bit RGB, rounding and clamping each value.
    pub fn to_rgb8(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.height * self.width * 3);
        for i in 0..self.height * self.width {
            for ch in &self.channels {
                out.push(ch[i].round().clamp(0.0, 255.0) as u8);
            }
        }
        out
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        &self.channels[c]
    }

    pub fn pixel(&self, r: usize, c: usize) -> [f64; 3] {
        let i = r * self.width + c;
        [self.channels[0][i], self.channels[1][i], self.channels[2][i]]
    }

    /// Applies `f` to every channel value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.height,
            self.width,
            std::array::from_fn(|c| self.channels[c].iter().map(|&v| f(v)).collect()),
        )
    }

    /// ITU-R BT.601 luma `0.299 R + 0.587 G + 0.114 B`, row-major.
    pub fn luminance(&self) -> Vec<f64> {
        (0..self.height * self.width)
            .map(|i| 0.299 * self.channels[0][i] + 0.587 * self.channels[1][i] + 0.114 * self.channels[2][i])
            .collect()
    }

    /// Top-left crop.
    pub fn crop(&self, top: usize, left: usize, height: usize, width: usize) -> Result<Self> {
        if top + height > self.height || left + width > self.width {
            return Err(dim_err("crop window exceeds the image"));
        }
        let channels = std::array::from_fn(|c| {
            (top..top + height)
                .flat_map(|r| (left..left + width).map(move |col| (r, col)))
                .map(|(r, col)| self.channels[c][r * self.width + col])
                .collect()
        });
        Self::new(height, width, channels)
    }
}

/// `q = r i + g j + b k` per pixel.
pub fn encode_image(img: &ColorImage) -> QuaternionMatrix {
    let n = img.height * img.width;
    QuaternionMatrix::from_planes(
        img.height,
        img.width,
        [
            vec![0.0; n],
            img.channels[0].clone(),
            img.channels[1].clone(),
            img.channels[2].clone(),
        ],
    )
    .expect("plane sizes match the image")
}

/// Imaginary parts back to RGB, clamped to `[0, 255]`. The real part is
/// dropped; a warning is logged when it exceeds [`REAL_RESIDUE_WARN`].
pub fn decode_image(q: &QuaternionMatrix) -> ColorImage {
    let residue = q.real_residue();
    if residue > REAL_RESIDUE_WARN {
        log::warn!("dropping real part of magnitude up to {residue:.3e} while decoding");
    }
    let channels = std::array::from_fn(|c| {
        q.plane(c + 1)
            .iter()
            .map(|v| if v.is_finite() { v.clamp(0.0, 255.0) } else { 0.0 })
            .collect()
    });
    ColorImage {
        height: q.rows(),
        width: q.cols(),
        channels,
    }
}

/// How a mask was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaskSeed {
    Seeded(u64),
    Explicit,
}

/// The observed index set Ω over an `M x N` grid. One element is a whole
/// pixel: all three color values are observed or missing together.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationMask {
    rows: usize,
    cols: usize,
    observed: Vec<bool>,
    sampling_ratio: f64,
    seed: MaskSeed,
}

impl ObservationMask {
    pub fn full(rows: usize, cols: usize) -> Self {
        ObservationMask {
            rows,
            cols,
            observed: vec![true; rows * cols],
            sampling_ratio: 1.0,
            seed: MaskSeed::Explicit,
        }
    }

    pub fn empty(rows: usize, cols: usize) -> Self {
        ObservationMask {
            rows,
            cols,
            observed: vec![false; rows * cols],
            sampling_ratio: 0.0,
            seed: MaskSeed::Explicit,
        }
    }

    /// Explicit index set; the sampling ratio is `|Ω| / (M N)`.
    pub fn from_indices(rows: usize, cols: usize, indices: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut observed = vec![false; rows * cols];
        for (r, c) in indices {
            if r >= rows || c >= cols {
                return Err(dim_err(format!("index ({r},{c}) outside a {rows}x{cols} mask")));
            }
            observed[r * cols + c] = true;
        }
        let count = observed.iter().filter(|&&b| b).count();
        Ok(ObservationMask {
            rows,
            cols,
            sampling_ratio: if rows * cols == 0 { 0.0 } else { count as f64 / (rows * cols) as f64 },
            observed,
            seed: MaskSeed::Explicit,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn sampling_ratio(&self) -> f64 {
        self.sampling_ratio
    }

    pub fn seed(&self) -> MaskSeed {
        self.seed
    }

    #[inline]
    pub fn contains(&self, r: usize, c: usize) -> bool {
        self.observed[r * self.cols + c]
    }

    pub fn count(&self) -> usize {
        self.observed.iter().filter(|&&b| b).count()
    }

    /// Row-major flags, `true` where observed.
    pub fn as_slice(&self) -> &[bool] {
        &self.observed
    }

    /// Observed positions in row-major order.
    pub fn indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let cols = self.cols;
        self.observed
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i / cols, i % cols))
    }

    /// Ω^c.
    pub fn complement(&self) -> Self {
        ObservationMask {
            rows: self.rows,
            cols: self.cols,
            observed: self.observed.iter().map(|b| !b).collect(),
            sampling_ratio: 1.0 - self.sampling_ratio,
            seed: MaskSeed::Explicit,
        }
    }

    /// Text form: a header `M N SR SEED` followed by one `row,col` line per
    /// observed position (row-major order).
    pub fn to_text(&self) -> String {
        let seed = match self.seed {
            MaskSeed::Seeded(s) => s.to_string(),
            MaskSeed::Explicit => "explicit".to_string(),
        };
        let mut out = format!("{} {} {:?} {}\n", self.rows, self.cols, self.sampling_ratio, seed);
        for (r, c) in self.indices() {
            writeln!(out, "{r},{c}").expect("writing to a String");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Input("empty mask file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Input(format!("mask header must be `M N SR SEED`, got `{header}`")));
        }
        let parse_usize = |s: &str| s.parse::<usize>().map_err(|_| Error::Input(format!("bad mask dimension `{s}`")));
        let rows = parse_usize(fields[0])?;
        let cols = parse_usize(fields[1])?;
        let sampling_ratio: f64 = fields[2]
            .parse()
            .map_err(|_| Error::Input(format!("bad sampling ratio `{}`", fields[2])))?;
        let seed = match fields[3] {
            "explicit" => MaskSeed::Explicit,
            s => MaskSeed::Seeded(s.parse().map_err(|_| Error::Input(format!("bad mask seed `{s}`")))?),
        };
        let mut observed = vec![false; rows * cols];
        for (n, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (r, c) = line
                .split_once(',')
                .ok_or_else(|| Error::Input(format!("mask line {}: expected `row,col`", n + 2)))?;
            let r: usize = r.trim().parse().map_err(|_| Error::Input(format!("mask line {}: bad row", n + 2)))?;
            let c: usize = c.trim().parse().map_err(|_| Error::Input(format!("mask line {}: bad col", n + 2)))?;
            if r >= rows || c >= cols {
                return Err(dim_err(format!("mask index ({r},{c}) outside {rows}x{cols}")));
            }
            observed[r * cols + c] = true;
        }
        Ok(ObservationMask {
            rows,
            cols,
            observed,
            sampling_ratio,
            seed,
        })
    }
}

/// Uniform sampling of `round(sr M N)` distinct pixels without replacement.
pub fn sample_mask(rows: usize, cols: usize, sr: f64, seed: u64) -> Result<ObservationMask> {
    if !(0.0..=1.0).contains(&sr) {
        return Err(Error::Config(format!("sampling ratio {sr} outside [0, 1]")));
    }
    let total = rows * cols;
    let count = ((sr * total as f64).round() as usize).min(total);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut observed = vec![false; total];
    for i in rand::seq::index::sample(&mut rng, total, count) {
        observed[i] = true;
    }
    Ok(ObservationMask {
        rows,
        cols,
        observed,
        sampling_ratio: sr,
        seed: MaskSeed::Seeded(seed),
    })
}

fn check_mask_dims(x: &QuaternionMatrix, omega: &ObservationMask) -> Result<()> {
    if x.shape() != omega.dims() {
        return Err(dim_err(format!(
            "mask is {}x{} but the matrix is {}x{}",
            omega.rows,
            omega.cols,
            x.rows(),
            x.cols()
        )));
    }
    Ok(())
}

/// `P_Ω`: keeps observed entries, zeroes the rest.
pub fn project_omega(x: &QuaternionMatrix, omega: &ObservationMask) -> Result<QuaternionMatrix> {
    check_mask_dims(x, omega)?;
    let (m, n) = x.shape();
    let planes = std::array::from_fn(|l| {
        x.plane(l)
            .iter()
            .zip(&omega.observed)
            .map(|(&v, &keep)| if keep { v } else { 0.0 })
            .collect()
    });
    QuaternionMatrix::from_planes(m, n, planes)
}

/// Observed image with missing pixels set to black.
pub fn observed_image(img: &ColorImage, omega: &ObservationMask) -> Result<ColorImage> {
    Ok(decode_image(&project_omega(&encode_image(img), omega)?))
}

#[cfg(feature = "io")]
mod io {
    use std::path::Path;

    use super::ColorImage;
    use crate::error::Result;

    /// Loads an image file as RGB. Returns the image and whether an alpha
    /// channel was present (and ignored).
    pub fn load_image(path: impl AsRef<Path>) -> Result<(ColorImage, bool)> {
        let img = image::open(path.as_ref())?;
        let had_alpha = img.color().has_alpha();
        if had_alpha {
            log::warn!("{}: alpha channel ignored", path.as_ref().display());
        }
        let rgb = img.to_rgb8();
        let (w, h) = rgb.dimensions();
        let out = ColorImage::from_rgb8(h as usize, w as usize, rgb.as_raw())?;
        Ok((out, had_alpha))
    }

    /// Writes an 8-bit RGB image; the format follows the file extension.
    pub fn save_image(img: &ColorImage, path: impl AsRef<Path>) -> Result<()> {
        let buf = image::RgbImage::from_raw(img.width() as u32, img.height() as u32, img.to_rgb8())
            .expect("buffer length matches dimensions");
        buf.save(path)?;
        Ok(())
    }
}

#[cfg(feature = "io")]
pub use io::{load_image, save_image};
