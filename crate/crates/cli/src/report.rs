use std::path::Path;

use quatfill::imaging::ColorImage;
use quatfill::metrics::{self, MetricsConfig};
use quatfill::solver::Termination;
use quatfill::{Error, Result, SolverConfig};
use serde::Serialize;

/// Rounds to 6 significant digits so reports do not carry float noise.
pub fn sig6(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.5e}").parse().expect("formatted float parses")
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    #[serde(flatten)]
    pub solver: SolverConfig,
    pub unit_range: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecoveryReport {
    pub input: String,
    pub height: usize,
    pub width: usize,
    pub sampling_ratio: f64,
    pub seed: u64,
    pub config: ConfigEcho,
    pub iterations: usize,
    pub rank: usize,
    pub quaternion_rank: usize,
    pub epsilon_history_len: usize,
    pub rse: Option<f64>,
    pub psnr: Option<f64>,
    pub ssim: Option<f64>,
    pub fsim: Option<f64>,
    pub seconds: f64,
    pub termination: Termination,
}

#[derive(Clone, Debug, Serialize)]
pub struct SynthReport {
    pub m: usize,
    pub n: usize,
    pub rank: usize,
    pub sampling_ratio: f64,
    pub seed: u64,
    pub config: SolverConfig,
    pub iterations: usize,
    pub final_rank: usize,
    pub quaternion_rank: usize,
    pub rank_drops: usize,
    pub rse: f64,
    pub seconds: f64,
    pub termination: Termination,
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Quality {
    pub rse: Option<f64>,
    pub psnr: Option<f64>,
    pub ssim: Option<f64>,
    pub fsim: Option<f64>,
}

// An index that cannot be computed for this input (too small, all-zero
// reference) is reported as null rather than failing the whole command.
fn optional(name: &str, r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(sig6(v))),
        Err(Error::Input(msg)) => {
            log::warn!("{name} not reported: {msg}");
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

pub fn quality(x: &ColorImage, t: &ColorImage) -> Result<Quality> {
    let cfg = MetricsConfig::default();
    Ok(Quality {
        rse: optional("RSE", metrics::rse(x, t))?,
        psnr: optional("PSNR", metrics::psnr(x, t, &cfg))?,
        ssim: optional("SSIM", metrics::ssim(x, t, &cfg))?,
        fsim: optional("FSIM", metrics::fsim(x, t, &cfg))?,
    })
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Io(std::io::Error::other(e)))
}

/// Writes JSON to `path`, or prints it when no path is given.
pub fn emit_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let text = to_json(value)?;
    match path {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

pub fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(24.048_628_2), 24.0486);
        assert_eq!(sig6(-0.000_123_456_78), -0.000_123_457);
        assert_eq!(sig6(0.0), 0.0);
        assert_eq!(sig6(-300.0), -300.0);
    }
}
