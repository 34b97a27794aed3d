use std::path::{Path, PathBuf};
use std::time::Instant;

use quatfill::imaging::{self, ColorImage, ObservationMask};
use quatfill::metrics::rse_matrix;
use quatfill::qsvd::quaternion_singular_values;
use quatfill::{solve, Error, QuaternionMatrix, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::report::{self, sig6, ConfigEcho, RecoveryReport, SynthReport};
use crate::{CompleteArgs, MetricsArgs, SolverArgs, SpectrumArgs, SynthArgs};

pub struct Recovery {
    pub image: ColorImage,
    pub report: RecoveryReport,
}

/// Encode, solve, decode and score one image. Shared by `complete` and `batch`.
pub fn recover(
    input: &Path,
    img: &ColorImage,
    omega: &ObservationMask,
    seed: u64,
    solver: &SolverArgs,
) -> Result<Recovery> {
    let (h, w) = img.dims();
    let cfg = solver.config(h, w, seed);
    let scale = if solver.unit_range { 255.0 } else { 1.0 };

    let started = Instant::now();
    let t = imaging::encode_image(img).scale(1.0 / scale);
    let out = solve(&t, omega, &cfg)?;
    let recovered = imaging::decode_image(&out.x.scale(scale));
    let seconds = started.elapsed().as_secs_f64();

    let q = report::quality(&recovered, img)?;
    let rank = out.trace.final_rank();
    let report = RecoveryReport {
        input: input.display().to_string(),
        height: h,
        width: w,
        sampling_ratio: omega.sampling_ratio(),
        seed,
        config: ConfigEcho { solver: cfg, unit_range: solver.unit_range },
        iterations: out.trace.iterations(),
        rank,
        quaternion_rank: rank / 2,
        epsilon_history_len: out.trace.epsilon.len(),
        rse: q.rse,
        psnr: q.psnr,
        ssim: q.ssim,
        fsim: q.fsim,
        seconds: sig6(seconds),
        termination: out.trace.termination,
    };
    Ok(Recovery { image: recovered, report })
}

fn sibling(output: &Path, suffix: &str) -> PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    output.with_file_name(format!("{stem}{suffix}"))
}

pub fn complete(args: &CompleteArgs) -> Result<()> {
    let (img, _) = imaging::load_image(&args.input)?;
    let (h, w) = img.dims();

    let omega = match (&args.mask_in, args.sr) {
        (Some(path), _) => {
            let mask = ObservationMask::from_text(&std::fs::read_to_string(path)?)?;
            if mask.dims() != (h, w) {
                return Err(Error::Dimension(format!(
                    "mask is {}x{} but the image is {h}x{w}",
                    mask.rows(),
                    mask.cols()
                )));
            }
            mask
        }
        (None, Some(sr)) => imaging::sample_mask(h, w, sr, args.seed)?,
        (None, None) => return Err(Error::Config("either --sr or --mask-in is required".into())),
    };

    let rec = recover(&args.input, &img, &omega, args.seed, &args.solver)?;

    imaging::save_image(&rec.image, &args.output)?;
    let observed_path = args.observed.clone().unwrap_or_else(|| sibling(&args.output, "_observed.png"));
    imaging::save_image(&imaging::observed_image(&img, &omega)?, &observed_path)?;
    let mask_path = args.mask_out.clone().unwrap_or_else(|| sibling(&args.output, "_mask.txt"));
    std::fs::write(&mask_path, omega.to_text())?;

    report::emit_json(&rec.report, args.report.as_deref())
}

pub fn synth(args: &SynthArgs) -> Result<()> {
    if args.m == 0 || args.n == 0 {
        return Err(Error::Config("matrix dimensions must be positive".into()));
    }
    if args.rank == 0 || args.rank > args.m.min(args.n) {
        return Err(Error::Config(format!(
            "rank {} must be between 1 and min(m, n) = {}",
            args.rank,
            args.m.min(args.n)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let t = QuaternionMatrix::random_low_rank(args.m, args.n, args.rank, &mut rng);
    let omega = imaging::sample_mask(args.m, args.n, args.sr, args.seed)?;
    let cfg = args.solver.config(args.m, args.n, args.seed);

    let started = Instant::now();
    let out = solve(&t, &omega, &cfg)?;
    let seconds = started.elapsed().as_secs_f64();

    let final_rank = out.trace.final_rank();
    let report = SynthReport {
        m: args.m,
        n: args.n,
        rank: args.rank,
        sampling_ratio: omega.sampling_ratio(),
        seed: args.seed,
        config: cfg,
        iterations: out.trace.iterations(),
        final_rank,
        quaternion_rank: final_rank / 2,
        rank_drops: out.trace.rank_drops.len(),
        rse: sig6(rse_matrix(&out.x, &t)?),
        seconds: sig6(seconds),
        termination: out.trace.termination,
    };
    report::emit_json(&report, args.report.as_deref())
}

pub fn metrics(args: &MetricsArgs) -> Result<()> {
    let (x, _) = imaging::load_image(&args.input)?;
    let (t, _) = imaging::load_image(&args.reference)?;
    let q = report::quality(&x, &t)?;
    report::emit_json(&q, None)
}

pub fn spectrum(args: &SpectrumArgs) -> Result<()> {
    if !(args.tol >= 0.0) {
        return Err(Error::Config(format!("tolerance {} must be non-negative", args.tol)));
    }
    let (img, _) = imaging::load_image(&args.input)?;
    let sigma = quaternion_singular_values(&imaging::encode_image(&img))?;
    let cutoff = args.tol * sigma.first().copied().unwrap_or(0.0);

    let mut wtr = csv::Writer::from_path(&args.csv).map_err(report::csv_err)?;
    wtr.write_record(["index", "singular_value"]).map_err(report::csv_err)?;
    for (i, s) in sigma.iter().enumerate().filter(|(_, &s)| s > cutoff) {
        wtr.write_record([(i + 1).to_string(), format!("{s:.6e}")]).map_err(report::csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}
