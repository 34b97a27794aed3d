//! Metric values checked against independent references: a numpy port of
//! the reference FSIM/phase congruency code and scikit-image's SSIM with
//! Gaussian weighting (sigma 1.5, population covariance).

use std::path::Path;

use quatfill::imaging::load_image;
use quatfill::metrics::{fsim, ssim, MetricsConfig};
use quatfill::ColorImage;

fn coffee() -> ColorImage {
    load_image(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/coffee_64.png")).unwrap().0
}

fn box_blur(img: &ColorImage) -> ColorImage {
    let (h, w) = img.dims();
    let ch = std::array::from_fn(|c| {
        let src = img.channel(c);
        (0..h * w)
            .map(|i| {
                let (r, col) = ((i / w) as isize, (i % w) as isize);
                let mut acc = 0.0;
                for dr in -1..=1 {
                    for dc in -1..=1 {
                        let (rr, cc) = (r + dr, col + dc);
                        if rr >= 0 && cc >= 0 && rr < h as isize && cc < w as isize {
                            acc += src[rr as usize * w + cc as usize];
                        }
                    }
                }
                acc / 9.0
            })
            .collect()
    });
    ColorImage::new(h, w, ch).unwrap()
}

fn zero_every_third_column(img: &ColorImage) -> ColorImage {
    let w = img.width();
    let ch = std::array::from_fn(|c| {
        img.channel(c).iter().enumerate().map(|(i, &v)| if (i % w) % 3 == 0 { 0.0 } else { v }).collect()
    });
    ColorImage::new(img.height(), w, ch).unwrap()
}

#[test]
fn fsim_matches_reference_values() {
    let t = coffee();
    let cfg = MetricsConfig::default();
    let cases = [
        (t.map(|v| v + 10.0).unwrap(), 0.999043430878497),
        (zero_every_third_column(&t), 0.48933087018249843),
        (box_blur(&t), 0.9376311002291171),
    ];
    for (x, expected) in cases {
        let got = fsim(&x, &t, &cfg).unwrap();
        assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
    }
}

#[test]
fn fsim_on_odd_sized_grids() {
    let t = coffee().crop(0, 0, 45, 51).unwrap();
    let x = box_blur(&coffee()).crop(0, 0, 45, 51).unwrap();
    let got = fsim(&x, &t, &MetricsConfig::default()).unwrap();
    assert!((got - 0.9544428155280767).abs() < 1e-9, "{got}");
}

#[test]
fn fsim_tolerates_a_global_shift() {
    let t = coffee();
    let cfg = MetricsConfig::default();
    let shifted = t.map(|v| v + 10.0).unwrap();
    let a = fsim(&shifted, &t, &cfg).unwrap();
    let b = fsim(&t, &shifted, &cfg).unwrap();
    assert!(a >= 0.98);
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn ssim_matches_reference_values() {
    let t = coffee();
    let cfg = MetricsConfig::default();
    let blur = ssim(&box_blur(&t), &t, &cfg).unwrap();
    assert!((blur - 0.9491028440633444).abs() < 1e-9, "{blur}");
    let striped = ssim(&zero_every_third_column(&t), &t, &cfg).unwrap();
    assert!((striped - 0.19150457557758946).abs() < 1e-9, "{striped}");
}
