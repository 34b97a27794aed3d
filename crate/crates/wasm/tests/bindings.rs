// Native runs of the bindings. Error paths build a JS exception object and
// can only be exercised inside a wasm runtime, so only success paths are here.

use quatfill_wasm::{complete_rgba, rank_gap, singular_spectrum};

fn gradient_rgba(w: usize, h: usize) -> Vec<u8> {
    (0..h * w)
        .flat_map(|i| {
            let (r, c) = (i / w, i % w);
            [(4 * r) as u8, (4 * c) as u8, (2 * (r + c)) as u8, 255]
        })
        .collect()
}

#[test]
fn completion_beats_the_observation() {
    let px = gradient_rgba(40, 32);
    let out = complete_rgba(&px, 40, 32, 0.5, 3, 0.5, 20, 300).unwrap();
    assert_eq!(out.recovered().len(), px.len());
    assert!(out.recovered().chunks(4).all(|p| p[3] == 255));
    assert!(out.psnr_recovered() > out.psnr_observed() + 10.0, "{} vs {}", out.psnr_recovered(), out.psnr_observed());
    assert!(out.rank() <= 10);
    assert!(out.iterations() <= 300);
}

#[test]
fn spectrum_of_a_constant_image() {
    let px: Vec<u8> = [10u8, 20, 30, 0].repeat(12 * 9);
    let s = singular_spectrum(&px, 12, 9).unwrap();
    assert_eq!(s.len(), 9);
    assert!(s[0] > 0.0);
    assert!(s[1..].iter().all(|&v| v < 1e-10 * s[0]));
}

#[test]
fn rank_gap_reports_index_and_mu() {
    let r = rank_gap(&[8.0, 4.0, 2.0, 1.0]);
    assert_eq!(r, vec![1.0, 1.5]);
}
