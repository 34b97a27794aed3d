use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quatfill"))
}

fn asset(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn png_bytes(path: &Path) -> Vec<u8> {
    let (img, _) = quatfill::imaging::load_image(path).unwrap();
    img.to_rgb8()
}

#[test]
fn complete_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.png");
    let report = dir.path().join("r.json");
    let res = run(&[
        "complete",
        "--input",
        p(&asset("coffee_64.png")),
        "--sr",
        "0.3",
        "--seed",
        "42",
        "--max-iters",
        "30",
        "--output",
        p(&out),
        "--report",
        p(&report),
    ]);
    ok(&res);
    assert!(out.exists());
    assert!(dir.path().join("out_observed.png").exists());
    let mask = std::fs::read_to_string(dir.path().join("out_mask.txt")).unwrap();
    assert!(mask.starts_with("64 64 0.3 42\n"));
    assert_eq!(mask.lines().count(), 1 + 1229);

    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let keys: Vec<&str> = r.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    let mut expected = vec![
        "input",
        "height",
        "width",
        "sampling_ratio",
        "seed",
        "config",
        "iterations",
        "rank",
        "quaternion_rank",
        "epsilon_history_len",
        "rse",
        "psnr",
        "ssim",
        "fsim",
        "seconds",
        "termination",
    ];
    let mut got = keys.clone();
    got.sort();
    expected.sort();
    assert_eq!(got, expected);
    assert_eq!(r["height"], 64);
    assert_eq!(r["seed"], 42);
    // r0 = 50 fits a 64x64 image, so no clamp
    assert_eq!(r["config"]["init_rank"], 50);
    assert!(r["iterations"].as_u64().unwrap() <= 30);
    assert_eq!(r["epsilon_history_len"].as_u64().unwrap(), r["iterations"].as_u64().unwrap() + 1);
    for k in ["rse", "psnr", "ssim", "fsim"] {
        assert!(r[k].as_f64().unwrap().is_finite(), "{k}");
    }
}

#[test]
fn same_seed_gives_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("o{i}.png"));
        let res = run(&[
            "complete",
            "--input",
            p(&asset("coffee_64.png")),
            "--sr",
            "0.5",
            "--seed",
            "3",
            "--max-iters",
            "10",
            "--output",
            p(&out),
        ]);
        ok(&res);
        let mut r = json(&res);
        r.as_object_mut().unwrap().remove("seconds");
        reports.push((r, png_bytes(&out)));
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn full_observation_returns_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.png");
    let input = asset("astronaut_64.png");
    let res = run(&["complete", "--input", p(&input), "--sr", "1.0", "--output", p(&out)]);
    ok(&res);
    assert_eq!(png_bytes(&out), png_bytes(&input));
    let r = json(&res);
    assert_eq!(r["rse"], -300.0);
    assert_eq!(r["psnr"], 300.0);
}

#[test]
fn mask_round_trip_and_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let mask = dir.path().join("m.txt");
    let res = run(&[
        "complete",
        "--input",
        p(&asset("coffee_64.png")),
        "--sr",
        "0.4",
        "--seed",
        "1",
        "--max-iters",
        "5",
        "--output",
        p(&dir.path().join("a.png")),
        "--mask-out",
        p(&mask),
    ]);
    ok(&res);
    let reuse = run(&[
        "complete",
        "--input",
        p(&asset("astronaut_64.png")),
        "--mask-in",
        p(&mask),
        "--max-iters",
        "5",
        "--output",
        p(&dir.path().join("b.png")),
    ]);
    ok(&reuse);
    assert_eq!(json(&reuse)["sampling_ratio"], 0.4);

    std::fs::write(&mask, "8 8 0.5 explicit\n0,0\n").unwrap();
    let bad = run(&[
        "complete",
        "--input",
        p(&asset("coffee_64.png")),
        "--mask-in",
        p(&mask),
        "--output",
        p(&dir.path().join("c.png")),
    ]);
    assert_eq!(bad.status.code(), Some(4));
    assert_eq!(String::from_utf8_lossy(&bad.stderr).lines().count(), 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.png");
    let missing = run(&["complete", "--input", "/nonexistent.png", "--sr", "0.3", "--output", p(&out)]);
    assert_eq!(missing.status.code(), Some(2));
    let bad_sr = run(&["complete", "--input", p(&asset("coffee_64.png")), "--sr", "1.5", "--output", p(&out)]);
    assert_eq!(bad_sr.status.code(), Some(3));
    let odd_rank = run(&[
        "complete",
        "--input",
        p(&asset("coffee_64.png")),
        "--sr",
        "0.3",
        "--init-rank",
        "7",
        "--output",
        p(&out),
    ]);
    assert_eq!(odd_rank.status.code(), Some(3));
    let unknown = run(&["metrics", "--input", "a.png", "--reference", "b.png", "--frobnicate"]);
    assert_eq!(unknown.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("--frobnicate"));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn metrics_on_identical_and_shifted_images() {
    let a = asset("coffee_64.png");
    let res = run(&["metrics", "--input", p(&a), "--reference", p(&a)]);
    ok(&res);
    let r = json(&res);
    assert_eq!(r["rse"], -300.0);
    assert_eq!(r["psnr"], 300.0);
    assert_eq!(r["ssim"], 1.0);
    assert_eq!(r["fsim"], 1.0);

    let dir = tempfile::tempdir().unwrap();
    let dark = quatfill::ColorImage::filled(40, 40, [100.0, 50.0, 20.0]).unwrap();
    let light = dark.map(|v| v + 16.0).unwrap();
    quatfill::imaging::save_image(&dark, dir.path().join("d.png")).unwrap();
    quatfill::imaging::save_image(&light, dir.path().join("l.png")).unwrap();
    let res = run(&["metrics", "--input", p(&dir.path().join("l.png")), "--reference", p(&dir.path().join("d.png"))]);
    ok(&res);
    assert!((json(&res)["psnr"].as_f64().unwrap() - 24.0486).abs() < 1e-3);

    let small = quatfill::ColorImage::filled(40, 30, [1.0, 2.0, 3.0]).unwrap();
    quatfill::imaging::save_image(&small, dir.path().join("s.png")).unwrap();
    let mismatch = run(&["metrics", "--input", p(&dir.path().join("s.png")), "--reference", p(&dir.path().join("d.png"))]);
    assert_eq!(mismatch.status.code(), Some(4));
}

#[test]
fn alpha_channel_is_ignored_with_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let rgb = asset("coffee_64.png");
    let (img, _) = quatfill::imaging::load_image(&rgb).unwrap();
    let rgba: Vec<u8> = img.to_rgb8().chunks(3).flat_map(|px| [px[0], px[1], px[2], 128]).collect();
    let path = dir.path().join("rgba.png");
    image::RgbaImage::from_raw(64, 64, rgba).unwrap().save(&path).unwrap();

    let res = run(&["metrics", "--input", p(&path), "--reference", p(&rgb)]);
    ok(&res);
    assert!(String::from_utf8_lossy(&res.stderr).contains("alpha channel ignored"));
    assert_eq!(json(&res)["psnr"], 300.0);
}

fn spectrum_rows(input: &Path) -> Vec<(usize, f64)> {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("s.csv");
    ok(&run(&["spectrum", "--input", p(input), "--csv", p(&csv_path)]));
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,singular_value"));
    lines
        .map(|l| {
            let (i, s) = l.split_once(',').unwrap();
            (i.parse().unwrap(), s.parse().unwrap())
        })
        .collect()
}

#[test]
fn spectrum_of_simple_and_natural_images() {
    let dir = tempfile::tempdir().unwrap();
    let constant = dir.path().join("c.png");
    quatfill::imaging::save_image(&quatfill::ColorImage::filled(20, 30, [10.0, 200.0, 90.0]).unwrap(), &constant)
        .unwrap();
    assert_eq!(spectrum_rows(&constant).len(), 1);

    let black = dir.path().join("b.png");
    quatfill::imaging::save_image(&quatfill::ColorImage::filled(20, 30, [0.0; 3]).unwrap(), &black).unwrap();
    assert!(spectrum_rows(&black).is_empty());

    let rows = spectrum_rows(&asset("astronaut_64.png"));
    assert!(rows.len() >= 50);
    assert_eq!(rows[0].0, 1);
    assert!(rows.windows(2).all(|w| w[0].1 >= w[1].1));
    assert!(rows[49].1 / rows[0].1 < 0.1, "{} / {}", rows[49].1, rows[0].1);
}

#[test]
fn synth_recovers_a_low_rank_matrix() {
    let res = run(&[
        "synth", "--m", "30", "--n", "30", "--rank", "2", "--sr", "0.7", "--lambda", "1e-3", "--init-rank", "10", "--seed",
        "7",
    ]);
    ok(&res);
    let r = json(&res);
    assert!(r["rse"].as_f64().unwrap() <= -40.0, "{r}");

    let full = run(&["synth", "--m", "12", "--n", "10", "--rank", "2", "--sr", "1.0", "--lambda", "0", "--seed", "1"]);
    ok(&full);
    assert_eq!(json(&full)["rse"], -300.0);
    // r0 = 50 is clamped to 2 * 10
    assert_eq!(json(&full)["config"]["init_rank"], 20);

    let rank3 = run(&["synth", "--m", "40", "--n", "40", "--rank", "3", "--sr", "0.8", "--init-rank", "20", "--seed", "77"]);
    ok(&rank3);
    assert_eq!(json(&rank3)["quaternion_rank"], 3);

    let too_big = run(&["synth", "--m", "5", "--n", "8", "--rank", "6", "--sr", "0.5"]);
    assert_eq!(too_big.status.code(), Some(3));
}

fn batch_csv(dir: &Path, csv_path: &Path, srs: &str) -> Vec<Vec<String>> {
    ok(&run(&[
        "batch",
        "--dir",
        p(dir),
        "--sr-list",
        srs,
        "--csv",
        p(csv_path),
        "--seed",
        "5",
        "--max-iters",
        "40",
    ]));
    let mut rdr = csv::Reader::from_path(csv_path).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["image", "sr", "seed", "iterations", "rank", "rse", "psnr", "ssim", "fsim", "seconds"]
    );
    rdr.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn batch_is_sorted_deterministic_and_improves_with_sr() {
    let dir = tempfile::tempdir().unwrap();
    let images = dir.path().join("imgs");
    std::fs::create_dir(&images).unwrap();
    std::fs::copy(asset("astronaut_64.png"), images.join("b_astronaut.png")).unwrap();
    std::fs::copy(asset("coffee_64.png"), images.join("a_coffee.png")).unwrap();
    let (coffee, _) = quatfill::imaging::load_image(asset("coffee_64.png")).unwrap();
    quatfill::imaging::save_image(&coffee.crop(0, 0, 48, 48).unwrap(), images.join("c_crop.png")).unwrap();

    let first = batch_csv(&images, &dir.path().join("1.csv"), "0.5,0.1,0.3");
    assert_eq!(first.len(), 9);
    let keys: Vec<(&str, &str)> = first.iter().map(|r| (r[0].as_str(), r[1].as_str())).collect();
    assert_eq!(keys[..3], [("a_coffee.png", "0.1"), ("a_coffee.png", "0.3"), ("a_coffee.png", "0.5")]);
    assert_eq!(keys[8], ("c_crop.png", "0.5"));

    // wall-clock seconds are the only column allowed to differ
    let second = batch_csv(&images, &dir.path().join("2.csv"), "0.5,0.1,0.3");
    let strip = |rows: &[Vec<String>]| rows.iter().map(|r| r[..9].to_vec()).collect::<Vec<_>>();
    assert_eq!(strip(&first), strip(&second));

    let astronaut: Vec<f64> = first.iter().filter(|r| r[0] == "b_astronaut.png").map(|r| r[5].parse().unwrap()).collect();
    assert!(astronaut.windows(2).all(|w| w[1] <= w[0]), "{astronaut:?}");
}

#[test]
fn batch_rejects_an_empty_directory() {
    let dir = tempfile::tempdir().unwrap();
    let res = run(&["batch", "--dir", p(dir.path()), "--sr-list", "0.3", "--csv", p(&dir.path().join("x.csv"))]);
    assert_eq!(res.status.code(), Some(2));
}
