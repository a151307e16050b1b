//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.

mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use common::{direct_frc, texture, texture_patch, uniform_noise};
use sfrc::bandpass::{bandpass, BandSpec};
use sfrc::degrade::{
    add_noise, angle_range, downsample_upsample, fbp, inscribed_disk_mask, kspace_undersample,
    make_phantom, radon, scramble_region, PhantomKind,
};
use sfrc::frc::{frc, threshold_crossing};
use sfrc::image::{fraction_to_normalized, normalized_to_fraction, Image, Patch};
use sfrc::io::{
    decode_image, encode_image, render_overlay, write_annotations, write_image, DisplayWindow,
};
use sfrc::metrics::{hellinger, psnr, ssim};
use sfrc::scanner::{
    hoc_curve, make_grid, patch_crossings, scan, tune_x_ht, AnnotationBox, AnnotationSet,
    FrcParams, ImageEntry, SfrcConfig, SfrcReport, SlicePair,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
/// Per command: name, written files with contents, stdout.
type CliRun = (String, Vec<(PathBuf, Vec<u8>)>, String);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn c1_frc_identity_and_oracle() -> Outcome {
    let mut worst_self: f64 = 0.0;
    for seed in 0..100 {
        let p = texture_patch(64, seed);
        let c = frc(&p, &p, 1.0 / 64.0).map_err(|e| e.to_string())?;
        ensure(!c.low_content, || {
            format!("seed {seed} patch is low content")
        })?;
        for v in &c.values {
            worst_self = worst_self.max((v - 1.0).abs());
        }
    }
    ensure(worst_self <= 1e-9, || {
        format!("self-FRC deviates by {worst_self:e}")
    })?;

    let mut worst_dft: f64 = 0.0;
    for seed in 0..20 {
        let a = uniform_noise(16, 16, 1000 + seed);
        let n = uniform_noise(16, 16, 2000 + seed);
        let b: Vec<f64> = a.iter().zip(&n).map(|(x, y)| x + 0.7 * y).collect();
        let got = frc(
            &Patch::from_data(16, a.clone()).unwrap(),
            &Patch::from_data(16, b.clone()).unwrap(),
            1.0 / 16.0,
        )
        .map_err(|e| e.to_string())?;
        let want = direct_frc(&a, &b, 16, 1.0 / 16.0);
        ensure(got.values.len() == want.len(), || {
            "ring count differs".into()
        })?;
        worst_dft = worst_dft.max(max_abs_diff(&got.values, &want));
    }
    ensure(worst_dft <= 1e-6, || {
        format!("FFT vs direct DFT deviates by {worst_dft:e}")
    })?;
    Ok(format!(
        "max |self-FRC - 1| = {worst_self:.1e}, max |FFT - DFT| = {worst_dft:.1e}"
    ))
}

fn c2_scale_invariance() -> Outcome {
    let scales = [0.1, 1.0, 7.3];
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let p1 = texture_patch(64, seed);
        let noise = uniform_noise(64, 64, 500 + seed);
        let p2 = Patch::from_data(
            64,
            p1.data
                .iter()
                .zip(&noise)
                .map(|(a, b)| a + 0.3 * b)
                .collect(),
        )
        .unwrap();
        let base = frc(&p1, &p2, 1.0 / 64.0).unwrap();
        for &a in &scales {
            for &b in &scales {
                let c = frc(&p1.scaled(a), &p2.scaled(b), 1.0 / 64.0).unwrap();
                worst = worst.max(max_abs_diff(&c.values, &base.values));
            }
        }
    }
    ensure(worst <= 1e-9, || {
        format!("scaled FRC deviates by {worst:e}")
    })?;
    Ok(format!(
        "max deviation {worst:.1e} over 20 pairs x 9 scale combinations"
    ))
}

fn c3_lowpass_cutoff() -> Outcome {
    let bin = 1.0 / 64.0;
    let mut worst_bins: f64 = 0.0;
    for &c in &[0.15, 0.25, 0.35] {
        let cutoff = fraction_to_normalized(c);
        for seed in 0..10 {
            let img = texture(64, 300 + seed);
            let low = bandpass(&img, &BandSpec::new(0.0, cutoff).unwrap()).unwrap();
            let p1 = Patch::from_data(64, img.into_data()).unwrap();
            let p2 = Patch::from_data(64, low.into_data()).unwrap();
            let curve = frc(&p1, &p2, bin).unwrap();
            let t = threshold_crossing(&curve, 0.5).unwrap();
            ensure(t.crossed, || {
                format!("cutoff {c} seed {seed} never crossed")
            })?;
            let err = (t.x_ct - cutoff).abs() / bin;
            ensure(err <= 1.0, || {
                format!(
                    "cutoff {c} seed {seed}: x_ct {} vs {cutoff} ({err:.2} bins)",
                    t.x_ct
                )
            })?;
            worst_bins = worst_bins.max(err);
        }
    }
    Ok(format!(
        "worst error {worst_bins:.2} ring bins over 30 cases"
    ))
}

fn c4_grid_arithmetic() -> Outcome {
    let g = make_grid(512, 512, 64).unwrap();
    ensure(g.len() == 64, || {
        format!("512/64 gives {} patches", g.len())
    })?;
    ensure(188 * g.len() == 12032, || {
        "188 slices do not total 12032".into()
    })?;
    let g = make_grid(320, 320, 48).unwrap();
    ensure(g.len() == 49, || {
        format!("320/48 gives {} patches", g.len())
    })?;
    ensure(4 * g.len() == 196, || "4 slices do not total 196".into())?;

    let mut runner = TestRunner::new(Config {
        failure_persistence: None,
        ..Config::with_cases(200)
    });
    runner
        .run(&(4usize..40, 8usize..700, 8usize..700), |(half, w, h)| {
            let p = 2 * half;
            prop_assume!(p <= w && p <= h);
            let g = make_grid(w, h, p).unwrap();
            prop_assert_eq!(g.n_cols, w.div_ceil(p));
            prop_assert_eq!(g.n_rows, h.div_ceil(p));
            prop_assert_eq!(g.len(), w.div_ceil(p) * h.div_ceil(p));
            for &(x, y) in &g.origins {
                prop_assert!(x + p <= w && y + p <= h);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("512/64 -> 64, 320/48 -> 49, ceil law holds for 200 random triples".into())
}

fn mean_x_ct(reference: &Image, test: &Image, patch: usize, y: f64) -> f64 {
    let (_, cs) = patch_crossings(reference, test, &FrcParams::new(patch, y)).unwrap();
    let live: Vec<f64> = cs
        .iter()
        .filter(|c| !c.low_content)
        .map(|c| c.x_ct)
        .collect();
    live.iter().sum::<f64>() / live.len() as f64
}

fn c5_downsample_band_loss() -> Outcome {
    let mut fractions = Vec::new();
    for seed in 1..=5 {
        let img = texture(256, seed);
        let down = downsample_upsample(&img, 4).unwrap();
        let f = normalized_to_fraction(mean_x_ct(&img, &down, 64, 0.5));
        ensure((0.18..=0.35).contains(&f), || {
            format!("seed {seed}: mean x_ct = {f:.4} of Nyquist")
        })?;
        fractions.push(format!("{f:.3}"));
    }
    Ok(format!(
        "mean x_ct (Nyquist fraction) per seed: {}",
        fractions.join(", ")
    ))
}

fn hoc_checks(name: &str, reference: &Image, test: &Image, patch: usize) -> Result<f64, String> {
    let slices = [SlicePair::new(name, reference, test)];
    let hoc =
        hoc_curve(&slices, &FrcParams::new(patch, 0.5), 0.0, 0.5, 50).map_err(|e| e.to_string())?;
    ensure(hoc.rates.len() == 50, || {
        format!("{name}: {} steps", hoc.rates.len())
    })?;
    ensure(hoc.rates[0] == 0.0, || {
        format!("{name}: rate(0) = {}", hoc.rates[0])
    })?;
    ensure(hoc.rates.windows(2).all(|w| w[0] <= w[1]), || {
        format!("{name}: rates decrease")
    })?;
    ensure((0.0..=1.0).contains(&hoc.au_hoc), || {
        format!("{name}: AU-HOC {}", hoc.au_hoc)
    })?;
    Ok(hoc.au_hoc)
}

fn c6_hoc() -> Outcome {
    let img = texture(256, 11);
    let mut noisy = img.data().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let normal = Normal::new(0.0, 0.05).unwrap();
    for v in &mut noisy {
        *v += normal.sample(&mut rng);
    }
    let noisy = img.with_data(noisy).unwrap();
    let datasets = [
        ("faithful", img.clone()),
        ("downsample4", downsample_upsample(&img, 4).unwrap()),
        ("kspace2", kspace_undersample(&img, 2).unwrap()),
        ("kspace3", kspace_undersample(&img, 3).unwrap()),
        ("noise", noisy),
    ];
    let mut parts = Vec::new();
    for (name, test) in &datasets {
        let au = hoc_checks(name, &img, test, 64)?;
        parts.push(format!("{name} {au:.3}"));
        if *name == "faithful" {
            ensure(au == 0.0, || format!("faithful AU-HOC = {au}"))?;
        }
    }
    Ok(format!("AU-HOC: {}", parts.join(", ")))
}

fn c7_undersampling_trend() -> Outcome {
    let img = texture(256, 21);
    let cfg = SfrcConfig::new(48, 0.75, fraction_to_normalized(0.32));
    let mut rates = Vec::new();
    for a in 1..=3 {
        let test = kspace_undersample(&img, a).unwrap();
        rates.push(scan(&img, &test, &cfg).unwrap().hallucination_rate);
    }
    ensure(rates[0] < rates[1] && rates[1] < rates[2], || {
        format!("rates {rates:?} are not strictly increasing")
    })?;
    Ok(format!(
        "rates a=1,2,3: {:.3} < {:.3} < {:.3}",
        rates[0], rates[1], rates[2]
    ))
}

fn in_circle_rate(report: &SfrcReport, size: usize) -> f64 {
    let c = size as f64 / 2.0;
    let p = report.patch_size as f64;
    let inside: Vec<_> = report
        .records
        .iter()
        .filter(|r| {
            let dx = r.x as f64 + p / 2.0 - c;
            let dy = r.y as f64 + p / 2.0 - c;
            (dx * dx + dy * dy).sqrt() < c
        })
        .collect();
    inside.iter().filter(|r| r.hallucinated).count() as f64 / inside.len() as f64
}

fn c8_conventional_artifacts() -> Outcome {
    // CT-sized slice with strong body edges around low-contrast detail.
    let size = 512;
    let phantom =
        inscribed_disk_mask(&make_phantom(PhantomKind::Anatomy, size, 0).unwrap().image).unwrap();
    let cfg = SfrcConfig::new(64, 0.5, fraction_to_normalized(0.33));

    let full = fbp(
        &radon(&phantom, &angle_range(0.0, 180.0, 1.0).unwrap(), size).unwrap(),
        size,
    )
    .unwrap();
    let full_rate = in_circle_rate(&scan(&phantom, &full, &cfg).unwrap(), size);

    let wedge_sino = radon(&phantom, &angle_range(30.0, 150.0, 2.0).unwrap(), size).unwrap();
    let wedge = fbp(&wedge_sino, size).unwrap();
    let wedge_rate = in_circle_rate(&scan(&phantom, &wedge, &cfg).unwrap(), size);

    let forward = angle_range(0.0, 360.0, 0.5).unwrap();
    let back = angle_range(0.0, 350.0, 350.0 / forward.len() as f64).unwrap();
    let sino = radon(&phantom, &forward, size).unwrap();
    let distorted = fbp(&sino.with_angles(back).unwrap(), size).unwrap();
    let distortion_rate = in_circle_rate(&scan(&phantom, &distorted, &cfg).unwrap(), size);

    ensure(wedge_rate > 0.5 && distortion_rate > 0.5, || {
        format!("in-circle rates: wedge {wedge_rate:.3}, distortion {distortion_rate:.3}")
    })?;
    Ok(format!(
        "in-circle rates: missing wedge {wedge_rate:.3}, distortion {distortion_rate:.3} (full-angle reference {full_rate:.3})"
    ))
}

/// Reference texture and a copy with five scrambled boxes, one per grid patch.
pub fn planted_fixture() -> (Image, Image, AnnotationSet) {
    let reference = texture(256, 41);
    let cells = [(0, 0), (1, 2), (2, 1), (3, 3), (0, 3)];
    let mut test = reference.clone();
    let mut boxes = Vec::new();
    for (i, &(cx, cy)) in cells.iter().enumerate() {
        let (x, y) = (cx * 64 + 8, cy * 64 + 8);
        test = scramble_region(
            &test,
            (x, y, 48, 48),
            fraction_to_normalized(0.3),
            100 + i as u64,
        )
        .unwrap();
        boxes.push(AnnotationBox {
            image_id: "slice0".into(),
            x,
            y,
            w: 48,
            h: 48,
            label: format!("planted{i}"),
        });
    }
    let set = AnnotationSet {
        images: vec![ImageEntry {
            id: "slice0".into(),
            width: 256,
            height: 256,
        }],
        boxes,
    };
    (reference, test, set)
}

fn c9_tuning_closure() -> Outcome {
    let (reference, test, set) = planted_fixture();
    let params = FrcParams::new(64, 0.5);
    let slices = [SlicePair::new("slice0", &reference, &test)];
    let tuned = tune_x_ht(&slices, &set, &params, 0.001).map_err(|e| e.to_string())?;
    let planted: Vec<(usize, usize)> = tuned
        .annotations
        .iter()
        .flat_map(|a| a.patches.iter().map(|c| (c.x, c.y)))
        .collect();
    ensure(planted.len() == 5, || {
        format!("{} annotated patches", planted.len())
    })?;
    let min_planted = tuned
        .annotations
        .iter()
        .flat_map(|a| a.patches.iter().map(|c| c.x_ct))
        .fold(f64::INFINITY, f64::min);

    let flagged = |x_ht: f64| {
        let mut cfg = SfrcConfig::new(64, 0.5, x_ht);
        cfg.frc = params;
        let report = scan(&reference, &test, &cfg).unwrap();
        report
            .records
            .iter()
            .filter(|r| r.hallucinated && planted.contains(&(r.x, r.y)))
            .count()
    };
    let at_tuned = flagged(tuned.x_ht);
    let below = flagged((min_planted - 1e-6).max(0.0));
    ensure(at_tuned == 5 && below == 0, || {
        format!(
            "tuned x_ht {} flags {at_tuned}/5, below-min flags {below}/5",
            tuned.x_ht
        )
    })?;
    let others = scan(&reference, &test, &SfrcConfig::new(64, 0.5, tuned.x_ht))
        .unwrap()
        .n_hallucinated
        - at_tuned;
    Ok(format!(
        "tuned x_ht {:.4} flags 5/5 planted ({others} other patches), x_ht {:.4} flags 0/5",
        tuned.x_ht,
        min_planted - 1e-6
    ))
}

fn roi_std(a: &Image, b: &Image, x0: usize, y0: usize, n: usize) -> f64 {
    let mut d = Vec::with_capacity(n * n);
    for y in y0..y0 + n {
        for x in x0..x0 + n {
            d.push(b.get(x, y) - a.get(x, y));
        }
    }
    let m = d.iter().sum::<f64>() / d.len() as f64;
    (d.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (d.len() - 1) as f64).sqrt()
}

fn c10_noise_dose() -> Outcome {
    let size = 128;
    let c = (size as f64 - 1.0) / 2.0;
    // Water-like disk: 0.02 per pixel (1 mm pixels), radius 0.45 of the image.
    let disk = Image::from_fn(size, size, 1.0, |x, y| {
        let (dx, dy) = (x as f64 - c, y as f64 - c);
        if dx * dx + dy * dy < (0.45 * size as f64).powi(2) {
            0.02
        } else {
            0.0
        }
    })
    .unwrap();
    let angles = angle_range(0.0, 180.0, 1.0).unwrap();
    let sino = radon(&disk, &angles, size).unwrap();
    let clean = fbp(&sino, size).unwrap();
    let rois = [(54, 54), (30, 54), (78, 54)];
    let n = 20;
    let flux = 1.35e5;
    let mut ratios = Vec::new();
    for &(x, y) in &rois {
        let mut sd = [0.0; 2];
        for (k, dose) in [1.0, 0.05].into_iter().enumerate() {
            for seed in 0..5 {
                let noisy = add_noise(&sino, dose, flux, 10 * seed + k as u64).unwrap();
                let recon = fbp(&noisy, size).unwrap();
                sd[k] += roi_std(&clean, &recon, x, y, n) / 5.0;
            }
        }
        ratios.push(sd[1] / sd[0]);
    }
    let target = 20f64.sqrt();
    let worst = ratios
        .iter()
        .map(|r| (r / target - 1.0).abs())
        .fold(0.0, f64::max);
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    ensure(worst <= 0.15, || {
        format!("noise ratios {} vs {target:.3}", shown.join(", "))
    })?;
    Ok(format!(
        "noise ratio per ROI {} vs sqrt(20) = {target:.3} (worst {:.1}%)",
        shown.join(", "),
        100.0 * worst
    ))
}

fn c11_metric_sanity() -> Outcome {
    let img = texture(256, 51);
    ensure(psnr(&img, &img, 1.0).unwrap() == f64::INFINITY, || {
        "PSNR(x, x) finite".into()
    })?;
    ensure(ssim(&img, &img, 1.0).unwrap() == 1.0, || {
        "SSIM(x, x) != 1".into()
    })?;
    ensure(hellinger(&img, &img, 256).unwrap() == 0.0, || {
        "H(x, x) != 0".into()
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let a: Vec<f64> = (0..1_000_000).map(|_| normal.sample(&mut rng)).collect();
    let b: Vec<f64> = (0..1_000_000)
        .map(|_| normal.sample(&mut rng) + 1.0)
        .collect();
    let h = hellinger(
        &Image::new(1000, 1000, 1.0, a).unwrap(),
        &Image::new(1000, 1000, 1.0, b).unwrap(),
        256,
    )
    .unwrap();
    let closed = (1.0 - (-1.0f64 / 8.0).exp()).sqrt();
    ensure((h - closed).abs() <= 0.01, || {
        format!("Gaussian Hellinger {h:.4} vs {closed:.4}")
    })?;

    // Local corruption: the planted fixture. Global: white noise everywhere.
    let (img, local, _) = planted_fixture();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let normal = Normal::new(0.0, 0.05).unwrap();
    let global = img
        .with_data(
            img.data()
                .iter()
                .map(|v| v + normal.sample(&mut rng))
                .collect(),
        )
        .unwrap();
    let cfg = SfrcConfig::new(64, 0.5, fraction_to_normalized(0.33));
    let ssim_local = ssim(&img, &local, 1.0).unwrap();
    let ssim_global = ssim(&img, &global, 1.0).unwrap();
    let rate_local = scan(&img, &local, &cfg).unwrap().hallucination_rate;
    let rate_global = scan(&img, &global, &cfg).unwrap().hallucination_rate;
    ensure(ssim_local > ssim_global && rate_local > rate_global, || {
        format!(
            "local SSIM {ssim_local:.3} / rate {rate_local:.3} vs global SSIM {ssim_global:.3} / rate {rate_global:.3}"
        )
    })?;
    Ok(format!(
        "identities exact; Gaussian Hellinger {h:.4} (closed form {closed:.4}); local SSIM {ssim_local:.3} > global {ssim_global:.3} while rate {rate_local:.3} > {rate_global:.3}"
    ))
}

fn run_cli(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_sfrc"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "sfrc {} exited with {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            (
                p.strip_prefix(dir).unwrap().to_path_buf(),
                fs::read(&p).unwrap(),
            )
        })
        .collect()
}

/// Runs every subcommand into `root/<threads>/` and returns all outputs.
fn cli_pass(root: &Path, inputs: &Path, threads: usize) -> Result<Vec<CliRun>, String> {
    let t = threads.to_string();
    let base = root.join(format!("t{threads}"));
    let reference = inputs.join("ref");
    let test = inputs.join("test");
    let ann = inputs.join("annotations.json");
    let d = |name: &str| base.join(name).to_string_lossy().into_owned();
    let s = |p: &Path| p.to_string_lossy().into_owned();
    let runs: Vec<(&str, Vec<String>)> = vec![
        (
            "simulate",
            vec![
                "simulate".into(),
                "--kind".into(),
                "missing_wedge".into(),
                "--phantom".into(),
                "texture".into(),
                "--size".into(),
                "64".into(),
                "--seed".into(),
                "3".into(),
                "-o".into(),
                d("simulate"),
            ],
        ),
        (
            "simulate_noise",
            vec![
                "simulate".into(),
                "--kind".into(),
                "noise".into(),
                "--size".into(),
                "64".into(),
                "--angles".into(),
                "0:180:2".into(),
                "--seed".into(),
                "3".into(),
                "-o".into(),
                d("simulate_noise"),
            ],
        ),
        (
            "tune",
            vec![
                "tune".into(),
                "--reference".into(),
                s(&reference),
                "--test".into(),
                s(&test),
                "--annotations".into(),
                s(&ann),
                "-o".into(),
                d("tune"),
            ],
        ),
        (
            "scan",
            vec![
                "scan".into(),
                "--reference".into(),
                s(&reference),
                "--test".into(),
                s(&test),
                "--xht-fraction".into(),
                "0.33".into(),
                "-o".into(),
                d("scan"),
            ],
        ),
        (
            "hoc",
            vec![
                "hoc".into(),
                "--reference".into(),
                s(&reference),
                "--test".into(),
                s(&test),
                "-o".into(),
                d("hoc"),
            ],
        ),
        (
            "decompose",
            vec![
                "decompose".into(),
                "--input".into(),
                s(&test.join("slice0.sfrc")),
                "-o".into(),
                d("decompose"),
            ],
        ),
        (
            "metrics",
            vec![
                "metrics".into(),
                "--reference".into(),
                s(&reference),
                "--test".into(),
                s(&test),
                "--data-range".into(),
                "1".into(),
                "-o".into(),
                d("metrics"),
            ],
        ),
    ];
    let mut outputs = Vec::new();
    for (name, mut args) in runs {
        args.push("--threads".into());
        args.push(t.clone());
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let stdout = run_cli(&refs)?;
        outputs.push((name.to_string(), snapshot(&base.join(name)), stdout));
    }
    Ok(outputs)
}

fn c12_determinism_and_io() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let inputs = tmp.path().join("inputs");
    fs::create_dir_all(inputs.join("ref")).unwrap();
    fs::create_dir_all(inputs.join("test")).unwrap();
    let (reference, test, set) = planted_fixture();
    write_image(&inputs.join("ref/slice0.sfrc"), &reference).unwrap();
    write_image(&inputs.join("test/slice0.sfrc"), &test).unwrap();
    write_annotations(&inputs.join("annotations.json"), &set).unwrap();

    let first = cli_pass(&tmp.path().join("a"), &inputs, 1)?;
    ensure(first.iter().all(|(_, files, _)| !files.is_empty()), || {
        "a command wrote nothing".into()
    })?;
    let n_files: usize = first.iter().map(|(_, f, _)| f.len()).sum();
    let rerun = cli_pass(&tmp.path().join("b"), &inputs, 1)?;
    ensure(rerun == first, || "rerun with --threads 1 differs".into())?;
    for threads in 2..=8 {
        let other = cli_pass(&tmp.path().join("a"), &inputs, threads)?;
        for ((name, a, sa), (_, b, sb)) in first.iter().zip(&other) {
            ensure(a == b && sa == sb, || {
                format!("{name} differs with --threads {threads}")
            })?;
        }
    }

    let img = texture(64, 61).map(|v| v * 1e3 - 17.25).unwrap();
    let back = decode_image(&encode_image(&img), Path::new("mem")).map_err(|e| e.to_string())?;
    ensure(
        back.data()
            .iter()
            .zip(img.data())
            .all(|(a, b)| (*a as f32).to_bits() == (*b as f32).to_bits()),
        || "raw round trip changed samples".into(),
    )?;
    let f32_img = back.clone();
    let again = decode_image(&encode_image(&f32_img), Path::new("mem")).unwrap();
    ensure(again == f32_img, || {
        "f32-exact round trip not bitwise".into()
    })?;

    let report = scan(&reference, &test, &SfrcConfig::new(64, 0.5, 0.2)).unwrap();
    let w = DisplayWindow::auto(&test);
    let png1 = render_overlay(&test, &report, w).unwrap();
    let png2 = render_overlay(&test, &report, w).unwrap();
    ensure(png1 == png2, || "overlay PNG bytes differ".into())?;
    Ok(format!(
        "7 commands x threads 1..8 byte-identical ({n_files} files each); raw round trip bitwise; overlay PNG stable"
    ))
}

fn main() {
    let criteria: [Criterion; 12] = [
        (
            "FRC identity & direct-DFT oracle",
            c1_frc_identity_and_oracle,
        ),
        ("scale invariance", c2_scale_invariance),
        ("lowpass cutoff recovery", c3_lowpass_cutoff),
        ("grid arithmetic", c4_grid_arithmetic),
        ("downsampling x4 band loss", c5_downsample_band_loss),
        ("HOC monotonicity & endpoints", c6_hoc),
        ("k-space undersampling trend", c7_undersampling_trend),
        (
            "conventional-artifact saturation",
            c8_conventional_artifacts,
        ),
        ("tuning closure", c9_tuning_closure),
        ("noise-dose law", c10_noise_dose),
        ("metric sanity", c11_metric_sanity),
        ("determinism & I/O", c12_determinism_and_io),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {:>2}  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {:>2}  {name}: {detail} [{secs:.1}s]", i + 1)
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
