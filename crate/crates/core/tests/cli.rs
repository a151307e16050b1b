use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sfrc::degrade::{make_phantom, scramble_region, PhantomKind};
use sfrc::image::fraction_to_normalized;
use sfrc::io::{read_report, write_annotations, write_image};
use sfrc::scanner::{AnnotationBox, AnnotationSet, ImageEntry};

fn sfrc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfrc"))
        .args(args)
        .output()
        .unwrap()
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

/// `ref/s0.sfrc`, `test/s0.sfrc` with one scrambled box, and annotations.
fn fixture(dir: &Path) {
    fs::create_dir_all(dir.join("ref")).unwrap();
    fs::create_dir_all(dir.join("test")).unwrap();
    let reference = make_phantom(PhantomKind::Texture, 128, 5).unwrap().image;
    let test =
        scramble_region(&reference, (72, 8, 48, 48), fraction_to_normalized(0.3), 1).unwrap();
    write_image(&dir.join("ref/s0.sfrc"), &reference).unwrap();
    write_image(&dir.join("test/s0.sfrc"), &test).unwrap();
    let set = AnnotationSet {
        images: vec![ImageEntry {
            id: "s0".into(),
            width: 128,
            height: 128,
        }],
        boxes: vec![AnnotationBox {
            image_id: "s0".into(),
            x: 72,
            y: 8,
            w: 48,
            h: 48,
            label: "scrambled".into(),
        }],
    };
    write_annotations(&dir.join("ann.json"), &set).unwrap();
}

#[test]
fn tune_then_scan_flags_the_annotated_patch() {
    let d = tempfile::tempdir().unwrap();
    fixture(d.path());
    let (r, t) = (s(&d.path().join("ref")), s(&d.path().join("test")));
    let out = sfrc(&[
        "tune",
        "--reference",
        &r,
        "--test",
        &t,
        "--annotations",
        &s(&d.path().join("ann.json")),
        "-o",
        &s(&d.path().join("tune")),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let x_ht: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!(x_ht > 0.0 && x_ht <= 0.5);
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(d.path().join("tune/tuning_report.json")).unwrap())
            .unwrap();
    assert_eq!(
        report["annotations"][0]["patches"]
            .as_array()
            .unwrap()
            .len(),
        1
    );

    let out = sfrc(&[
        "scan",
        "--reference",
        &r,
        "--test",
        &t,
        "--xht",
        &x_ht.to_string(),
        "-o",
        &s(&d.path().join("scan")),
    ]);
    assert!(out.status.success());
    let rep = read_report(&d.path().join("scan/s0.report.json")).unwrap();
    let flagged: Vec<_> = rep.report.hallucinated().map(|p| (p.x, p.y)).collect();
    assert!(flagged.contains(&(64, 0)), "{flagged:?}");
    assert!(d.path().join("scan/s0.overlay.png").exists());
    assert!(d.path().join("scan/summary.json").exists());
}

#[test]
fn metrics_on_identical_pair_reports_inf() {
    let d = tempfile::tempdir().unwrap();
    fixture(d.path());
    let r = s(&d.path().join("ref"));
    let out = sfrc(&[
        "metrics",
        "--reference",
        &r,
        "--test",
        &r,
        "--data-range",
        "1",
        "-o",
        &s(d.path()),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("psnr inf ssim 1 hellinger 0"), "{text}");
    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(d.path().join("metrics.json")).unwrap()).unwrap();
    assert_eq!(json[0]["psnr"], "inf");
}

#[test]
fn usage_and_config_errors_exit_2() {
    let d = tempfile::tempdir().unwrap();
    fixture(d.path());
    let (r, t) = (s(&d.path().join("ref")), s(&d.path().join("test")));
    let o = s(&d.path().join("o"));

    let out = sfrc(&[
        "hoc",
        "--reference",
        &r,
        "--test",
        &t,
        "--xht-min-fraction",
        "0.8",
        "--xht-max-fraction",
        "0.2",
        "-o",
        &o,
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = sfrc(&[
        "scan",
        "--reference",
        &s(&d.path().join("nowhere")),
        "--test",
        &t,
        "--xht",
        "0.1",
        "-o",
        &o,
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = sfrc(&["scan", "--reference", &r, "--test", &t, "-o", &o]);
    assert_eq!(out.status.code(), Some(2), "x_ht is required");
    let out = sfrc(&[
        "scan",
        "--reference",
        &r,
        "--test",
        &t,
        "--xht",
        "0.1",
        "--xht-fraction",
        "0.2",
        "-o",
        &o,
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = sfrc(&[
        "scan",
        "--reference",
        &r,
        "--test",
        &t,
        "--xht",
        "0.1",
        "--patch-size",
        "7",
        "-o",
        &o,
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(sfrc(&["frobnicate"]).status.code(), Some(2));

    let cfg = d.path().join("bad.toml");
    fs::write(&cfg, "patch_sise = 64\n").unwrap();
    let out = sfrc(&[
        "--config",
        &s(&cfg),
        "scan",
        "--reference",
        &r,
        "--test",
        &t,
        "--xht",
        "0.1",
        "-o",
        &o,
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn data_errors_exit_3() {
    let d = tempfile::tempdir().unwrap();
    fixture(d.path());
    let r = s(&d.path().join("ref"));
    let junk = d.path().join("junk");
    fs::create_dir_all(&junk).unwrap();
    fs::write(junk.join("s0.sfrc"), b"not an image").unwrap();
    let out = sfrc(&[
        "scan",
        "--reference",
        &r,
        "--test",
        &s(&junk),
        "--xht",
        "0.1",
        "-o",
        &s(&d.path().join("o")),
    ]);
    assert_eq!(out.status.code(), Some(3));

    let empty = d.path().join("empty.json");
    fs::write(&empty, r#"{"images": [], "boxes": []}"#).unwrap();
    let out = sfrc(&[
        "tune",
        "--reference",
        &r,
        "--test",
        &r,
        "--annotations",
        &s(&empty),
        "-o",
        &s(&d.path().join("o")),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn flags_override_config_file() {
    let d = tempfile::tempdir().unwrap();
    fixture(d.path());
    let (r, t) = (s(&d.path().join("ref")), s(&d.path().join("test")));
    let cfg = d.path().join("run.toml");
    fs::write(
        &cfg,
        format!("reference = {r:?}\ntest = {t:?}\npatch_size = 32\nxht_fraction = 0.3\n"),
    )
    .unwrap();

    let from_file = d.path().join("a");
    assert!(sfrc(&["--config", &s(&cfg), "scan", "-o", &s(&from_file)])
        .status
        .success());
    let rep = read_report(&from_file.join("s0.report.json")).unwrap();
    assert_eq!(rep.config.frc.patch_size, 32);
    assert!((rep.config.x_ht - 0.15).abs() < 1e-12);

    let flagged = d.path().join("b");
    assert!(sfrc(&[
        "--config",
        &s(&cfg),
        "scan",
        "--patch-size",
        "64",
        "-o",
        &s(&flagged)
    ])
    .status
    .success());
    let rep = read_report(&flagged.join("s0.report.json")).unwrap();
    assert_eq!(rep.config.frc.patch_size, 64);
    assert_eq!(rep.report.n_patches, 4);
}

#[test]
fn simulate_and_decompose_write_outputs() {
    let d = tempfile::tempdir().unwrap();
    let sim = d.path().join("sim");
    let out = sfrc(&[
        "simulate",
        "--kind",
        "kspace",
        "--acceleration",
        "3",
        "--size",
        "96",
        "-o",
        &s(&sim),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(sim.join("reference.sfrc").exists() && sim.join("kspace.sfrc").exists());

    let out = sfrc(&[
        "simulate",
        "--kind",
        "distortion",
        "--phantom",
        "anatomy",
        "--size",
        "64",
        "--angles",
        "0:360:4",
        "-o",
        &s(&sim),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(sim.join("distortion.sino.sfrc.json").exists());

    let bands = d.path().join("bands");
    let out = sfrc(&[
        "decompose",
        "--input",
        &s(&sim.join("kspace.sfrc")),
        "--bands",
        "0:0.5,0.5:1",
        "-o",
        &s(&bands),
    ]);
    assert!(out.status.success());
    assert!(bands.join("kspace.band0.sfrc").exists() && bands.join("kspace.band1.sfrc").exists());
    assert!(!bands.join("kspace.band2.sfrc").exists());

    let out = sfrc(&[
        "simulate",
        "--kind",
        "noise",
        "--dose",
        "0",
        "--size",
        "64",
        "-o",
        &s(&sim),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
