//! The command-line workflow driven in-process: simulate, scan, hoc.
//!
//!     cargo run --release --example cli_pipeline [work_dir]

use std::path::PathBuf;

fn main() {
    let work = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("sfrc-cli-pipeline"));
    let w = |p: &str| work.join(p).to_string_lossy().into_owned();
    let steps: Vec<Vec<String>> = vec![
        vec![
            "simulate",
            "--kind",
            "downsample",
            "--phantom",
            "texture",
            "--size",
            "256",
            "--factor",
            "4",
            "-o",
            &w("sim"),
        ]
        .into_iter()
        .map(String::from)
        .collect(),
        vec![
            "scan",
            "--reference",
            &w("sim/reference.sfrc"),
            "--test",
            &w("sim/downsample.sfrc"),
            "--xht-fraction",
            "0.33",
            "-o",
            &w("scan"),
        ]
        .into_iter()
        .map(String::from)
        .collect(),
        vec![
            "hoc",
            "--reference",
            &w("sim/reference.sfrc"),
            "--test",
            &w("sim/downsample.sfrc"),
            "--steps",
            "20",
            "-o",
            &w("hoc"),
        ]
        .into_iter()
        .map(String::from)
        .collect(),
    ];
    for args in steps {
        println!("$ sfrc {}", args.join(" "));
        let code = sfrc::cli::run(std::iter::once("sfrc".to_string()).chain(args));
        if code != 0 {
            std::process::exit(code);
        }
    }
}
