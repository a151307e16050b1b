//! Scan a locally corrupted image and render the flagged patches.
//!
//!     cargo run --release --example scan_overlay [out_dir]

use std::path::PathBuf;

use sfrc::degrade::{make_phantom, scramble_region, PhantomKind};
use sfrc::image::fraction_to_normalized;
use sfrc::io::{write_overlay, DisplayWindow};
use sfrc::scanner::{scan, SfrcConfig};

fn main() -> sfrc::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let reference = make_phantom(PhantomKind::Texture, 256, 3)?.image;
    // Two corrupted regions: one inside a patch, one straddling four.
    let mut test = scramble_region(&reference, (72, 72, 48, 48), fraction_to_normalized(0.3), 1)?;
    test = scramble_region(&test, (160, 32, 64, 64), fraction_to_normalized(0.3), 2)?;

    let cfg = SfrcConfig::new(64, 0.5, fraction_to_normalized(0.4));
    let report = scan(&reference, &test, &cfg)?;
    for r in report.hallucinated() {
        println!("patch ({:>3}, {:>3})  x_ct = {:.4}", r.x, r.y, r.x_ct);
    }
    println!(
        "{} of {} patches flagged (rate {:.3})",
        report.n_hallucinated, report.n_patches, report.hallucination_rate
    );
    let path = out.join("scan_overlay.png");
    write_overlay(&path, &test, &report, DisplayWindow::auto(&test))?;
    println!("overlay written to {}", path.display());
    Ok(())
}
