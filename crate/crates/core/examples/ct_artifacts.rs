//! Conventional CT artifacts (missing wedge, angle mismatch) scanned with sFRC.
//!
//!     cargo run --release --example ct_artifacts

use sfrc::degrade::{angle_range, fbp, inscribed_disk_mask, make_phantom, radon, PhantomKind};
use sfrc::image::{fraction_to_normalized, Image};
use sfrc::metrics::psnr_masked;
use sfrc::scanner::{scan, SfrcConfig};

fn main() -> sfrc::Result<()> {
    let size = 256;
    let phantom = inscribed_disk_mask(&make_phantom(PhantomKind::Anatomy, size, 0)?.image)?;
    let cfg = SfrcConfig::new(64, 0.5, fraction_to_normalized(0.33));
    let c = (size as f64 - 1.0) / 2.0;
    let disk: Vec<bool> = (0..size * size)
        .map(|i| {
            let (x, y) = ((i % size) as f64 - c, (i / size) as f64 - c);
            x * x + y * y < (size as f64 / 2.0 - 2.0).powi(2)
        })
        .collect();

    let report = |name: &str, recon: &Image| -> sfrc::Result<()> {
        let r = scan(&phantom, recon, &cfg)?;
        let db = psnr_masked(&phantom, recon, 1.0, Some(&disk))?;
        println!(
            "{name:<14} PSNR {db:6.2} dB  flagged {:>2}/{} patches",
            r.n_hallucinated, r.n_patches
        );
        Ok(())
    };

    let full = fbp(
        &radon(&phantom, &angle_range(0.0, 180.0, 1.0)?, size)?,
        size,
    )?;
    report("full 180", &full)?;
    let wedge = fbp(
        &radon(&phantom, &angle_range(30.0, 150.0, 2.0)?, size)?,
        size,
    )?;
    report("missing wedge", &wedge)?;

    let forward = angle_range(0.0, 360.0, 0.5)?;
    let back = angle_range(0.0, 350.0, 350.0 / forward.len() as f64)?;
    let sino = radon(&phantom, &forward, size)?;
    report("distortion", &fbp(&sino.with_angles(back)?, size)?)?;
    Ok(())
}
