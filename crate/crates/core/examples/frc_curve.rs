//! FRC curve between a texture patch and a lowpassed copy, written as CSV.
//!
//!     cargo run --release --example frc_curve [out_dir]

use std::path::PathBuf;

use sfrc::bandpass::{bandpass, BandSpec};
use sfrc::degrade::{make_phantom, PhantomKind};
use sfrc::frc::{frc, threshold_crossing};
use sfrc::image::{fraction_to_normalized, normalized_to_fraction, Patch};
use sfrc::io::write_frc_curve;

fn main() -> sfrc::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let img = make_phantom(PhantomKind::Texture, 64, 7)?.image;
    let cutoff = fraction_to_normalized(0.25);
    let low = bandpass(&img, &BandSpec::new(0.0, cutoff)?)?;

    let a = Patch::from_data(64, img.into_data())?;
    let b = Patch::from_data(64, low.into_data())?;
    let curve = frc(&a, &b, 1.0 / 64.0)?;
    let t = threshold_crossing(&curve, 0.5)?;
    println!(
        "lowpass at {cutoff} cycles/px: FRC crosses 0.5 at {:.4} cycles/px ({:.3} of Nyquist)",
        t.x_ct,
        normalized_to_fraction(t.x_ct)
    );
    let path = out.join("frc_curve.csv");
    write_frc_curve(&path, &curve)?;
    println!("curve written to {}", path.display());
    Ok(())
}
