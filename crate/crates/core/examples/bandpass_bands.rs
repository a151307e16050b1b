//! Split an image into the five standard radial bands and report their energy.
//!
//!     cargo run --release --example bandpass_bands

use sfrc::bandpass::{decompose, standard_bands};
use sfrc::degrade::{make_phantom, PhantomKind};
use sfrc::image::normalized_to_fraction;

fn main() -> sfrc::Result<()> {
    let img = make_phantom(PhantomKind::Anatomy, 256, 0)?.image;
    let bands = standard_bands();
    let parts = decompose(&img, &bands)?;
    let total = img.energy();
    for (b, part) in bands.iter().zip(&parts) {
        println!(
            "[{:.2}, {:.2}) of Nyquist: {:6.2}% of energy",
            normalized_to_fraction(b.low),
            normalized_to_fraction(b.high),
            100.0 * part.energy() / total
        );
    }
    let sum: Vec<f64> = (0..img.data().len())
        .map(|i| parts.iter().map(|p| p.data()[i]).sum())
        .collect();
    let err = sum
        .iter()
        .zip(img.data())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("max reconstruction error from summed bands: {err:.2e}");
    Ok(())
}
