//! Reconstruction noise against dose for a uniform water disk.
//!
//!     cargo run --release --example noise_dose

use sfrc::degrade::{add_noise, angle_range, fbp, radon};
use sfrc::image::Image;

fn main() -> sfrc::Result<()> {
    let size = 128;
    let c = (size as f64 - 1.0) / 2.0;
    // 0.02 per mm with 1 mm pixels.
    let disk = Image::from_fn(size, size, 1.0, |x, y| {
        let (dx, dy) = (x as f64 - c, y as f64 - c);
        if dx * dx + dy * dy < (0.45 * size as f64).powi(2) {
            0.02
        } else {
            0.0
        }
    })?;
    let sino = radon(&disk, &angle_range(0.0, 180.0, 1.0)?, size)?;
    let clean = fbp(&sino, size)?;
    let mut base = None;
    for dose in [1.0, 0.5, 0.25, 0.1, 0.05] {
        let recon = fbp(&add_noise(&sino, dose, 1.35e5, 1)?, size)?;
        let diff: Vec<f64> = (44..84)
            .flat_map(|y| (44..84).map(move |x| (x, y)))
            .map(|(x, y)| recon.get(x, y) - clean.get(x, y))
            .collect();
        let m = diff.iter().sum::<f64>() / diff.len() as f64;
        let sd = (diff.iter().map(|d| (d - m).powi(2)).sum::<f64>() / diff.len() as f64).sqrt();
        let b = *base.get_or_insert(sd);
        println!(
            "dose {dose:>4}: noise {sd:.3e}  ratio {:.2}  (1/sqrt(dose) = {:.2})",
            sd / b,
            1.0 / f64::sqrt(dose)
        );
    }
    Ok(())
}
