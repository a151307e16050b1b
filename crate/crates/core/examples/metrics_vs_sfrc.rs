//! Global metrics against patch-wise sFRC on local versus global corruption.
//!
//!     cargo run --release --example metrics_vs_sfrc

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use sfrc::degrade::{make_phantom, scramble_region, PhantomKind};
use sfrc::image::fraction_to_normalized;
use sfrc::metrics::compare;
use sfrc::scanner::{scan, SfrcConfig};

fn main() -> sfrc::Result<()> {
    let reference = make_phantom(PhantomKind::Texture, 256, 41)?.image;
    let mut local = reference.clone();
    for (i, (x, y)) in [(8, 8), (72, 136), (136, 72), (200, 200)]
        .into_iter()
        .enumerate()
    {
        local = scramble_region(
            &local,
            (x, y, 48, 48),
            fraction_to_normalized(0.3),
            i as u64,
        )?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let normal = Normal::new(0.0, 0.05).expect("valid normal");
    let global = reference.with_data(
        reference
            .data()
            .iter()
            .map(|v| v + normal.sample(&mut rng))
            .collect(),
    )?;

    let cfg = SfrcConfig::new(64, 0.5, fraction_to_normalized(0.33));
    for (name, img) in [("local", &local), ("global", &global)] {
        let m = compare(&reference, img, 1.0)?;
        let r = scan(&reference, img, &cfg)?;
        println!(
            "{name:<6}  PSNR {:6.2}  SSIM {:.3}  Hellinger {:.3}  sFRC rate {:.3}",
            m.psnr, m.ssim, m.hellinger, r.hallucination_rate
        );
    }
    Ok(())
}
