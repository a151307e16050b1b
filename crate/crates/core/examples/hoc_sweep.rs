//! Hallucination-occurrence curves for increasing k-space acceleration.
//!
//!     cargo run --release --example hoc_sweep [out_dir]

use std::path::PathBuf;

use sfrc::degrade::{kspace_undersample, make_phantom, PhantomKind};
use sfrc::io::write_hoc_curve;
use sfrc::scanner::{hoc_curve, FrcParams, SlicePair};
use sfrc::NYQUIST;

fn main() -> sfrc::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let reference = make_phantom(PhantomKind::Texture, 240, 21)?.image;
    let params = FrcParams::new(48, 0.75);
    for a in 1..=3 {
        let test = kspace_undersample(&reference, a)?;
        let hoc = hoc_curve(
            &[SlicePair::new("s", &reference, &test)],
            &params,
            0.0,
            NYQUIST,
            50,
        )?;
        println!("acceleration {a}: AU-HOC {:.3}", hoc.au_hoc);
        write_hoc_curve(&out.join(format!("hoc_a{a}.csv")), &hoc)?;
    }
    Ok(())
}
