//! Tune x_ht from annotated corruptions and check that the tuned value flags them.
//!
//!     cargo run --release --example tune_threshold

use sfrc::degrade::{make_phantom, scramble_region, PhantomKind};
use sfrc::image::fraction_to_normalized;
use sfrc::scanner::{
    scan, tune_x_ht, AnnotationBox, AnnotationSet, FrcParams, ImageEntry, SfrcConfig, SlicePair,
    DEFAULT_EPSILON,
};

fn main() -> sfrc::Result<()> {
    let reference = make_phantom(PhantomKind::Texture, 256, 9)?.image;
    let mut test = reference.clone();
    let mut boxes = Vec::new();
    for (i, (x, y)) in [(8, 8), (136, 72), (200, 200)].into_iter().enumerate() {
        test = scramble_region(&test, (x, y, 48, 48), fraction_to_normalized(0.3), i as u64)?;
        boxes.push(AnnotationBox {
            image_id: "s0".into(),
            x,
            y,
            w: 48,
            h: 48,
            label: format!("region {i}"),
        });
    }
    let annotations = AnnotationSet {
        images: vec![ImageEntry {
            id: "s0".into(),
            width: 256,
            height: 256,
        }],
        boxes,
    };

    let params = FrcParams::new(64, 0.5);
    let slices = [SlicePair::new("s0", &reference, &test)];
    let tuned = tune_x_ht(&slices, &annotations, &params, DEFAULT_EPSILON)?;
    for a in &tuned.annotations {
        let xs: Vec<String> = a.patches.iter().map(|c| format!("{:.4}", c.x_ct)).collect();
        println!("{}: patch x_ct [{}]", a.annotation.label, xs.join(", "));
    }
    println!(
        "tuned x_ht = {:.4} (max x_ct {:.4})",
        tuned.x_ht, tuned.max_x_ct
    );

    let report = scan(&reference, &test, &SfrcConfig::new(64, 0.5, tuned.x_ht))?;
    println!(
        "scan with tuned x_ht flags {} patches",
        report.n_hallucinated
    );
    Ok(())
}
