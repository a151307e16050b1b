//! Patch-wise Fourier ring correlation (sFRC) for finding localized
//! hallucinations in restored or reconstructed images.
//!
//! A test image is tiled into patches and each patch is compared against the
//! same patch of a reference through its FRC curve. Patches whose curve drops
//! below a threshold `Y` before the hallucination threshold `x_ht` are
//! flagged. See the cargo examples for end-to-end usage.

pub mod bandpass;
pub mod cli;
pub mod degrade;
pub mod error;
pub mod fft;
pub mod frc;
pub mod image;
pub mod io;
pub mod metrics;
pub mod scanner;

pub use bandpass::{bandpass, decompose, standard_bands, BandSpec};
pub use error::{Error, Result};
pub use frc::{frc, threshold_crossing, FrcCurve, FrcEngine, ThresholdCrossing, Window};
pub use image::{FrequencyAxis, Image, Patch, NYQUIST};
pub use metrics::{compare, hellinger, psnr, ssim, MetricReport};
pub use scanner::{
    hoc_curve, make_grid, scan, scan_stack, tune_x_ht, AnnotationBox, AnnotationSet, FrcParams,
    HocCurve, PatchGrid, SfrcConfig, SfrcReport, SlicePair, TuningResult,
};
