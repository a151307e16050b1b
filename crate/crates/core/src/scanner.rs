//! Patch-wise scanning of image pairs, threshold tuning from annotations and
//! hallucination operating characteristic (HOC) sweeps.
//!
//! A scan tiles the reference and test images with the same [`PatchGrid`],
//! computes the ring correlation of every complementary patch pair and finds
//! the frequency `x_ct` where it first drops below the FRC threshold `Y`.
//! A test patch is labeled hallucinated when `x_ct < x_ht`.

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frc::{threshold_crossing, FrcEngine, Window};
use crate::image::{check_patch_size, validate_pair, Image, NYQUIST};

/// Default margin added to the largest annotated `x_ct` when tuning.
pub const DEFAULT_EPSILON: f64 = 0.001;

/// Minimum share of an annotation box that a patch must cover to count
/// toward tuning.
pub const ANNOTATION_OVERLAP: f64 = 0.25;

/// Square tiling of an image. Interior patches abut exactly; the last row
/// and column are pushed flush against the image edge when the size does not
/// divide evenly, overlapping their neighbours.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchGrid {
    pub patch_size: usize,
    pub n_rows: usize,
    pub n_cols: usize,
    /// Top-left corners `(x, y)` in row-major grid order.
    pub origins: Vec<(usize, usize)>,
}

impl PatchGrid {
    pub fn len(&self) -> usize {
        self.origins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origins.is_empty()
    }

    /// `(row, col)` for the `i`-th origin.
    pub fn index_of(&self, i: usize) -> (usize, usize) {
        (i / self.n_cols, i % self.n_cols)
    }
}

fn anchored_starts(extent: usize, size: usize) -> Vec<usize> {
    let n = extent.div_ceil(size);
    (0..n).map(|i| (i * size).min(extent - size)).collect()
}

pub fn make_grid(width: usize, height: usize, patch_size: usize) -> Result<PatchGrid> {
    if patch_size == 0 || patch_size > width.min(height) {
        return Err(Error::PatchTooLarge {
            patch: patch_size,
            width,
            height,
        });
    }
    let xs = anchored_starts(width, patch_size);
    let ys = anchored_starts(height, patch_size);
    let origins = ys
        .iter()
        .flat_map(|&y| xs.iter().map(move |&x| (x, y)))
        .collect();
    Ok(PatchGrid {
        patch_size,
        n_rows: ys.len(),
        n_cols: xs.len(),
        origins,
    })
}

/// The parameters that shape each patch's correlation curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrcParams {
    pub patch_size: usize,
    /// FRC threshold `Y` in `[0, 1]`.
    pub frc_threshold: f64,
    /// Ring width in normalized cycles per pixel; `None` means `1 / patch_size`.
    #[serde(default)]
    pub bin_width: Option<f64>,
    #[serde(default)]
    pub window: Window,
}

impl FrcParams {
    pub fn new(patch_size: usize, frc_threshold: f64) -> Self {
        Self {
            patch_size,
            frc_threshold,
            bin_width: None,
            window: Window::None,
        }
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width.unwrap_or(1.0 / self.patch_size as f64)
    }

    pub fn validate(&self) -> Result<()> {
        check_patch_size(self.patch_size)?;
        if !(0.0..=1.0).contains(&self.frc_threshold) {
            return Err(Error::InvalidThreshold(self.frc_threshold));
        }
        let bw = self.bin_width();
        if !(bw.is_finite() && bw > 0.0) {
            return Err(Error::ZeroBinWidth(bw));
        }
        Ok(())
    }

    fn engine(&self, pixel_size: f64) -> Result<FrcEngine> {
        FrcEngine::new(self.patch_size, self.bin_width(), pixel_size, self.window)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SfrcConfig {
    #[serde(flatten)]
    pub frc: FrcParams,
    /// Hallucination threshold `x_ht` in normalized cycles per pixel.
    pub x_ht: f64,
    /// `true`: hallucinated iff `x_ct < x_ht`; `false`: `x_ct <= x_ht`.
    #[serde(default = "default_strict")]
    pub strict_comparison: bool,
}

fn default_strict() -> bool {
    true
}

impl SfrcConfig {
    pub fn new(patch_size: usize, frc_threshold: f64, x_ht: f64) -> Self {
        Self {
            frc: FrcParams::new(patch_size, frc_threshold),
            x_ht,
            strict_comparison: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.frc.validate()?;
        if !(0.0..=NYQUIST).contains(&self.x_ht) {
            return Err(Error::InvalidHallucinationThreshold(self.x_ht));
        }
        Ok(())
    }

    pub fn is_hallucinated(&self, crossing: &PatchCrossing) -> bool {
        if crossing.low_content {
            return false;
        }
        if self.strict_comparison {
            crossing.x_ct < self.x_ht
        } else {
            crossing.x_ct <= self.x_ht
        }
    }
}

/// Correlation outcome for one complementary patch pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatchCrossing {
    pub row: usize,
    pub col: usize,
    pub x: usize,
    pub y: usize,
    pub x_ct: f64,
    pub crossed: bool,
    pub low_content: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatchRecord {
    pub row: usize,
    pub col: usize,
    pub x: usize,
    pub y: usize,
    pub x_ct: f64,
    pub crossed: bool,
    pub low_content: bool,
    pub hallucinated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SfrcReport {
    pub width: usize,
    pub height: usize,
    pub patch_size: usize,
    pub records: Vec<PatchRecord>,
    pub n_hallucinated: usize,
    pub n_patches: usize,
    pub hallucination_rate: f64,
}

impl SfrcReport {
    fn from_crossings(
        width: usize,
        height: usize,
        crossings: &[PatchCrossing],
        cfg: &SfrcConfig,
    ) -> Self {
        let records: Vec<PatchRecord> = crossings
            .iter()
            .map(|c| PatchRecord {
                row: c.row,
                col: c.col,
                x: c.x,
                y: c.y,
                x_ct: c.x_ct,
                crossed: c.crossed,
                low_content: c.low_content,
                hallucinated: cfg.is_hallucinated(c),
            })
            .collect();
        let n_hallucinated = records.iter().filter(|r| r.hallucinated).count();
        let n_patches = records.len();
        Self {
            width,
            height,
            patch_size: cfg.frc.patch_size,
            records,
            n_hallucinated,
            n_patches,
            hallucination_rate: rate(n_hallucinated, n_patches),
        }
    }

    pub fn hallucinated(&self) -> impl Iterator<Item = &PatchRecord> {
        self.records.iter().filter(|r| r.hallucinated)
    }
}

/// Share of hallucinated patches; zero for an empty scan.
pub fn rate(n_hallucinated: usize, n_patches: usize) -> f64 {
    if n_patches == 0 {
        0.0
    } else {
        n_hallucinated as f64 / n_patches as f64
    }
}

/// A reference/test pair with the identifier annotations refer to.
#[derive(Debug, Clone, Copy)]
pub struct SlicePair<'a> {
    pub id: &'a str,
    pub reference: &'a Image,
    pub test: &'a Image,
}

impl<'a> SlicePair<'a> {
    pub fn new(id: &'a str, reference: &'a Image, test: &'a Image) -> Self {
        Self {
            id,
            reference,
            test,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceReport {
    pub id: String,
    pub report: SfrcReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackReport {
    pub slices: Vec<SliceReport>,
    pub n_hallucinated: usize,
    pub n_patches: usize,
    pub hallucination_rate: f64,
}

/// Correlates every complementary patch pair of one image pair.
pub fn patch_crossings(
    reference: &Image,
    test: &Image,
    params: &FrcParams,
) -> Result<(PatchGrid, Vec<PatchCrossing>)> {
    validate_pair(reference, test)?;
    params.validate()?;
    let grid = make_grid(reference.width(), reference.height(), params.patch_size)?;
    let engine = params.engine(reference.pixel_size())?;
    let crossings = crossings_on_grid(reference, test, &grid, &engine, params.frc_threshold)?;
    Ok((grid, crossings))
}

fn crossings_on_grid(
    reference: &Image,
    test: &Image,
    grid: &PatchGrid,
    engine: &FrcEngine,
    frc_threshold: f64,
) -> Result<Vec<PatchCrossing>> {
    let size = grid.patch_size;
    grid.origins
        .par_iter()
        .enumerate()
        .map(|(i, &(x, y))| {
            let a = reference.patch(x, y, size)?;
            let b = test.patch(x, y, size)?;
            let curve = engine.curve(&a, &b)?;
            let t = threshold_crossing(&curve, frc_threshold)?;
            let (row, col) = grid.index_of(i);
            Ok(PatchCrossing {
                row,
                col,
                x,
                y,
                x_ct: t.x_ct,
                crossed: t.crossed,
                low_content: curve.low_content,
            })
        })
        .collect()
}

/// Scans one reference/test pair and labels each test patch.
pub fn scan(reference: &Image, test: &Image, cfg: &SfrcConfig) -> Result<SfrcReport> {
    cfg.validate()?;
    let (_, crossings) = patch_crossings(reference, test, &cfg.frc)?;
    Ok(SfrcReport::from_crossings(
        reference.width(),
        reference.height(),
        &crossings,
        cfg,
    ))
}

/// Scans every slice independently and aggregates the counts.
pub fn scan_stack(slices: &[SlicePair<'_>], cfg: &SfrcConfig) -> Result<StackReport> {
    let reports = slices
        .iter()
        .map(|s| {
            Ok(SliceReport {
                id: s.id.to_string(),
                report: scan(s.reference, s.test, cfg)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n_patches = reports.iter().map(|r| r.report.n_patches).sum();
    let n_hallucinated = reports.iter().map(|r| r.report.n_hallucinated).sum();
    Ok(StackReport {
        slices: reports,
        n_hallucinated,
        n_patches,
        hallucination_rate: rate(n_hallucinated, n_patches),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageEntry {
    pub id: String,
    pub width: usize,
    pub height: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationBox {
    pub image_id: String,
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
    #[serde(default)]
    pub label: String,
}

impl AnnotationBox {
    pub fn area(&self) -> usize {
        self.w * self.h
    }

    fn intersection(&self, x: usize, y: usize, size: usize) -> usize {
        let ix = (self.x + self.w)
            .min(x + size)
            .saturating_sub(self.x.max(x));
        let iy = (self.y + self.h)
            .min(y + size)
            .saturating_sub(self.y.max(y));
        ix * iy
    }

    fn inside(&self, x: usize, y: usize, size: usize) -> bool {
        self.x >= x && self.y >= y && self.x + self.w <= x + size && self.y + self.h <= y + size
    }

    /// Whether the patch at `(x, y)` should supply an `x_ct` for this box:
    /// it covers at least a quarter of the box, contains it, or is itself
    /// entirely covered by a box larger than a patch.
    pub fn selects_patch(&self, x: usize, y: usize, size: usize) -> bool {
        let inter = self.intersection(x, y, size);
        if inter == 0 {
            return false;
        }
        inter as f64 >= ANNOTATION_OVERLAP * self.area() as f64
            || self.inside(x, y, size)
            || inter == size * size
    }
}

/// Expert-marked hallucination boxes over a set of images.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AnnotationSet {
    pub images: Vec<ImageEntry>,
    pub boxes: Vec<AnnotationBox>,
}

impl AnnotationSet {
    /// Checks ids, non-empty boxes and image bounds.
    pub fn validate(&self) -> Result<()> {
        for b in &self.boxes {
            let img = self
                .images
                .iter()
                .find(|i| i.id == b.image_id)
                .ok_or_else(|| Error::UnknownImageId(b.image_id.clone()))?;
            if b.w == 0 || b.h == 0 {
                return Err(Error::InvalidAnnotation(format!(
                    "box on {:?} has zero extent",
                    b.image_id
                )));
            }
            if b.x + b.w > img.width || b.y + b.h > img.height {
                return Err(Error::InvalidAnnotation(format!(
                    "box ({}, {}, {}, {}) exceeds {}x{} image {:?}",
                    b.x, b.y, b.w, b.h, img.width, img.height, b.image_id
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationCrossings {
    pub annotation: AnnotationBox,
    pub patches: Vec<PatchCrossing>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningResult {
    pub x_ht: f64,
    /// Largest `x_ct` among the annotated, non-low-content patches.
    pub max_x_ct: f64,
    pub epsilon: f64,
    /// `x_ht` hit Nyquist; the annotations look like faithful patches.
    pub clamped: bool,
    pub annotations: Vec<AnnotationCrossings>,
}

/// Sets `x_ht` just above the largest `x_ct` of patches that overlap an
/// annotated hallucination.
pub fn tune_x_ht(
    slices: &[SlicePair<'_>],
    annotations: &AnnotationSet,
    params: &FrcParams,
    epsilon: f64,
) -> Result<TuningResult> {
    if annotations.boxes.is_empty() {
        return Err(Error::NoAnnotations);
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    params.validate()?;
    for b in &annotations.boxes {
        if !slices.iter().any(|s| s.id == b.image_id) {
            return Err(Error::UnknownImageId(b.image_id.clone()));
        }
    }

    let mut per_box = Vec::with_capacity(annotations.boxes.len());
    let mut cache: Vec<Option<Vec<PatchCrossing>>> = vec![None; slices.len()];
    for b in &annotations.boxes {
        let idx = slices
            .iter()
            .position(|s| s.id == b.image_id)
            .expect("checked above");
        if cache[idx].is_none() {
            let s = &slices[idx];
            cache[idx] = Some(patch_crossings(s.reference, s.test, params)?.1);
        }
        let crossings = cache[idx].as_ref().expect("just filled");
        let patches = crossings
            .iter()
            .filter(|c| b.selects_patch(c.x, c.y, params.patch_size))
            .copied()
            .collect();
        per_box.push(AnnotationCrossings {
            annotation: b.clone(),
            patches,
        });
    }

    let max_x_ct = per_box
        .iter()
        .flat_map(|a| a.patches.iter())
        .filter(|c| !c.low_content)
        .map(|c| c.x_ct)
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.max(v)))
        })
        .ok_or(Error::AllAnnotatedPatchesLowContent)?;
    let raw = max_x_ct + epsilon;
    let clamped = raw >= NYQUIST;
    if clamped {
        warn!(
            "tuned x_ht clamped to Nyquist: annotated patches correlate like faithful ones (max x_ct = {max_x_ct})"
        );
    }
    Ok(TuningResult {
        x_ht: raw.min(NYQUIST),
        max_x_ct,
        epsilon,
        clamped,
        annotations: per_box,
    })
}

/// Hallucination rate as a function of `x_ht`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HocCurve {
    pub thresholds: Vec<f64>,
    pub rates: Vec<f64>,
    pub au_hoc: f64,
}

/// Sweeps `x_ht` over `n_steps` evenly spaced values in `[x_ht_min, x_ht_max]`.
/// Patch crossings are computed once and reused for every threshold.
pub fn hoc_curve(
    slices: &[SlicePair<'_>],
    params: &FrcParams,
    x_ht_min: f64,
    x_ht_max: f64,
    n_steps: usize,
) -> Result<HocCurve> {
    check_hoc_range(x_ht_min, x_ht_max, n_steps)?;
    let mut crossings = Vec::new();
    for s in slices {
        crossings.extend(patch_crossings(s.reference, s.test, params)?.1);
    }
    hoc_from_crossings(&crossings, x_ht_min, x_ht_max, n_steps)
}

fn check_hoc_range(x_ht_min: f64, x_ht_max: f64, n_steps: usize) -> Result<()> {
    if n_steps < 2 {
        return Err(Error::InvalidRange(format!(
            "need at least 2 steps, got {n_steps}"
        )));
    }
    if !(x_ht_min.is_finite() && x_ht_min >= 0.0 && x_ht_min < x_ht_max && x_ht_max <= NYQUIST) {
        return Err(Error::InvalidRange(format!(
            "need 0 <= min < max <= 0.5, got [{x_ht_min}, {x_ht_max}]"
        )));
    }
    Ok(())
}

pub fn hoc_from_crossings(
    crossings: &[PatchCrossing],
    x_ht_min: f64,
    x_ht_max: f64,
    n_steps: usize,
) -> Result<HocCurve> {
    check_hoc_range(x_ht_min, x_ht_max, n_steps)?;
    let span = x_ht_max - x_ht_min;
    let thresholds: Vec<f64> = (0..n_steps)
        .map(|i| {
            if i == n_steps - 1 {
                x_ht_max
            } else {
                x_ht_min + span * i as f64 / (n_steps - 1) as f64
            }
        })
        .collect();
    // Sorted crossings make each threshold a binary search.
    let mut active: Vec<f64> = crossings
        .iter()
        .filter(|c| !c.low_content)
        .map(|c| c.x_ct)
        .collect();
    active.sort_by(f64::total_cmp);
    let n = crossings.len();
    let rates: Vec<f64> = thresholds
        .iter()
        .map(|&t| rate(active.partition_point(|&x| x < t), n))
        .collect();
    let area: f64 = thresholds
        .windows(2)
        .zip(rates.windows(2))
        .map(|(t, r)| (t[1] - t[0]) * (r[0] + r[1]) / 2.0)
        .sum();
    Ok(HocCurve {
        thresholds,
        rates,
        au_hoc: (area / span).clamp(0.0, 1.0),
    })
}
