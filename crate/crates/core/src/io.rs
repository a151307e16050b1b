//! File formats: raw float images, 16-bit PGM import, annotation and report
//! JSON, curve CSV, sinogram/phantom sidecars and PNG overlays.
//!
//! Every writer goes through a temporary file in the destination directory
//! followed by a rename, so readers never observe a partially written file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::degrade::{Phantom, Sinogram};
use crate::error::{Error, Result};
use crate::frc::FrcCurve;
use crate::image::Image;
use crate::scanner::{rate, AnnotationSet, HocCurve, SfrcConfig, SfrcReport};

/// Leading bytes of a raw image file.
pub const MAGIC: &[u8; 5] = b"SFRC1";

pub const TOOL_VERSION: &str = concat!("sfrc ", env!("CARGO_PKG_VERSION"));

/// Writes `bytes` to `path` atomically.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| Error::io(&dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.flush().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn malformed(path: &Path, reason: impl Into<String>) -> Error {
    Error::Malformed {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// Serializes an image as `SFRC1 <width> <height> <pixel_size>\n` followed by
/// little-endian `f32` samples in row-major order.
pub fn encode_image(img: &Image) -> Vec<u8> {
    let header = format!(
        "SFRC1 {} {} {}\n",
        img.width(),
        img.height(),
        img.pixel_size()
    );
    let mut out = Vec::with_capacity(header.len() + 4 * img.data().len());
    out.extend_from_slice(header.as_bytes());
    for &v in img.data() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    out
}

pub fn decode_image(bytes: &[u8], path: &Path) -> Result<Image> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::BadMagic(path.to_path_buf()));
    }
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| malformed(path, "header is not terminated"))?;
    let header =
        std::str::from_utf8(&bytes[..nl]).map_err(|_| malformed(path, "header is not UTF-8"))?;
    let fields: Vec<&str> = header.split(' ').collect();
    if fields.len() != 4 || fields[0] != "SFRC1" {
        return Err(malformed(path, format!("bad header {header:?}")));
    }
    let width: usize = fields[1]
        .parse()
        .map_err(|_| malformed(path, "bad width"))?;
    let height: usize = fields[2]
        .parse()
        .map_err(|_| malformed(path, "bad height"))?;
    let pixel_size: f64 = fields[3]
        .parse()
        .map_err(|_| malformed(path, "bad pixel size"))?;
    let payload = &bytes[nl + 1..];
    let expected = 4 * width * height;
    if payload.len() < expected {
        return Err(Error::TruncatedPayload {
            path: path.to_path_buf(),
            expected,
            found: payload.len(),
        });
    }
    if payload.len() > expected {
        return Err(malformed(path, "trailing bytes after payload"));
    }
    let data = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    Image::new(width, height, pixel_size, data)
}

pub fn write_image(path: &Path, img: &Image) -> Result<()> {
    write_atomic(path, &encode_image(img))
}

pub fn read_image(path: &Path) -> Result<Image> {
    decode_image(&read_bytes(path)?, path)
}

/// Reads a binary (P5) PGM. 16-bit samples are big-endian per the format.
/// Values are returned as raw integers; `pixel_size` is attached as given.
pub fn read_pgm(path: &Path, pixel_size: f64) -> Result<Image> {
    let bytes = read_bytes(path)?;
    let mut pos = 0;
    let mut tokens = Vec::with_capacity(4);
    while tokens.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(malformed(path, "truncated PGM header"));
        }
        tokens.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    if tokens[0] != "P5" {
        return Err(Error::BadMagic(path.to_path_buf()));
    }
    let parse = |s: &str, what: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| malformed(path, format!("bad PGM {what} {s:?}")))
    };
    let width = parse(&tokens[1], "width")?;
    let height = parse(&tokens[2], "height")?;
    let maxval = parse(&tokens[3], "maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(malformed(path, format!("PGM maxval {maxval} out of range")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let depth = if maxval > 255 { 2 } else { 1 };
    let expected = width * height * depth;
    let raster = bytes.get(pos..).unwrap_or(&[]);
    if raster.len() < expected {
        return Err(Error::TruncatedPayload {
            path: path.to_path_buf(),
            expected,
            found: raster.len(),
        });
    }
    let data = if depth == 2 {
        raster[..expected]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64)
            .collect()
    } else {
        raster[..expected].iter().map(|&b| b as f64).collect()
    };
    Image::new(width, height, pixel_size, data)
}

/// Writes a 16-bit PGM, rounding and clamping values to `0..=65535`.
pub fn write_pgm16(path: &Path, img: &Image) -> Result<()> {
    let mut out = format!("P5\n{} {}\n65535\n", img.width(), img.height()).into_bytes();
    for &v in img.data() {
        out.extend_from_slice(&(v.round().clamp(0.0, 65535.0) as u16).to_be_bytes());
    }
    write_atomic(path, &out)
}

/// Pretty JSON with a trailing newline. Field order follows the struct
/// definitions, so output is stable.
pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("in-memory types always serialize");
    out.push(b'\n');
    out
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, &to_json(value))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = read_bytes(path)?;
    serde_json::from_slice(&bytes).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads and validates an annotation document.
pub fn read_annotations(path: &Path) -> Result<AnnotationSet> {
    let set: AnnotationSet = read_json(path)?;
    set.validate()?;
    Ok(set)
}

pub fn write_annotations(path: &Path, set: &AnnotationSet) -> Result<()> {
    set.validate()?;
    write_json(path, set)
}

/// Scan report as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub tool_version: String,
    pub image_id: String,
    pub config: SfrcConfig,
    pub report: SfrcReport,
}

impl ReportFile {
    pub fn new(image_id: &str, config: SfrcConfig, report: SfrcReport) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            image_id: image_id.to_string(),
            config,
            report,
        }
    }

    /// Checks that the stored counts and rate agree with the records.
    pub fn verify(&self) -> std::result::Result<(), String> {
        let r = &self.report;
        let n_h = r.records.iter().filter(|p| p.hallucinated).count();
        if n_h != r.n_hallucinated || r.records.len() != r.n_patches {
            return Err("stored counts disagree with the patch records".into());
        }
        if rate(n_h, r.records.len()) != r.hallucination_rate {
            return Err("stored hallucination rate is not n_hallucinated / n_patches".into());
        }
        if r.records.iter().any(|p| p.low_content && p.hallucinated) {
            return Err("a low-content patch is marked hallucinated".into());
        }
        Ok(())
    }
}

pub fn write_report(path: &Path, report: &ReportFile) -> Result<()> {
    write_json(path, report)
}

pub fn read_report(path: &Path) -> Result<ReportFile> {
    let file: ReportFile = read_json(path)?;
    file.verify().map_err(|reason| malformed(path, reason))?;
    Ok(file)
}

/// Nine significant digits.
fn sig9(v: f64) -> String {
    format!("{v:.8e}")
}

pub fn frc_curve_csv(curve: &FrcCurve) -> String {
    let mut out = String::from("frequency,value,pixel_count\n");
    for (k, v) in curve.values.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{}\n",
            sig9(curve.axis.ring_center(k)),
            sig9(*v),
            curve.ring_pixel_counts[k]
        ));
    }
    out
}

pub fn hoc_curve_csv(curve: &HocCurve) -> String {
    let mut out = String::from("x_ht,rate\n");
    for (t, r) in curve.thresholds.iter().zip(&curve.rates) {
        out.push_str(&format!("{},{}\n", sig9(*t), sig9(*r)));
    }
    out
}

pub fn write_frc_curve(path: &Path, curve: &FrcCurve) -> Result<()> {
    write_atomic(path, frc_curve_csv(curve).as_bytes())
}

pub fn write_hoc_curve(path: &Path, curve: &HocCurve) -> Result<()> {
    write_atomic(path, hoc_curve_csv(curve).as_bytes())
}

/// Parses a curve CSV back into its header and numeric rows.
pub fn read_curve_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_curve_csv(&text).map_err(|reason| malformed(path, reason))
}

pub fn parse_curve_csv(text: &str) -> std::result::Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or("empty CSV")?
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|line| {
            let row: Vec<f64> = line
                .split(',')
                .map(|f| f.parse::<f64>().map_err(|e| format!("{f:?}: {e}")))
                .collect::<std::result::Result<_, _>>()?;
            if row.len() != header.len() {
                return Err(format!("row {line:?} has {} fields", row.len()));
            }
            Ok(row)
        })
        .collect::<std::result::Result<Vec<_>, String>>()?;
    Ok((header, rows))
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".json");
    PathBuf::from(p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SinogramMeta {
    kind: String,
    n_angles: usize,
    n_detectors: usize,
    detector_spacing: f64,
    angles_deg: Vec<f64>,
}

/// Writes the sinogram samples as a raw image (detectors along x) plus a
/// `<path>.json` sidecar holding the angles.
pub fn write_sinogram(path: &Path, sino: &Sinogram) -> Result<()> {
    write_image(path, &sino.to_image()?)?;
    write_json(
        &sidecar_path(path),
        &SinogramMeta {
            kind: "sinogram".into(),
            n_angles: sino.n_angles,
            n_detectors: sino.n_detectors,
            detector_spacing: sino.detector_spacing,
            angles_deg: sino.angles.clone(),
        },
    )
}

pub fn read_sinogram(path: &Path) -> Result<Sinogram> {
    let img = read_image(path)?;
    let meta: SinogramMeta = read_json(&sidecar_path(path))?;
    if meta.n_angles != img.height() || meta.n_detectors != img.width() {
        return Err(malformed(path, "sidecar disagrees with raster shape"));
    }
    Sinogram::new(
        meta.angles_deg,
        meta.n_detectors,
        meta.detector_spacing,
        img.into_data(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PhantomMeta {
    kind: String,
    size: usize,
    seed: u64,
}

pub fn write_phantom(path: &Path, phantom: &Phantom) -> Result<()> {
    write_image(path, &phantom.image)?;
    write_json(
        &sidecar_path(path),
        &PhantomMeta {
            kind: phantom.kind.to_string(),
            size: phantom.size,
            seed: phantom.seed,
        },
    )
}

/// Display mapping `[center - width/2, center + width/2] -> [0, 255]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisplayWindow {
    pub center: f64,
    pub width: f64,
}

impl DisplayWindow {
    pub fn new(center: f64, width: f64) -> Result<Self> {
        if !(center.is_finite() && width.is_finite() && width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "display window needs a positive width, got L={center} W={width}"
            )));
        }
        Ok(Self { center, width })
    }

    /// Window spanning the image's own min-max range.
    pub fn auto(img: &Image) -> Self {
        let (lo, hi) = img
            .data()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
                (l.min(v), h.max(v))
            });
        let width = if hi > lo { hi - lo } else { 1.0 };
        Self {
            center: (lo + hi) / 2.0,
            width,
        }
    }

    pub fn map(&self, v: f64) -> u8 {
        let lo = self.center - self.width / 2.0;
        ((v - lo) / self.width * 255.0).round().clamp(0.0, 255.0) as u8
    }
}

const RED: [u8; 3] = [255, 0, 0];

/// RGB raster of `img` under `window` with a one-pixel red outline around
/// every hallucinated patch.
pub fn overlay_rgb(img: &Image, report: &SfrcReport, window: DisplayWindow) -> Result<Vec<u8>> {
    let (w, h) = (img.width(), img.height());
    if report.width != w || report.height != h {
        return Err(Error::DimensionMismatch(w, h, report.width, report.height));
    }
    let mut rgb: Vec<u8> = img
        .data()
        .iter()
        .flat_map(|&v| {
            let g = window.map(v);
            [g, g, g]
        })
        .collect();
    let size = report.patch_size;
    let mut paint = |x: usize, y: usize| {
        let i = 3 * (y * w + x);
        rgb[i..i + 3].copy_from_slice(&RED);
    };
    for r in report.hallucinated() {
        let (x0, y0) = (r.x, r.y);
        let (x1, y1) = ((r.x + size - 1).min(w - 1), (r.y + size - 1).min(h - 1));
        for x in x0..=x1 {
            paint(x, y0);
            paint(x, y1);
        }
        for y in y0..=y1 {
            paint(x0, y);
            paint(x1, y);
        }
    }
    Ok(rgb)
}

/// PNG bytes for [`overlay_rgb`] with fixed encoder settings.
pub fn render_overlay(img: &Image, report: &SfrcReport, window: DisplayWindow) -> Result<Vec<u8>> {
    let rgb = overlay_rgb(img, report, window)?;
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, img.width() as u32, img.height() as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        enc.set_compression(png::Compression::Balanced);
        enc.set_filter(png::Filter::Sub);
        let mut writer = enc.write_header()?;
        writer.write_image_data(&rgb)?;
        writer.finish()?;
    }
    Ok(out)
}

pub fn write_overlay(
    path: &Path,
    img: &Image,
    report: &SfrcReport,
    window: DisplayWindow,
) -> Result<()> {
    write_atomic(path, &render_overlay(img, report, window)?)
}
