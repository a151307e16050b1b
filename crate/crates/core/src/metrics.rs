//! Whole-image comparison metrics: PSNR, SSIM and a histogram Hellinger
//! distance. These are the global scores that a patch scan is contrasted
//! against.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::image::{validate_pair, Image};

pub const SSIM_WINDOW: usize = 7;
pub const DEFAULT_BINS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    /// Decibels; `+inf` for identical images, written as `"inf"` in JSON.
    #[serde(serialize_with = "ser_db", deserialize_with = "de_db")]
    pub psnr: f64,
    pub ssim: f64,
    pub hellinger: f64,
}

fn ser_db<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() && *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

fn de_db<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Db {
        Num(f64),
        Text(String),
    }
    match Db::deserialize(d)? {
        Db::Num(v) => Ok(v),
        Db::Text(t) if t == "inf" => Ok(f64::INFINITY),
        Db::Text(t) => Err(serde::de::Error::custom(format!("bad dB value {t:?}"))),
    }
}

/// Joint `max - min` over both images, for callers that opt into inference.
pub fn infer_data_range(a: &Image, b: &Image) -> f64 {
    let (lo, hi) = a
        .data()
        .iter()
        .chain(b.data())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    hi - lo
}

fn check_range(data_range: f64) -> Result<()> {
    if !(data_range.is_finite() && data_range > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "data range must be positive, got {data_range}"
        )));
    }
    Ok(())
}

fn check_mask(img: &Image, mask: Option<&[bool]>) -> Result<()> {
    if let Some(m) = mask {
        if m.len() != img.data().len() {
            return Err(Error::InvalidParameter(format!(
                "mask length {} does not match image size {}",
                m.len(),
                img.data().len()
            )));
        }
    }
    Ok(())
}

pub fn psnr(reference: &Image, test: &Image, data_range: f64) -> Result<f64> {
    psnr_masked(reference, test, data_range, None)
}

/// PSNR restricted to pixels where `mask` is true.
pub fn psnr_masked(
    reference: &Image,
    test: &Image,
    data_range: f64,
    mask: Option<&[bool]>,
) -> Result<f64> {
    validate_pair(reference, test)?;
    check_range(data_range)?;
    check_mask(reference, mask)?;
    let (mut sum, mut n) = (0.0, 0usize);
    for (i, (a, b)) in reference.data().iter().zip(test.data()).enumerate() {
        if mask.is_none_or(|m| m[i]) {
            sum += (a - b) * (a - b);
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::InvalidParameter("mask selects no pixels".into()));
    }
    let mse = sum / n as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (data_range * data_range / mse).log10())
}

/// Summed-area table with a zero first row and column.
struct Integral {
    stride: usize,
    table: Vec<f64>,
}

impl Integral {
    fn new(w: usize, h: usize, f: impl Fn(usize) -> f64) -> Self {
        let stride = w + 1;
        let mut table = vec![0.0; stride * (h + 1)];
        for y in 0..h {
            let mut row = 0.0;
            for x in 0..w {
                row += f(y * w + x);
                table[(y + 1) * stride + x + 1] = table[y * stride + x + 1] + row;
            }
        }
        Self { stride, table }
    }

    fn window(&self, x: usize, y: usize, n: usize) -> f64 {
        let s = self.stride;
        self.table[(y + n) * s + x + n] - self.table[y * s + x + n] - self.table[(y + n) * s + x]
            + self.table[y * s + x]
    }
}

pub fn ssim(reference: &Image, test: &Image, data_range: f64) -> Result<f64> {
    ssim_masked(reference, test, data_range, None)
}

/// Mean SSIM over every fully-inside 7x7 window (uniform weights, sample
/// covariance). With a mask, only windows centred on a masked pixel count.
pub fn ssim_masked(
    reference: &Image,
    test: &Image,
    data_range: f64,
    mask: Option<&[bool]>,
) -> Result<f64> {
    validate_pair(reference, test)?;
    check_range(data_range)?;
    check_mask(reference, mask)?;
    let (w, h) = (reference.width(), reference.height());
    let n = SSIM_WINDOW;
    if w < n || h < n {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            window: n,
        });
    }
    let (a, b) = (reference.data(), test.data());
    let sa = Integral::new(w, h, |i| a[i]);
    let sb = Integral::new(w, h, |i| b[i]);
    let saa = Integral::new(w, h, |i| a[i] * a[i]);
    let sbb = Integral::new(w, h, |i| b[i] * b[i]);
    let sab = Integral::new(w, h, |i| a[i] * b[i]);

    let c1 = (0.01 * data_range).powi(2);
    let c2 = (0.03 * data_range).powi(2);
    let np = (n * n) as f64;
    let cov_norm = np / (np - 1.0);
    let half = n / 2;
    let (mut total, mut count) = (0.0, 0usize);
    for y in 0..=h - n {
        for x in 0..=w - n {
            if let Some(m) = mask {
                if !m[(y + half) * w + x + half] {
                    continue;
                }
            }
            let mu_a = sa.window(x, y, n) / np;
            let mu_b = sb.window(x, y, n) / np;
            let var_a = cov_norm * (saa.window(x, y, n) / np - mu_a * mu_a);
            let var_b = cov_norm * (sbb.window(x, y, n) / np - mu_b * mu_b);
            let cov = cov_norm * (sab.window(x, y, n) / np - mu_a * mu_b);
            let num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
            let den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
            total += num / den;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::InvalidParameter(
            "mask selects no SSIM windows".into(),
        ));
    }
    Ok((total / count as f64).clamp(-1.0, 1.0))
}

/// Hellinger distance between the normalized intensity histograms of the two
/// images, binned over their joint min-max range.
pub fn hellinger(reference: &Image, test: &Image, n_bins: usize) -> Result<f64> {
    validate_pair(reference, test)?;
    if n_bins < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 histogram bins, got {n_bins}"
        )));
    }
    let (lo, hi) = reference
        .data()
        .iter()
        .chain(test.data())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if hi == lo {
        // Both images are the same constant.
        return Ok(0.0);
    }
    let p = histogram(reference.data(), lo, hi, n_bins);
    let q = histogram(test.data(), lo, hi, n_bins);
    let sq: f64 = p
        .iter()
        .zip(&q)
        .map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2))
        .sum();
    Ok((0.5 * sq).sqrt().clamp(0.0, 1.0))
}

fn histogram(data: &[f64], lo: f64, hi: f64, n_bins: usize) -> Vec<f64> {
    let mut counts = vec![0usize; n_bins];
    let scale = n_bins as f64 / (hi - lo);
    for &v in data {
        let k = (((v - lo) * scale) as usize).min(n_bins - 1);
        counts[k] += 1;
    }
    let total = data.len() as f64;
    counts.into_iter().map(|c| c as f64 / total).collect()
}

/// All three metrics with default SSIM window and 256 histogram bins.
pub fn compare(reference: &Image, test: &Image, data_range: f64) -> Result<MetricReport> {
    Ok(MetricReport {
        psnr: psnr(reference, test, data_range)?,
        ssim: ssim(reference, test, data_range)?,
        hellinger: hellinger(reference, test, DEFAULT_BINS)?,
    })
}
