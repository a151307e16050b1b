//! Radial bandpass decomposition with brick-wall annulus masks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{radius, Fft2};
use crate::image::{Image, NYQUIST};

/// Annulus `low <= r < high` in normalized cycles per pixel.
///
/// A band whose upper edge is Nyquist also keeps the corner coefficients
/// beyond it (`r >= 0.5` along the diagonals), so a set of bands that
/// partitions `[0, 0.5]` covers the whole spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSpec {
    pub low: f64,
    pub high: f64,
}

impl BandSpec {
    pub fn new(low: f64, high: f64) -> Result<Self> {
        if !(low.is_finite() && high.is_finite() && 0.0 <= low && low < high && high <= NYQUIST) {
            return Err(Error::InvalidBand(low, high));
        }
        Ok(Self { low, high })
    }

    /// The whole spectrum.
    pub fn full() -> Self {
        Self {
            low: 0.0,
            high: NYQUIST,
        }
    }

    /// Band given as fractions of Nyquist.
    pub fn from_fractions(low: f64, high: f64) -> Result<Self> {
        Self::new(low * NYQUIST, high * NYQUIST)
    }

    pub fn contains(&self, r: f64) -> bool {
        r >= self.low && (r < self.high || (self.high >= NYQUIST && r >= NYQUIST))
    }

    fn validate(&self) -> Result<()> {
        Self::new(self.low, self.high).map(|_| ())
    }
}

/// Very-low, low, mid, high and very-high bands at 0, 0.1, 0.25, 0.5, 0.75
/// and 1 times Nyquist.
pub fn standard_bands() -> Vec<BandSpec> {
    const EDGES: [f64; 6] = [0.0, 0.1, 0.25, 0.5, 0.75, 1.0];
    EDGES
        .windows(2)
        .map(|e| BandSpec::from_fractions(e[0], e[1]).expect("static edges are valid"))
        .collect()
}

fn masked_inverse(
    spectrum: &[Complex64],
    img: &Image,
    fft: &Fft2,
    band: &BandSpec,
) -> Result<Image> {
    let (w, h) = (img.width(), img.height());
    let mut buf = spectrum.to_vec();
    for ky in 0..h {
        for kx in 0..w {
            if !band.contains(radius(kx, ky, w, h)) {
                buf[ky * w + kx] = Complex64::new(0.0, 0.0);
            }
        }
    }
    fft.inverse(&mut buf);
    img.with_data(buf.iter().map(|c| c.re).collect())
}

pub fn bandpass(img: &Image, band: &BandSpec) -> Result<Image> {
    band.validate()?;
    let fft = Fft2::new(img.width(), img.height());
    let spectrum = fft.forward_real(img.data());
    masked_inverse(&spectrum, img, &fft, band)
}

/// One bandpass output per band, in order. The forward transform is shared.
pub fn decompose(img: &Image, bands: &[BandSpec]) -> Result<Vec<Image>> {
    if bands.is_empty() {
        return Err(Error::EmptyBands);
    }
    for b in bands {
        b.validate()?;
    }
    let fft = Fft2::new(img.width(), img.height());
    let spectrum = fft.forward_real(img.data());
    bands
        .iter()
        .map(|b| masked_inverse(&spectrum, img, &fft, b))
        .collect()
}

/// The DC component alone: a constant image at the mean.
pub fn dc_component(img: &Image) -> Result<Image> {
    let mean = img.mean();
    img.map(|_| mean)
}
