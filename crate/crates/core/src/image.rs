//! Image, patch and frequency-axis types shared by every other module.
//!
//! Frequencies are tracked internally in normalized cycles per pixel, so the
//! Nyquist limit is always `0.5`. Conversion to physical units (cycles per
//! millimetre, say) goes through [`Image::pixel_size`] and only happens at the
//! reporting edges.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalized Nyquist frequency in cycles per pixel.
pub const NYQUIST: f64 = 0.5;

/// A 2D grayscale image with a physical pixel size.
///
/// Data is stored row-major: `data[y * width + x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    pixel_size: f64,
    data: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, pixel_size: f64, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if !(pixel_size.is_finite() && pixel_size > 0.0) {
            return Err(Error::InvalidImage(format!(
                "pixel size must be positive and finite, got {pixel_size}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "data length {} does not match {width}x{height}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteData(i));
        }
        Ok(Self {
            width,
            height,
            pixel_size,
            data,
        })
    }

    pub fn zeros(width: usize, height: usize, pixel_size: f64) -> Result<Self> {
        Self::new(width, height, pixel_size, vec![0.0; width * height])
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        pixel_size: f64,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, pixel_size, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_size(&self) -> f64 {
        self.pixel_size
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    /// Physical Nyquist frequency, `1 / (2 * pixel_size)`.
    pub fn nyquist(&self) -> f64 {
        1.0 / (2.0 * self.pixel_size)
    }

    /// Returns a new image with `f` applied to every value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.width,
            self.height,
            self.pixel_size,
            self.data.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Same geometry, new values. Fails if `data` has the wrong length or
    /// contains non-finite values.
    pub fn with_data(&self, data: Vec<f64>) -> Result<Self> {
        Self::new(self.width, self.height, self.pixel_size, data)
    }

    /// Copies a `size`x`size` square whose top-left corner is at `(x, y)`.
    pub fn patch(&self, x: usize, y: usize, size: usize) -> Result<Patch> {
        if x + size > self.width || y + size > self.height {
            return Err(Error::PatchTooLarge {
                patch: size,
                width: self.width,
                height: self.height,
            });
        }
        let mut data = Vec::with_capacity(size * size);
        for row in y..y + size {
            let start = row * self.width + x;
            data.extend_from_slice(&self.data[start..start + size]);
        }
        Ok(Patch {
            origin_x: x,
            origin_y: y,
            size,
            index: (0, 0),
            data,
        })
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }
}

/// Checks that two images can be compared pixel for pixel.
pub fn validate_pair(reference: &Image, test: &Image) -> Result<()> {
    if reference.width != test.width || reference.height != test.height {
        return Err(Error::DimensionMismatch(
            reference.width,
            reference.height,
            test.width,
            test.height,
        ));
    }
    if reference.pixel_size != test.pixel_size {
        return Err(Error::PixelSizeMismatch(
            reference.pixel_size,
            test.pixel_size,
        ));
    }
    // The constructor already rejects non-finite values; this keeps the
    // contract explicit for images assembled some other way in the future.
    for img in [reference, test] {
        if let Some(i) = img.data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteData(i));
        }
    }
    Ok(())
}

/// A square tile copied out of a parent image.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub origin_x: usize,
    pub origin_y: usize,
    pub size: usize,
    /// `(row, col)` position within the scan grid.
    pub index: (usize, usize),
    pub data: Vec<f64>,
}

impl Patch {
    /// Wraps a raw square buffer as a patch at the origin.
    pub fn from_data(size: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != size * size {
            return Err(Error::InvalidImage(format!(
                "patch data length {} does not match {size}x{size}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteData(i));
        }
        Ok(Self {
            origin_x: 0,
            origin_y: 0,
            size,
            index: (0, 0),
            data,
        })
    }

    pub fn mean_square(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>() / self.data.len() as f64
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            data: self.data.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }
}

/// Patch sizes must be even and at least 8 pixels.
pub fn check_patch_size(size: usize) -> Result<()> {
    if size < 8 || !size.is_multiple_of(2) {
        return Err(Error::InvalidPatchSize(size));
    }
    Ok(())
}

/// Radial frequency binning for a ring correlation.
///
/// Ring `k` covers normalized radii `[k * bin_width, (k + 1) * bin_width)`
/// and is reported at its center `(k + 0.5) * bin_width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyAxis {
    pub n_rings: usize,
    /// Ring width in normalized cycles per pixel.
    pub bin_width: f64,
    pub pixel_size: f64,
}

impl FrequencyAxis {
    /// Smallest ring count that covers the band up to Nyquist.
    pub fn new(bin_width: f64, pixel_size: f64) -> Result<Self> {
        if !(bin_width.is_finite() && bin_width > 0.0) {
            return Err(Error::ZeroBinWidth(bin_width));
        }
        if !(pixel_size.is_finite() && pixel_size > 0.0) {
            return Err(Error::InvalidImage(format!(
                "pixel size must be positive and finite, got {pixel_size}"
            )));
        }
        // Guard against 0.5 / (1/64) landing a hair above 32.
        let n_rings = ((NYQUIST / bin_width) - 1e-9).ceil().max(1.0) as usize;
        Ok(Self {
            n_rings,
            bin_width,
            pixel_size,
        })
    }

    /// Physical Nyquist frequency in cycles per unit length.
    pub fn nyquist(&self) -> f64 {
        1.0 / (2.0 * self.pixel_size)
    }

    /// Physical ring width in cycles per unit length.
    pub fn physical_bin_width(&self) -> f64 {
        self.bin_width / self.pixel_size
    }

    pub fn ring_center(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.bin_width
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_rings).map(|k| self.ring_center(k)).collect()
    }

    /// Ring index for a normalized radius, `None` beyond the last ring.
    pub fn ring_of(&self, radius: f64) -> Option<usize> {
        let k = (radius / self.bin_width).floor();
        if k < 0.0 || !k.is_finite() {
            return None;
        }
        let k = k as usize;
        (k < self.n_rings).then_some(k)
    }

    pub fn to_physical(&self, normalized: f64) -> f64 {
        normalized / self.pixel_size
    }

    pub fn to_normalized(&self, physical: f64) -> f64 {
        physical * self.pixel_size
    }
}

/// Converts a fraction of Nyquist (`0..=1`) to normalized cycles per pixel.
pub fn fraction_to_normalized(fraction: f64) -> f64 {
    fraction * NYQUIST
}

/// Converts normalized cycles per pixel to a fraction of Nyquist.
pub fn normalized_to_fraction(normalized: f64) -> f64 {
    normalized / NYQUIST
}
