//! Synthetic degradations and restoration surrogates.
//!
//! These generators stand in for clinical data: block downsampling,
//! Cartesian k-space undersampling, a parallel-beam Radon transform with
//! filtered backprojection, transmission noise and procedural phantoms.
//! Every stochastic routine takes an explicit seed.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{radius, signed_index, Fft2};
use crate::image::Image;

/// Area-average `s`x`s` downsampling followed by nearest-neighbour
/// upsampling back to the original grid.
pub fn downsample_upsample(img: &Image, factor: usize) -> Result<Image> {
    if factor < 2 {
        return Err(Error::InvalidParameter(format!(
            "downsampling factor must be at least 2, got {factor}"
        )));
    }
    let (w, h) = (img.width(), img.height());
    if w % factor != 0 || h % factor != 0 {
        return Err(Error::NotDivisible {
            width: w,
            height: h,
            factor,
        });
    }
    let (bw, bh) = (w / factor, h / factor);
    let mut blocks = vec![0.0; bw * bh];
    for y in 0..h {
        for x in 0..w {
            blocks[(y / factor) * bw + x / factor] += img.get(x, y);
        }
    }
    let area = (factor * factor) as f64;
    for b in &mut blocks {
        *b /= area;
    }
    Image::from_fn(w, h, img.pixel_size(), |x, y| {
        blocks[(y / factor) * bw + x / factor]
    })
}

/// Keeps every `acceleration`-th phase-encode row of k-space (rows are the
/// image `y` direction, DC row always kept), zero-fills the rest and returns
/// the real part of the inverse transform.
///
/// Rows are selected by signed frequency, so the mask is symmetric around
/// DC. The DC coefficient is untouched, so the image mean is preserved
/// without rescaling.
pub fn kspace_undersample(img: &Image, acceleration: usize) -> Result<Image> {
    if acceleration == 0 {
        return Err(Error::InvalidParameter(
            "acceleration must be at least 1".into(),
        ));
    }
    let (w, h) = (img.width(), img.height());
    let fft = Fft2::new(w, h);
    let mut k = fft.forward_real(img.data());
    let a = acceleration as i64;
    for ky in 0..h {
        if signed_index(ky, h).rem_euclid(a) != 0 {
            k[ky * w..(ky + 1) * w].fill(Complex64::new(0.0, 0.0));
        }
    }
    fft.inverse(&mut k);
    img.with_data(k.iter().map(|c| c.re).collect())
}

/// Replaces the phases of every Fourier coefficient at or above
/// `min_freq` (cycles per pixel) inside the rectangle `(x, y, w, h)` with
/// random ones, keeping magnitudes. The result is a locally corrupted copy
/// whose low-frequency content and all pixels outside the box are unchanged.
pub fn scramble_region(
    img: &Image,
    region: (usize, usize, usize, usize),
    min_freq: f64,
    seed: u64,
) -> Result<Image> {
    let (rx, ry, rw, rh) = region;
    if rw == 0 || rh == 0 || rx + rw > img.width() || ry + rh > img.height() {
        return Err(Error::InvalidParameter(format!(
            "region {region:?} is outside the {}x{} image",
            img.width(),
            img.height()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut block = Vec::with_capacity(rw * rh);
    for y in ry..ry + rh {
        for x in rx..rx + rw {
            block.push(img.get(x, y));
        }
    }
    let fft = Fft2::new(rw, rh);
    let mut spec = fft.forward_real(&block);
    // Phases of a real white-noise field are conjugate-symmetric, so the
    // scrambled spectrum still inverts to a real block.
    let noise: Vec<f64> = (0..rw * rh).map(|_| rng.random::<f64>() - 0.5).collect();
    let noise_spec = fft.forward_real(&noise);
    for ky in 0..rh {
        for kx in 0..rw {
            let i = ky * rw + kx;
            if radius(kx, ky, rw, rh) >= min_freq {
                let n = noise_spec[i];
                let norm = n.norm();
                let phase = if norm > 0.0 {
                    n / norm
                } else {
                    Complex64::new(1.0, 0.0)
                };
                spec[i] = phase * spec[i].norm();
            }
        }
    }
    fft.inverse(&mut spec);
    let mut data = img.data().to_vec();
    for (j, y) in (ry..ry + rh).enumerate() {
        for (i, x) in (rx..rx + rw).enumerate() {
            data[y * img.width() + x] = spec[j * rw + i].re;
        }
    }
    img.with_data(data)
}

/// Parallel-beam projections: one row per angle, one column per detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sinogram {
    pub n_angles: usize,
    pub n_detectors: usize,
    /// Degrees, strictly ascending.
    pub angles: Vec<f64>,
    /// Detector spacing, equal to the source image pixel size.
    pub detector_spacing: f64,
    /// Row-major `n_angles` x `n_detectors` line integrals.
    pub data: Vec<f64>,
}

fn check_angles(angles: &[f64]) -> Result<()> {
    if angles.is_empty() {
        return Err(Error::EmptyAngles);
    }
    if angles.iter().any(|a| !a.is_finite()) || angles.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::UnsortedAngles);
    }
    Ok(())
}

impl Sinogram {
    pub fn new(
        angles: Vec<f64>,
        n_detectors: usize,
        detector_spacing: f64,
        data: Vec<f64>,
    ) -> Result<Self> {
        check_angles(&angles)?;
        if n_detectors == 0 || data.len() != angles.len() * n_detectors {
            return Err(Error::InvalidParameter(format!(
                "sinogram data length {} does not match {} angles x {n_detectors} detectors",
                data.len(),
                angles.len()
            )));
        }
        if !(detector_spacing.is_finite() && detector_spacing > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "detector spacing must be positive, got {detector_spacing}"
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "sinogram contains non-finite data".into(),
            ));
        }
        Ok(Self {
            n_angles: angles.len(),
            n_detectors,
            angles,
            detector_spacing,
            data,
        })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_detectors..(i + 1) * self.n_detectors]
    }

    /// Same measurements labelled with different angles, e.g. to model a
    /// geometry mismatch between projection and backprojection.
    pub fn with_angles(&self, angles: Vec<f64>) -> Result<Self> {
        if angles.len() != self.n_angles {
            return Err(Error::InvalidParameter(format!(
                "expected {} angles, got {}",
                self.n_angles,
                angles.len()
            )));
        }
        Self::new(
            angles,
            self.n_detectors,
            self.detector_spacing,
            self.data.clone(),
        )
    }

    /// The sinogram as an image (detectors along x, angles along y).
    pub fn to_image(&self) -> Result<Image> {
        Image::new(
            self.n_detectors,
            self.n_angles,
            self.detector_spacing,
            self.data.clone(),
        )
    }
}

/// `count` angles from `start` in steps of `step` degrees, i.e. the half-open
/// range `[start, start + count * step)`.
pub fn angle_range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && stop > start && start.is_finite() && stop.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "bad angle range {start}:{stop}:{step}"
        )));
    }
    let count = ((stop - start) / step - 1e-9).ceil() as usize;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

#[inline]
fn bilinear(img: &Image, fx: f64, fy: f64) -> f64 {
    let (w, h) = (img.width() as isize, img.height() as isize);
    let x0 = fx.floor();
    let y0 = fy.floor();
    let (tx, ty) = (fx - x0, fy - y0);
    let (x0, y0) = (x0 as isize, y0 as isize);
    let px = |x: isize, y: isize| {
        if x < 0 || y < 0 || x >= w || y >= h {
            0.0
        } else {
            img.get(x as usize, y as usize)
        }
    };
    (1.0 - ty) * ((1.0 - tx) * px(x0, y0) + tx * px(x0 + 1, y0))
        + ty * ((1.0 - tx) * px(x0, y0 + 1) + tx * px(x0 + 1, y0 + 1))
}

/// Step between ray samples, in pixels.
const RAY_STEP: f64 = 0.5;

/// Parallel-beam line integrals through the inscribed circle of `img`,
/// sampled with bilinear interpolation. Detector spacing equals the pixel
/// size and the detector row is centred on the image centre.
pub fn radon(img: &Image, angles: &[f64], n_detectors: usize) -> Result<Sinogram> {
    check_angles(angles)?;
    if n_detectors == 0 {
        return Err(Error::InvalidParameter("need at least one detector".into()));
    }
    let (w, h) = (img.width(), img.height());
    let cx = (w as f64 - 1.0) / 2.0;
    let cy = (h as f64 - 1.0) / 2.0;
    let r = w.min(h) as f64 / 2.0;
    let det_c = (n_detectors as f64 - 1.0) / 2.0;
    let mut data = vec![0.0; angles.len() * n_detectors];
    data.par_chunks_mut(n_detectors)
        .zip(angles)
        .for_each(|(row, &deg)| {
            let (sin, cos) = deg.to_radians().sin_cos();
            for (j, out) in row.iter_mut().enumerate() {
                let t = j as f64 - det_c;
                if t.abs() >= r {
                    continue;
                }
                let half = (r * r - t * t).sqrt();
                let n = ((2.0 * half) / RAY_STEP).ceil().max(1.0) as usize;
                let ds = 2.0 * half / n as f64;
                let mut acc = 0.0;
                for k in 0..n {
                    let s = -half + (k as f64 + 0.5) * ds;
                    let x = t * cos - s * sin;
                    let y = t * sin + s * cos;
                    acc += bilinear(img, x + cx, y + cy);
                }
                *out = acc * ds * img.pixel_size();
            }
        });
    Sinogram::new(angles.to_vec(), n_detectors, img.pixel_size(), data)
}

/// Ram-Lak filtered backprojection onto an `out_size`x`out_size` grid.
///
/// Projections are ramp-filtered in the Fourier domain using the
/// band-limited spatial kernel, then smeared back with linear interpolation
/// and weighted by `pi / n_angles`. Pixels outside the inscribed circle are
/// set to zero.
pub fn fbp(sino: &Sinogram, out_size: usize) -> Result<Image> {
    if out_size == 0 {
        return Err(Error::InvalidParameter(
            "output size must be positive".into(),
        ));
    }
    let filtered = ramp_filter(sino);
    let nd = sino.n_detectors;
    let det_c = (nd as f64 - 1.0) / 2.0;
    let c = (out_size as f64 - 1.0) / 2.0;
    let r = out_size as f64 / 2.0;
    let trig: Vec<(f64, f64)> = sino
        .angles
        .iter()
        .map(|a| a.to_radians().sin_cos())
        .collect();
    let weight = PI / sino.n_angles as f64;
    let mut out = vec![0.0; out_size * out_size];
    out.par_chunks_mut(out_size)
        .enumerate()
        .for_each(|(py, line)| {
            let y = py as f64 - c;
            for (px, pixel) in line.iter_mut().enumerate() {
                let x = px as f64 - c;
                if x * x + y * y >= r * r {
                    continue;
                }
                let mut acc = 0.0;
                for (ai, &(sin, cos)) in trig.iter().enumerate() {
                    let t = x * cos + y * sin + det_c;
                    if t < 0.0 || t > (nd - 1) as f64 {
                        continue;
                    }
                    let i0 = (t.floor() as usize).min(nd.saturating_sub(2));
                    let f = t - i0 as f64;
                    let row = &filtered[ai * nd..(ai + 1) * nd];
                    acc += if nd == 1 {
                        row[0]
                    } else {
                        (1.0 - f) * row[i0] + f * row[i0 + 1]
                    };
                }
                *pixel = acc * weight;
            }
        });
    Image::new(out_size, out_size, sino.detector_spacing, out)
}

fn ramp_filter(sino: &Sinogram) -> Vec<f64> {
    let nd = sino.n_detectors;
    let len = (2 * nd).next_power_of_two().max(64);
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);

    // Band-limited Ram-Lak kernel in detector-pixel units, wrapped circularly.
    let mut kernel: Vec<Complex64> = (0..len)
        .map(|i| {
            let n = signed_index(i, len);
            let v = if n == 0 {
                0.25
            } else if n % 2 != 0 {
                -1.0 / (PI * n as f64).powi(2)
            } else {
                0.0
            };
            Complex64::new(v, 0.0)
        })
        .collect();
    fwd.process(&mut kernel);
    let response: Vec<f64> = kernel.iter().map(|c| c.re).collect();

    let scale = 1.0 / (len as f64 * sino.detector_spacing);
    let mut out = vec![0.0; sino.data.len()];
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for a in 0..sino.n_angles {
        buf.fill(Complex64::new(0.0, 0.0));
        for (b, &v) in buf.iter_mut().zip(sino.row(a)) {
            b.re = v;
        }
        fwd.process(&mut buf);
        for (b, r) in buf.iter_mut().zip(&response) {
            *b *= *r;
        }
        inv.process(&mut buf);
        for j in 0..nd {
            out[a * nd + j] = buf[j].re * scale;
        }
    }
    out
}

/// Transmission noise parameters. Counts are `flux * dose_fraction *
/// exp(-line_integral)`; `electronic_std` adds zero-mean Gaussian counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub flux: f64,
    pub dose_fraction: f64,
    #[serde(default)]
    pub electronic_std: f64,
}

/// Above this expected count the Poisson draw is replaced by its Gaussian
/// approximation.
const GAUSSIAN_COUNTS: f64 = 50.0;

pub fn add_noise(sino: &Sinogram, dose_fraction: f64, flux: f64, seed: u64) -> Result<Sinogram> {
    add_noise_with(
        sino,
        &NoiseModel {
            flux,
            dose_fraction,
            electronic_std: 0.0,
        },
        seed,
    )
}

/// Draws noisy counts for every sample and converts them back to line
/// integrals. Samples are visited in row-major order from a single seeded
/// generator, so the result depends only on the inputs and `seed`.
pub fn add_noise_with(sino: &Sinogram, model: &NoiseModel, seed: u64) -> Result<Sinogram> {
    if !(model.dose_fraction > 0.0 && model.dose_fraction <= 1.0) {
        return Err(Error::NonPositiveDose(model.dose_fraction));
    }
    if !(model.flux.is_finite() && model.flux > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "flux must be positive, got {}",
            model.flux
        )));
    }
    if !(model.electronic_std.is_finite() && model.electronic_std >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "electronic noise must be non-negative, got {}",
            model.electronic_std
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let incident = model.flux * model.dose_fraction;
    let var_e = model.electronic_std * model.electronic_std;
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let data = sino
        .data
        .iter()
        .map(|&p| {
            let expected = incident * (-p).exp();
            let counts = if expected > GAUSSIAN_COUNTS {
                expected + (expected + var_e).sqrt() * std_normal.sample(&mut rng)
            } else {
                let poisson = if expected > 0.0 {
                    Poisson::new(expected)
                        .map(|d| d.sample(&mut rng))
                        .unwrap_or(0.0)
                } else {
                    0.0
                };
                poisson + model.electronic_std * std_normal.sample(&mut rng)
            };
            // Floor at one count so the log stays finite for photon-starved rays.
            -(counts.max(1.0) / incident).ln()
        })
        .collect();
    Sinogram::new(
        sino.angles.clone(),
        sino.n_detectors,
        sino.detector_spacing,
        data,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhantomKind {
    Ellipses,
    Texture,
    Checker,
    /// Shepp-Logan body with the texture field laid over it at half
    /// amplitude: strong edges around low-contrast detail, as in CT slices.
    Anatomy,
}

impl std::str::FromStr for PhantomKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ellipses" => Ok(Self::Ellipses),
            "texture" => Ok(Self::Texture),
            "checker" => Ok(Self::Checker),
            "anatomy" => Ok(Self::Anatomy),
            other => Err(Error::InvalidParameter(format!(
                "unknown phantom kind {other:?}"
            ))),
        }
    }
}

impl std::fmt::Display for PhantomKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Ellipses => "ellipses",
            Self::Texture => "texture",
            Self::Checker => "checker",
            Self::Anatomy => "anatomy",
        })
    }
}

/// A generated test image with the parameters that reproduce it.
/// Values lie in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Phantom {
    pub image: Image,
    pub kind: PhantomKind,
    pub seed: u64,
    pub size: usize,
}

/// Modified Shepp-Logan table: intensity, semi-axes, centre (in units of the
/// half-width) and rotation in degrees.
const SHEPP_LOGAN: [(f64, f64, f64, f64, f64, f64); 10] = [
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
    (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
    (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
    (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
    (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
    (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
    (0.1, 0.023, 0.023, 0.0, -0.606, 0.0),
    (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
];

pub fn make_phantom(kind: PhantomKind, size: usize, seed: u64) -> Result<Phantom> {
    if size < 32 {
        return Err(Error::SizeTooSmall(size));
    }
    let image = match kind {
        PhantomKind::Ellipses => ellipses(size, seed)?,
        PhantomKind::Texture => texture(size, seed)?,
        PhantomKind::Checker => checker(size, seed)?,
        PhantomKind::Anatomy => {
            let body = ellipses(size, seed)?;
            let detail = texture(size, seed)?;
            body.with_data(
                body.data()
                    .iter()
                    .zip(detail.data())
                    .map(|(b, d)| (b + 0.5 * d) / 1.5)
                    .collect(),
            )?
        }
    };
    Ok(Phantom {
        image,
        kind,
        seed,
        size,
    })
}

/// Shepp-Logan layout; a nonzero seed jitters the small features.
fn ellipses(size: usize, seed: u64) -> Result<Image> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table: Vec<_> = SHEPP_LOGAN
        .iter()
        .enumerate()
        .map(|(i, &(v, a, b, x0, y0, phi))| {
            if seed == 0 || i < 2 {
                (v, a, b, x0, y0, phi)
            } else {
                let j = |rng: &mut ChaCha8Rng| 1.0 + 0.1 * (rng.random::<f64>() - 0.5);
                (v, a * j(&mut rng), b * j(&mut rng), x0, y0, phi)
            }
        })
        .collect();
    let c = (size as f64 - 1.0) / 2.0;
    Image::from_fn(size, size, 1.0, |px, py| {
        let x = (px as f64 - c) / (size as f64 / 2.0);
        let y = (c - py as f64) / (size as f64 / 2.0);
        let v: f64 = table
            .iter()
            .map(|&(v, a, b, x0, y0, phi)| {
                let (s, co) = phi.to_radians().sin_cos();
                let (dx, dy) = (x - x0, y - y0);
                let u = dx * co + dy * s;
                let w = -dx * s + dy * co;
                if (u / a).powi(2) + (w / b).powi(2) <= 1.0 {
                    v
                } else {
                    0.0
                }
            })
            .sum();
        v.clamp(0.0, 1.0)
    })
}

/// Smoothed random field with a power-law spectrum, a few sharp-edged
/// inclusions and a slowly varying contrast envelope, rescaled to `[0, 1]`.
fn texture(size: usize, seed: u64) -> Result<Image> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = size * size;
    let fft = Fft2::new(size, size);

    let field = |rng: &mut ChaCha8Rng, exponent: f64, corner: f64| -> Vec<f64> {
        let white: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        let mut spec = fft.forward_real(&white);
        for ky in 0..size {
            for kx in 0..size {
                let r = radius(kx, ky, size, size);
                spec[ky * size + kx] *= (r + corner).powf(-exponent);
            }
        }
        spec[0] = Complex64::new(0.0, 0.0);
        fft.inverse(&mut spec);
        let vals: Vec<f64> = spec.iter().map(|c| c.re).collect();
        let sd = (vals.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
        vals.into_iter().map(|v| v / sd).collect()
    };

    let detail = field(&mut rng, 0.8, 0.02);
    let envelope = field(&mut rng, 3.0, 0.01);
    let mut data: Vec<f64> = detail
        .iter()
        .zip(&envelope)
        .map(|(d, e)| d * (1.0 + 0.6 * e.tanh()))
        .collect();

    let c = size as f64;
    for _ in 0..6 {
        let x0 = rng.random::<f64>() * c;
        let y0 = rng.random::<f64>() * c;
        let a = (0.05 + 0.15 * rng.random::<f64>()) * c;
        let b = (0.05 + 0.15 * rng.random::<f64>()) * c;
        let phi = rng.random::<f64>() * PI;
        let level = if rng.random::<bool>() { 1.5 } else { -1.5 };
        let (s, co) = phi.sin_cos();
        for py in 0..size {
            for px in 0..size {
                let (dx, dy) = (px as f64 - x0, py as f64 - y0);
                let u = dx * co + dy * s;
                let w = -dx * s + dy * co;
                if (u / a).powi(2) + (w / b).powi(2) <= 1.0 {
                    data[py * size + px] += level;
                }
            }
        }
    }

    let (lo, hi) = data
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
            (l.min(v), h.max(v))
        });
    let span = hi - lo;
    Image::new(
        size,
        size,
        1.0,
        data.into_iter()
            .map(|v| ((v - lo) / span).clamp(0.0, 1.0))
            .collect(),
    )
}

/// Checkerboard with 8-pixel squares; the seed shifts the phase.
fn checker(size: usize, seed: u64) -> Result<Image> {
    const SQUARE: usize = 8;
    let shift = (seed as usize) % (2 * SQUARE);
    Image::from_fn(size, size, 1.0, |x, y| {
        (((x + shift) / SQUARE + (y + shift) / SQUARE) % 2) as f64
    })
}

/// Zero outside the circle inscribed in the image.
pub fn inscribed_disk_mask(img: &Image) -> Result<Image> {
    let (w, h) = (img.width(), img.height());
    let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    let r = w.min(h) as f64 / 2.0;
    Image::from_fn(w, h, img.pixel_size(), |x, y| {
        let (dx, dy) = (x as f64 - cx, y as f64 - cy);
        if dx * dx + dy * dy < r * r {
            img.get(x, y)
        } else {
            0.0
        }
    })
}
