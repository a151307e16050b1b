//! Fourier ring correlation between two equal-size patches.
//!
//! For every ring of radial frequency the correlation is
//!
//! ```text
//!            Re Σ F1(q) · conj(F2(q))
//! FRC(k) = ─────────────────────────────
//!          sqrt(Σ |F1(q)|² · Σ |F2(q)|²)
//! ```
//!
//! summed over the Fourier coefficients `q` whose radius falls in ring `k`.
//! Taking the real part keeps the value in `[-1, 1]` and makes the measure
//! symmetric in its arguments.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{signed_index, Fft2};
use crate::image::{FrequencyAxis, Patch, NYQUIST};

/// Relative power floor below which a ring is treated as empty.
pub const POWER_FLOOR: f64 = 1e-12;

/// Taper fraction of the optional Tukey window.
pub const TUKEY_ALPHA: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    #[default]
    None,
    Tukey,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrcCurve {
    pub values: Vec<f64>,
    pub axis: FrequencyAxis,
    pub ring_pixel_counts: Vec<usize>,
    /// Every ring past DC was below the power floor in at least one patch.
    pub low_content: bool,
}

impl FrcCurve {
    pub fn n_rings(&self) -> usize {
        self.values.len()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.axis.centers()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCrossing {
    /// Normalized frequency where the curve first drops below the threshold.
    pub x_ct: f64,
    pub frc_threshold: f64,
    /// `false` when the curve never drops below the threshold; `x_ct` is then
    /// pinned to Nyquist.
    pub crossed: bool,
}

/// Precomputed transform plan, ring map and window for one patch size.
///
/// Building this once per scan avoids re-planning the FFT for every patch.
#[derive(Debug, Clone)]
pub struct FrcEngine {
    size: usize,
    fft: Fft2,
    axis: FrequencyAxis,
    ring_of: Vec<Option<u32>>,
    ring_counts: Vec<usize>,
    window: Option<Vec<f64>>,
}

impl FrcEngine {
    pub fn new(size: usize, bin_width: f64, pixel_size: f64, window: Window) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidPatchSize(size));
        }
        let axis = FrequencyAxis::new(bin_width, pixel_size)?;
        let ring_width_px = bin_width * size as f64;
        let mut ring_of = Vec::with_capacity(size * size);
        let mut ring_counts = vec![0usize; axis.n_rings];
        for ky in 0..size {
            let v = signed_index(ky, size) as f64;
            for kx in 0..size {
                let u = signed_index(kx, size) as f64;
                // Radius in Fourier pixels; the small offset keeps exact
                // integer radii (3-4-5 triples) from flooring into the ring below.
                let ring = ((u * u + v * v).sqrt() / ring_width_px + 1e-9).floor() as usize;
                if ring < axis.n_rings {
                    ring_counts[ring] += 1;
                    ring_of.push(Some(ring as u32));
                } else {
                    ring_of.push(None);
                }
            }
        }
        let window = match window {
            Window::None => None,
            Window::Tukey => Some(tukey_2d(size, TUKEY_ALPHA)),
        };
        Ok(Self {
            size,
            fft: Fft2::new(size, size),
            axis,
            ring_of,
            ring_counts,
            window,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn axis(&self) -> &FrequencyAxis {
        &self.axis
    }

    fn spectrum(&self, data: &[f64]) -> Vec<Complex64> {
        match &self.window {
            Some(w) => {
                let tapered: Vec<f64> = data.iter().zip(w).map(|(a, b)| a * b).collect();
                self.fft.forward_real(&tapered)
            }
            None => self.fft.forward_real(data),
        }
    }

    pub fn curve(&self, p1: &Patch, p2: &Patch) -> Result<FrcCurve> {
        if p1.size != p2.size {
            return Err(Error::SizeMismatch(p1.size, p2.size));
        }
        if p1.size != self.size {
            return Err(Error::SizeMismatch(p1.size, self.size));
        }
        self.curve_raw(&p1.data, &p2.data)
    }

    /// Same as [`FrcEngine::curve`] on bare `size`x`size` buffers.
    pub fn curve_raw(&self, a: &[f64], b: &[f64]) -> Result<FrcCurve> {
        let n = self.size * self.size;
        if a.len() != n || b.len() != n {
            return Err(Error::SizeMismatch(a.len(), b.len()));
        }
        let f1 = self.spectrum(a);
        let f2 = self.spectrum(b);
        let rings = self.axis.n_rings;
        let mut cross = vec![0.0; rings];
        let mut pow1 = vec![0.0; rings];
        let mut pow2 = vec![0.0; rings];
        for (i, ring) in self.ring_of.iter().enumerate() {
            if let Some(k) = ring {
                let k = *k as usize;
                let (x, y) = (f1[i], f2[i]);
                cross[k] += x.re * y.re + x.im * y.im;
                pow1[k] += x.norm_sqr();
                pow2[k] += y.norm_sqr();
            }
        }
        // Scaled by 1/n so that the powers share units with the mean square
        // (Parseval: Σ|F|²/n = Σx²).
        let norm = 1.0 / n as f64;
        let floor1 = POWER_FLOOR * (mean_square(a) + 1e-30);
        let floor2 = POWER_FLOOR * (mean_square(b) + 1e-30);
        let mut values = vec![0.0; rings];
        let mut any_power = false;
        for k in 0..rings {
            let (p1, p2) = (pow1[k] * norm, pow2[k] * norm);
            if p1 < floor1 || p2 < floor2 {
                continue;
            }
            if k > 0 {
                any_power = true;
            }
            values[k] = (cross[k] * norm / (p1 * p2).sqrt()).clamp(-1.0, 1.0);
        }
        Ok(FrcCurve {
            values,
            axis: self.axis,
            ring_pixel_counts: self.ring_counts.clone(),
            low_content: !any_power,
        })
    }
}

fn mean_square(data: &[f64]) -> f64 {
    data.iter().map(|v| v * v).sum::<f64>() / data.len() as f64
}

fn tukey_1d(n: usize, alpha: f64) -> Vec<f64> {
    if n < 2 {
        return vec![1.0; n];
    }
    let edge = alpha * (n - 1) as f64 / 2.0;
    (0..n)
        .map(|i| {
            let x = i.min(n - 1 - i) as f64;
            if x < edge {
                0.5 * (1.0 - (std::f64::consts::PI * x / edge).cos())
            } else {
                1.0
            }
        })
        .collect()
}

fn tukey_2d(n: usize, alpha: f64) -> Vec<f64> {
    let w = tukey_1d(n, alpha);
    let mut out = Vec::with_capacity(n * n);
    for wy in &w {
        for wx in &w {
            out.push(wy * wx);
        }
    }
    out
}

/// Correlation curve between two patches with the default (unwindowed)
/// construction. `bin_width` is in normalized cycles per pixel; `1 / size`
/// gives one ring per Fourier pixel.
pub fn frc(p1: &Patch, p2: &Patch, bin_width: f64) -> Result<FrcCurve> {
    frc_with_window(p1, p2, bin_width, Window::None)
}

pub fn frc_with_window(p1: &Patch, p2: &Patch, bin_width: f64, window: Window) -> Result<FrcCurve> {
    if p1.size != p2.size {
        return Err(Error::SizeMismatch(p1.size, p2.size));
    }
    FrcEngine::new(p1.size, bin_width, 1.0, window)?.curve(p1, p2)
}

/// Finds the first frequency where `curve` falls below `threshold`,
/// interpolating linearly between the bracketing ring centers.
pub fn threshold_crossing(curve: &FrcCurve, threshold: f64) -> Result<ThresholdCrossing> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidThreshold(threshold));
    }
    let values = &curve.values;
    let result = |x_ct: f64, crossed| ThresholdCrossing {
        x_ct,
        frc_threshold: threshold,
        crossed,
    };
    match values.iter().position(|&v| v < threshold) {
        None => Ok(result(NYQUIST, false)),
        Some(0) => Ok(result(0.0, true)),
        Some(k) => {
            let (above, below) = (values[k - 1], values[k]);
            let t = (above - threshold) / (above - below);
            let x = curve.axis.ring_center(k - 1) + t * curve.axis.bin_width;
            Ok(result(x.clamp(0.0, NYQUIST), true))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_patch(size: usize, seed: u64) -> Patch {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..size * size).map(|_| rng.random::<f64>()).collect();
        Patch::from_data(size, data).unwrap()
    }

    fn curve_from(values: Vec<f64>, bin_width: f64) -> FrcCurve {
        let axis = FrequencyAxis {
            n_rings: values.len(),
            bin_width,
            pixel_size: 1.0,
        };
        FrcCurve {
            ring_pixel_counts: vec![1; values.len()],
            values,
            axis,
            low_content: false,
        }
    }

    #[test]
    fn self_correlation_is_one() {
        let p = random_patch(32, 1);
        let c = frc(&p, &p, 1.0 / 32.0).unwrap();
        assert_eq!(c.n_rings(), 16);
        assert!(!c.low_content);
        for v in &c.values {
            assert!((v - 1.0).abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn sign_flip_is_minus_one() {
        let p = random_patch(32, 2);
        let c = frc(&p, &p.scaled(-1.0), 1.0 / 32.0).unwrap();
        for v in &c.values {
            assert!((v + 1.0).abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn ring_counts_sum_to_binned_coefficients() {
        let engine = FrcEngine::new(64, 1.0 / 64.0, 1.0, Window::None).unwrap();
        let total: usize = engine.ring_counts.iter().sum();
        let binned = engine.ring_of.iter().filter(|r| r.is_some()).count();
        assert_eq!(total, binned);
        assert_eq!(engine.ring_counts[0], 1, "DC ring holds only DC");
        // u² + v² < 1024 over the signed grid [-32, 32).
        let expected = (-32i64..32)
            .flat_map(|u| (-32i64..32).map(move |v| u * u + v * v))
            .filter(|&r2| r2 < 32 * 32)
            .count();
        assert_eq!(total, expected);
    }

    #[test]
    fn uniform_patch_is_low_content() {
        let p = Patch::from_data(16, vec![3.0; 256]).unwrap();
        let c = frc(&p, &p, 1.0 / 16.0).unwrap();
        assert!(c.low_content);
        assert!((c.values[0] - 1.0).abs() < 1e-12);
        assert!(c.values[1..].iter().all(|&v| v == 0.0));
        let zero = Patch::from_data(16, vec![0.0; 256]).unwrap();
        let c = frc(&zero, &zero, 1.0 / 16.0).unwrap();
        assert!(c.low_content);
        assert!(c.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn errors() {
        let a = random_patch(16, 3);
        let b = random_patch(32, 3);
        assert!(matches!(frc(&a, &b, 0.1), Err(Error::SizeMismatch(16, 32))));
        assert!(matches!(frc(&a, &a, 0.0), Err(Error::ZeroBinWidth(_))));
        let c = frc(&a, &a, 1.0 / 16.0).unwrap();
        assert!(matches!(
            threshold_crossing(&c, 1.5),
            Err(Error::InvalidThreshold(_))
        ));
        assert!(threshold_crossing(&c, -0.1).is_err());
    }

    #[test]
    fn constant_curve_never_crosses() {
        let c = curve_from(vec![1.0; 32], 1.0 / 64.0);
        let t = threshold_crossing(&c, 0.5).unwrap();
        assert!(!t.crossed);
        assert_eq!(t.x_ct, 0.5);
    }

    #[test]
    fn step_curve_crosses_at_bracket_midpoint() {
        // Ring centers sit at (k + 0.5) * w, so 0.24 and 0.26 cannot both be
        // centers. Bin width 0.02 brackets the step with 0.23 / 0.25 and
        // bin width 0.04 with 0.22 / 0.26; the midpoint rule is what matters.
        for (bw, step_ring, expected) in [(0.02, 12, 0.24), (0.04, 6, 0.24), (0.02, 13, 0.26)] {
            let mut values = vec![1.0; (0.5 / bw) as usize];
            for v in values.iter_mut().skip(step_ring) {
                *v = 0.0;
            }
            let c = curve_from(values, bw);
            let t = threshold_crossing(&c, 0.5).unwrap();
            assert!(t.crossed);
            assert!((t.x_ct - expected).abs() < 1e-12, "{bw}: {}", t.x_ct);
        }
    }

    #[test]
    fn first_ring_below_threshold_gives_zero() {
        let c = curve_from(vec![0.2, 0.9, 0.9], 0.2);
        let t = threshold_crossing(&c, 0.5).unwrap();
        assert!(t.crossed);
        assert_eq!(t.x_ct, 0.0);
    }

    #[test]
    fn ignores_later_recrossings() {
        let c = curve_from(vec![1.0, 0.9, 0.4, 0.8, 0.1], 0.1);
        let t = threshold_crossing(&c, 0.5).unwrap();
        // Between centers 0.15 (0.9) and 0.25 (0.4): 0.15 + 0.4/0.5 * 0.1.
        assert!((t.x_ct - 0.23).abs() < 1e-12);
    }

    #[test]
    fn tukey_window_is_symmetric_and_tapered() {
        let w = tukey_1d(64, TUKEY_ALPHA);
        assert_eq!(w[0], 0.0);
        for i in 0..64 {
            assert!((w[i] - w[63 - i]).abs() < 1e-15);
        }
        assert_eq!(w[32], 1.0);
        let p = random_patch(32, 9);
        let c = frc_with_window(&p, &p, 1.0 / 32.0, Window::Tukey).unwrap();
        assert!(c.values.iter().all(|v| (v - 1.0).abs() < 1e-9));
    }
}
