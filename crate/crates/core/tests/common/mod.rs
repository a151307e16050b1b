#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sfrc::degrade::{make_phantom, PhantomKind};
use sfrc::image::{Image, Patch};

pub fn texture(size: usize, seed: u64) -> Image {
    make_phantom(PhantomKind::Texture, size, seed)
        .unwrap()
        .image
}

pub fn texture_patch(size: usize, seed: u64) -> Patch {
    Patch::from_data(size, texture(size, seed).into_data()).unwrap()
}

pub fn uniform_noise(w: usize, h: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..w * h).map(|_| rng.random::<f64>() - 0.5).collect()
}

/// Textbook double-loop DFT of a square real array.
pub fn direct_dft(data: &[f64], n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n * n];
    for v in 0..n {
        for u in 0..n {
            let (mut re, mut im) = (0.0, 0.0);
            for y in 0..n {
                for x in 0..n {
                    let ang = -2.0 * std::f64::consts::PI * ((u * x + v * y) as f64) / n as f64;
                    re += data[y * n + x] * ang.cos();
                    im += data[y * n + x] * ang.sin();
                }
            }
            out[v * n + u] = (re, im);
        }
    }
    out
}

fn centred(k: usize, n: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// FRC computed from direct DFTs with rings `floor(r / bin_width)` where
/// `r` is in cycles per pixel, restricted to `r < 0.5`.
pub fn direct_frc(a: &[f64], b: &[f64], n: usize, bin_width: f64) -> Vec<f64> {
    let fa = direct_dft(a, n);
    let fb = direct_dft(b, n);
    let n_rings = (0.5 / bin_width - 1e-9).ceil() as usize;
    let mut num = vec![0.0; n_rings];
    let mut pa = vec![0.0; n_rings];
    let mut pb = vec![0.0; n_rings];
    for v in 0..n {
        for u in 0..n {
            let fu = centred(u, n) / n as f64;
            let fv = centred(v, n) / n as f64;
            let r = (fu * fu + fv * fv).sqrt();
            let k = (r / bin_width + 1e-9).floor() as usize;
            if k >= n_rings {
                continue;
            }
            let (ar, ai) = fa[v * n + u];
            let (br, bi) = fb[v * n + u];
            num[k] += ar * br + ai * bi;
            pa[k] += ar * ar + ai * ai;
            pb[k] += br * br + bi * bi;
        }
    }
    (0..n_rings)
        .map(|k| {
            let d = (pa[k] * pb[k]).sqrt();
            if d > 0.0 {
                num[k] / d
            } else {
                0.0
            }
        })
        .collect()
}
