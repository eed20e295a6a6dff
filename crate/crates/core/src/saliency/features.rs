//! Early visual features: broadly tuned colour opponents and oriented
//! Gabor energy.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pyramid::Pyramid;
use crate::imagery::{GrayMap, RgbImage};

/// Broadly tuned red, green, blue and yellow channels.
#[derive(Debug, Clone, PartialEq)]
pub struct OpponentChannels {
    pub red: GrayMap,
    pub green: GrayMap,
    pub blue: GrayMap,
    pub yellow: GrayMap,
}

/// Computes the four broadly tuned colour channels.
///
/// Each of r, g, b is first divided by the local intensity so hue is
/// decoupled from brightness. Pixels whose intensity does not exceed a tenth
/// of the image maximum carry no reliable hue and are zeroed. The quotient is
/// expressed on the 255 scale, so a saturated primary yields 255 in its own
/// channel:
///
/// ```text
/// r' = 255 r / (r + g + b)            (likewise g', b')
/// R  = r' - (g' + b') / 2
/// G  = g' - (r' + b') / 2
/// B  = b' - (r' + g') / 2
/// Y  = (r' + g') / 2 - |r' - g'| / 2 - b'
/// ```
///
/// All four channels are clamped below at zero.
pub fn color_opponents(img: &RgbImage) -> OpponentChannels {
    let sums: Vec<f64> = img
        .pixels()
        .iter()
        .map(|p| f64::from(p[0]) + f64::from(p[1]) + f64::from(p[2]))
        .collect();
    // Comparing channel sums is the same as comparing (r+g+b)/3.
    let threshold = sums.iter().copied().fold(0.0, f64::max) / 10.0;

    let n = sums.len();
    let (mut red, mut green, mut blue, mut yellow) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for (i, (p, &sum)) in img.pixels().iter().zip(&sums).enumerate() {
        if sum <= threshold {
            continue;
        }
        let r = 255.0 * f64::from(p[0]) / sum;
        let g = 255.0 * f64::from(p[1]) / sum;
        let b = 255.0 * f64::from(p[2]) / sum;
        red[i] = (r - (g + b) / 2.0).max(0.0);
        green[i] = (g - (r + b) / 2.0).max(0.0);
        blue[i] = (b - (r + g) / 2.0).max(0.0);
        yellow[i] = ((r + g) / 2.0 - (r - g).abs() / 2.0 - b).max(0.0);
    }
    let (w, h) = (img.width(), img.height());
    OpponentChannels {
        red: GrayMap::from_raw(w, h, red),
        green: GrayMap::from_raw(w, h, green),
        blue: GrayMap::from_raw(w, h, blue),
        yellow: GrayMap::from_raw(w, h, yellow),
    }
}

/// Shape of the even-symmetric Gabor filters used for orientation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaborParams {
    /// Carrier wavelength in pixels.
    pub wavelength: f64,
    /// Standard deviation of the Gaussian envelope in pixels.
    pub sigma: f64,
    /// Envelope aspect ratio (along-bar over across-bar extent).
    pub aspect: f64,
    /// Half-width of the square support; the kernel is `2r + 1` wide.
    pub radius: usize,
}

impl Default for GaborParams {
    fn default() -> Self {
        Self {
            wavelength: 7.0,
            sigma: 2.8,
            aspect: 1.0,
            radius: 8,
        }
    }
}

/// A square convolution kernel stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    pub radius: usize,
    pub weights: Vec<f64>,
}

impl Kernel {
    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn at(&self, dx: isize, dy: isize) -> f64 {
        let r = self.radius as isize;
        self.weights[((dy + r) * (2 * r + 1) + dx + r) as usize]
    }
}

/// Even-symmetric Gabor kernel preferring bars and edges oriented at
/// `theta_deg` (0 = horizontal, angles counter-clockwise on screen).
///
/// The sampled kernel has its mean removed, so it rejects DC, and is then
/// scaled so the energy of its positive lobes is one. The second step gives
/// every orientation the same gain for a point stimulus after rectification.
pub fn gabor_kernel(theta_deg: f64, params: &GaborParams) -> Kernel {
    let r = params.radius as isize;
    let theta = theta_deg.to_radians();
    let (sin, cos) = theta.sin_cos();
    let two_sigma2 = 2.0 * params.sigma * params.sigma;
    let gamma2 = params.aspect * params.aspect;
    let mut weights = Vec::with_capacity(((2 * r + 1) * (2 * r + 1)) as usize);
    for dy in -r..=r {
        for dx in -r..=r {
            let (x, y) = (dx as f64, -(dy as f64));
            // Along the preferred bar and across it.
            let along = x * cos + y * sin;
            let across = -x * sin + y * cos;
            let envelope = (-(across * across + gamma2 * along * along) / two_sigma2).exp();
            let carrier = (std::f64::consts::TAU * across / params.wavelength).cos();
            weights.push(envelope * carrier);
        }
    }
    let mean = weights.iter().sum::<f64>() / weights.len() as f64;
    for w in &mut weights {
        *w -= mean;
    }
    let pos_energy: f64 = weights.iter().filter(|&&w| w > 0.0).map(|w| w * w).sum();
    let scale = pos_energy.sqrt().recip();
    for w in &mut weights {
        *w *= scale;
    }
    Kernel {
        radius: params.radius,
        weights,
    }
}

/// Convolves `map` with `kernel` (edge clamped) and half-wave rectifies.
///
/// The sum is taken over `value - centre value`, which is the same linear
/// filter for a zero-mean kernel but makes the response to a flat patch
/// exactly zero.
pub fn filter_rectified(map: &GrayMap, kernel: &Kernel) -> GrayMap {
    let (w, h) = map.dims();
    let r = kernel.radius;
    let side = kernel.side();
    let pw = w + 2 * r;
    let mut padded = Vec::with_capacity(pw * (h + 2 * r));
    for py in 0..h + 2 * r {
        let y = py as isize - r as isize;
        for px in 0..pw {
            padded.push(map.get_clamped(px as isize - r as isize, y));
        }
    }
    let rows: Vec<Vec<f64>> = (0..h)
        .into_par_iter()
        .map(|y| {
            let mut out = Vec::with_capacity(w);
            for x in 0..w {
                let centre = map.get(x, y);
                let mut acc = 0.0;
                for (ky, krow) in kernel.weights.chunks_exact(side).enumerate() {
                    let start = (y + ky) * pw + x;
                    let window = &padded[start..start + side];
                    for (kw, v) in krow.iter().zip(window) {
                        acc += kw * (v - centre);
                    }
                }
                out.push(acc.max(0.0));
            }
            out
        })
        .collect();
    GrayMap::from_raw(w, h, rows.concat())
}

/// Gabor responses of every pyramid level, one pyramid per orientation.
#[derive(Debug, Clone)]
pub struct OrientationMaps {
    pub angles: Vec<f64>,
    pub per_angle: Vec<Pyramid>,
}

/// Filters each level of an intensity pyramid at every orientation in
/// `angles` (degrees).
pub fn orientation_maps(
    intensity: &Pyramid,
    angles: &[f64],
    gabor: &GaborParams,
) -> OrientationMaps {
    let per_angle = angles
        .par_iter()
        .map(|&theta| {
            let kernel = gabor_kernel(theta, gabor);
            intensity.map_levels(|level| filter_rectified(level, &kernel))
        })
        .collect();
    OrientationMaps {
        angles: angles.to_vec(),
        per_angle,
    }
}
