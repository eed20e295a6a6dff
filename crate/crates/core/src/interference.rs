//! Difference-saliency evaluation of a HUD against its background.
//!
//! With `M^S_HUD` the saliency of the measured view cropped to the HUD
//! region and `H^S` the saliency of the HUD content alone (resized to the
//! region), the evaluation is
//!
//! ```text
//! E       = M^S_HUD - H^S
//! E_plus  = max(E, 0)            attention drawn by the background
//! E_minus = -min(E, 0)           attention the HUD content loses
//! p = sum(E_plus)  / (N * M * 255)
//! m = sum(E_minus) / (N * M * 255)
//! ```
//!
//! `p` and `m` are only comparable between cases showing the same content on
//! the same background, e.g. a colour sweep of one glyph.

use crate::imagery::{crop, resize_bilinear, GrayMap, Region, RgbImage};
use crate::saliency::{compute_checked, SaliencyBackend};
use crate::{Error, Result};

/// A real-valued map that may be negative, holding `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedMap {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl SignedMap {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        // Reuse GrayMap's shape and finiteness checks.
        let checked = GrayMap::new(width, height, data)?;
        Ok(Self {
            width,
            height,
            data: checked.into_values(),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }
}

/// The saliency maps an evaluation was derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyMaps {
    /// Saliency of the whole measured image.
    pub measured: GrayMap,
    /// `measured` cropped to the HUD region.
    pub measured_hud: GrayMap,
    /// Saliency of the HUD image at its native resolution.
    pub hud_native: GrayMap,
    /// `hud_native` resized to the region.
    pub hud: GrayMap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceResult {
    pub e: SignedMap,
    pub e_plus: GrayMap,
    pub e_minus: GrayMap,
    /// Visual distraction index.
    pub p: f64,
    /// Saliency reduction index.
    pub m: f64,
    pub saliency: SaliencyMaps,
}

/// `E = M^S_HUD - H^S`, pointwise and unclamped.
pub fn difference(measured_hud: &GrayMap, hud: &GrayMap) -> Result<SignedMap> {
    let e = measured_hud.zip_with(hud, |a, b| a - b)?;
    let (w, h) = e.dims();
    SignedMap::new(w, h, e.into_values())
}

/// Splits `E` into its positive part and the magnitude of its negative part.
pub fn split(e: &SignedMap) -> (GrayMap, GrayMap) {
    let plus = e.data.iter().map(|&v| v.max(0.0)).collect();
    let minus = e.data.iter().map(|&v| -(v.min(0.0))).collect();
    (
        GrayMap::from_raw(e.width, e.height, plus),
        GrayMap::from_raw(e.width, e.height, minus),
    )
}

/// `(p, m)`: the mean of each part divided by 255.
pub fn indices(e_plus: &GrayMap, e_minus: &GrayMap) -> Result<(f64, f64)> {
    if e_plus.dims() != e_minus.dims() {
        return Err(Error::DimensionMismatch {
            left: e_plus.dims(),
            right: e_minus.dims(),
        });
    }
    let denom = e_plus.values().len() as f64 * 255.0;
    Ok((e_plus.sum() / denom, e_minus.sum() / denom))
}

/// Runs the full difference-saliency pipeline.
///
/// `backend` is applied to the measured image and to the HUD image at its
/// native resolution (concurrently). The HUD saliency map, not the HUD
/// image, is then resized to the region.
pub fn evaluate<B>(
    measured: &RgbImage,
    hud: &RgbImage,
    region: Region,
    backend: &B,
) -> Result<InterferenceResult>
where
    B: SaliencyBackend + ?Sized,
{
    region.validate_within(measured.width(), measured.height())?;
    let (measured_sal, hud_sal) = rayon::join(
        || compute_checked(backend, measured),
        || compute_checked(backend, hud),
    );
    let (measured_sal, hud_native) = (measured_sal?, hud_sal?);
    let measured_hud = crop(&measured_sal, region)?;
    let hud_resized = resize_bilinear(&hud_native, region.w as usize, region.h as usize)?;

    let e = difference(&measured_hud, &hud_resized)?;
    let (e_plus, e_minus) = split(&e);
    let (p, m) = indices(&e_plus, &e_minus)?;
    Ok(InterferenceResult {
        e,
        e_plus,
        e_minus,
        p,
        m,
        saliency: SaliencyMaps {
            measured: measured_sal,
            measured_hud,
            hud_native,
            hud: hud_resized,
        },
    })
}
