//! Synthetic "measured images": a transparent HUD optically added onto a
//! background frame.
//!
//! A combiner HUD adds projected light to the light transmitted from the
//! scene, so inside the HUD region
//!
//! ```text
//! out = clamp(background + gain * hud, 0, 255)      per channel
//! ```
//!
//! and black HUD pixels leave the scene untouched. Clamping models camera
//! saturation: a red glyph over a bright red brake light cannot get any
//! redder, and its contrast collapses.

use rayon::prelude::*;

use crate::imagery::{quantize, resize_bilinear, GrayMap, Region, RgbImage};
use crate::interference::{evaluate, InterferenceResult};
use crate::saliency::SaliencyBackend;
use crate::{Error, Result};

/// Upper bound on projector gain.
pub const MAX_GAIN: f64 = 4.0;

#[derive(Debug, Clone)]
pub struct CompositeSpec {
    pub background: RgbImage,
    pub hud: RgbImage,
    /// Placement of the HUD in background coordinates.
    pub region: Region,
    /// Projector brightness relative to the HUD image values.
    pub gain: f64,
}

impl CompositeSpec {
    pub fn new(background: RgbImage, hud: RgbImage, region: Region) -> Self {
        Self {
            background,
            hud,
            region,
            gain: 1.0,
        }
    }

    pub fn with_gain(mut self, gain: f64) -> Self {
        self.gain = gain;
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_gain(self.gain)?;
        self.region
            .validate_within(self.background.width(), self.background.height())
    }
}

pub fn validate_gain(gain: f64) -> Result<()> {
    if gain.is_finite() && gain > 0.0 && gain <= MAX_GAIN {
        Ok(())
    } else {
        Err(Error::InvalidGain(gain))
    }
}

/// Renders the HUD over the background. The HUD image is resized
/// bilinearly to the region before blending; pixels outside the region are
/// copied from the background untouched.
pub fn composite(spec: &CompositeSpec) -> Result<RgbImage> {
    spec.validate()?;
    let Region { x, y, w, h } = spec.region;
    let (x0, y0, w, h) = (x as usize, y as usize, w as usize, h as usize);
    let resized: Vec<GrayMap> = spec
        .hud
        .channels()
        .iter()
        .map(|c| resize_bilinear(c, w, h))
        .collect::<Result<_>>()?;

    let mut out = spec.background.clone();
    for ry in 0..h {
        for rx in 0..w {
            let bg = out.get(x0 + rx, y0 + ry);
            let mut px = [0u8; 3];
            for (c, slot) in px.iter_mut().enumerate() {
                let light = resized[c].get(rx, ry);
                *slot = quantize(f64::from(bg[c]) + spec.gain * light);
            }
            out.put(x0 + rx, y0 + ry, px);
        }
    }
    Ok(out)
}

/// A HUD image showing `color` wherever `mask` has any non-zero channel, on
/// black elsewhere.
pub fn glyph_hud(mask: &RgbImage, color: [u8; 3]) -> RgbImage {
    let data = mask
        .pixels()
        .iter()
        .map(|p| {
            if p.iter().any(|&v| v != 0) {
                color
            } else {
                [0, 0, 0]
            }
        })
        .collect();
    RgbImage::new(mask.width(), mask.height(), data).expect("same shape as a valid mask")
}

#[derive(Debug, Clone)]
pub struct SweepCase {
    pub color: [u8; 3],
    pub hud: RgbImage,
    pub measured: RgbImage,
    pub result: InterferenceResult,
}

/// Results of one colour sweep. All cases share the same content and
/// background, so their indices may be ranked against each other.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub content_group: String,
    pub gain: f64,
    pub cases: Vec<SweepCase>,
}

impl SweepResult {
    /// Case indices ordered by `m`, largest first (ties keep sweep order).
    pub fn ranking_by_m(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.cases.len()).collect();
        order.sort_by(|&a, &b| self.cases[b].result.m.total_cmp(&self.cases[a].result.m));
        order
    }
}

/// Evaluates the same glyph in each of `colors` over one background.
///
/// For every colour the glyph is rendered on black, composited into the
/// background at `region` with `gain`, and the composite is evaluated
/// against the rendered glyph. Cases run in parallel; output order follows
/// `colors`.
pub fn color_sweep<B>(
    background: &RgbImage,
    glyph_mask: &RgbImage,
    region: Region,
    colors: &[[u8; 3]],
    gain: f64,
    backend: &B,
) -> Result<SweepResult>
where
    B: SaliencyBackend + ?Sized,
{
    validate_gain(gain)?;
    region.validate_within(background.width(), background.height())?;
    let cases = colors
        .par_iter()
        .map(|&color| {
            let hud = glyph_hud(glyph_mask, color);
            let spec = CompositeSpec {
                background: background.clone(),
                hud: hud.clone(),
                region,
                gain,
            };
            let measured = composite(&spec)?;
            let result = evaluate(&measured, &hud, region, backend)?;
            Ok(SweepCase {
                color,
                hud,
                measured,
                result,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        content_group: "sweep".into(),
        gain,
        cases,
    })
}
