//! The center-surround saliency model: intensity, colour-opponent and
//! orientation channels, each computed as across-scale contrast on dyadic
//! pyramids, normalised and combined.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::features::{color_opponents, orientation_maps, GaborParams};
use super::normalize::normalize_map;
use super::pyramid::{build_pyramid, center_surround, min_input_size, transfer, Pyramid};
use super::SaliencyBackend;
use crate::imagery::{resize_bilinear, to_intensity, GrayMap, RgbImage};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IttiParams {
    /// Pyramid depth, level 0 being the input resolution.
    pub pyramid_levels: usize,
    /// Fine ("center") levels of the center-surround pairs.
    pub center_scales: Vec<usize>,
    /// Level offsets from center to surround.
    pub deltas: Vec<usize>,
    /// Preferred orientations in degrees.
    pub orientations: Vec<f64>,
    /// Level at which feature maps are accumulated.
    pub output_scale: usize,
    pub gabor: GaborParams,
}

impl Default for IttiParams {
    fn default() -> Self {
        Self {
            pyramid_levels: 9,
            center_scales: vec![2, 3, 4],
            deltas: vec![3, 4],
            orientations: vec![0.0, 45.0, 90.0, 135.0],
            output_scale: 4,
            gabor: GaborParams::default(),
        }
    }
}

impl IttiParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.pyramid_levels == 0 || self.pyramid_levels > 24 {
            return bad(format!(
                "pyramid_levels must be in 1..=24, got {}",
                self.pyramid_levels
            ));
        }
        let (Some(&max_c), Some(&max_d)) =
            (self.center_scales.iter().max(), self.deltas.iter().max())
        else {
            return bad("center_scales and deltas must be non-empty".into());
        };
        if self.deltas.contains(&0) {
            return bad("deltas must be at least 1".into());
        }
        if max_c + max_d > self.pyramid_levels - 1 {
            return bad(format!(
                "max center scale {max_c} + max delta {max_d} exceeds the deepest level {}",
                self.pyramid_levels - 1
            ));
        }
        if !self.center_scales.contains(&self.output_scale) {
            return bad(format!(
                "output_scale {} must be one of the center scales {:?}",
                self.output_scale, self.center_scales
            ));
        }
        if self.orientations.is_empty() || self.orientations.iter().any(|a| !a.is_finite()) {
            return bad("orientations must be a non-empty list of finite angles".into());
        }
        let g = &self.gabor;
        if !(g.wavelength > 0.0 && g.sigma > 0.0 && g.aspect > 0.0) || g.radius == 0 {
            return bad("gabor wavelength, sigma, aspect and radius must be positive".into());
        }
        Ok(())
    }

    /// Smallest accepted width and height. Smaller inputs are rejected
    /// rather than padded.
    pub fn min_input_size(&self) -> usize {
        min_input_size(self.pyramid_levels)
    }

    /// Every `(center, surround)` pair, ordered by center then delta.
    pub fn scale_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for &c in &self.center_scales {
            for &d in &self.deltas {
                pairs.push((c, c + d));
            }
        }
        pairs
    }
}

/// Per-channel conspicuity at the output scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Conspicuity {
    pub intensity: GrayMap,
    pub color: GrayMap,
    pub orientation: GrayMap,
    /// Normalised per-angle sums that make up `orientation`, in the order of
    /// [`IttiParams::orientations`].
    pub orientation_by_angle: Vec<GrayMap>,
}

/// Builds the intensity, colour and orientation conspicuity maps.
///
/// Every center-surround feature map is normalised, moved to the output
/// scale and summed per channel. Orientation sums are formed per angle and
/// normalised once more before the angles are added together.
///
/// Colour contrast is the across-scale difference of the same opponent
/// signal, `|RG(c) - RG(s)|` and `|BY(c) - BY(s)|`, so a uniformly coloured
/// field carries no colour conspicuity.
pub fn conspicuity_maps(img: &RgbImage, params: &IttiParams) -> Result<Conspicuity> {
    params.validate()?;
    let levels = params.pyramid_levels;
    let intensity = build_pyramid(&to_intensity(img), levels)?;
    let dims: Vec<_> = intensity.levels().iter().map(GrayMap::dims).collect();
    let pairs = params.scale_pairs();
    let out = params.output_scale;

    let accumulate = |pyr: &Pyramid| -> Result<GrayMap> {
        let maps = pairs
            .par_iter()
            .map(|&(c, s)| {
                let cs = center_surround(pyr, c, s)?;
                Ok(transfer(&normalize_map(&cs), c, out, |k| dims[k]))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(sum_maps(maps, dims[out]))
    };

    let intensity_bar = || accumulate(&intensity);

    let color_bar = || -> Result<GrayMap> {
        let opp = color_opponents(img);
        let red = build_pyramid(&opp.red, levels)?;
        let green = build_pyramid(&opp.green, levels)?;
        let blue = build_pyramid(&opp.blue, levels)?;
        let yellow = build_pyramid(&opp.yellow, levels)?;
        let rg = red.zip_levels(&green, |r, g| r - g)?;
        let by = blue.zip_levels(&yellow, |b, y| b - y)?;
        let (rg, by) = rayon::join(|| accumulate(&rg), || accumulate(&by));
        let mut total = rg?;
        total.add_assign(&by?);
        Ok(total)
    };

    let orientation_bar = || -> Result<(GrayMap, Vec<GrayMap>)> {
        // Levels finer than the smallest center scale are never consumed.
        let min_c = params.center_scales.iter().copied().min().unwrap_or(0);
        let oriented = orientation_maps(
            &intensity.from_level(min_c)?,
            &params.orientations,
            &params.gabor,
        );
        let per_angle = oriented
            .per_angle
            .par_iter()
            .map(|pyr| accumulate(pyr).map(|m| normalize_map(&m)))
            .collect::<Result<Vec<_>>>()?;
        Ok((sum_maps(per_angle.clone(), dims[out]), per_angle))
    };

    let (i_bar, (c_bar, o_bar)) =
        rayon::join(intensity_bar, || rayon::join(color_bar, orientation_bar));
    let (orientation, orientation_by_angle) = o_bar?;
    Ok(Conspicuity {
        intensity: i_bar?,
        color: c_bar?,
        orientation,
        orientation_by_angle,
    })
}

// Fixed summation order keeps results bit-identical regardless of thread
// scheduling.
fn sum_maps(maps: Vec<GrayMap>, (w, h): (usize, usize)) -> GrayMap {
    let mut iter = maps.into_iter();
    let mut acc = iter
        .next()
        .unwrap_or_else(|| GrayMap::from_raw(w, h, vec![0.0; w * h]));
    for m in iter {
        acc.add_assign(&m);
    }
    acc
}

/// Full saliency map at the input resolution on a `[0, 255]` scale.
///
/// The three conspicuity maps are normalised and averaged at the output
/// scale, upsampled bilinearly to the input size and rescaled so the global
/// maximum is 255. A map with no contrast anywhere stays zero.
pub fn compute_saliency(img: &RgbImage, params: &IttiParams) -> Result<GrayMap> {
    params.validate()?;
    let min = params.min_input_size();
    if img.width() < min || img.height() < min {
        return Err(Error::ImageTooSmall {
            width: img.width(),
            height: img.height(),
            levels: params.pyramid_levels,
            min,
        });
    }
    let consp = conspicuity_maps(img, params)?;
    let mut combined = normalize_map(&consp.intensity);
    combined.add_assign(&normalize_map(&consp.color));
    combined.add_assign(&normalize_map(&consp.orientation));
    let combined = combined.map(|v| v / 3.0);

    let full = resize_bilinear(&combined, img.width(), img.height())?;
    let max = full.max();
    if max <= 0.0 {
        return Ok(full.map(|_| 0.0));
    }
    Ok(full.map(|v| (v / max * 255.0).clamp(0.0, 255.0)))
}

/// The center-surround model as a [`SaliencyBackend`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IttiBackend {
    pub params: IttiParams,
}

impl IttiBackend {
    pub fn new(params: IttiParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }
}

impl SaliencyBackend for IttiBackend {
    fn compute(&self, img: &RgbImage) -> Result<GrayMap> {
        compute_saliency(img, &self.params)
    }

    fn name(&self) -> &str {
        "itti"
    }
}
