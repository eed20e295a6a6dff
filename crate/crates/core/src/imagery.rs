//! Raster value types shared by every stage of the pipeline.
//!
//! Colour inputs are 8-bit RGB. Every derived map (feature, conspicuity,
//! saliency) is a real-valued [`GrayMap`] on a nominal `[0, 255]` scale and
//! is only quantised when written to disk.
//!
//! Coordinates have their origin at the top-left corner, `x` grows to the
//! right and `y` downwards. For resampling, pixel `i` has its centre at
//! `i + 0.5`.

use std::path::Path;

use image::{DynamicImage, ImageFormat};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// An 8-bit, three channel raster stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<[u8; 3]>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// A black (fully transparent, for a HUD) image.
    pub fn black(width: usize, height: usize) -> Result<Self> {
        Self::filled(width, height, [0, 0, 0])
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self> {
        Self::new(width, height, vec![rgb; width * height])
    }

    pub fn from_fn<F>(width: usize, height: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> [u8; 3],
    {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn put(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        self.data[y * self.width + x] = rgb;
    }

    /// Splits the image into three real-valued planes (r, g, b).
    pub fn channels(&self) -> [GrayMap; 3] {
        let plane = |c: usize| GrayMap {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|p| f64::from(p[c])).collect(),
        };
        [plane(0), plane(1), plane(2)]
    }
}

/// A real-valued single channel map, nominally on a `[0, 255]` scale.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayMap {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayMap {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::filled(width, height, 0.0)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn<F>(width: usize, height: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> f64,
    {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    /// Builds a map whose dimensions are already known to be valid. Used by
    /// internal kernels that derive their output shape from a valid input.
    pub(crate) fn from_raw(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert!(width >= 1 && height >= 1 && data.len() == width * height);
        Self {
            width,
            height,
            data,
        }
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

    pub fn into_values(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub(crate) fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.data[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.data.len() as f64
    }

    /// Position `(x, y)` of the first maximum in row-major order.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, &v) in self.data.iter().enumerate() {
            if v > self.data[best] {
                best = i;
            }
        }
        (best % self.width, best / self.width)
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> GrayMap {
        GrayMap::from_raw(
            self.width,
            self.height,
            self.data.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Pointwise combination of two equally sized maps.
    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &GrayMap, f: F) -> Result<GrayMap> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                left: self.dims(),
                right: other.dims(),
            });
        }
        Ok(GrayMap::from_raw(
            self.width,
            self.height,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub(crate) fn add_assign(&mut self, other: &GrayMap) {
        debug_assert_eq!(self.dims(), other.dims());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    /// The value each pixel takes when exported as an 8-bit PNG.
    pub fn quantized(&self) -> Vec<u8> {
        self.data.iter().map(|&v| quantize(v)).collect()
    }
}

/// Clamp to `[0, 255]`, then round half-up.
#[inline]
pub fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 255.0) + 0.5).floor().min(255.0) as u8
}

/// An axis-aligned pixel rectangle: `x`, `y` locate the top-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Region {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl Region {
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        Self { x, y, w, h }
    }

    pub fn full(width: usize, height: usize) -> Self {
        Self::new(0, 0, width as u32, height as u32)
    }

    /// Checks that the region is non-empty and lies inside a
    /// `width` x `height` raster.
    pub fn validate_within(&self, width: usize, height: usize) -> Result<()> {
        if self.w == 0 || self.h == 0 {
            return Err(Error::EmptyRegion(*self));
        }
        let right = u64::from(self.x) + u64::from(self.w);
        let bottom = u64::from(self.y) + u64::from(self.h);
        if right > width as u64 || bottom > height as u64 {
            return Err(Error::RegionOutOfBounds {
                region: *self,
                width,
                height,
            });
        }
        Ok(())
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        let (x, y) = (x as u64, y as u64);
        x >= u64::from(self.x)
            && x < u64::from(self.x) + u64::from(self.w)
            && y >= u64::from(self.y)
            && y < u64::from(self.y) + u64::from(self.h)
    }

    pub fn area(&self) -> u64 {
        u64::from(self.w) * u64::from(self.h)
    }
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{},{}", self.x, self.y, self.w, self.h)
    }
}

impl std::str::FromStr for Region {
    type Err = Error;

    /// Parses `X,Y,W,H`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::ParseRegion(format!(
                "expected X,Y,W,H but got {s:?}"
            )));
        }
        let mut vals = [0u32; 4];
        for (slot, (name, part)) in vals
            .iter_mut()
            .zip(["x", "y", "width", "height"].iter().zip(&parts))
        {
            *slot = part.parse().map_err(|_| {
                Error::ParseRegion(format!("{name} {part:?} is not a nonnegative integer"))
            })?;
        }
        let region = Region::new(vals[0], vals[1], vals[2], vals[3]);
        if region.w == 0 {
            return Err(Error::ParseRegion("zero width".into()));
        }
        if region.h == 0 {
            return Err(Error::ParseRegion("zero height".into()));
        }
        Ok(region)
    }
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyImage { width, height });
    }
    if width.checked_mul(height) != Some(len) {
        return Err(Error::DataLength { width, height, len });
    }
    Ok(())
}

/// Loads an 8-bit PNG as RGB. Grayscale is replicated into all three
/// channels and any alpha channel is discarded. No colour management is
/// applied.
pub fn load_png(path: impl AsRef<Path>) -> Result<RgbImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode_png(&bytes).map_err(|e| match e {
        Error::Decode { reason, .. } => Error::Decode {
            path: Some(path.to_path_buf()),
            reason,
        },
        other => other,
    })
}

/// Decodes an in-memory PNG, see [`load_png`].
pub fn decode_png(bytes: &[u8]) -> Result<RgbImage> {
    let decoded = image::load_from_memory_with_format(bytes, ImageFormat::Png).map_err(|e| {
        Error::Decode {
            path: None,
            reason: e.to_string(),
        }
    })?;
    let (width, height) = (decoded.width() as usize, decoded.height() as usize);
    let data: Vec<[u8; 3]> = match decoded {
        DynamicImage::ImageLuma8(img) => img.pixels().map(|p| [p.0[0]; 3]).collect(),
        DynamicImage::ImageLumaA8(img) => img.pixels().map(|p| [p.0[0]; 3]).collect(),
        DynamicImage::ImageRgb8(img) => img.pixels().map(|p| p.0).collect(),
        DynamicImage::ImageRgba8(img) => img.pixels().map(|p| [p.0[0], p.0[1], p.0[2]]).collect(),
        other => {
            return Err(Error::UnsupportedPixelFormat(format!(
                "{:?}",
                other.color()
            )));
        }
    };
    RgbImage::new(width, height, data)
}

pub fn save_rgb_png(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    let raw: Vec<u8> = img.data.iter().flatten().copied().collect();
    let buf = image::RgbImage::from_raw(img.width as u32, img.height as u32, raw)
        .expect("buffer length matches dimensions");
    write_png(DynamicImage::ImageRgb8(buf), path.as_ref())
}

/// Writes a map as an 8-bit grayscale PNG using [`quantize`] per pixel.
pub fn save_gray_png(map: &GrayMap, path: impl AsRef<Path>) -> Result<()> {
    let buf = image::GrayImage::from_raw(map.width as u32, map.height as u32, map.quantized())
        .expect("buffer length matches dimensions");
    write_png(DynamicImage::ImageLuma8(buf), path.as_ref())
}

fn write_png(img: DynamicImage, path: &Path) -> Result<()> {
    img.save_with_format(path, ImageFormat::Png)
        .map_err(|e| match e {
            image::ImageError::IoError(source) => Error::Io {
                path: path.to_path_buf(),
                source,
            },
            other => Error::Encode(other.to_string()),
        })
}

/// Cuts `region` out of `map` without resampling.
pub fn crop(map: &GrayMap, region: Region) -> Result<GrayMap> {
    region.validate_within(map.width, map.height)?;
    let (x0, y0) = (region.x as usize, region.y as usize);
    let (w, h) = (region.w as usize, region.h as usize);
    let mut data = Vec::with_capacity(w * h);
    for y in y0..y0 + h {
        data.extend_from_slice(&map.row(y)[x0..x0 + w]);
    }
    Ok(GrayMap::from_raw(w, h, data))
}

/// Cuts `region` out of an RGB image without resampling.
pub fn crop_rgb(img: &RgbImage, region: Region) -> Result<RgbImage> {
    region.validate_within(img.width, img.height)?;
    let (x0, y0) = (region.x as usize, region.y as usize);
    let (w, h) = (region.w as usize, region.h as usize);
    let mut data = Vec::with_capacity(w * h);
    for y in y0..y0 + h {
        data.extend_from_slice(&img.data[y * img.width + x0..y * img.width + x0 + w]);
    }
    RgbImage::new(w, h, data)
}

/// Bilinear resampling with edge-clamped sampling.
///
/// Destination pixel `i` samples source coordinate
/// `(i + 0.5) * src / dst - 0.5`, clamped to the valid range. A same-size
/// request therefore reproduces the input exactly.
pub fn resize_bilinear(map: &GrayMap, target_w: usize, target_h: usize) -> Result<GrayMap> {
    if target_w == 0 || target_h == 0 {
        return Err(Error::EmptyImage {
            width: target_w,
            height: target_h,
        });
    }
    if map.dims() == (target_w, target_h) {
        return Ok(map.clone());
    }
    let xs = sample_positions(map.width, target_w);
    let ys = sample_positions(map.height, target_h);
    let mut data = Vec::with_capacity(target_w * target_h);
    for &(y0, y1, ty) in &ys {
        let top = map.row(y0);
        let bottom = map.row(y1);
        for &(x0, x1, tx) in &xs {
            let upper = lerp(top[x0], top[x1], tx);
            let lower = lerp(bottom[x0], bottom[x1], tx);
            data.push(lerp(upper, lower, ty));
        }
    }
    Ok(GrayMap::from_raw(target_w, target_h, data))
}

// `a + t (b - a)` returns `a` exactly when `a == b`, so constant maps stay
// bit-exact through any number of resamplings.
#[inline]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + t * (b - a)
}

fn sample_positions(src: usize, dst: usize) -> Vec<(usize, usize, f64)> {
    let scale = src as f64 / dst as f64;
    let last = (src - 1) as f64;
    (0..dst)
        .map(|i| {
            let pos = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, last);
            let i0 = pos.floor() as usize;
            let i1 = (i0 + 1).min(src - 1);
            (i0, i1, pos - i0 as f64)
        })
        .collect()
}

/// Resizes each channel of an RGB image bilinearly, rounding back to 8 bits.
pub fn resize_rgb_bilinear(img: &RgbImage, target_w: usize, target_h: usize) -> Result<RgbImage> {
    if img.width == target_w && img.height == target_h {
        return Ok(img.clone());
    }
    let [r, g, b] = img.channels();
    let r = resize_bilinear(&r, target_w, target_h)?;
    let g = resize_bilinear(&g, target_w, target_h)?;
    let b = resize_bilinear(&b, target_w, target_h)?;
    let data = (0..target_w * target_h)
        .map(|i| {
            [
                quantize(r.data[i]),
                quantize(g.data[i]),
                quantize(b.data[i]),
            ]
        })
        .collect();
    RgbImage::new(target_w, target_h, data)
}

/// Per-pixel intensity `(r + g + b) / 3`, unrounded.
pub fn to_intensity(img: &RgbImage) -> GrayMap {
    GrayMap::from_raw(
        img.width,
        img.height,
        img.data
            .iter()
            .map(|p| (f64::from(p[0]) + f64::from(p[1]) + f64::from(p[2])) / 3.0)
            .collect(),
    )
}
