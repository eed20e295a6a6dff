//! Saliency-difference evaluation of head-up display (HUD) content.
//!
//! A transparent HUD and the driving scene behind it compete for the
//! driver's attention. This crate measures that competition by comparing
//! two bottom-up saliency maps:
//!
//! * the saliency of the full measured view (scene plus projected content),
//!   cropped to the HUD region, and
//! * the saliency of the HUD content alone, rendered on black and resized to
//!   the region.
//!
//! Their difference is split into a positive part (attention the background
//! draws inside the display area) and a negative part (attention the HUD
//! content loses to the background). Each is reduced to a scalar in
//! `[0, 1]`: the distraction index `p` and the reduction index `m`.
//!
//! ```no_run
//! use hudsal::{evaluate, load_png, IttiBackend, Region};
//!
//! let measured = load_png("scene.png")?;
//! let hud = load_png("hud.png")?;
//! let result = evaluate(&measured, &hud, Region::new(320, 400, 256, 256), &IttiBackend::default())?;
//! println!("p = {:.3}, m = {:.3}", result.p, result.m);
//! # Ok::<(), hudsal::Error>(())
//! ```

use std::path::PathBuf;

pub mod compositor;
pub mod imagery;
pub mod interference;
pub mod saliency;

pub use compositor::{color_sweep, composite, CompositeSpec, SweepCase, SweepResult};
pub use imagery::{
    crop, load_png, resize_bilinear, save_gray_png, save_rgb_png, to_intensity, GrayMap, Region,
    RgbImage,
};
pub use interference::{difference, evaluate, indices, split, InterferenceResult, SignedMap};
pub use saliency::{compute_saliency, IttiBackend, IttiParams, SaliencyBackend};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot decode PNG{}: {reason}", path.as_ref().map(|p| format!(" {}", p.display())).unwrap_or_default())]
    Decode {
        path: Option<PathBuf>,
        reason: String,
    },
    #[error("cannot encode PNG: {0}")]
    Encode(String),
    #[error("unsupported pixel format {0}; only 8-bit grayscale or RGB(A) PNGs are accepted")]
    UnsupportedPixelFormat(String),
    #[error("raster must be at least 1x1, got {width}x{height}")]
    EmptyImage { width: usize, height: usize },
    #[error("pixel buffer holds {len} values but {width}x{height} were expected")]
    DataLength {
        width: usize,
        height: usize,
        len: usize,
    },
    #[error("map contains non-finite values")]
    NonFinite,
    #[error("region {0} has zero width or height")]
    EmptyRegion(Region),
    #[error("region {region} does not fit inside a {width}x{height} image")]
    RegionOutOfBounds {
        region: Region,
        width: usize,
        height: usize,
    },
    #[error("invalid region: {0}")]
    ParseRegion(String),
    #[error("dimension mismatch: {}x{} vs {}x{}", left.0, left.1, right.0, right.1)]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("image {width}x{height} is too small for {levels} pyramid levels; minimum input size is {min}x{min}")]
    ImageTooSmall {
        width: usize,
        height: usize,
        levels: usize,
        min: usize,
    },
    #[error("invalid saliency parameters: {0}")]
    InvalidParams(String),
    #[error("pyramid level {level} does not exist (pyramid has {len} levels)")]
    InvalidLevel { level: usize, len: usize },
    #[error("center level {center} must be finer than surround level {surround}")]
    InvalidScalePair { center: usize, surround: usize },
    #[error("gain must be in (0, 4], got {0}")]
    InvalidGain(f64),
    #[error("saliency backend violated its contract: {0}")]
    BackendContract(String),
    #[error("saliency backend failed: {0}")]
    Backend(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
