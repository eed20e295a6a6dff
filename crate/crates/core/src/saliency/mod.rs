//! Bottom-up saliency.
//!
//! [`SaliencyBackend`] is the seam the evaluation pipeline depends on; any
//! model that turns one frame into a same-sized `[0, 255]` map can be used.
//! [`IttiBackend`] is the built-in center-surround model.

mod features;
mod itti;
mod normalize;
mod pyramid;

pub use features::{
    color_opponents, filter_rectified, gabor_kernel, orientation_maps, GaborParams, Kernel,
    OpponentChannels, OrientationMaps,
};
pub use itti::{compute_saliency, conspicuity_maps, Conspicuity, IttiBackend, IttiParams};
pub use normalize::{local_maxima, normalize_map};
pub use pyramid::{build_pyramid, center_surround, min_input_size, reduce, Pyramid};

use crate::imagery::{GrayMap, RgbImage};
use crate::{Error, Result};

/// A single-frame saliency model.
///
/// Implementations must return a map with the input's dimensions and every
/// value finite and within `[0, 255]`. `compute` takes `&self` and the
/// pipeline may call it from several threads at once, so a backend holds no
/// per-frame state.
pub trait SaliencyBackend: Sync {
    fn compute(&self, img: &RgbImage) -> Result<GrayMap>;

    /// Short identifier used in reports.
    fn name(&self) -> &str {
        "custom"
    }
}

impl<B: SaliencyBackend + ?Sized> SaliencyBackend for &B {
    fn compute(&self, img: &RgbImage) -> Result<GrayMap> {
        (**self).compute(img)
    }

    fn name(&self) -> &str {
        (**self).name()
    }
}

/// Runs `backend` and checks its output against the backend contract.
pub fn compute_checked<B: SaliencyBackend + ?Sized>(
    backend: &B,
    img: &RgbImage,
) -> Result<GrayMap> {
    let map = backend.compute(img)?;
    if map.dims() != (img.width(), img.height()) {
        return Err(Error::BackendContract(format!(
            "{} returned a {}x{} map for a {}x{} image",
            backend.name(),
            map.width(),
            map.height(),
            img.width(),
            img.height()
        )));
    }
    if let Some(v) = map.values().iter().find(|v| !(0.0..=255.0).contains(*v)) {
        return Err(Error::BackendContract(format!(
            "{} produced value {v} outside [0, 255]",
            backend.name()
        )));
    }
    Ok(map)
}
