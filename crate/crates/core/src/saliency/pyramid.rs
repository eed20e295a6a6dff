//! Dyadic low-pass pyramids and across-scale differences.

use crate::imagery::{resize_bilinear, GrayMap};
use crate::{Error, Result};

/// Successively low-passed and decimated copies of a map. Level 0 is the
/// source; level `k + 1` has dimensions `ceil(level k / 2)`.
///
/// A pyramid may also be a coarse tail of a deeper one (see
/// [`Pyramid::from_level`]); level numbers keep their original meaning.
#[derive(Debug, Clone, PartialEq)]
pub struct Pyramid {
    first: usize,
    levels: Vec<GrayMap>,
}

impl Pyramid {
    pub(crate) fn from_levels(levels: Vec<GrayMap>) -> Self {
        debug_assert!(!levels.is_empty());
        Self { first: 0, levels }
    }

    /// The levels `k..`, still addressed by their original numbers.
    pub fn from_level(&self, k: usize) -> Result<Pyramid> {
        self.level(k)?;
        Ok(Pyramid {
            first: k,
            levels: self.levels[k - self.first..].to_vec(),
        })
    }

    /// Number of the finest level held.
    pub fn first_level(&self) -> usize {
        self.first
    }

    pub fn levels(&self) -> &[GrayMap] {
        &self.levels
    }

    /// One past the coarsest level number.
    pub fn len(&self) -> usize {
        self.first + self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, k: usize) -> Result<&GrayMap> {
        k.checked_sub(self.first)
            .and_then(|i| self.levels.get(i))
            .ok_or(Error::InvalidLevel {
                level: k,
                len: self.len(),
            })
    }

    /// Applies `f` to every level, keeping the level structure.
    pub(crate) fn map_levels<F>(&self, f: F) -> Pyramid
    where
        F: Fn(&GrayMap) -> GrayMap,
    {
        Pyramid {
            first: self.first,
            levels: self.levels.iter().map(f).collect(),
        }
    }

    /// Pointwise combination of two pyramids built from equally sized
    /// sources.
    pub(crate) fn zip_levels<F>(&self, other: &Pyramid, f: F) -> Result<Pyramid>
    where
        F: Fn(f64, f64) -> f64 + Copy,
    {
        let levels = self
            .levels
            .iter()
            .zip(&other.levels)
            .map(|(a, b)| a.zip_with(b, f))
            .collect::<Result<Vec<_>>>()?;
        Ok(Pyramid {
            first: self.first,
            levels,
        })
    }
}

/// Smallest side length that still halves cleanly `levels - 1` times.
pub fn min_input_size(levels: usize) -> usize {
    1usize << levels.saturating_sub(1).min(usize::BITS as usize - 1)
}

/// Builds a `levels`-deep pyramid using a 5-tap binomial low-pass
/// (`[1 4 6 4 1] / 16` separably, edge clamped) followed by keeping the even
/// rows and columns.
pub fn build_pyramid(map: &GrayMap, levels: usize) -> Result<Pyramid> {
    if levels == 0 {
        return Err(Error::InvalidParams(
            "a pyramid needs at least one level".into(),
        ));
    }
    let min = min_input_size(levels);
    if map.width() < min || map.height() < min {
        return Err(Error::ImageTooSmall {
            width: map.width(),
            height: map.height(),
            levels,
            min,
        });
    }
    let mut out = Vec::with_capacity(levels);
    out.push(map.clone());
    for _ in 1..levels {
        let next = reduce(out.last().expect("non-empty"));
        out.push(next);
    }
    Ok(Pyramid::from_levels(out))
}

// Binomial [1 4 6 4 1]/16 written relative to the centre tap so a constant
// neighbourhood reproduces its value exactly.
#[inline]
fn binomial5(a: f64, b: f64, c: f64, d: f64, e: f64) -> f64 {
    c + ((a - c) + (e - c)) / 16.0 + ((b - c) + (d - c)) / 4.0
}

/// One pyramid step: binomial low-pass then 2x decimation.
pub fn reduce(map: &GrayMap) -> GrayMap {
    let (w, h) = map.dims();
    let (ow, oh) = (w.div_ceil(2), h.div_ceil(2));

    // Horizontal pass, evaluated only at the even columns we keep.
    let mut horiz = Vec::with_capacity(ow * h);
    for y in 0..h {
        let row = map.row(y);
        let at = |x: isize| row[x.clamp(0, w as isize - 1) as usize];
        for ox in 0..ow {
            let x = (2 * ox) as isize;
            horiz.push(binomial5(at(x - 2), at(x - 1), at(x), at(x + 1), at(x + 2)));
        }
    }

    let mut out = Vec::with_capacity(ow * oh);
    let at = |x: usize, y: isize| horiz[y.clamp(0, h as isize - 1) as usize * ow + x];
    for oy in 0..oh {
        let y = (2 * oy) as isize;
        for x in 0..ow {
            out.push(binomial5(
                at(x, y - 2),
                at(x, y - 1),
                at(x, y),
                at(x, y + 1),
                at(x, y + 2),
            ));
        }
    }
    GrayMap::from_raw(ow, oh, out)
}

/// Brings a map living at pyramid level `from` to the resolution of level
/// `to`. Coarser targets go through [`reduce`]; finer targets through
/// repeated bilinear doubling to each intermediate level's dimensions.
pub(crate) fn transfer<D>(map: &GrayMap, from: usize, to: usize, dims: D) -> GrayMap
where
    D: Fn(usize) -> (usize, usize),
{
    let mut cur = map.clone();
    if from < to {
        for _ in from..to {
            cur = reduce(&cur);
        }
    } else {
        for k in (to..from).rev() {
            let (w, h) = dims(k);
            cur = resize_bilinear(&cur, w, h).expect("pyramid dimensions are non-zero");
        }
    }
    cur
}

/// Center-surround difference `|center(c) - surround(s)|` with the surround
/// brought up to level `c` by repeated bilinear doubling.
pub fn center_surround(pyr: &Pyramid, c: usize, s: usize) -> Result<GrayMap> {
    if c >= s {
        return Err(Error::InvalidScalePair {
            center: c,
            surround: s,
        });
    }
    let center = pyr.level(c)?;
    let surround = pyr.level(s)?;
    // Every level between c and s exists because both ends do.
    let up = transfer(surround, s, c, |k| pyr.levels[k - pyr.first].dims());
    center.zip_with(&up, |a, b| (a - b).abs())
}
