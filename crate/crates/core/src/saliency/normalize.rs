use crate::imagery::GrayMap;

/// Map normalisation that promotes maps with a single dominant peak and
/// suppresses maps with many comparable ones.
///
/// 1. Rescale linearly so the maximum becomes 255 (a zero map is returned
///    unchanged).
/// 2. Collect the strict local maxima over 3x3 neighbourhoods, leaving out
///    the global maximum (the first maximal pixel in row-major order).
/// 3. Multiply the rescaled map by `((255 - mean_of_other_maxima) / 255)^2`,
///    taking the mean as 0 when there are no other maxima.
pub fn normalize_map(map: &GrayMap) -> GrayMap {
    let max = map.max();
    if max <= 0.0 {
        return map.clone();
    }
    let scaled = map.map(|v| v / max * 255.0);
    let (gx, gy) = scaled.argmax();

    let others = local_maxima(&scaled)
        .into_iter()
        .filter(|&(x, y)| (x, y) != (gx, gy))
        .map(|(x, y)| scaled.get(x, y));
    let (sum, count) = others.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    let mean = if count == 0 { 0.0 } else { sum / count as f64 };

    let weight = ((255.0 - mean) / 255.0).powi(2);
    scaled.map(|v| v * weight)
}

/// Pixels strictly greater than every in-bounds 8-neighbour, row-major.
pub fn local_maxima(map: &GrayMap) -> Vec<(usize, usize)> {
    let (w, h) = map.dims();
    let mut peaks = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let v = map.get(x, y);
            let mut is_peak = true;
            'scan: for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
                for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                    if (nx, ny) != (x, y) && map.get(nx, ny) >= v {
                        is_peak = false;
                        break 'scan;
                    }
                }
            }
            if is_peak {
                peaks.push((x, y));
            }
        }
    }
    peaks
}

#[cfg(test)]
mod tests {
    use super::*;

    fn impulses(w: usize, h: usize, points: &[(usize, usize, f64)]) -> GrayMap {
        GrayMap::from_fn(w, h, |x, y| {
            points
                .iter()
                .find(|p| p.0 == x && p.1 == y)
                .map_or(0.0, |p| p.2)
        })
        .unwrap()
    }

    #[test]
    fn zero_map_passes_through() {
        let z = GrayMap::zeros(5, 5).unwrap();
        assert_eq!(normalize_map(&z), z);
    }

    #[test]
    fn single_impulse_is_only_rescaled() {
        let m = impulses(7, 7, &[(3, 2, 40.0)]);
        let n = normalize_map(&m);
        assert_eq!(n.get(3, 2), 255.0);
        assert_eq!(n.sum(), 255.0);
    }

    #[test]
    fn two_equal_impulses_cancel() {
        // The first in row-major order is the global maximum; the other is a
        // local maximum of 255, so the weight is zero.
        let m = impulses(8, 8, &[(1, 1, 255.0), (6, 5, 255.0)]);
        let n = normalize_map(&m);
        assert!(n.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn weaker_second_peak_partially_suppresses() {
        let m = impulses(8, 8, &[(1, 1, 100.0), (6, 5, 50.0)]);
        let n = normalize_map(&m);
        let w = ((255.0 - 127.5) / 255.0f64).powi(2);
        assert!((n.get(1, 1) - 255.0 * w).abs() < 1e-12);
        assert!((n.get(6, 5) - 127.5 * w).abs() < 1e-12);
    }

    #[test]
    fn plateaus_are_not_peaks() {
        let m = GrayMap::new(4, 1, vec![0.0, 5.0, 5.0, 0.0]).unwrap();
        assert!(local_maxima(&m).is_empty());
        let m = GrayMap::new(3, 1, vec![1.0, 0.0, 2.0]).unwrap();
        assert_eq!(local_maxima(&m), vec![(0, 0), (2, 0)]);
    }
}
