//! Synthetic scenes and helpers shared by the CLI and acceptance tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Output;

use hudsal::{Region, RgbImage};

pub const WHITE: [u8; 3] = [255, 255, 255];
pub const RED: [u8; 3] = [255, 0, 0];
pub const GREEN: [u8; 3] = [0, 255, 0];
pub const BLUE: [u8; 3] = [0, 0, 255];
pub const SWEEP_COLORS: [[u8; 3]; 4] = [WHITE, RED, GREEN, BLUE];

/// HUD area used by the street scenes.
pub const STREET_REGION: Region = Region {
    x: 128,
    y: 64,
    w: 256,
    h: 256,
};

/// Daytime street: sky, building blocks with windows, grey road with lane
/// markings, and a saturated red disk covering `disk_frac` of `region`.
pub fn street_scene(w: usize, h: usize, region: Region, disk_frac: f64) -> RgbImage {
    let horizon = h * 3 / 8;
    let near = h * 3 / 4;
    let mid = (w / 2) as i64;
    let r = (disk_frac * f64::from(region.w) * f64::from(region.h) / std::f64::consts::PI).sqrt();
    let cx = f64::from(region.x) + f64::from(region.w) / 2.0;
    let cy = f64::from(region.y) + f64::from(region.h) / 2.0;
    RgbImage::from_fn(w, h, |x, y| {
        let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
        if (px - cx).powi(2) + (py - cy).powi(2) <= r * r {
            return RED;
        }
        let dx = x as i64 - mid;
        let dy = y as i64 - near as i64;
        if y < horizon {
            if x % 96 < 70 && y > horizon / 4 {
                if (x / 12 + y / 16) % 2 == 0 && y % 16 > 5 {
                    [230, 230, 210]
                } else {
                    [70, 60, 55]
                }
            } else {
                [150, 180, 220]
            }
        } else if y > near && dx.abs() < 8 && (y / 20) % 2 == 0 {
            [245, 245, 245]
        } else if y > near && ((dx - 3 * dy).abs() < 6 || (dx + 3 * dy).abs() < 6) {
            [240, 240, 240]
        } else {
            [75, 75, 80]
        }
    })
    .unwrap()
}

/// Navigation glyph (chevron over two bars) centred in a 256x256 mask.
pub fn glyph_mask(thickness: i64) -> RgbImage {
    let t = thickness;
    RgbImage::from_fn(256, 256, |x, y| {
        let (dx, dy) = (x as i64 - 128, y as i64 - 128);
        let chevron = (-48..-8).contains(&dy) && dx.abs() < dy + 48;
        let bar1 = (4..4 + t).contains(&dy) && dx.abs() < 44;
        let bar2 = (24 + t / 2..24 + t + t / 2).contains(&dy) && dx.abs() < 44;
        if chevron || bar1 || bar2 {
            WHITE
        } else {
            [0; 3]
        }
    })
    .unwrap()
}

/// Mid-grey backdrop, optionally strewn with high-contrast patches that stay
/// clear of the glyph footprint inside `region`.
pub fn clutter_scene(w: usize, h: usize, region: Region, cluttered: bool) -> RgbImage {
    let glyph = glyph_mask(16);
    let in_glyph = |x: usize, y: usize| {
        if !region.contains(x, y) {
            return false;
        }
        let (gx, gy) = (x - region.x as usize, y - region.y as usize);
        // Keep a margin around the glyph.
        (-10i64..=10).step_by(5).any(|oy| {
            (-10i64..=10).step_by(5).any(|ox| {
                let (sx, sy) = (gx as i64 + ox, gy as i64 + oy);
                (0..256).contains(&sx)
                    && (0..256).contains(&sy)
                    && glyph.get(sx as usize, sy as usize) != [0; 3]
            })
        })
    };
    let palette = [
        [255, 255, 255],
        [0, 0, 0],
        [255, 220, 0],
        [0, 200, 255],
        [255, 0, 255],
    ];
    RgbImage::from_fn(w, h, |x, y| {
        if cluttered && !in_glyph(x, y) {
            let (cx, cy) = (x / 24, y / 24);
            let hash = (cx * 7 + cy * 13 + cx * cy) % 5;
            let inset = (x % 24) >= 4 && (y % 24) >= 4;
            if inset && (cx + cy) % 2 == 0 {
                return palette[hash];
            }
        }
        [110, 110, 110]
    })
    .unwrap()
}

pub fn write_png(path: &Path, img: &RgbImage) {
    hudsal::save_rgb_png(img, path).unwrap();
}

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_hudsal"))
}

pub fn hudsal(args: &[&str]) -> Output {
    std::process::Command::new(bin())
        .args(args)
        .env_remove("HUDSAL_JOBS")
        .output()
        .expect("spawn hudsal")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn sha256_file(path: &Path) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(std::fs::read(path).unwrap()))
}
