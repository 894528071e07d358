//! HSV statistics over masked image regions.
//!
//! Hue is reported in half-degrees (`0..180`) and saturation/value in
//! `0..=255`, the 8-bit convention common to OpenCV, so green sits roughly
//! between 35 and 75. Values are kept fractional rather than rounded to `u8`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::Bitmask;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: u32,
    height: u32,
    pixels: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn new(width: u32, height: u32, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroDimension { width, height });
        }
        let n = width as usize * height as usize;
        if pixels.len() != n {
            return Err(Error::LengthMismatch(pixels.len(), n));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [u8; 3]) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [[u8; 3]] {
        &mut self.pixels
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HsvStats {
    pub mean_hue: f64,
    pub mean_saturation: f64,
    pub pixel_count: u64,
}

/// RGB to HSV. Returns `(h, s, v)` with `h` in `[0, 180)`, `s` and `v` in `[0, 255]`.
/// Achromatic pixels get hue 0.
pub fn rgb_to_hsv(r: u8, g: u8, b: u8) -> (f64, f64, f64) {
    let (rf, gf, bf) = (f64::from(r), f64::from(g), f64::from(b));
    let max = rf.max(gf).max(bf);
    let min = rf.min(gf).min(bf);
    let diff = max - min;
    let s = if max > 0.0 { 255.0 * diff / max } else { 0.0 };
    if diff == 0.0 {
        return (0.0, s, max);
    }
    let mut h = if max == rf {
        60.0 * (gf - bf) / diff
    } else if max == gf {
        120.0 + 60.0 * (bf - rf) / diff
    } else {
        240.0 + 60.0 * (rf - gf) / diff
    };
    if h < 0.0 {
        h += 360.0;
    }
    (h / 2.0, s, max)
}

/// Mean hue and saturation over the set pixels of `m`.
pub fn mask_hsv_stats(img: &RgbImage, m: &Bitmask) -> Result<HsvStats> {
    if img.dims() != m.dims() {
        return Err(Error::DimensionMismatch {
            expected: img.dims(),
            found: m.dims(),
        });
    }
    if m.is_empty() {
        return Err(Error::EmptyMask);
    }
    let (mut hue, mut sat) = (0.0, 0.0);
    for i in m.iter_ones() {
        let [r, g, b] = img.pixels[i];
        let (h, s, _) = rgb_to_hsv(r, g, b);
        hue += h;
        sat += s;
    }
    let n = m.area() as f64;
    Ok(HsvStats {
        mean_hue: hue / n,
        mean_saturation: sat / n,
        pixel_count: m.area(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Textbook HSV to RGB with hue in half-degrees.
    fn hsv_to_rgb(h: f64, s: f64, v: f64) -> (f64, f64, f64) {
        let hd = h * 2.0;
        let s = s / 255.0;
        let c = v * s;
        let hp = hd / 60.0;
        let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
        let (r, g, b) = match hp as u32 {
            0 => (c, x, 0.0),
            1 => (x, c, 0.0),
            2 => (0.0, c, x),
            3 => (0.0, x, c),
            4 => (x, 0.0, c),
            _ => (c, 0.0, x),
        };
        let m = v - c;
        (r + m, g + m, b + m)
    }

    #[test]
    fn primaries_and_grey() {
        assert_eq!(rgb_to_hsv(0, 255, 0), (60.0, 255.0, 255.0));
        assert_eq!(rgb_to_hsv(255, 0, 0), (0.0, 255.0, 255.0));
        assert_eq!(rgb_to_hsv(0, 0, 255), (120.0, 255.0, 255.0));
        assert_eq!(rgb_to_hsv(128, 128, 128), (0.0, 0.0, 128.0));
        assert_eq!(rgb_to_hsv(0, 0, 0), (0.0, 0.0, 0.0));
    }

    #[test]
    fn hue_stays_below_180() {
        // magenta-ish red just below wrap
        let (h, _, _) = rgb_to_hsv(255, 0, 1);
        assert!(h < 180.0 && h > 179.0);
    }

    #[test]
    fn round_trip_quantized_grid() {
        for r in (0..=255).step_by(16) {
            for g in (0..=255).step_by(16) {
                for b in (0..=255).step_by(16) {
                    let (h, s, v) = rgb_to_hsv(r as u8, g as u8, b as u8);
                    assert!((0.0..180.0).contains(&h));
                    let (rr, gg, bb) = hsv_to_rgb(h, s, v);
                    for (a, e) in [(rr, r), (gg, g), (bb, b)] {
                        assert!((a.round() - f64::from(e)).abs() <= 1.0, "{r},{g},{b}");
                    }
                }
            }
        }
    }

    #[test]
    fn stats_constant_and_split() {
        let img = RgbImage::from_fn(8, 8, |x, _| if x < 4 { [0, 255, 0] } else { [0, 0, 255] }).unwrap();
        let left = Bitmask::rect(8, 8, 0, 0, 4, 8).unwrap();
        let st = mask_hsv_stats(&img, &left).unwrap();
        assert_eq!((st.mean_hue, st.mean_saturation, st.pixel_count), (60.0, 255.0, 32));
        let all = Bitmask::full(8, 8).unwrap();
        let st = mask_hsv_stats(&img, &all).unwrap();
        assert_eq!(st.mean_hue, 90.0);
        assert_eq!(st.mean_saturation, 255.0);
    }

    #[test]
    fn stats_errors() {
        let img = RgbImage::from_fn(4, 4, |_, _| [1, 2, 3]).unwrap();
        let e = Bitmask::empty(4, 4).unwrap();
        assert!(matches!(mask_hsv_stats(&img, &e), Err(Error::EmptyMask)));
        let m = Bitmask::full(5, 4).unwrap();
        assert!(matches!(mask_hsv_stats(&img, &m), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn image_buffer_length_checked() {
        assert!(RgbImage::new(2, 2, vec![[0; 3]; 3]).is_err());
    }
}
