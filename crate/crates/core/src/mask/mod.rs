//! Dense binary masks and the set algebra the filters and metrics are built on.
//!
//! A [`Bitmask`] stores one bit per pixel in row-major order, packed into
//! `u64` words with the flat index `y * width + x`. Bits past `width * height`
//! in the final word are always zero, so popcounts over whole words are exact.
//! Masks are immutable once built; use [`MaskBuilder`] to construct them.

mod coverage;
mod raster;
mod rle;

pub use coverage::{coverage_map, mean_coverage, CoverageMap};
pub use raster::{rasterize, Polygon};
pub use rle::{decode_rle, encode_rle, RleMask};

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

/// Axis-aligned pixel bounding box, `x0..x1` by `y0..y1` (exclusive ends).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundingBox {
    pub x0: u32,
    pub y0: u32,
    pub x1: u32,
    pub y1: u32,
}

impl BoundingBox {
    pub fn width(&self) -> u32 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> u32 {
        self.y1 - self.y0
    }
}

/// Binary instance mask.
#[derive(Clone, PartialEq, Eq)]
pub struct Bitmask {
    width: u32,
    height: u32,
    words: Vec<u64>,
    area: u64,
    /// First and last row containing a set pixel.
    rows: Option<(u32, u32)>,
}

impl std::fmt::Debug for Bitmask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Bitmask")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("area", &self.area)
            .field("rows", &self.rows)
            .finish()
    }
}

fn check_dims(width: u32, height: u32) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::ZeroDimension { width, height });
    }
    Ok(())
}

fn word_count(width: u32, height: u32) -> usize {
    (width as usize * height as usize).div_ceil(WORD_BITS)
}

/// Mutable staging area for a [`Bitmask`].
#[derive(Debug, Clone)]
pub struct MaskBuilder {
    width: u32,
    height: u32,
    words: Vec<u64>,
}

impl MaskBuilder {
    pub fn new(width: u32, height: u32) -> Result<Self> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            words: vec![0; word_count(width, height)],
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Sets pixel `(x, y)`. Out-of-canvas coordinates are ignored.
    pub fn set(&mut self, x: u32, y: u32) {
        if x < self.width && y < self.height {
            let i = y as usize * self.width as usize + x as usize;
            self.words[i / WORD_BITS] |= 1u64 << (i % WORD_BITS);
        }
    }

    pub fn clear(&mut self, x: u32, y: u32) {
        if x < self.width && y < self.height {
            let i = y as usize * self.width as usize + x as usize;
            self.words[i / WORD_BITS] &= !(1u64 << (i % WORD_BITS));
        }
    }

    /// Sets pixels `x0..x1` of row `y`, clipped to the canvas.
    pub fn fill_span(&mut self, y: u32, x0: u32, x1: u32) {
        if y >= self.height {
            return;
        }
        let x1 = x1.min(self.width);
        if x0 >= x1 {
            return;
        }
        let base = y as usize * self.width as usize;
        set_range(&mut self.words, base + x0 as usize, base + x1 as usize);
    }

    /// ORs another mask of the same size into this builder.
    pub fn or_assign(&mut self, other: &Bitmask) -> Result<()> {
        if (self.width, self.height) != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: (self.width, self.height),
                found: other.dims(),
            });
        }
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
        Ok(())
    }

    pub fn build(self) -> Bitmask {
        Bitmask::from_words(self.width, self.height, self.words)
    }
}

/// Sets bits `start..end` of a flat word array.
fn set_range(words: &mut [u64], start: usize, end: usize) {
    if start >= end {
        return;
    }
    let (sw, sb) = (start / WORD_BITS, start % WORD_BITS);
    let (ew, eb) = (end / WORD_BITS, end % WORD_BITS);
    if sw == ew {
        words[sw] |= (!0u64 << sb) & ((1u64 << eb) - 1);
        return;
    }
    words[sw] |= !0u64 << sb;
    for w in &mut words[sw + 1..ew] {
        *w = !0;
    }
    if eb > 0 {
        words[ew] |= (1u64 << eb) - 1;
    }
}

impl Bitmask {
    fn from_words(width: u32, height: u32, mut words: Vec<u64>) -> Self {
        let n = width as usize * height as usize;
        if !n.is_multiple_of(WORD_BITS) {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (n % WORD_BITS)) - 1;
            }
        }
        let area = words.iter().map(|w| u64::from(w.count_ones())).sum();
        let rows = if area == 0 {
            None
        } else {
            let first = words.iter().position(|&w| w != 0).unwrap();
            let last = words.iter().rposition(|&w| w != 0).unwrap();
            let lo = first * WORD_BITS + words[first].trailing_zeros() as usize;
            let hi = last * WORD_BITS + (WORD_BITS - 1 - words[last].leading_zeros() as usize);
            Some(((lo / width as usize) as u32, (hi / width as usize) as u32))
        };
        Self {
            width,
            height,
            words,
            area,
            rows,
        }
    }

    /// An all-zero mask.
    pub fn empty(width: u32, height: u32) -> Result<Self> {
        Ok(MaskBuilder::new(width, height)?.build())
    }

    /// An all-one mask.
    pub fn full(width: u32, height: u32) -> Result<Self> {
        Self::from_fn(width, height, |_, _| true)
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Result<Self> {
        let mut b = MaskBuilder::new(width, height)?;
        for y in 0..height {
            for x in 0..width {
                if f(x, y) {
                    b.set(x, y);
                }
            }
        }
        Ok(b.build())
    }

    /// Builds a mask from a row-major boolean slice.
    pub fn from_bools(width: u32, height: u32, bits: &[bool]) -> Result<Self> {
        check_dims(width, height)?;
        let n = width as usize * height as usize;
        if bits.len() != n {
            return Err(Error::LengthMismatch(bits.len(), n));
        }
        let mut words = vec![0u64; word_count(width, height)];
        for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
            words[i / WORD_BITS] |= 1u64 << (i % WORD_BITS);
        }
        Ok(Self::from_words(width, height, words))
    }

    /// Axis-aligned filled rectangle `x0..x1` by `y0..y1`, clipped to the canvas.
    pub fn rect(width: u32, height: u32, x0: u32, y0: u32, x1: u32, y1: u32) -> Result<Self> {
        let mut b = MaskBuilder::new(width, height)?;
        for y in y0..y1.min(height) {
            b.fill_span(y, x0, x1);
        }
        Ok(b.build())
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

    /// Number of set pixels. Cached at construction.
    pub fn area(&self) -> u64 {
        self.area
    }

    pub fn is_empty(&self) -> bool {
        self.area == 0
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        if x >= self.width || y >= self.height {
            return false;
        }
        let i = y as usize * self.width as usize + x as usize;
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    /// Flat row-major indices of set pixels, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD_BITS + b)
            })
        })
    }

    /// `(x, y)` coordinates of set pixels in row-major order.
    pub fn iter_pixels(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width as usize;
        self.iter_ones().map(move |i| ((i % w) as u32, (i / w) as u32))
    }

    /// Tight bounding box of the set pixels, `None` for an empty mask.
    pub fn bounding_box(&self) -> Option<BoundingBox> {
        let (y0, y1) = self.rows?;
        let mut x0 = u32::MAX;
        let mut x1 = 0;
        for y in y0..=y1 {
            if let Some((a, b)) = self.row_extent(y) {
                x0 = x0.min(a);
                x1 = x1.max(b + 1);
            }
        }
        Some(BoundingBox { x0, y0, x1, y1: y1 + 1 })
    }

    /// First and last set column of row `y`.
    pub(crate) fn row_extent(&self, y: u32) -> Option<(u32, u32)> {
        let start = y as usize * self.width as usize;
        let end = start + self.width as usize;
        let first = self.next_one(start).filter(|&i| i < end)?;
        let mut last = first;
        let mut i = first;
        while i < end {
            let z = self.next_zero(i).min(end);
            last = z - 1;
            match self.next_one(z) {
                Some(n) if n < end => i = n,
                _ => break,
            }
        }
        Some(((first - start) as u32, (last - start) as u32))
    }

    fn len(&self) -> usize {
        self.width as usize * self.height as usize
    }

    /// Smallest set index `>= from`.
    pub(crate) fn next_one(&self, from: usize) -> Option<usize> {
        if from >= self.len() {
            return None;
        }
        let mut wi = from / WORD_BITS;
        let mut w = self.words[wi] & (!0u64 << (from % WORD_BITS));
        loop {
            if w != 0 {
                return Some(wi * WORD_BITS + w.trailing_zeros() as usize);
            }
            wi += 1;
            if wi >= self.words.len() {
                return None;
            }
            w = self.words[wi];
        }
    }

    /// Smallest unset index `>= from`, or the pixel count if none.
    pub(crate) fn next_zero(&self, from: usize) -> usize {
        let n = self.len();
        if from >= n {
            return n;
        }
        let mut wi = from / WORD_BITS;
        let mut w = !self.words[wi] & (!0u64 << (from % WORD_BITS));
        loop {
            if w != 0 {
                return (wi * WORD_BITS + w.trailing_zeros() as usize).min(n);
            }
            wi += 1;
            if wi >= self.words.len() {
                return n;
            }
            w = !self.words[wi];
        }
    }

    fn check_same_dims(&self, other: &Bitmask) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                found: other.dims(),
            });
        }
        Ok(())
    }

    /// Word range covering the rows where both masks may have set pixels.
    fn overlap_words(&self, other: &Bitmask) -> Option<std::ops::Range<usize>> {
        let (a0, a1) = self.rows?;
        let (b0, b1) = other.rows?;
        let (y0, y1) = (a0.max(b0), a1.min(b1));
        if y0 > y1 {
            return None;
        }
        let w = self.width as usize;
        let start = y0 as usize * w / WORD_BITS;
        let end = ((y1 as usize + 1) * w).div_ceil(WORD_BITS);
        Some(start..end)
    }

    /// `|self ∩ other|`.
    pub fn intersection_area(&self, other: &Bitmask) -> Result<u64> {
        self.check_same_dims(other)?;
        let Some(range) = self.overlap_words(other) else {
            return Ok(0);
        };
        Ok(self.words[range.clone()]
            .iter()
            .zip(&other.words[range])
            .map(|(a, b)| u64::from((a & b).count_ones()))
            .sum())
    }

    /// `|self ∪ other|`.
    pub fn union_area(&self, other: &Bitmask) -> Result<u64> {
        Ok(self.area + other.area - self.intersection_area(other)?)
    }

    pub fn and(&self, other: &Bitmask) -> Result<Bitmask> {
        self.check_same_dims(other)?;
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        Ok(Self::from_words(self.width, self.height, words))
    }

    pub fn or(&self, other: &Bitmask) -> Result<Bitmask> {
        self.check_same_dims(other)?;
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect();
        Ok(Self::from_words(self.width, self.height, words))
    }

    /// `self \ other`.
    pub fn and_not(&self, other: &Bitmask) -> Result<Bitmask> {
        self.check_same_dims(other)?;
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect();
        Ok(Self::from_words(self.width, self.height, words))
    }

    /// Translates the mask by `(dx, dy)`; pixels leaving the canvas are dropped.
    pub fn shifted(&self, dx: i64, dy: i64) -> Bitmask {
        let mut b = MaskBuilder {
            width: self.width,
            height: self.height,
            words: vec![0; self.words.len()],
        };
        for (x, y) in self.iter_pixels() {
            let (nx, ny) = (i64::from(x) + dx, i64::from(y) + dy);
            if nx >= 0 && ny >= 0 && nx < i64::from(self.width) && ny < i64::from(self.height) {
                b.set(nx as u32, ny as u32);
            }
        }
        b.build()
    }
}

/// Intersection over union. Two empty masks have IoU 0.
pub fn iou(a: &Bitmask, b: &Bitmask) -> Result<f64> {
    let inter = a.intersection_area(b)?;
    let union = a.area() + b.area() - inter;
    if union == 0 {
        return Ok(0.0);
    }
    Ok(inter as f64 / union as f64)
}

/// Fraction of `inner`'s pixels that also lie in `outer`.
pub fn containment_fraction(inner: &Bitmask, outer: &Bitmask) -> Result<f64> {
    let inter = inner.intersection_area(outer)?;
    if inner.is_empty() {
        return Err(Error::EmptyMask);
    }
    Ok(inter as f64 / inner.area() as f64)
}

/// Pixelwise OR of every mask.
pub fn union_all<'a, I>(masks: I) -> Result<Bitmask>
where
    I: IntoIterator<Item = &'a Bitmask>,
{
    let mut iter = masks.into_iter();
    let first = iter.next().ok_or(Error::EmptyList)?;
    let mut b = MaskBuilder {
        width: first.width,
        height: first.height,
        words: first.words.clone(),
    };
    for m in iter {
        b.or_assign(m)?;
    }
    Ok(b.build())
}

pub fn area(m: &Bitmask) -> u64 {
    m.area()
}
