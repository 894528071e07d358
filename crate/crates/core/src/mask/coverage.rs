use super::Bitmask;
use crate::error::{Error, Result};

/// Per-pixel count of how many masks cover each pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageMap {
    width: u32,
    height: u32,
    counts: Vec<u32>,
}

impl CoverageMap {
    pub fn zeros(width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroDimension { width, height });
        }
        Ok(Self {
            width,
            height,
            counts: vec![0; width as usize * height as usize],
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, x: u32, y: u32) -> u32 {
        self.counts[y as usize * self.width as usize + x as usize]
    }

    /// Row-major counts.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn add(&mut self, m: &Bitmask) -> Result<()> {
        self.check(m)?;
        for i in m.iter_ones() {
            self.counts[i] += 1;
        }
        Ok(())
    }

    fn check(&self, m: &Bitmask) -> Result<()> {
        if m.dims() != (self.width, self.height) {
            return Err(Error::DimensionMismatch {
                expected: (self.width, self.height),
                found: m.dims(),
            });
        }
        Ok(())
    }

    /// Number of pixels of `m` covered by at least `k` masks.
    pub fn count_at_least(&self, m: &Bitmask, k: u32) -> Result<u64> {
        self.check(m)?;
        Ok(m.iter_ones().filter(|&i| self.counts[i] >= k).count() as u64)
    }
}

/// Builds the coverage map of `masks` on a `width` x `height` canvas.
pub fn coverage_map<'a, I>(width: u32, height: u32, masks: I) -> Result<CoverageMap>
where
    I: IntoIterator<Item = &'a Bitmask>,
{
    let mut cov = CoverageMap::zeros(width, height)?;
    for m in masks {
        cov.add(m)?;
    }
    Ok(cov)
}

/// Mean coverage count over the set pixels of `m`.
pub fn mean_coverage(m: &Bitmask, cov: &CoverageMap) -> Result<f64> {
    cov.check(m)?;
    if m.is_empty() {
        return Err(Error::EmptyMask);
    }
    let sum: u64 = m.iter_ones().map(|i| u64::from(cov.counts[i])).sum();
    Ok(sum as f64 / m.area() as f64)
}
