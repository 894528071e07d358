use serde::{Deserialize, Serialize};

use super::{Bitmask, MaskBuilder};
use crate::error::{Error, Result};

/// Closed polygon in pixel coordinates. The last vertex connects back to the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    pub points: Vec<(f64, f64)>,
}

impl Polygon {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::TooFewVertices(points.len()));
        }
        Ok(Self { points })
    }

    fn edges(&self) -> impl Iterator<Item = ((f64, f64), (f64, f64))> + '_ {
        let n = self.points.len();
        (0..n).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }
}

/// Even-odd scanline fill. A pixel is set iff its center `(x + 0.5, y + 0.5)`
/// lies inside the polygon; geometry outside the canvas is clipped.
pub fn rasterize(poly: &Polygon, width: u32, height: u32) -> Result<Bitmask> {
    if poly.points.len() < 3 {
        return Err(Error::TooFewVertices(poly.points.len()));
    }
    let mut b = MaskBuilder::new(width, height)?;
    let (ymin, ymax) = poly
        .points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.1), hi.max(p.1))
        });
    if !ymin.is_finite() || !ymax.is_finite() {
        return Ok(b.build());
    }
    let row_lo = (ymin - 0.5).floor().max(0.0) as u32;
    let row_hi = ((ymax - 0.5).ceil() + 1.0).clamp(0.0, f64::from(height)) as u32;

    let mut xs = Vec::new();
    for y in row_lo..row_hi {
        let cy = f64::from(y) + 0.5;
        xs.clear();
        for ((xi, yi), (xj, yj)) in poly.edges() {
            if (yi > cy) != (yj > cy) {
                xs.push((xj - xi) * (cy - yi) / (yj - yi) + xi);
            }
        }
        xs.sort_by(f64::total_cmp);
        // center cx is inside iff xs[2k] <= cx < xs[2k + 1]
        for pair in xs.chunks_exact(2) {
            let start = first_center_at_or_after(pair[0], width);
            let end = first_center_at_or_after(pair[1], width);
            b.fill_span(y, start, end);
        }
    }
    Ok(b.build())
}

/// Smallest column `x` in `0..=width` with `x + 0.5 >= bound`.
fn first_center_at_or_after(bound: f64, width: u32) -> u32 {
    if bound <= 0.5 {
        return 0;
    }
    let w = f64::from(width);
    if bound > w - 0.5 {
        return width;
    }
    let mut x = (bound - 0.5).ceil();
    while x > 0.0 && (x - 1.0) + 0.5 >= bound {
        x -= 1.0;
    }
    while x + 0.5 < bound {
        x += 1.0;
    }
    x as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent crossing-number test on a single point.
    fn inside(points: &[(f64, f64)], px: f64, py: f64) -> bool {
        let mut c = false;
        let n = points.len();
        let mut j = n - 1;
        for i in 0..n {
            let (xi, yi) = points[i];
            let (xj, yj) = points[j];
            if (yi > py) != (yj > py) && px < (xj - xi) * (py - yi) / (yj - yi) + xi {
                c = !c;
            }
            j = i;
        }
        c
    }

    fn oracle_count(points: &[(f64, f64)], w: u32, h: u32) -> u64 {
        let mut n = 0;
        for y in 0..h {
            for x in 0..w {
                if inside(points, f64::from(x) + 0.5, f64::from(y) + 0.5) {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn rectangle() {
        let pts = vec![(0.0, 0.0), (4.0, 0.0), (4.0, 5.0), (0.0, 5.0)];
        assert_eq!(oracle_count(&pts, 10, 10), 20);
        let m = rasterize(&Polygon::new(pts).unwrap(), 10, 10).unwrap();
        assert_eq!(m.area(), 20);
        assert_eq!(m, Bitmask::rect(10, 10, 0, 0, 4, 5).unwrap());
    }

    #[test]
    fn degenerate_triangle_is_empty() {
        let pts = vec![(0.0, 0.0), (5.0, 5.0), (10.0, 10.0)];
        assert_eq!(rasterize(&Polygon::new(pts).unwrap(), 12, 12).unwrap().area(), 0);
    }

    #[test]
    fn right_triangle_matches_oracle() {
        let pts = vec![(0.0, 0.0), (8.0, 0.0), (0.0, 8.0)];
        let m = rasterize(&Polygon::new(pts.clone()).unwrap(), 10, 10).unwrap();
        let oracle = oracle_count(&pts, 10, 10);
        assert_eq!(m.area(), oracle);
        for y in 0..10 {
            for x in 0..10 {
                assert_eq!(m.get(x, y), inside(&pts, f64::from(x) + 0.5, f64::from(y) + 0.5));
            }
        }
    }

    #[test]
    fn clips_outside_canvas() {
        let pts = vec![(-5.0, -5.0), (15.5, -2.0), (12.0, 14.0), (-3.0, 11.0)];
        let m = rasterize(&Polygon::new(pts.clone()).unwrap(), 10, 10).unwrap();
        assert_eq!(m.area(), oracle_count(&pts, 10, 10));
        assert_eq!(m.area(), 100);
    }

    #[test]
    fn too_few_vertices() {
        assert!(matches!(
            Polygon::new(vec![(0.0, 0.0), (1.0, 1.0)]),
            Err(Error::TooFewVertices(2))
        ));
        let p = Polygon {
            points: vec![(0.0, 0.0)],
        };
        assert!(matches!(rasterize(&p, 4, 4), Err(Error::TooFewVertices(1))));
    }

    #[test]
    fn fractional_self_intersecting_bowtie() {
        let pts = vec![(1.3, 1.1), (18.7, 17.2), (18.2, 1.9), (0.9, 16.4)];
        let m = rasterize(&Polygon::new(pts.clone()).unwrap(), 20, 20).unwrap();
        for y in 0..20 {
            for x in 0..20 {
                assert_eq!(
                    m.get(x, y),
                    inside(&pts, f64::from(x) + 0.5, f64::from(y) + 0.5),
                    "({x},{y})"
                );
            }
        }
    }
}
