//! Minimum enclosing circle and the circle-area shape ratio.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::Bitmask;

/// Fixed shuffle seed; keeps filter decisions reproducible across runs.
const SHUFFLE_SEED: u64 = 0x1eaf_5eed;

/// Radius floor applied in [`shape_ratio`].
pub const MIN_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn contains(&self, p: Point) -> bool {
        self.center.dist(p) <= self.radius * (1.0 + 1e-12) + 1e-12
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }

    fn from_one(a: Point) -> Self {
        Self { center: a, radius: 0.0 }
    }

    fn from_two(a: Point, b: Point) -> Self {
        let center = Point::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0);
        Self {
            center,
            radius: center.dist(a).max(center.dist(b)),
        }
    }

    fn from_three(a: Point, b: Point, c: Point) -> Self {
        let (bx, by) = (b.x - a.x, b.y - a.y);
        let (cx, cy) = (c.x - a.x, c.y - a.y);
        let d = 2.0 * (bx * cy - by * cx);
        let scale = (bx * bx + by * by).max(cx * cx + cy * cy);
        if d.abs() <= 1e-12 * scale {
            // collinear: the widest pair spans the others
            return [Self::from_two(a, b), Self::from_two(a, c), Self::from_two(b, c)]
                .into_iter()
                .max_by(|p, q| p.radius.total_cmp(&q.radius))
                .unwrap();
        }
        let b2 = bx * bx + by * by;
        let c2 = cx * cx + cy * cy;
        let ux = (cy * b2 - by * c2) / d;
        let uy = (bx * c2 - cx * b2) / d;
        let center = Point::new(a.x + ux, a.y + uy);
        let radius = center.dist(a).max(center.dist(b)).max(center.dist(c));
        Self { center, radius }
    }
}

/// Smallest circle containing every point (Welzl, iterative form).
///
/// Input order is randomized with a fixed-seed generator local to the call,
/// so the result is deterministic and independent of how the caller ordered
/// the points.
pub fn min_enclosing_circle(points: &[Point]) -> Result<Circle> {
    if points.is_empty() {
        return Err(Error::EmptyList);
    }
    let mut pts = points.to_vec();
    // canonical order first so the shuffle does not depend on input order
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(SHUFFLE_SEED);
    pts.shuffle(&mut rng);

    let mut c = Circle::from_one(pts[0]);
    for i in 1..pts.len() {
        if c.contains(pts[i]) {
            continue;
        }
        c = Circle::from_one(pts[i]);
        for j in 0..i {
            if c.contains(pts[j]) {
                continue;
            }
            c = Circle::from_two(pts[i], pts[j]);
            for k in 0..j {
                if !c.contains(pts[k]) {
                    c = Circle::from_three(pts[i], pts[j], pts[k]);
                }
            }
        }
    }
    Ok(c)
}

/// Centers of set pixels with at least one unset 4-neighbor; the canvas
/// border counts as unset.
pub fn boundary_points(m: &Bitmask) -> Result<Vec<Point>> {
    if m.is_empty() {
        return Err(Error::EmptyMask);
    }
    let (w, h) = m.dims();
    Ok(m.iter_pixels()
        .filter(|&(x, y)| {
            x == 0
                || y == 0
                || x + 1 == w
                || y + 1 == h
                || !m.get(x - 1, y)
                || !m.get(x + 1, y)
                || !m.get(x, y - 1)
                || !m.get(x, y + 1)
        })
        .map(|(x, y)| Point::new(f64::from(x) + 0.5, f64::from(y) + 0.5))
        .collect())
}

/// Enclosing circle of a mask's pixel centers.
pub fn mask_enclosing_circle(m: &Bitmask) -> Result<Circle> {
    min_enclosing_circle(&boundary_points(m)?)
}

/// Mask area over the area of its minimum enclosing circle, radius floored at
/// [`MIN_RADIUS`]. Not clamped; tiny compact masks can exceed 1.
pub fn shape_ratio(m: &Bitmask) -> Result<f64> {
    let r = mask_enclosing_circle(m)?.radius.max(MIN_RADIUS);
    Ok(m.area() as f64 / (std::f64::consts::PI * r * r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_and_pair() {
        let c = min_enclosing_circle(&[Point::new(3.0, 4.0)]).unwrap();
        assert_eq!(c.radius, 0.0);
        assert_eq!(c.center, Point::new(3.0, 4.0));

        let c = min_enclosing_circle(&[Point::new(0.0, 0.0), Point::new(4.0, 2.0)]).unwrap();
        assert_eq!(c.center, Point::new(2.0, 1.0));
        assert!((c.radius - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn right_triangle() {
        let pts = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        let c = min_enclosing_circle(&pts).unwrap();
        assert!((c.center.x - 0.5).abs() < 1e-12 && (c.center.y - 0.5).abs() < 1e-12);
        assert!((c.radius - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn collinear_points() {
        let pts: Vec<_> = (0..10).map(|i| Point::new(f64::from(i), 2.0 * f64::from(i))).collect();
        let c = min_enclosing_circle(&pts).unwrap();
        assert!((c.radius - Point::new(0.0, 0.0).dist(Point::new(9.0, 18.0)) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn empty_input() {
        assert!(matches!(min_enclosing_circle(&[]), Err(Error::EmptyList)));
        let e = Bitmask::empty(4, 4).unwrap();
        assert!(matches!(boundary_points(&e), Err(Error::EmptyMask)));
        assert!(matches!(shape_ratio(&e), Err(Error::EmptyMask)));
    }

    #[test]
    fn boundary_of_block() {
        let m = Bitmask::rect(10, 10, 2, 2, 5, 5).unwrap();
        let b = boundary_points(&m).unwrap();
        assert_eq!(b.len(), 8);
        assert!(!b.contains(&Point::new(3.5, 3.5)));
        let one = Bitmask::rect(10, 10, 4, 7, 5, 8).unwrap();
        assert_eq!(boundary_points(&one).unwrap(), vec![Point::new(4.5, 7.5)]);
    }

    #[test]
    fn single_pixel_ratio_uses_radius_floor() {
        let m = Bitmask::rect(5, 5, 2, 2, 3, 3).unwrap();
        let r = shape_ratio(&m).unwrap();
        assert!((r - 1.0 / (std::f64::consts::PI * 0.25)).abs() < 1e-12);
    }

    #[test]
    fn line_ratio() {
        let m = Bitmask::rect(120, 5, 10, 2, 110, 3).unwrap();
        let r = shape_ratio(&m).unwrap();
        let oracle = 100.0 / (std::f64::consts::PI * 49.5 * 49.5);
        assert!((r - oracle).abs() < 1e-12);
        assert!(r < 0.1);
    }
}
