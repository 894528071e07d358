//! Fixtures shared by the criterion benches.

use leafsieve_core::mask::MaskBuilder;
use leafsieve_core::Bitmask;

/// Filled ellipse centred on a `w` x `h` canvas with semi-axes `a`, `b`.
pub fn ellipse(w: u32, h: u32, a: f64, b: f64) -> Bitmask {
    let (cx, cy) = (f64::from(w) / 2.0, f64::from(h) / 2.0);
    let mut m = MaskBuilder::new(w, h).expect("non-zero canvas");
    for y in 0..h {
        let v = (f64::from(y) + 0.5 - cy) / b;
        if v.abs() > 1.0 {
            continue;
        }
        let half = a * (1.0 - v * v).sqrt();
        let x0 = (cx - half - 0.5).ceil().max(0.0) as u32;
        let x1 = ((cx + half - 0.5).floor() + 1.0).max(0.0) as u32;
        m.fill_span(y, x0, x1);
    }
    m.build()
}

/// A row of `n` ellipses across a wide canvas, plus their union.
pub fn leaf_row(n: u32, leaf: u32) -> (Vec<Bitmask>, Bitmask) {
    let w = leaf * n;
    let h = leaf;
    let base = ellipse(leaf, leaf, f64::from(leaf) * 0.45, f64::from(leaf) * 0.3);
    let masks: Vec<Bitmask> = (0..n)
        .map(|i| {
            let mut b = MaskBuilder::new(w, h).unwrap();
            for (x, y) in base.iter_pixels() {
                b.set(x + i * leaf, y);
            }
            b.build()
        })
        .collect();
    let union = leafsieve_core::mask::union_all(&masks).unwrap();
    (masks, union)
}
