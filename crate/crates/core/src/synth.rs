//! Seeded synthetic plant scenes with known ground truth.
//!
//! A scene is a grey tray with a brown soil disk, green elliptical leaves and
//! the kinds of extra masks an automatic segmenter produces: tray and soil
//! regions, background clutter, a whole-plant mask, multi-leaf containers,
//! thin stem slivers and partial leaf segments. Every candidate carries a
//! [`Role`] so tests can predict which stage should remove it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::color::RgbImage;
use crate::error::Result;
use crate::filter::{CandidateMask, Stage};
use crate::mask::{Bitmask, MaskBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Leaf,
    /// A real leaf that the filters are expected to lose (e.g. senescent colour).
    EdgeLeaf,
    Tray,
    Soil,
    Clutter,
    WholePlant,
    Container,
    Sliver,
    Partial,
}

impl Role {
    /// The stage expected to remove a candidate of this role under default settings.
    pub fn expected_stage(self) -> Option<Stage> {
        match self {
            Role::Leaf | Role::Partial => None,
            Role::EdgeLeaf | Role::Tray | Role::Soil | Role::Clutter => Some(Stage::Green),
            Role::WholePlant => Some(Stage::NotAll),
            Role::Sliver => Some(Stage::CorrectShape),
            Role::Container => Some(Stage::MultiLeaf),
        }
    }

    pub fn is_leaf(self) -> bool {
        matches!(self, Role::Leaf | Role::EdgeLeaf)
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticScene {
    pub image: RgbImage,
    pub candidates: Vec<CandidateMask>,
    pub roles: Vec<Role>,
    /// One mask per leaf, in candidate order.
    pub ground_truth: Vec<Bitmask>,
}

impl SyntheticScene {
    pub fn role_of(&self, id: &str) -> Option<Role> {
        self.candidates.iter().position(|c| c.id() == id).map(|i| self.roles[i])
    }

    pub fn edge_leaf_count(&self) -> usize {
        self.roles.iter().filter(|r| **r == Role::EdgeLeaf).count()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Ellipse {
    pub cx: f64,
    pub cy: f64,
    pub a: f64,
    pub b: f64,
    pub angle: f64,
}

impl Ellipse {
    fn contains(&self, x: f64, y: f64) -> bool {
        let (s, c) = self.angle.sin_cos();
        let (dx, dy) = (x - self.cx, y - self.cy);
        let u = (dx * c + dy * s) / self.a;
        let v = (-dx * s + dy * c) / self.b;
        u * u + v * v <= 1.0
    }

    pub fn mask(&self, w: u32, h: u32) -> Result<Bitmask> {
        let mut b = MaskBuilder::new(w, h)?;
        let r = self.a.max(self.b);
        let x0 = (self.cx - r).floor().max(0.0) as u32;
        let y0 = (self.cy - r).floor().max(0.0) as u32;
        let x1 = ((self.cx + r).ceil() as u32 + 1).min(w);
        let y1 = ((self.cy + r).ceil() as u32 + 1).min(h);
        for y in y0..y1 {
            for x in x0..x1 {
                if self.contains(f64::from(x) + 0.5, f64::from(y) + 0.5) {
                    b.set(x, y);
                }
            }
        }
        Ok(b.build())
    }
}

fn disk(w: u32, h: u32, cx: f64, cy: f64, r: f64) -> Result<Bitmask> {
    Ellipse {
        cx,
        cy,
        a: r,
        b: r,
        angle: 0.0,
    }
    .mask(w, h)
}

/// One-pixel-wide straight segment of `len` pixels, horizontal or vertical.
fn sliver(w: u32, h: u32, x: u32, y: u32, len: u32, vertical: bool) -> Result<Bitmask> {
    if vertical {
        Bitmask::rect(w, h, x, y, x + 1, y + len)
    } else {
        Bitmask::rect(w, h, x, y, x + len, y + 1)
    }
}

/// Keeps the pixels of `m` on one side of a line through its centroid.
fn partial_of(m: &Bitmask, fraction_axis: f64, cut: f64) -> Result<Bitmask> {
    let n = m.area() as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for (x, y) in m.iter_pixels() {
        sx += f64::from(x);
        sy += f64::from(y);
    }
    let (cx, cy) = (sx / n, sy / n);
    let (s, c) = fraction_axis.sin_cos();
    let mut b = MaskBuilder::new(m.width(), m.height())?;
    for (x, y) in m.iter_pixels() {
        if (f64::from(x) - cx) * c + (f64::from(y) - cy) * s > cut {
            b.set(x, y);
        }
    }
    Ok(b.build())
}

struct Painter {
    img: RgbImage,
    rng: ChaCha8Rng,
}

impl Painter {
    fn paint(&mut self, m: &Bitmask, base: [u8; 3], jitter: i16) {
        let w = self.img.width() as usize;
        for (x, y) in m.iter_pixels() {
            let px = &mut self.img.pixels_mut()[y as usize * w + x as usize];
            for (ch, b) in px.iter_mut().zip(base) {
                let d = if jitter > 0 {
                    self.rng.random_range(-jitter..=jitter)
                } else {
                    0
                };
                *ch = (i16::from(b) + d).clamp(0, 255) as u8;
            }
        }
    }
}

const TRAY: [u8; 3] = [118, 118, 116];
const SOIL: [u8; 3] = [110, 80, 50];
const YELLOW: [u8; 3] = [200, 190, 40];
const STEM: [u8; 3] = [60, 140, 45];

fn leaf_color(rng: &mut impl Rng) -> [u8; 3] {
    [
        rng.random_range(35..=75),
        rng.random_range(130..=190),
        rng.random_range(35..=75),
    ]
}

struct Builder {
    cands: Vec<CandidateMask>,
    roles: Vec<Role>,
}

impl Builder {
    fn push(&mut self, prefix: &str, m: Bitmask, role: Role) -> Result<()> {
        let id = format!("{prefix}{:02}", self.cands.len());
        self.cands.push(CandidateMask::new(id, m, None, "synthetic")?);
        self.roles.push(role);
        Ok(())
    }
}

/// The fixed 512x512 scene: five leaves (two overlapping), tray, soil,
/// whole-plant mask, one two-leaf container and a stem sliver.
pub fn reference_scene() -> Result<SyntheticScene> {
    let (w, h) = (512u32, 512u32);
    let leaves = [
        Ellipse {
            cx: 180.0,
            cy: 200.0,
            a: 45.0,
            b: 26.0,
            angle: 0.3,
        },
        Ellipse {
            cx: 240.0,
            cy: 225.0,
            a: 42.0,
            b: 25.0,
            angle: -0.2,
        },
        Ellipse {
            cx: 300.0,
            cy: 330.0,
            a: 40.0,
            b: 24.0,
            angle: 0.0,
        },
        Ellipse {
            cx: 384.0,
            cy: 330.0,
            a: 40.0,
            b: 24.0,
            angle: 0.0,
        },
        Ellipse {
            cx: 180.0,
            cy: 330.0,
            a: 38.0,
            b: 28.0,
            angle: 1.2,
        },
    ];
    let colors = [
        [50, 160, 60],
        [45, 150, 55],
        [60, 170, 50],
        [55, 165, 65],
        [40, 145, 50],
    ];
    let stem = sliver(w, h, 256, 60, 110, true)?;
    build_scene(w, h, 7, &leaves, &colors, &[], &[(2, 3)], &[stem], &[], true, &[])
}

#[allow(clippy::too_many_arguments)]
fn build_scene(
    w: u32,
    h: u32,
    seed: u64,
    leaves: &[Ellipse],
    colors: &[[u8; 3]],
    edge: &[usize],
    containers: &[(usize, usize)],
    slivers: &[Bitmask],
    partials: &[(usize, f64, f64)],
    whole_plant: bool,
    clutter: &[(Bitmask, [u8; 3])],
) -> Result<SyntheticScene> {
    let mut painter = Painter {
        img: RgbImage::from_fn(w, h, |_, _| TRAY)?,
        rng: ChaCha8Rng::seed_from_u64(seed ^ 0x9a17),
    };
    let soil_disk = disk(w, h, f64::from(w) / 2.0, f64::from(h) / 2.0, f64::from(w.min(h)) * 0.41)?;
    let tray = Bitmask::full(w, h)?.and_not(&soil_disk)?;
    painter.paint(&tray, TRAY, 3);
    painter.paint(&soil_disk, SOIL, 6);
    for (m, c) in clutter {
        painter.paint(m, *c, 4);
    }

    let leaf_masks: Vec<Bitmask> = leaves.iter().map(|e| e.mask(w, h)).collect::<Result<_>>()?;
    for (i, m) in leaf_masks.iter().enumerate() {
        let c = if edge.contains(&i) { YELLOW } else { colors[i] };
        painter.paint(m, c, 8);
    }
    for s in slivers {
        painter.paint(s, STEM, 5);
    }

    let mut plant = MaskBuilder::new(w, h)?;
    for m in leaf_masks.iter().chain(slivers) {
        plant.or_assign(m)?;
    }
    let plant = plant.build();

    let mut b = Builder {
        cands: Vec::new(),
        roles: Vec::new(),
    };
    for (i, m) in leaf_masks.iter().enumerate() {
        let role = if edge.contains(&i) { Role::EdgeLeaf } else { Role::Leaf };
        b.push("leaf", m.clone(), role)?;
    }
    b.push("tray", tray, Role::Tray)?;
    let mut soil = soil_disk.and_not(&plant)?;
    for (m, _) in clutter {
        soil = soil.and_not(m)?;
    }
    b.push("soil", soil, Role::Soil)?;
    for (m, _) in clutter {
        b.push("clutter", m.clone(), Role::Clutter)?;
    }
    if whole_plant {
        b.push("plant", plant, Role::WholePlant)?;
    }
    for &(i, j) in containers {
        b.push("multi", leaf_masks[i].or(&leaf_masks[j])?, Role::Container)?;
    }
    for s in slivers {
        b.push("stem", s.clone(), Role::Sliver)?;
    }
    for &(i, axis, cut) in partials {
        let p = partial_of(&leaf_masks[i], axis, cut)?;
        if !p.is_empty() {
            b.push("part", p, Role::Partial)?;
        }
    }
    Ok(SyntheticScene {
        image: painter.img,
        candidates: b.cands,
        roles: b.roles,
        ground_truth: leaf_masks,
    })
}

/// A randomized scene. Same seed, same scene.
pub fn random_scene(seed: u64) -> Result<SyntheticScene> {
    let (w, h) = (384u32, 384u32);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (ccx, ccy) = (f64::from(w) / 2.0, f64::from(h) / 2.0);
    let soil_r = f64::from(w) * 0.41;

    let n_leaves = rng.random_range(4..=7);
    let mut leaves: Vec<Ellipse> = Vec::new();
    let mut tries = 0;
    while leaves.len() < n_leaves && tries < 5000 {
        tries += 1;
        let a = rng.random_range(24.0..34.0);
        let b = a * rng.random_range(0.5..0.8);
        let r = rng.random_range(0.0..soil_r - a - 4.0);
        let t = rng.random_range(0.0..std::f64::consts::TAU);
        let e = Ellipse {
            cx: ccx + r * t.cos(),
            cy: ccy + r * t.sin(),
            a,
            b,
            angle: rng.random_range(0.0..std::f64::consts::PI),
        };
        let clear = leaves
            .iter()
            .all(|o| (o.cx - e.cx).hypot(o.cy - e.cy) > o.a + e.a + 3.0);
        if clear {
            leaves.push(e);
        }
    }
    // one overlapping neighbour, shifted along its major axis by most of a length
    if rng.random_bool(0.6) {
        let base = leaves[0];
        let (s, c) = base.angle.sin_cos();
        let d = 1.6 * base.a;
        let e = Ellipse {
            cx: base.cx + d * c,
            cy: base.cy + d * s,
            ..base
        };
        let inside = (e.cx - ccx).hypot(e.cy - ccy) < soil_r - e.a;
        let clear = leaves[1..]
            .iter()
            .all(|o| (o.cx - e.cx).hypot(o.cy - e.cy) > o.a + e.a + 3.0);
        if inside && clear {
            leaves.push(e);
        }
    }
    let colors: Vec<[u8; 3]> = leaves.iter().map(|_| leaf_color(&mut rng)).collect();
    let edge: Vec<usize> = if rng.random_bool(0.35) {
        vec![rng.random_range(0..leaves.len())]
    } else {
        Vec::new()
    };

    // containers pair each chosen leaf with its nearest disjoint neighbour
    let n_cont = rng.random_range(0..=2usize);
    let mut containers = Vec::new();
    for k in 0..n_cont.min(leaves.len() / 2) {
        let i = k * 2;
        if edge.contains(&i) {
            continue;
        }
        let j = (0..leaves.len())
            .filter(|&j| j != i && !edge.contains(&j) && !containers.iter().any(|&(p, q)| p == j || q == j))
            .min_by(|&p, &q| {
                let dp = (leaves[p].cx - leaves[i].cx).hypot(leaves[p].cy - leaves[i].cy);
                let dq = (leaves[q].cx - leaves[i].cx).hypot(leaves[q].cy - leaves[i].cy);
                dp.total_cmp(&dq)
            });
        // a far-apart pair would already fail the compactness check
        if let Some(j) = j {
            let d = (leaves[j].cx - leaves[i].cx).hypot(leaves[j].cy - leaves[i].cy);
            if d <= 2.0 * (leaves[i].a + leaves[j].a) {
                containers.push((i, j));
            }
        }
    }

    let n_slivers = rng.random_range(1..=3);
    let mut slivers = Vec::new();
    for _ in 0..n_slivers {
        let len = rng.random_range(60..110u32);
        let vertical = rng.random_bool(0.5);
        let x = rng.random_range(70..(w - 70 - if vertical { 0 } else { len }).max(71));
        let y = rng.random_range(70..(h - 70 - if vertical { len } else { 0 }).max(71));
        slivers.push(sliver(w, h, x, y, len, vertical)?);
    }

    let n_partials = rng.random_range(0..=2usize);
    let green: Vec<usize> = (0..leaves.len()).filter(|i| !edge.contains(i)).collect();
    let partials: Vec<(usize, f64, f64)> = (0..n_partials)
        .map(|_| {
            let i = green[rng.random_range(0..green.len())];
            (i, rng.random_range(0.0..std::f64::consts::TAU), leaves[i].b * 0.25)
        })
        .collect();

    let n_clutter = rng.random_range(2..=5);
    let mut clutter = Vec::new();
    for _ in 0..n_clutter {
        let kind = rng.random_range(0..4);
        let color = match kind {
            0 => [150, 150, 148],
            1 => [232, 230, 224],
            2 => [40, 60, 200],
            _ => [200, 100, 40],
        };
        // clutter lives on the tray, clear of the soil disk
        let corner = rng.random_range(0..4);
        let (cx, cy) = match corner {
            0 => (30.0, 30.0),
            1 => (f64::from(w) - 30.0, 30.0),
            2 => (30.0, f64::from(h) - 30.0),
            _ => (f64::from(w) - 30.0, f64::from(h) - 30.0),
        };
        let r = rng.random_range(8.0..16.0);
        let jx = rng.random_range(-8.0..8.0);
        let jy = rng.random_range(-8.0..8.0);
        let m = disk(w, h, cx + jx, cy + jy, r)?;
        if clutter
            .iter()
            .all(|(o, _): &(Bitmask, [u8; 3])| o.intersection_area(&m).unwrap_or(1) == 0)
        {
            clutter.push((m, color));
        }
    }

    let whole_plant = rng.random_bool(0.85);
    build_scene(
        w,
        h,
        seed,
        &leaves,
        &colors,
        &edge,
        &containers,
        &slivers,
        &partials,
        whole_plant,
        &clutter,
    )
}

/// `n` random scenes from consecutive seeds.
pub fn corpus(first_seed: u64, n: usize) -> Result<Vec<SyntheticScene>> {
    (0..n as u64).map(|i| random_scene(first_seed + i)).collect()
}
