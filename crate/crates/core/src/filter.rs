//! Post-processing stages that reduce a raw set of candidate masks to leaves.
//!
//! Stages always run in the order green → not-all → shape → multi-leaf, and
//! any subset of them may be enabled for ablation. Every stage only removes
//! candidates; the [`FilterReport`] records which stage removed each one and
//! the statistic that triggered it.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::color::{mask_hsv_stats, RgbImage};
use crate::error::{Error, Result};
use crate::geometry::shape_ratio;
use crate::mask::{containment_fraction, coverage_map, iou, mean_coverage, union_all, Bitmask};

/// A mask proposed by the segmenter, with its identity and provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateMask {
    id: String,
    mask: Bitmask,
    score: Option<f64>,
    source: String,
}

impl CandidateMask {
    /// Rejects empty masks.
    pub fn new(id: impl Into<String>, mask: Bitmask, score: Option<f64>, source: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if mask.is_empty() {
            return Err(Error::EmptyCandidate { id });
        }
        Ok(Self {
            id,
            mask,
            score,
            source: source.into(),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn mask(&self) -> &Bitmask {
        &self.mask
    }

    pub fn score(&self) -> Option<f64> {
        self.score
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

/// Every threshold used by the stages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    /// Inclusive lower bound on mean hue (half-degrees).
    pub hue_min: f64,
    /// Inclusive upper bound on mean hue (half-degrees).
    pub hue_max: f64,
    /// Mean saturation must be strictly greater than this.
    pub sat_min: f64,
    /// Whole-plant check only runs with at least this many candidates.
    pub whole_plant_min_masks: usize,
    /// Candidates with IoU strictly above this against the union are removed.
    pub whole_plant_iou: f64,
    /// Candidates with shape ratio strictly below this are removed.
    pub shape_ratio_min: f64,
    /// Mean coverage strictly above this flags a duplicate.
    pub multileaf_mean_coverage: f64,
    pub containment_keep: f64,
    pub containment_remove: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            hue_min: 35.0,
            hue_max: 75.0,
            sat_min: 35.0,
            whole_plant_min_masks: 3,
            whole_plant_iou: 0.90,
            shape_ratio_min: 0.10,
            multileaf_mean_coverage: 1.5,
            containment_keep: 0.90,
            containment_remove: 0.90,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(0.0 <= self.hue_min && self.hue_min < self.hue_max && self.hue_max < 180.0) {
            return bad(format!(
                "need 0 <= hue_min < hue_max < 180, got {}..{}",
                self.hue_min, self.hue_max
            ));
        }
        if !(0.0..=255.0).contains(&self.sat_min) {
            return bad(format!("sat_min {} outside [0, 255]", self.sat_min));
        }
        for (name, v) in [
            ("whole_plant_iou", self.whole_plant_iou),
            ("shape_ratio_min", self.shape_ratio_min),
            ("containment_keep", self.containment_keep),
            ("containment_remove", self.containment_remove),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return bad(format!("{name} = {v} outside (0, 1]"));
            }
        }
        if self.multileaf_mean_coverage.is_nan() || self.multileaf_mean_coverage <= 1.0 {
            return bad(format!(
                "multileaf_mean_coverage = {} must exceed 1",
                self.multileaf_mean_coverage
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Green,
    NotAll,
    CorrectShape,
    MultiLeaf,
}

impl Stage {
    /// All stages in execution order.
    pub const ALL: [Stage; 4] = [Stage::Green, Stage::NotAll, Stage::CorrectShape, Stage::MultiLeaf];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Green => "green",
            Stage::NotAll => "notall",
            Stage::CorrectShape => "shape",
            Stage::MultiLeaf => "multileaf",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "green" | "greenpixels" => Ok(Stage::Green),
            "notall" => Ok(Stage::NotAll),
            "shape" | "correctshape" => Ok(Stage::CorrectShape),
            "multileaf" => Ok(Stage::MultiLeaf),
            other => Err(Error::InvalidConfig(format!("unknown stage `{other}`"))),
        }
    }
}

/// Subset of stages to run. Execution order is always [`Stage::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct StageSet(u8);

impl StageSet {
    pub fn none() -> Self {
        Self(0)
    }

    pub fn all() -> Self {
        Stage::ALL.into_iter().collect()
    }

    pub fn contains(self, s: Stage) -> bool {
        self.0 & (1 << s as u8) != 0
    }

    pub fn with(self, s: Stage) -> Self {
        Self(self.0 | (1 << s as u8))
    }

    pub fn iter(self) -> impl Iterator<Item = Stage> {
        Stage::ALL.into_iter().filter(move |&s| self.contains(s))
    }

    /// The first `n` stages in execution order (the cumulative ablation rows).
    pub fn prefix(n: usize) -> Self {
        Stage::ALL.into_iter().take(n).collect()
    }
}

impl FromIterator<Stage> for StageSet {
    fn from_iter<I: IntoIterator<Item = Stage>>(iter: I) -> Self {
        iter.into_iter().fold(Self::none(), Self::with)
    }
}

impl FromStr for StageSet {
    type Err = Error;

    /// Comma-separated stage names; the empty string selects no stages.
    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .filter(|p| !p.trim().is_empty())
            .map(Stage::from_str)
            .collect()
    }
}

impl fmt::Display for StageSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.iter().map(Stage::name).collect();
        f.write_str(&names.join(","))
    }
}

/// The measurement that caused a removal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RemovalStat {
    Color {
        mean_hue: f64,
        mean_saturation: f64,
    },
    WholePlant {
        iou_with_union: f64,
    },
    Shape {
        shape_ratio: f64,
    },
    MultiLeaf {
        mean_coverage: f64,
        /// Largest fraction of the mask inside any one other candidate.
        best_single_containment: f64,
        /// Fraction of the mask inside the union of all other candidates.
        union_containment: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Removal {
    pub id: String,
    #[serde(flatten)]
    pub stat: RemovalStat,
}

/// Survivors and removals of a single stage.
#[derive(Debug, Clone)]
pub struct StageResult {
    pub kept: Vec<CandidateMask>,
    pub removed: Vec<Removal>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageOutcome {
    pub stage: Stage,
    pub input_count: usize,
    pub survivor_count: usize,
    pub removed: Vec<Removal>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub input_count: usize,
    /// Only the stages that ran, in execution order.
    pub stages: Vec<StageOutcome>,
    pub survivors: Vec<String>,
}

impl FilterReport {
    pub fn removed_by(&self, stage: Stage) -> Vec<&str> {
        self.stages
            .iter()
            .filter(|o| o.stage == stage)
            .flat_map(|o| o.removed.iter().map(|r| r.id.as_str()))
            .collect()
    }

    pub fn stage_of(&self, id: &str) -> Option<Stage> {
        self.stages
            .iter()
            .find(|o| o.removed.iter().any(|r| r.id == id))
            .map(|o| o.stage)
    }
}

/// Splits `cands` using a per-candidate verdict; `Some(stat)` removes.
fn partition<F>(cands: Vec<CandidateMask>, verdict: F) -> Result<StageResult>
where
    F: Fn(&[CandidateMask], usize) -> Result<Option<RemovalStat>> + Sync,
{
    let verdicts: Vec<Option<RemovalStat>> = (0..cands.len())
        .into_par_iter()
        .map(|i| verdict(&cands, i))
        .collect::<Result<_>>()?;
    let mut kept = Vec::with_capacity(cands.len());
    let mut removed = Vec::new();
    for (c, v) in cands.into_iter().zip(verdicts) {
        match v {
            Some(stat) => removed.push(Removal { id: c.id, stat }),
            None => kept.push(c),
        }
    }
    Ok(StageResult { kept, removed })
}

/// Keeps candidates whose mean hue lies in `[hue_min, hue_max]` and whose mean
/// saturation exceeds `sat_min`.
pub fn filter_green(scene: &RgbImage, cands: Vec<CandidateMask>, cfg: &FilterConfig) -> Result<StageResult> {
    partition(cands, |all, i| {
        let c = &all[i];
        let st = mask_hsv_stats(scene, &c.mask)?;
        let green = st.mean_hue >= cfg.hue_min && st.mean_hue <= cfg.hue_max && st.mean_saturation > cfg.sat_min;
        Ok((!green).then_some(RemovalStat::Color {
            mean_hue: st.mean_hue,
            mean_saturation: st.mean_saturation,
        }))
    })
}

/// Removes candidates that nearly coincide with the union of all candidates
/// (a segmentation of the entire plant). Skipped below `whole_plant_min_masks`.
pub fn filter_whole_plant(cands: Vec<CandidateMask>, cfg: &FilterConfig) -> Result<StageResult> {
    if cands.len() < cfg.whole_plant_min_masks || cands.is_empty() {
        return Ok(StageResult {
            kept: cands,
            removed: Vec::new(),
        });
    }
    let total = union_all(cands.iter().map(|c| &c.mask))?;
    partition(cands, |all, i| {
        let c = &all[i];
        let v = iou(&c.mask, &total)?;
        Ok((v > cfg.whole_plant_iou).then_some(RemovalStat::WholePlant { iou_with_union: v }))
    })
}

/// Removes candidates filling too little of their minimum enclosing circle.
pub fn filter_shape(cands: Vec<CandidateMask>, cfg: &FilterConfig) -> Result<StageResult> {
    partition(cands, |all, i| {
        let c = &all[i];
        let r = shape_ratio(&c.mask)?;
        Ok((r < cfg.shape_ratio_min).then_some(RemovalStat::Shape { shape_ratio: r }))
    })
}

/// Removes masks that cover several other candidates.
///
/// Candidates whose pixels are on average covered by more than
/// `multileaf_mean_coverage` masks are flagged. A flagged candidate lying at
/// least `containment_keep` inside some single other candidate is a leaf
/// inside a larger mask and stays. Otherwise it is removed if at least
/// `containment_remove` of it lies inside the union of the other candidates.
/// All decisions are made against the same input set, then applied together.
pub fn filter_multi_leaf(cands: Vec<CandidateMask>, cfg: &FilterConfig) -> Result<StageResult> {
    let Some(first) = cands.first() else {
        return Ok(StageResult {
            kept: cands,
            removed: Vec::new(),
        });
    };
    let (w, h) = first.mask.dims();
    let cov = coverage_map(w, h, cands.iter().map(|c| &c.mask))?;
    partition(cands, |all, i| {
        let c = &all[i];
        let mc = mean_coverage(&c.mask, &cov)?;
        if mc <= cfg.multileaf_mean_coverage {
            return Ok(None);
        }
        let mut best = 0.0f64;
        for (j, other) in all.iter().enumerate() {
            if j != i {
                best = best.max(containment_fraction(&c.mask, &other.mask)?);
            }
        }
        if best >= cfg.containment_keep {
            return Ok(None);
        }
        // pixels of c covered by c plus at least one other mask
        let in_others = cov.count_at_least(&c.mask, 2)? as f64 / c.mask.area() as f64;
        Ok((in_others >= cfg.containment_remove).then_some(RemovalStat::MultiLeaf {
            mean_coverage: mc,
            best_single_containment: best,
            union_containment: in_others,
        }))
    })
}

fn check_ids(cands: &[CandidateMask]) -> Result<()> {
    let mut seen = HashSet::with_capacity(cands.len());
    for c in cands {
        if !seen.insert(c.id.as_str()) {
            return Err(Error::DuplicateId { id: c.id.clone() });
        }
    }
    Ok(())
}

/// Runs the enabled stages in order and reports every removal.
pub fn run_pipeline(
    scene: &RgbImage,
    cands: Vec<CandidateMask>,
    cfg: &FilterConfig,
    stages: StageSet,
) -> Result<(Vec<CandidateMask>, FilterReport)> {
    cfg.validate()?;
    check_ids(&cands)?;
    for c in &cands {
        if c.mask.dims() != scene.dims() {
            return Err(Error::SceneDimensionMismatch {
                id: c.id.clone(),
                expected: scene.dims(),
                found: c.mask.dims(),
            });
        }
    }
    let input_count = cands.len();
    let mut current = cands;
    let mut outcomes = Vec::new();
    for stage in stages.iter() {
        let n = current.len();
        let res = match stage {
            Stage::Green => filter_green(scene, current, cfg)?,
            Stage::NotAll => filter_whole_plant(current, cfg)?,
            Stage::CorrectShape => filter_shape(current, cfg)?,
            Stage::MultiLeaf => filter_multi_leaf(current, cfg)?,
        };
        log::debug!("stage {stage}: {} -> {}", n, res.kept.len());
        outcomes.push(StageOutcome {
            stage,
            input_count: n,
            survivor_count: res.kept.len(),
            removed: res.removed,
        });
        current = res.kept;
    }
    let report = FilterReport {
        input_count,
        stages: outcomes,
        survivors: current.iter().map(|c| c.id.clone()).collect(),
    };
    Ok((current, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::rasterize;
    use crate::mask::Polygon;

    fn cand(id: &str, m: Bitmask) -> CandidateMask {
        CandidateMask::new(id, m, None, "test").unwrap()
    }

    fn disk(w: u32, h: u32, cx: f64, cy: f64, r: f64) -> Bitmask {
        Bitmask::from_fn(w, h, |x, y| {
            let dx = f64::from(x) + 0.5 - cx;
            let dy = f64::from(y) + 0.5 - cy;
            dx * dx + dy * dy <= r * r
        })
        .unwrap()
    }

    fn ids(v: &[CandidateMask]) -> Vec<&str> {
        v.iter().map(|c| c.id()).collect()
    }

    #[test]
    fn default_thresholds() {
        let c = FilterConfig::default();
        assert_eq!((c.hue_min, c.hue_max, c.sat_min), (35.0, 75.0, 35.0));
        assert_eq!(c.whole_plant_min_masks, 3);
        assert_eq!(c.whole_plant_iou, 0.9);
        assert_eq!(c.shape_ratio_min, 0.1);
        assert_eq!(c.multileaf_mean_coverage, 1.5);
        assert_eq!((c.containment_keep, c.containment_remove), (0.9, 0.9));
        c.validate().unwrap();
    }

    #[test]
    fn config_validation() {
        let c = FilterConfig {
            hue_min: 80.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = FilterConfig {
            multileaf_mean_coverage: 1.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = FilterConfig {
            containment_keep: 0.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn empty_candidate_rejected() {
        let e = Bitmask::empty(3, 3).unwrap();
        assert!(matches!(
            CandidateMask::new("x", e, None, ""),
            Err(Error::EmptyCandidate { .. })
        ));
    }

    #[test]
    fn stage_set_parsing() {
        assert_eq!("".parse::<StageSet>().unwrap(), StageSet::none());
        let s: StageSet = "multileaf,green".parse().unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![Stage::Green, Stage::MultiLeaf]);
        assert_eq!(s.to_string(), "green,multileaf");
        assert_eq!(
            "green,notall,shape,multileaf".parse::<StageSet>().unwrap(),
            StageSet::all()
        );
        assert!("green,leafy".parse::<StageSet>().is_err());
        assert_eq!(StageSet::prefix(2).to_string(), "green,notall");
    }

    #[test]
    fn green_keeps_green_and_drops_grey() {
        let img = RgbImage::from_fn(20, 10, |x, _| if x < 10 { [40, 200, 60] } else { [120, 120, 120] }).unwrap();
        let leaf = cand("leaf", Bitmask::rect(20, 10, 0, 0, 10, 10).unwrap());
        let tray = cand("tray", Bitmask::rect(20, 10, 10, 0, 20, 10).unwrap());
        let res = filter_green(&img, vec![leaf, tray], &FilterConfig::default()).unwrap();
        assert_eq!(ids(&res.kept), vec!["leaf"]);
        assert_eq!(res.removed.len(), 1);
        assert!(matches!(res.removed[0].stat, RemovalStat::Color { mean_saturation, .. } if mean_saturation == 0.0));
    }

    #[test]
    fn green_boundaries() {
        // hue exactly 35 is kept (closed interval); saturation exactly 35 is removed (strict)
        let cfg = FilterConfig::default();
        let img = RgbImage::from_fn(4, 1, |_, _| [0, 255, 0]).unwrap();
        let c = cand("a", Bitmask::full(4, 1).unwrap());
        let at_hue = FilterConfig {
            hue_max: 60.0,
            ..cfg.clone()
        };
        assert_eq!(filter_green(&img, vec![c.clone()], &at_hue).unwrap().kept.len(), 1);
        let at_sat = FilterConfig { sat_min: 255.0, ..cfg };
        assert_eq!(filter_green(&img, vec![c], &at_sat).unwrap().kept.len(), 0);
    }

    #[test]
    fn whole_plant_needs_three_masks() {
        let a = cand("a", Bitmask::rect(10, 10, 0, 0, 5, 5).unwrap());
        let b = cand("b", Bitmask::rect(10, 10, 0, 0, 5, 5).unwrap());
        let res = filter_whole_plant(vec![a, b], &FilterConfig::default()).unwrap();
        assert_eq!(res.kept.len(), 2);
        assert!(res.removed.is_empty());
    }

    #[test]
    fn whole_plant_union_mask_removed() {
        let leaves: Vec<Bitmask> = (0..5)
            .map(|i| Bitmask::rect(60, 10, i * 12, 0, i * 12 + 8, 8).unwrap())
            .collect();
        let union = union_all(&leaves).unwrap();
        let mut cands: Vec<_> = leaves
            .iter()
            .enumerate()
            .map(|(i, m)| cand(&format!("l{i}"), m.clone()))
            .collect();
        let without = filter_whole_plant(cands.clone(), &FilterConfig::default()).unwrap();
        assert!(without.removed.is_empty());
        cands.push(cand("plant", union));
        let res = filter_whole_plant(cands, &FilterConfig::default()).unwrap();
        assert_eq!(res.kept.len(), 5);
        assert_eq!(res.removed[0].id, "plant");
        assert_eq!(res.removed[0].stat, RemovalStat::WholePlant { iou_with_union: 1.0 });
    }

    #[test]
    fn shape_stage() {
        let cfg = FilterConfig::default();
        let d = cand("disk", disk(100, 100, 50.0, 50.0, 20.0));
        let line = cand("line", Bitmask::rect(100, 100, 0, 50, 100, 51).unwrap());
        let half = cand(
            "half",
            Bitmask::from_fn(100, 100, |x, y| {
                let dx = f64::from(x) + 0.5 - 50.0;
                let dy = f64::from(y) + 0.5 - 50.0;
                dx * dx + dy * dy <= 900.0 && dy < 0.0
            })
            .unwrap(),
        );
        let hr = shape_ratio(half.mask()).unwrap();
        assert!(hr > 0.4 && hr < 0.7, "{hr}");
        let res = filter_shape(vec![d, line, half], &cfg).unwrap();
        assert_eq!(ids(&res.kept), vec!["disk", "half"]);
        assert_eq!(res.removed[0].id, "line");
    }

    #[test]
    fn multi_leaf_disjoint_nothing_flagged() {
        let a = cand("a", Bitmask::rect(20, 10, 0, 0, 5, 5).unwrap());
        let b = cand("b", Bitmask::rect(20, 10, 10, 0, 15, 5).unwrap());
        let res = filter_multi_leaf(vec![a, b], &FilterConfig::default()).unwrap();
        assert_eq!(res.kept.len(), 2);
    }

    #[test]
    fn multi_leaf_container_removed() {
        let a = Bitmask::rect(20, 10, 0, 0, 5, 5).unwrap();
        let b = Bitmask::rect(20, 10, 10, 0, 15, 5).unwrap();
        let c = a.or(&b).unwrap();
        let res = filter_multi_leaf(vec![cand("a", a), cand("b", b), cand("c", c)], &FilterConfig::default()).unwrap();
        assert_eq!(ids(&res.kept), vec!["a", "b"]);
        assert_eq!(
            res.removed[0],
            Removal {
                id: "c".into(),
                stat: RemovalStat::MultiLeaf {
                    mean_coverage: 2.0,
                    best_single_containment: 0.5,
                    union_containment: 1.0
                }
            }
        );
    }

    #[test]
    fn multi_leaf_low_coverage_container_survives() {
        // A is 40% of C; C has mean coverage 1.4 and is never flagged
        let a = Bitmask::rect(10, 10, 0, 0, 4, 10).unwrap();
        let c = Bitmask::full(10, 10).unwrap();
        let cov = coverage_map(10, 10, [&a, &c]).unwrap();
        assert!((mean_coverage(&c, &cov).unwrap() - 1.4).abs() < 1e-12);
        assert_eq!(mean_coverage(&a, &cov).unwrap(), 2.0);
        let res = filter_multi_leaf(vec![cand("a", a), cand("c", c)], &FilterConfig::default()).unwrap();
        assert_eq!(res.kept.len(), 2);
    }

    #[test]
    fn multi_leaf_flagged_but_not_contained_is_kept() {
        // two half-overlapping squares plus a third overlapping both partially
        let a = Bitmask::rect(30, 10, 0, 0, 10, 10).unwrap();
        let b = Bitmask::rect(30, 10, 2, 0, 12, 10).unwrap();
        let res = filter_multi_leaf(vec![cand("a", a), cand("b", b)], &FilterConfig::default()).unwrap();
        // both flagged (coverage 1.8), neither 90% inside the other (80%), union containment 0.8 < 0.9
        assert_eq!(res.kept.len(), 2);
    }

    #[test]
    fn pipeline_identity_and_duplicate_ids() {
        let img = RgbImage::from_fn(10, 10, |_, _| [0, 0, 0]).unwrap();
        let a = cand("a", Bitmask::rect(10, 10, 0, 0, 1, 10).unwrap());
        let (out, rep) = run_pipeline(&img, vec![a.clone()], &FilterConfig::default(), StageSet::none()).unwrap();
        assert_eq!(out, vec![a.clone()]);
        assert!(rep.stages.is_empty());
        assert_eq!(rep.survivors, vec!["a"]);
        let err = run_pipeline(&img, vec![a.clone(), a], &FilterConfig::default(), StageSet::all());
        assert!(matches!(err, Err(Error::DuplicateId { .. })));
    }

    #[test]
    fn pipeline_dimension_mismatch() {
        let img = RgbImage::from_fn(10, 10, |_, _| [0, 0, 0]).unwrap();
        let tri = rasterize(&Polygon::new(vec![(0.0, 0.0), (9.0, 0.0), (0.0, 9.0)]).unwrap(), 12, 12).unwrap();
        let err = run_pipeline(&img, vec![cand("t", tri)], &FilterConfig::default(), StageSet::all());
        assert!(matches!(err, Err(Error::SceneDimensionMismatch { .. })));
    }
}
