//! Segmentation scoring: one-to-one IoU matching, precision/recall over a grid
//! of IoU thresholds, closest-object Dice, and correlation of pixel counts
//! against physical measurements.
//!
//! Precision and recall here are set-level (unranked): predictions carry no
//! confidence ordering, so at each threshold precision is `tp / (tp + fp)`
//! after matching, and AP/AR are the means over the threshold grid, in percent.

use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{iou, Bitmask};

/// Ascending IoU thresholds in `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ThresholdSet(Vec<f64>);

impl ThresholdSet {
    pub fn new(thresholds: Vec<f64>) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::InvalidThresholds("empty".into()));
        }
        if let Some(t) = thresholds.iter().find(|&&t| !(t > 0.0 && t < 1.0)) {
            return Err(Error::InvalidThresholds(format!("{t} outside (0, 1)")));
        }
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidThresholds("not strictly ascending".into()));
        }
        Ok(Self(thresholds))
    }

    /// Inclusive `start..=stop` grid. Values are snapped to 1e-9 so that
    /// `0.5:0.05:0.95` yields exactly the literals `0.5, 0.55, ..., 0.95`.
    pub fn grid(start: f64, step: f64, stop: f64) -> Result<Self> {
        if step.is_nan() || step <= 0.0 || stop < start {
            return Err(Error::InvalidThresholds(format!("bad grid {start}:{step}:{stop}")));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        let ts = (0..n)
            .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
            .collect();
        Self::new(ts)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn position(&self, t: f64) -> Option<usize> {
        self.0.iter().position(|&x| (x - t).abs() < 1e-9)
    }
}

impl Default for ThresholdSet {
    fn default() -> Self {
        Self::grid(0.5, 0.05, 0.95).expect("default grid is valid")
    }
}

impl TryFrom<Vec<f64>> for ThresholdSet {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ThresholdSet> for Vec<f64> {
    fn from(t: ThresholdSet) -> Self {
        t.0
    }
}

impl FromStr for ThresholdSet {
    type Err = Error;

    /// `start:step:stop` (inclusive) or a comma-separated list.
    fn from_str(s: &str) -> Result<Self> {
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidThresholds(format!("not a number: `{p}`")))
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [a, step, b] => Self::grid(num(a)?, num(step)?, num(b)?),
            [_] => Self::new(s.split(',').map(num).collect::<Result<_>>()?),
            _ => Err(Error::InvalidThresholds(format!("cannot parse `{s}`"))),
        }
    }
}

impl fmt::Display for ThresholdSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|t| t.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl EvalCounts {
    /// Precision in `[0, 1]`. With no predictions it is 1 if there is also no
    /// ground truth, else 0.
    pub fn precision(&self) -> f64 {
        match self.tp + self.fp {
            0 if self.fn_ == 0 => 1.0,
            0 => 0.0,
            n => self.tp as f64 / n as f64,
        }
    }

    /// Recall in `[0, 1]`; 1 when there is no ground truth.
    pub fn recall(&self) -> f64 {
        match self.tp + self.fn_ {
            0 => 1.0,
            n => self.tp as f64 / n as f64,
        }
    }
}

impl Add for EvalCounts {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
        }
    }
}

impl AddAssign for EvalCounts {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

/// An accepted prediction/ground-truth pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Match {
    pub gt: usize,
    pub pred: usize,
    pub iou: f64,
}

/// `ious[p][g]` for every prediction `p` and ground truth `g`.
pub fn iou_matrix(preds: &[Bitmask], gts: &[Bitmask]) -> Result<Vec<Vec<f64>>> {
    use rayon::prelude::*;
    preds
        .par_iter()
        .map(|p| gts.iter().map(|g| iou(p, g)).collect())
        .collect()
}

/// Greedy one-to-one matching on a precomputed IoU matrix: pairs with
/// `iou >= t` are accepted in descending IoU order, ties broken by
/// `(gt, pred)` index.
pub fn greedy_match(ious: &[Vec<f64>], n_gts: usize, t: f64) -> (Vec<Match>, EvalCounts) {
    let mut pairs: Vec<Match> = ious
        .iter()
        .enumerate()
        .flat_map(|(p, row)| {
            row.iter()
                .enumerate()
                .map(move |(g, &v)| Match { gt: g, pred: p, iou: v })
        })
        .filter(|m| m.iou > 0.0 && m.iou >= t)
        .collect();
    pairs.sort_by(|a, b| b.iou.total_cmp(&a.iou).then(a.gt.cmp(&b.gt)).then(a.pred.cmp(&b.pred)));
    let mut gt_used = vec![false; n_gts];
    let mut pred_used = vec![false; ious.len()];
    let mut matches = Vec::new();
    for m in pairs {
        if !gt_used[m.gt] && !pred_used[m.pred] {
            gt_used[m.gt] = true;
            pred_used[m.pred] = true;
            matches.push(m);
        }
    }
    let tp = matches.len() as u64;
    let counts = EvalCounts {
        tp,
        fp: ious.len() as u64 - tp,
        fn_: n_gts as u64 - tp,
    };
    (matches, counts)
}

pub fn match_instances(preds: &[Bitmask], gts: &[Bitmask], t: f64) -> Result<(Vec<Match>, EvalCounts)> {
    let m = iou_matrix(preds, gts)?;
    Ok(greedy_match(&m, gts.len(), t))
}

/// Pixel-level Dice of prediction `b` against ground truth `a`.
pub fn dsc(a: &Bitmask, b: &Bitmask) -> Result<f64> {
    let tp = a.intersection_area(b)?;
    let fp = b.area() - tp;
    let fn_ = a.area() - tp;
    if a.is_empty() && b.is_empty() {
        return Err(Error::EmptyMask);
    }
    Ok(2.0 * tp as f64 / (2 * tp + fp + fn_) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DscEntry {
    pub gt: usize,
    /// Closest prediction, `None` when there are no predictions.
    pub pred: Option<usize>,
    pub dsc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DscSummary {
    pub mean: f64,
    pub per_gt: Vec<DscEntry>,
}

/// Dice of every ground truth against its closest prediction. Predictions
/// may serve several ground truths.
pub fn best_match_dsc(preds: &[Bitmask], gts: &[Bitmask]) -> Result<DscSummary> {
    if gts.is_empty() {
        return Err(Error::EmptyList);
    }
    let mut per_gt = Vec::with_capacity(gts.len());
    for (g, gt) in gts.iter().enumerate() {
        let mut best = DscEntry {
            gt: g,
            pred: None,
            dsc: 0.0,
        };
        for (p, pred) in preds.iter().enumerate() {
            let d = if gt.is_empty() && pred.is_empty() {
                0.0
            } else {
                dsc(gt, pred)?
            };
            if best.pred.is_none() || d > best.dsc {
                best = DscEntry {
                    gt: g,
                    pred: Some(p),
                    dsc: d,
                };
            }
        }
        per_gt.push(best);
    }
    let mean = per_gt.iter().map(|e| e.dsc).sum::<f64>() / per_gt.len() as f64;
    Ok(DscSummary { mean, per_gt })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub threshold: f64,
    #[serde(flatten)]
    pub counts: EvalCounts,
    /// Percent.
    pub precision: f64,
    /// Percent.
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub per_threshold: Vec<ThresholdResult>,
    pub ap: f64,
    pub ar: f64,
    pub ap_75: Option<f64>,
    pub ar_75: Option<f64>,
    /// `None` when there is no ground truth.
    pub mean_dsc: Option<f64>,
    pub num_preds: usize,
    pub num_gts: usize,
    /// Accepted pairs at the loosest threshold; a pair is a hit at any
    /// threshold `t <= iou`.
    pub matches: Vec<Match>,
    pub dsc: Vec<DscEntry>,
}

impl EvalResult {
    fn summarize(
        ts: &ThresholdSet,
        counts: &[EvalCounts],
        num_preds: usize,
        num_gts: usize,
        matches: Vec<Match>,
        dsc: Vec<DscEntry>,
    ) -> Self {
        let per_threshold: Vec<ThresholdResult> = ts
            .as_slice()
            .iter()
            .zip(counts)
            .map(|(&threshold, c)| ThresholdResult {
                threshold,
                counts: *c,
                precision: 100.0 * c.precision(),
                recall: 100.0 * c.recall(),
            })
            .collect();
        let n = per_threshold.len() as f64;
        let ap = per_threshold.iter().map(|r| r.precision).sum::<f64>() / n;
        let ar = per_threshold.iter().map(|r| r.recall).sum::<f64>() / n;
        let at75 = ts.position(0.75).map(|i| &per_threshold[i]);
        let mean_dsc = (!dsc.is_empty()).then(|| dsc.iter().map(|e| e.dsc).sum::<f64>() / dsc.len() as f64);
        Self {
            ap_75: at75.map(|r| r.precision),
            ar_75: at75.map(|r| r.recall),
            per_threshold,
            ap,
            ar,
            mean_dsc,
            num_preds,
            num_gts,
            matches,
            dsc,
        }
    }

    pub fn counts(&self) -> Vec<EvalCounts> {
        self.per_threshold.iter().map(|r| r.counts).collect()
    }

    pub fn thresholds(&self) -> Vec<f64> {
        self.per_threshold.iter().map(|r| r.threshold).collect()
    }
}

/// Scores one image.
pub fn evaluate(preds: &[Bitmask], gts: &[Bitmask], ts: &ThresholdSet) -> Result<EvalResult> {
    let ious = iou_matrix(preds, gts)?;
    let counts: Vec<EvalCounts> = ts
        .as_slice()
        .iter()
        .map(|&t| greedy_match(&ious, gts.len(), t).1)
        .collect();
    let (matches, _) = greedy_match(&ious, gts.len(), ts.as_slice()[0]);
    let dsc = if gts.is_empty() {
        Vec::new()
    } else {
        best_match_dsc(preds, gts)?.per_gt
    };
    Ok(EvalResult::summarize(ts, &counts, preds.len(), gts.len(), matches, dsc))
}

/// Micro-average: pools counts and Dice entries across images before dividing.
/// The pooled result carries no match table.
pub fn pool(results: &[EvalResult]) -> Result<EvalResult> {
    let first = results.first().ok_or(Error::EmptyList)?;
    let ts = ThresholdSet::new(first.thresholds())?;
    let mut counts = vec![EvalCounts::default(); ts.len()];
    let mut dsc = Vec::new();
    let (mut np, mut ng) = (0, 0);
    for r in results {
        if r.thresholds() != ts.as_slice() {
            return Err(Error::InvalidThresholds(
                "pooled results use different thresholds".into(),
            ));
        }
        for (acc, c) in counts.iter_mut().zip(r.counts()) {
            *acc += c;
        }
        dsc.extend(r.dsc.iter().copied());
        np += r.num_preds;
        ng += r.num_gts;
    }
    Ok(EvalResult::summarize(&ts, &counts, np, ng, Vec::new(), dsc))
}

/// Sample Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: x.len(),
        });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::ZeroVariance("x".into()));
    }
    if syy == 0.0 {
        return Err(Error::ZeroVariance("y".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Physical ground truth for one harvested plant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub plant_id: String,
    #[serde(rename = "leaf_area_cm2")]
    pub leaf_area: f64,
    pub leaf_count: u32,
    #[serde(rename = "fresh_mass_g")]
    pub fresh_mass: f64,
    #[serde(rename = "dry_mass_g")]
    pub dry_mass: f64,
    #[serde(default)]
    pub pixels_manual: Option<u64>,
    #[serde(default)]
    pub pixels_auto: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementField {
    LeafArea,
    LeafCount,
    FreshMass,
    DryMass,
    PixelsManual,
    PixelsAuto,
}

impl MeasurementField {
    pub fn get(self, r: &MeasurementRecord) -> Option<f64> {
        match self {
            Self::LeafArea => Some(r.leaf_area),
            Self::LeafCount => Some(f64::from(r.leaf_count)),
            Self::FreshMass => Some(r.fresh_mass),
            Self::DryMass => Some(r.dry_mass),
            Self::PixelsManual => r.pixels_manual.map(|p| p as f64),
            Self::PixelsAuto => r.pixels_auto.map(|p| p as f64),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::LeafArea => "leaf_area",
            Self::LeafCount => "leaf_count",
            Self::FreshMass => "fresh_mass",
            Self::DryMass => "dry_mass",
            Self::PixelsManual => "pixels_manual",
            Self::PixelsAuto => "pixels_auto",
        }
    }
}

impl FromStr for MeasurementField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "leaf_area" | "leaf_area_cm2" => Self::LeafArea,
            "leaf_count" => Self::LeafCount,
            "fresh_mass" | "fresh_mass_g" => Self::FreshMass,
            "dry_mass" | "dry_mass_g" => Self::DryMass,
            "pixels_manual" | "manual" => Self::PixelsManual,
            "pixels_auto" | "auto" => Self::PixelsAuto,
            other => return Err(Error::InvalidConfig(format!("unknown measurement field `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub fields: Vec<MeasurementField>,
    /// Symmetric, unit diagonal, indexed like `fields`.
    pub r: Vec<Vec<f64>>,
    pub rows_used: usize,
    pub rows_skipped: usize,
}

/// Pairwise Pearson correlations. Records missing any selected field are skipped.
pub fn correlation_matrix(records: &[MeasurementRecord], fields: &[MeasurementField]) -> Result<CorrelationMatrix> {
    let rows: Vec<Vec<f64>> = records
        .iter()
        .filter_map(|rec| fields.iter().map(|f| f.get(rec)).collect::<Option<Vec<f64>>>())
        .collect();
    if rows.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: rows.len(),
        });
    }
    let cols: Vec<Vec<f64>> = (0..fields.len()).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let k = fields.len();
    let mut r = vec![vec![1.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let v = pearson(&cols[i], &cols[j]).map_err(|e| match e {
                Error::ZeroVariance(_) => Error::ZeroVariance(format!("{} or {}", fields[i].name(), fields[j].name())),
                e => e,
            })?;
            r[i][j] = v;
            r[j][i] = v;
        }
    }
    Ok(CorrelationMatrix {
        fields: fields.to_vec(),
        r,
        rows_used: rows.len(),
        rows_skipped: records.len() - rows.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub min: u64,
    pub max: u64,
}

/// Pixel-area statistics of a mask set.
pub fn mask_size_summary(masks: &[Bitmask]) -> Result<SizeSummary> {
    if masks.is_empty() {
        return Err(Error::EmptyList);
    }
    let mut areas: Vec<u64> = masks.iter().map(Bitmask::area).collect();
    areas.sort_unstable();
    let n = areas.len();
    let median = if n % 2 == 1 {
        areas[n / 2] as f64
    } else {
        (areas[n / 2 - 1] + areas[n / 2]) as f64 / 2.0
    };
    Ok(SizeSummary {
        count: n,
        mean: areas.iter().sum::<u64>() as f64 / n as f64,
        median,
        min: areas[0],
        max: areas[n - 1],
    })
}
