//! `leafsieve eval`

use std::path::Path;

use anyhow::{bail, Context};
use leafsieve_core::eval::{evaluate, pool};
use leafsieve_core::io::{load_labelme, read_scene};
use leafsieve_core::{Bitmask, EvalResult, SceneDocument, ThresholdSet};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fsutil::{files_by_stem, write_json};
use crate::EvalArgs;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageEval {
    pub stem: String,
    pub pred_ids: Vec<String>,
    pub gt_labels: Vec<String>,
    pub result: EvalResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOutput {
    pub thresholds: ThresholdSet,
    pub images: Vec<ImageEval>,
    pub pooled: EvalResult,
}

/// Labels, masks and canvas size of one ground-truth file.
pub type GroundTruth = (Vec<String>, Vec<Bitmask>, (u32, u32));

/// Ground truth as (labels, masks). Accepts labelme annotations or scene
/// documents (e.g. the output of `rasterize`).
pub fn load_ground_truth(path: &Path) -> anyhow::Result<GroundTruth> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if value.get("shapes").is_some() || value.get("imageWidth").is_some() {
        let lm = load_labelme(path, None)?;
        let (labels, masks) = lm.masks.into_iter().unzip();
        return Ok((labels, masks, (lm.width, lm.height)));
    }
    let doc: SceneDocument = serde_json::from_value(value).with_context(|| format!("parsing {}", path.display()))?;
    let masks = doc.bitmasks()?;
    let labels = doc.masks.iter().map(|m| m.id.clone()).collect();
    Ok((labels, masks, doc.dims()))
}

fn eval_one(stem: &str, pred: &Path, gt: &Path, ts: &ThresholdSet) -> anyhow::Result<ImageEval> {
    let doc = read_scene(pred)?;
    let preds = doc.bitmasks()?;
    let (gt_labels, gts, gt_dims) = load_ground_truth(gt)?;
    if doc.dims() != gt_dims {
        bail!("{stem}: prediction is {:?} but ground truth is {gt_dims:?}", doc.dims());
    }
    let result = evaluate(&preds, &gts, ts)?;
    Ok(ImageEval {
        stem: stem.to_string(),
        pred_ids: doc.masks.iter().map(|m| m.id.clone()).collect(),
        gt_labels,
        result,
    })
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.digits$}"))
}

pub fn run(args: &EvalArgs) -> anyhow::Result<i32> {
    let (gts, _) = files_by_stem(&args.gt_dir, &["json"])?;
    let (mut preds, _) = files_by_stem(&args.pred_dir, &["json"])?;
    if gts.is_empty() {
        bail!("no ground truth in {}", args.gt_dir.display());
    }
    let mut pairs = Vec::new();
    let mut missing = Vec::new();
    for (stem, gt) in gts {
        match preds.remove(&stem) {
            Some(p) => pairs.push((stem, p, gt)),
            None => missing.push(stem),
        }
    }
    for stem in preds.keys() {
        log::warn!("prediction {stem} has no ground truth; ignored");
    }

    let ts = &args.thresholds;
    let pool_ = crate::thread_pool(args.jobs)?;
    let results: Vec<anyhow::Result<ImageEval>> =
        pool_.install(|| pairs.par_iter().map(|(s, p, g)| eval_one(s, p, g, ts)).collect());
    let mut images = Vec::new();
    let mut failed = Vec::new();
    for ((stem, _, _), r) in pairs.iter().zip(results) {
        match r {
            Ok(e) => images.push(e),
            Err(e) => failed.push(format!("{stem}: {e:#}")),
        }
    }
    for stem in &missing {
        eprintln!("missing prediction for {stem}");
    }
    for f in &failed {
        eprintln!("failed: {f}");
    }
    if images.is_empty() {
        bail!("no image could be evaluated");
    }
    let results: Vec<EvalResult> = images.iter().map(|i| i.result.clone()).collect();
    let pooled = pool(&results)?;
    println!(
        "images: {}  preds: {}  gts: {}",
        images.len(),
        pooled.num_preds,
        pooled.num_gts
    );
    println!("AP: {:.2}", pooled.ap);
    println!("AP_75: {}", fmt_opt(pooled.ap_75, 2));
    println!("AR: {:.2}", pooled.ar);
    println!("AR_75: {}", fmt_opt(pooled.ar_75, 2));
    println!("DSC: {}", fmt_opt(pooled.mean_dsc, 4));
    write_json(
        &args.out,
        &EvalOutput {
            thresholds: ts.clone(),
            images,
            pooled,
        },
    )?;
    Ok(if missing.is_empty() && failed.is_empty() { 0 } else { 1 })
}
