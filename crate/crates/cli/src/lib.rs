//! Batch frontend: filter scenes, rasterize annotations, evaluate and correlate.

pub mod correlate;
pub mod eval;
pub mod filter;
pub mod fsutil;
pub mod rasterize;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use leafsieve_core::{FilterConfig, StageSet, ThresholdSet};

#[derive(Debug, Parser)]
#[command(
    name = "leafsieve",
    version,
    about = "Leaf mask filtering and segmentation evaluation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reduce candidate masks to leaves.
    Filter(FilterArgs),
    /// Score predicted scenes against labelme ground truth.
    Eval(EvalArgs),
    /// Convert labelme annotations to scene documents.
    Rasterize(RasterizeArgs),
    /// Correlate pixel counts with physical measurements.
    Correlate(CorrelateArgs),
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// Image for a single scene (overrides the path stored in the scene).
    #[arg(long, conflicts_with = "image_dir")]
    pub image: Option<PathBuf>,
    /// Directory of images paired with scenes by file stem.
    #[arg(long)]
    pub image_dir: Option<PathBuf>,
    /// A single scene document.
    #[arg(long, conflicts_with = "masks_dir", required_unless_present = "masks_dir")]
    pub masks: Option<PathBuf>,
    /// Directory of scene documents (`*.json`).
    #[arg(long)]
    pub masks_dir: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Filter report path [default: <out-dir>/filter_report.json].
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Comma-separated stages to run (green, notall, shape, multileaf); empty runs none.
    #[arg(long, default_value = "green,notall,shape,multileaf", value_parser = parse_stages)]
    pub stages: StageSet,
    #[command(flatten)]
    pub thresholds: ThresholdFlags,
    /// Worker threads [default: all cores].
    #[arg(long, env = "LEAFSIEVE_JOBS")]
    pub jobs: Option<usize>,
    /// Skip scenes or images with no partner instead of failing.
    #[arg(long)]
    pub skip_missing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdFlags {
    #[arg(long, default_value_t = FilterConfig::default().hue_min)]
    pub hue_min: f64,
    #[arg(long, default_value_t = FilterConfig::default().hue_max)]
    pub hue_max: f64,
    #[arg(long, default_value_t = FilterConfig::default().sat_min)]
    pub sat_min: f64,
    #[arg(long, default_value_t = FilterConfig::default().whole_plant_min_masks)]
    pub whole_plant_min_masks: usize,
    #[arg(long, default_value_t = FilterConfig::default().whole_plant_iou)]
    pub whole_plant_iou: f64,
    #[arg(long, default_value_t = FilterConfig::default().shape_ratio_min)]
    pub shape_ratio_min: f64,
    #[arg(long, default_value_t = FilterConfig::default().multileaf_mean_coverage)]
    pub multileaf_mean_coverage: f64,
    #[arg(long, default_value_t = FilterConfig::default().containment_keep)]
    pub containment_keep: f64,
    #[arg(long, default_value_t = FilterConfig::default().containment_remove)]
    pub containment_remove: f64,
}

impl ThresholdFlags {
    pub fn to_config(&self) -> FilterConfig {
        FilterConfig {
            hue_min: self.hue_min,
            hue_max: self.hue_max,
            sat_min: self.sat_min,
            whole_plant_min_masks: self.whole_plant_min_masks,
            whole_plant_iou: self.whole_plant_iou,
            shape_ratio_min: self.shape_ratio_min,
            multileaf_mean_coverage: self.multileaf_mean_coverage,
            containment_keep: self.containment_keep,
            containment_remove: self.containment_remove,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Directory of predicted scene documents.
    #[arg(long)]
    pub pred_dir: PathBuf,
    /// Directory of labelme annotations.
    #[arg(long)]
    pub gt_dir: PathBuf,
    /// IoU thresholds as `start:step:stop` (inclusive) or a comma list.
    #[arg(long, default_value = "0.5:0.05:0.95", value_parser = parse_thresholds)]
    pub thresholds: ThresholdSet,
    #[arg(long, default_value = "metrics.json")]
    pub out: PathBuf,
    #[arg(long, env = "LEAFSIEVE_JOBS")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RasterizeArgs {
    #[arg(long)]
    pub labelme_dir: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// Measurement CSV (plant_id, leaf_area_cm2, leaf_count, fresh_mass_g, dry_mass_g).
    #[arg(long)]
    pub measurements: PathBuf,
    /// `manual=DIR` or `auto=DIR`: scene documents named by plant id.
    #[arg(long = "pixels-from", value_parser = parse_pixel_source)]
    pub pixels_from: Vec<PixelSource>,
    /// Measurement columns to correlate alongside the pixel counts.
    #[arg(long, default_value = "leaf_area,dry_mass", value_delimiter = ',')]
    pub fields: Vec<leafsieve_core::eval::MeasurementField>,
    #[arg(long, default_value = "correlation.json")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PixelKind {
    Manual,
    Auto,
}

#[derive(Debug, Clone)]
pub struct PixelSource {
    pub kind: PixelKind,
    pub dir: PathBuf,
}

fn parse_stages(s: &str) -> Result<StageSet, String> {
    s.parse().map_err(|e: leafsieve_core::Error| e.to_string())
}

fn parse_thresholds(s: &str) -> Result<ThresholdSet, String> {
    s.parse().map_err(|e: leafsieve_core::Error| e.to_string())
}

fn parse_pixel_source(s: &str) -> Result<PixelSource, String> {
    let (label, dir) = s
        .split_once('=')
        .ok_or_else(|| format!("expected LABEL=DIR, got `{s}`"))?;
    let kind = match label.trim() {
        "manual" => PixelKind::Manual,
        "auto" => PixelKind::Auto,
        other => return Err(format!("pixel source label must be `manual` or `auto`, got `{other}`")),
    };
    Ok(PixelSource {
        kind,
        dir: PathBuf::from(dir),
    })
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Filter(a) => filter::run(&a),
        Command::Eval(a) => eval::run(&a),
        Command::Rasterize(a) => rasterize::run(&a),
        Command::Correlate(a) => correlate::run(&a),
    }
}

pub(crate) fn thread_pool(jobs: Option<usize>) -> anyhow::Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs.filter(|&n| n > 0) {
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_defaults_equal_config_defaults() {
        let cli = Cli::try_parse_from(["leafsieve", "filter", "--masks", "a.json", "--out-dir", "o"]).unwrap();
        let Command::Filter(a) = cli.command else { panic!() };
        assert_eq!(a.thresholds.to_config(), FilterConfig::default());
        assert_eq!(a.stages, StageSet::all());
    }

    #[test]
    fn empty_stage_flag() {
        let cli = Cli::try_parse_from([
            "leafsieve",
            "filter",
            "--masks",
            "a.json",
            "--out-dir",
            "o",
            "--stages",
            "",
        ])
        .unwrap();
        let Command::Filter(a) = cli.command else { panic!() };
        assert_eq!(a.stages, StageSet::none());
    }

    #[test]
    fn eval_threshold_default() {
        let cli = Cli::try_parse_from(["leafsieve", "eval", "--pred-dir", "p", "--gt-dir", "g"]).unwrap();
        let Command::Eval(a) = cli.command else { panic!() };
        assert_eq!(a.thresholds, ThresholdSet::default());
    }

    #[test]
    fn pixel_source_parsing() {
        assert_eq!(parse_pixel_source("manual=/x").unwrap().kind, PixelKind::Manual);
        assert!(parse_pixel_source("/x").is_err());
        assert!(parse_pixel_source("other=/x").is_err());
    }
}
