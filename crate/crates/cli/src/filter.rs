//! `leafsieve filter`

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use leafsieve_core::io::{load_scene_image, read_scene, resolve_image_path};
use leafsieve_core::{run_pipeline, FilterConfig, FilterReport, SceneDocument, Stage, StageSet};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fsutil::{self, absolute, files_by_stem, write_json};
use crate::FilterArgs;

/// One scene to process.
#[derive(Debug, Clone)]
pub struct Job {
    pub stem: String,
    pub scene: PathBuf,
    /// Overrides the image referenced by the scene.
    pub image: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageCount {
    pub stage: Stage,
    pub removed: usize,
    pub survivors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageRecord {
    pub stem: String,
    pub scene: PathBuf,
    pub image: PathBuf,
    pub config_hash: String,
    pub input_count: usize,
    pub stage_counts: Vec<StageCount>,
    pub survivors: usize,
    pub wall_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub images: usize,
    pub failed: usize,
    pub unpaired: usize,
    pub input_masks: usize,
    pub survivors: usize,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub stages: String,
    pub config: FilterConfig,
    pub images: Vec<ImageRecord>,
    pub unpaired: Vec<PathBuf>,
    pub totals: Totals,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub stages: String,
    pub config: FilterConfig,
    pub scenes: BTreeMap<String, FilterReport>,
}

/// Digest of the config and stage selection; identical for every image in a run.
pub fn config_hash(cfg: &FilterConfig, stages: StageSet) -> String {
    let mut s = serde_json::to_string(cfg).expect("config serializes");
    s.push('\n');
    s.push_str(&stages.to_string());
    fsutil::sha256_hex(s.as_bytes())
}

/// Resolves the scene/image pairs named by the arguments. The second value
/// lists inputs that have no partner.
pub fn collect_jobs(args: &FilterArgs) -> anyhow::Result<(Vec<Job>, Vec<PathBuf>)> {
    if let Some(scene) = &args.masks {
        if args.image_dir.is_some() {
            bail!("--image-dir needs --masks-dir");
        }
        let job = Job {
            stem: fsutil::stem(scene),
            scene: scene.clone(),
            image: args.image.clone(),
        };
        return Ok((vec![job], Vec::new()));
    }
    let dir = args
        .masks_dir
        .as_ref()
        .context("one of --masks or --masks-dir is required")?;
    if args.image.is_some() {
        bail!("--image needs --masks; use --image-dir with --masks-dir");
    }
    let (scenes, dup_scenes) = files_by_stem(dir, &["json"])?;
    if !dup_scenes.is_empty() {
        bail!("duplicate scene stems: {dup_scenes:?}");
    }
    let mut unpaired = Vec::new();
    let mut jobs = Vec::new();
    match &args.image_dir {
        None => {
            for (stem, scene) in scenes {
                jobs.push(Job {
                    stem,
                    scene,
                    image: None,
                });
            }
        }
        Some(idir) => {
            let (mut images, dups) = files_by_stem(idir, fsutil::IMAGE_EXTS)?;
            unpaired.extend(dups);
            for (stem, scene) in scenes {
                match images.remove(&stem) {
                    Some(img) => jobs.push(Job {
                        stem,
                        scene,
                        image: Some(img),
                    }),
                    None => unpaired.push(scene),
                }
            }
            unpaired.extend(images.into_values());
        }
    }
    unpaired.sort();
    Ok((jobs, unpaired))
}

struct Processed {
    record: ImageRecord,
    output: Option<(SceneDocument, FilterReport)>,
}

fn process(job: &Job, cfg: &FilterConfig, stages: StageSet, hash: &str) -> Processed {
    let start = Instant::now();
    let mut record = ImageRecord {
        stem: job.stem.clone(),
        scene: absolute(&job.scene),
        image: job.image.as_deref().map(absolute).unwrap_or_default(),
        config_hash: hash.to_string(),
        input_count: 0,
        stage_counts: Vec::new(),
        survivors: 0,
        wall_ms: 0.0,
        error: None,
    };
    let result = (|| -> anyhow::Result<(SceneDocument, FilterReport)> {
        let doc = read_scene(&job.scene)?;
        let image_path = match &job.image {
            Some(p) => p.clone(),
            None => resolve_image_path(&job.scene, &doc),
        };
        record.image = absolute(&image_path);
        let img = load_scene_image(&doc, &image_path)?;
        let cands = doc.candidates()?;
        let (kept, report) = run_pipeline(&img, cands, cfg, stages)?;
        let mut image = doc.image.clone();
        image.path = record.image.to_string_lossy().into_owned();
        Ok((SceneDocument::from_candidates(image, &kept), report))
    })();
    let output = match result {
        Ok((doc, report)) => {
            record.input_count = report.input_count;
            record.stage_counts = report
                .stages
                .iter()
                .map(|o| StageCount {
                    stage: o.stage,
                    removed: o.removed.len(),
                    survivors: o.survivor_count,
                })
                .collect();
            record.survivors = report.survivors.len();
            Some((doc, report))
        }
        Err(e) => {
            record.error = Some(format!("{e:#}"));
            None
        }
    };
    record.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Processed { record, output }
}

pub fn run(args: &FilterArgs) -> anyhow::Result<i32> {
    let cfg = args.thresholds.to_config();
    cfg.validate()?;
    let stages = args.stages;
    let hash = config_hash(&cfg, stages);
    let (jobs, unpaired) = collect_jobs(args)?;
    for p in &unpaired {
        eprintln!("unpaired input: {}", p.display());
    }
    if !unpaired.is_empty() && !args.skip_missing {
        eprintln!("{} unpaired input(s); pass --skip-missing to ignore", unpaired.len());
    }

    let run_start = Instant::now();
    let pool = crate::thread_pool(args.jobs)?;
    let processed: Vec<Processed> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let p = process(job, &cfg, stages, &hash);
                match &p.record.error {
                    None => log::info!("{}: {} -> {}", job.stem, p.record.input_count, p.record.survivors),
                    Some(e) => log::warn!("{}: {e}", job.stem),
                }
                p
            })
            .collect()
    });

    std::fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;
    let mut scenes = BTreeMap::new();
    let mut records = Vec::with_capacity(processed.len());
    let mut failed = Vec::new();
    for p in processed {
        if let Some((doc, report)) = p.output {
            let out = args.out_dir.join(format!("{}.json", p.record.stem));
            if let Err(e) = fsutil::write_atomic(&out, doc.to_json().as_bytes()) {
                failed.push((p.record.stem.clone(), format!("{e:#}")));
            }
            scenes.insert(p.record.stem.clone(), report);
        } else if let Some(e) = &p.record.error {
            failed.push((p.record.stem.clone(), e.clone()));
        }
        records.push(p.record);
    }

    let report_path = args
        .report
        .clone()
        .unwrap_or_else(|| args.out_dir.join("filter_report.json"));
    write_json(
        &report_path,
        &BatchReport {
            stages: stages.to_string(),
            config: cfg.clone(),
            scenes,
        },
    )?;
    let totals = Totals {
        images: records.len(),
        failed: failed.len(),
        unpaired: unpaired.len(),
        input_masks: records.iter().map(|r| r.input_count).sum(),
        survivors: records.iter().map(|r| r.survivors).sum(),
        wall_ms: run_start.elapsed().as_secs_f64() * 1e3,
    };
    println!(
        "filtered {} image(s): {} -> {} masks, {} failed, {} unpaired",
        totals.images, totals.input_masks, totals.survivors, totals.failed, totals.unpaired
    );
    write_json(
        &args.out_dir.join("run_manifest.json"),
        &RunManifest {
            config_hash: hash,
            stages: stages.to_string(),
            config: cfg,
            images: records,
            unpaired: unpaired.iter().map(|p| absolute(p)).collect(),
            totals,
        },
    )?;
    for (stem, e) in &failed {
        eprintln!("failed: {stem}: {e}");
    }
    let ok = failed.is_empty() && (unpaired.is_empty() || args.skip_missing);
    Ok(if ok { 0 } else { 1 })
}

/// Reads a manifest and drops every timing field, leaving only
/// content that must not depend on scheduling.
pub fn manifest_without_timing(path: &Path) -> anyhow::Result<RunManifest> {
    let text = std::fs::read_to_string(path)?;
    let mut m: RunManifest = serde_json::from_str(&text)?;
    m.totals.wall_ms = 0.0;
    for r in &mut m.images {
        r.wall_ms = 0.0;
    }
    Ok(m)
}
