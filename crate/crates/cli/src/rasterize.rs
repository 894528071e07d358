//! `leafsieve rasterize`

use anyhow::Context;
use leafsieve_core::io::{ImageRef, LabelmeDocument, MaskRecord};
use leafsieve_core::mask::encode_rle;
use leafsieve_core::SceneDocument;

use crate::fsutil::{absolute, files_by_stem, write_atomic};
use crate::RasterizeArgs;

/// Converts one labelme document. Polygons that cover no pixel centre are dropped.
pub fn labelme_to_scene(doc: &LabelmeDocument, image_path: String) -> anyhow::Result<(SceneDocument, usize)> {
    let lm = doc.rasterize()?;
    let mut masks = Vec::new();
    let mut dropped = 0;
    for (label, m) in &lm.masks {
        if m.is_empty() {
            dropped += 1;
            continue;
        }
        masks.push(MaskRecord {
            id: format!("gt{:03}", masks.len()),
            rle: encode_rle(m),
            score: None,
            source: format!("labelme:{label}"),
        });
    }
    let image = ImageRef {
        path: image_path,
        width: lm.width,
        height: lm.height,
        sha256: None,
    };
    Ok((SceneDocument::new(image, masks), dropped))
}

pub fn run(args: &RasterizeArgs) -> anyhow::Result<i32> {
    let (docs, _) = files_by_stem(&args.labelme_dir, &["json"])?;
    let mut failed = 0;
    let mut total = 0;
    for (stem, path) in &docs {
        let res = (|| -> anyhow::Result<usize> {
            let text = std::fs::read_to_string(path)?;
            let doc: LabelmeDocument =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            let rel = doc.image_path.clone().unwrap_or_else(|| format!("{stem}.png"));
            let image = absolute(&path.parent().unwrap_or(std::path::Path::new(".")).join(rel));
            let (scene, dropped) = labelme_to_scene(&doc, image.to_string_lossy().into_owned())?;
            if dropped > 0 {
                log::warn!("{stem}: {dropped} polygon(s) cover no pixel and were dropped");
            }
            if scene.masks.is_empty() {
                log::warn!("{stem}: annotation has no masks");
            }
            write_atomic(&args.out_dir.join(format!("{stem}.json")), scene.to_json().as_bytes())?;
            Ok(scene.masks.len())
        })();
        match res {
            Ok(n) => {
                println!("{stem}: {n} masks");
                total += n;
            }
            Err(e) => {
                eprintln!("failed: {stem}: {e:#}");
                failed += 1;
            }
        }
    }
    println!(
        "rasterized {} annotation(s), {total} masks, {failed} failed",
        docs.len() - failed
    );
    Ok(if failed == 0 { 0 } else { 1 })
}
