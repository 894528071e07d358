//! `leafsieve correlate`

use std::path::Path;

use anyhow::bail;
use leafsieve_core::eval::{correlation_matrix, MeasurementField};
use leafsieve_core::io::{load_measurements, read_scene};
use leafsieve_core::mask::union_all;
use leafsieve_core::MeasurementRecord;
use serde::{Deserialize, Serialize};

use crate::fsutil::write_json;
use crate::{CorrelateArgs, PixelKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub plant_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantPixels {
    pub plant_id: String,
    pub pixels_manual: Option<u64>,
    pub pixels_auto: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub pixels: MeasurementField,
    pub r: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationOutput {
    pub fields: Vec<MeasurementField>,
    pub matrix: Vec<Vec<f64>>,
    /// Pixel sources against measurements, columns as in `columns`.
    pub columns: Vec<MeasurementField>,
    pub table: Vec<TableRow>,
    pub rows_used: usize,
    pub excluded: Vec<Exclusion>,
    pub plants: Vec<PlantPixels>,
}

/// Foreground pixel count of a scene: the union of its masks.
pub fn scene_pixels(path: &Path) -> anyhow::Result<u64> {
    let doc = read_scene(path)?;
    let masks = doc.bitmasks()?;
    if masks.is_empty() {
        return Ok(0);
    }
    Ok(union_all(&masks)?.area())
}

fn pixel_field(kind: PixelKind) -> MeasurementField {
    match kind {
        PixelKind::Manual => MeasurementField::PixelsManual,
        PixelKind::Auto => MeasurementField::PixelsAuto,
    }
}

pub fn run(args: &CorrelateArgs) -> anyhow::Result<i32> {
    let mut records = load_measurements(&args.measurements)?;
    let mut excluded = Vec::new();
    let pixel_fields: Vec<MeasurementField> = if args.pixels_from.is_empty() {
        [MeasurementField::PixelsManual, MeasurementField::PixelsAuto]
            .into_iter()
            .filter(|f| records.iter().any(|r| f.get(r).is_some()))
            .collect()
    } else {
        let mut v: Vec<MeasurementField> = Vec::new();
        for src in &args.pixels_from {
            let f = pixel_field(src.kind);
            if v.contains(&f) {
                bail!("pixel source `{}` given twice", f.name());
            }
            v.push(f);
        }
        v
    };
    if pixel_fields.is_empty() {
        bail!("no pixel counts: pass --pixels-from or add pixels_manual/pixels_auto columns");
    }

    let mut joined: Vec<MeasurementRecord> = Vec::new();
    'plants: for mut rec in records.drain(..) {
        for src in &args.pixels_from {
            let path = src.dir.join(format!("{}.json", rec.plant_id));
            let px = match scene_pixels(&path) {
                Ok(px) => px,
                Err(e) => {
                    let reason = if path.exists() {
                        format!("{}: {e:#}", path.display())
                    } else {
                        format!("no {} scene at {}", pixel_field(src.kind).name(), path.display())
                    };
                    excluded.push(Exclusion {
                        plant_id: rec.plant_id.clone(),
                        reason,
                    });
                    continue 'plants;
                }
            };
            match src.kind {
                PixelKind::Manual => rec.pixels_manual = Some(px),
                PixelKind::Auto => rec.pixels_auto = Some(px),
            }
        }
        if let Some(f) = pixel_fields.iter().find(|f| f.get(&rec).is_none()) {
            excluded.push(Exclusion {
                plant_id: rec.plant_id.clone(),
                reason: format!("missing {}", f.name()),
            });
            continue;
        }
        joined.push(rec);
    }
    for e in &excluded {
        eprintln!("excluded {}: {}", e.plant_id, e.reason);
    }
    if joined.len() < 2 {
        bail!("only {} plant(s) joined; need at least 2", joined.len());
    }

    let mut fields = pixel_fields.clone();
    for f in &args.fields {
        if !fields.contains(f) {
            fields.push(*f);
        }
    }
    let cm = correlation_matrix(&joined, &fields)?;
    let columns: Vec<MeasurementField> = fields[pixel_fields.len()..].to_vec();
    let table: Vec<TableRow> = (0..pixel_fields.len())
        .map(|i| TableRow {
            pixels: fields[i],
            r: (pixel_fields.len()..fields.len()).map(|j| cm.r[i][j]).collect(),
        })
        .collect();

    println!("plants joined: {}  excluded: {}", cm.rows_used, excluded.len());
    let header: Vec<String> = columns.iter().map(|c| format!("{:>12}", c.name())).collect();
    println!("{:<14}{}", "", header.join(""));
    for row in &table {
        let cells: Vec<String> = row.r.iter().map(|v| format!("{v:>12.3}")).collect();
        println!("{:<14}{}", row.pixels.name(), cells.join(""));
    }

    let plants = joined
        .iter()
        .map(|r| PlantPixels {
            plant_id: r.plant_id.clone(),
            pixels_manual: r.pixels_manual,
            pixels_auto: r.pixels_auto,
        })
        .collect();
    write_json(
        &args.out,
        &CorrelationOutput {
            fields: cm.fields,
            matrix: cm.r,
            columns,
            table,
            rows_used: cm.rows_used,
            excluded,
            plants,
        },
    )?;
    Ok(0)
}
