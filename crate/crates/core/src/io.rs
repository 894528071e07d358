//! File formats: scene interchange JSON, labelme annotations, images and
//! measurement CSVs. Every loader rejects invalid input instead of repairing it.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use image::ImageFormat;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::color::RgbImage;
use crate::error::{Error, Result};
use crate::eval::MeasurementRecord;
use crate::filter::CandidateMask;
use crate::mask::{decode_rle, encode_rle, rasterize, Bitmask, Polygon, RleMask};

/// Version tag written into every scene document.
pub const SCENE_VERSION: &str = "leafsieve/1";

/// One image and its candidate masks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDocument {
    pub version: String,
    pub image: ImageRef,
    pub masks: Vec<MaskRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageRef {
    /// Relative paths resolve against the directory holding the document.
    pub path: String,
    pub width: u32,
    pub height: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sha256: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskRecord {
    pub id: String,
    pub rle: RleMask,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    #[serde(default)]
    pub source: String,
}

impl MaskRecord {
    pub fn from_candidate(c: &CandidateMask) -> Self {
        Self {
            id: c.id().to_string(),
            rle: encode_rle(c.mask()),
            score: c.score(),
            source: c.source().to_string(),
        }
    }
}

impl SceneDocument {
    pub fn new(image: ImageRef, masks: Vec<MaskRecord>) -> Self {
        Self {
            version: SCENE_VERSION.to_string(),
            image,
            masks,
        }
    }

    pub fn from_candidates(image: ImageRef, cands: &[CandidateMask]) -> Self {
        Self::new(image, cands.iter().map(MaskRecord::from_candidate).collect())
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.image.width, self.image.height)
    }

    /// Checks version, RLE validity, mask dimensions and id uniqueness.
    pub fn validate(&self) -> Result<()> {
        if self.version != SCENE_VERSION {
            return Err(Error::UnsupportedVersion(self.version.clone()));
        }
        let dims = self.dims();
        if dims.0 == 0 || dims.1 == 0 {
            return Err(Error::ZeroDimension {
                width: dims.0,
                height: dims.1,
            });
        }
        let mut seen = HashSet::new();
        for m in &self.masks {
            if !seen.insert(m.id.as_str()) {
                return Err(Error::DuplicateId { id: m.id.clone() });
            }
            let found = (m.rle.width, m.rle.height);
            if found != dims {
                return Err(Error::SceneDimensionMismatch {
                    id: m.id.clone(),
                    expected: dims,
                    found,
                });
            }
            m.rle.validate().map_err(|e| Error::SceneRleInvalid {
                id: m.id.clone(),
                reason: e.to_string(),
            })?;
        }
        Ok(())
    }

    /// Validates and decodes every mask.
    pub fn bitmasks(&self) -> Result<Vec<Bitmask>> {
        self.validate()?;
        self.masks
            .iter()
            .map(|m| {
                decode_rle(&m.rle).map_err(|e| Error::SceneRleInvalid {
                    id: m.id.clone(),
                    reason: e.to_string(),
                })
            })
            .collect()
    }

    /// Validates and decodes every mask into a candidate.
    pub fn candidates(&self) -> Result<Vec<CandidateMask>> {
        let masks = self.bitmasks()?;
        self.masks
            .iter()
            .zip(masks)
            .map(|(r, m)| CandidateMask::new(r.id.clone(), m, r.score, r.source.clone()))
            .collect()
    }

    /// Compact JSON with fixed field order and a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("scene documents always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses a scene document without decoding masks or the image.
pub fn read_scene(path: &Path) -> Result<SceneDocument> {
    let text = read_to_string(path)?;
    SceneDocument::from_json(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn save_scene(path: &Path, doc: &SceneDocument) -> Result<()> {
    fs::write(path, doc.to_json()).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Resolves the image referenced by a scene document stored at `doc_path`.
pub fn resolve_image_path(doc_path: &Path, doc: &SceneDocument) -> PathBuf {
    let p = Path::new(&doc.image.path);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        doc_path.parent().unwrap_or(Path::new(".")).join(p)
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Loads a scene and its image, validating every mask against the image.
pub fn load_scene(path: &Path) -> Result<(RgbImage, Vec<CandidateMask>)> {
    let doc = read_scene(path)?;
    let image_path = resolve_image_path(path, &doc);
    let img = load_scene_image(&doc, &image_path)?;
    Ok((img, doc.candidates()?))
}

/// Loads `image_path` as the image of `doc`, checking its size and, when
/// recorded, its digest.
pub fn load_scene_image(doc: &SceneDocument, image_path: &Path) -> Result<RgbImage> {
    if let Some(expected) = &doc.image.sha256 {
        let actual = sha256_file(image_path)?;
        if !actual.eq_ignore_ascii_case(expected) {
            return Err(Error::InvalidConfig(format!(
                "{}: sha256 {actual} does not match document ({expected})",
                image_path.display()
            )));
        }
    }
    let img = load_image(image_path)?;
    if img.dims() != doc.dims() {
        return Err(Error::DimensionMismatch {
            expected: doc.dims(),
            found: img.dims(),
        });
    }
    Ok(img)
}

/// Decodes a PNG or JPEG to 8-bit RGB.
pub fn load_image(path: &Path) -> Result<RgbImage> {
    let reader = image::ImageReader::open(path)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?
        .with_guessed_format()
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
    match reader.format() {
        Some(ImageFormat::Png | ImageFormat::Jpeg) => {}
        _ => {
            return Err(Error::UnsupportedImage {
                path: path.to_path_buf(),
            })
        }
    }
    let img = reader.decode().map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })?;
    let rgb = img.to_rgb8();
    let (w, h) = rgb.dimensions();
    let pixels = rgb.pixels().map(|p| p.0).collect();
    RgbImage::new(w, h, pixels)
}

/// Writes an 8-bit RGB PNG.
pub fn save_png(path: &Path, img: &RgbImage) -> Result<()> {
    let raw: Vec<u8> = img.pixels().iter().flatten().copied().collect();
    image::save_buffer_with_format(
        path,
        &raw,
        img.width(),
        img.height(),
        image::ColorType::Rgb8,
        ImageFormat::Png,
    )
    .map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LabelmeDocument {
    pub image_height: u32,
    pub image_width: u32,
    #[serde(default)]
    pub image_path: Option<String>,
    #[serde(default)]
    pub shapes: Vec<LabelmeShape>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelmeShape {
    pub label: String,
    /// Older exports omit this; it then means polygon.
    #[serde(default)]
    pub shape_type: Option<String>,
    pub points: Vec<[f64; 2]>,
}

/// Ground-truth masks rasterized from a labelme document.
#[derive(Debug, Clone)]
pub struct LabelmeMasks {
    pub width: u32,
    pub height: u32,
    pub image_path: Option<String>,
    pub masks: Vec<(String, Bitmask)>,
    /// Non-polygon shapes that were ignored.
    pub skipped: usize,
}

impl LabelmeDocument {
    pub fn rasterize(&self) -> Result<LabelmeMasks> {
        let (w, h) = (self.image_width, self.image_height);
        let mut masks = Vec::new();
        let mut skipped = 0;
        for shape in &self.shapes {
            let kind = shape.shape_type.as_deref().unwrap_or("polygon");
            if kind != "polygon" {
                log::warn!("skipping labelme shape `{}` of type `{kind}`", shape.label);
                skipped += 1;
                continue;
            }
            let poly =
                Polygon::new(shape.points.iter().map(|p| (p[0], p[1])).collect()).map_err(|e| Error::InvalidShape {
                    label: shape.label.clone(),
                    reason: e.to_string(),
                })?;
            masks.push((shape.label.clone(), rasterize(&poly, w, h)?));
        }
        Ok(LabelmeMasks {
            width: w,
            height: h,
            image_path: self.image_path.clone(),
            masks,
            skipped,
        })
    }
}

/// Reads and rasterizes a labelme annotation. When `canvas` is given the
/// document's image size must match it.
pub fn load_labelme(path: &Path, canvas: Option<(u32, u32)>) -> Result<LabelmeMasks> {
    let text = read_to_string(path)?;
    let doc: LabelmeDocument = serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    if let Some(dims) = canvas {
        let found = (doc.image_width, doc.image_height);
        if found != dims {
            return Err(Error::DimensionMismatch { expected: dims, found });
        }
    }
    doc.rasterize()
}

/// Reads a headered measurement CSV, rejecting negative quantities.
pub fn load_measurements(path: &Path) -> Result<Vec<MeasurementRecord>> {
    let file = fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_measurements(file, path)
}

fn read_measurements<R: std::io::Read>(rdr: R, path: &Path) -> Result<Vec<MeasurementRecord>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(rdr);
    let headers = reader
        .headers()
        .map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?
        .clone();
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let malformed = |reason: String| Error::MalformedRow {
            path: path.to_path_buf(),
            line,
            reason,
        };
        let rec: MeasurementRecord = row.deserialize(Some(&headers)).map_err(|e| malformed(e.to_string()))?;
        for (name, v) in [
            ("leaf_area_cm2", rec.leaf_area),
            ("fresh_mass_g", rec.fresh_mass),
            ("dry_mass_g", rec.dry_mass),
        ] {
            if v.is_nan() || v < 0.0 {
                return Err(malformed(format!("{name} must be non-negative, got {v}")));
            }
        }
        out.push(rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn image_ref(w: u32, h: u32) -> ImageRef {
        ImageRef {
            path: "img.png".into(),
            width: w,
            height: h,
            sha256: None,
        }
    }

    #[test]
    fn full_frame_scene() {
        let m = Bitmask::full(4, 3).unwrap();
        let c = CandidateMask::new("all", m, Some(0.9), "test").unwrap();
        let doc = SceneDocument::from_candidates(image_ref(4, 3), &[c]);
        let json = doc.to_json();
        assert_eq!(
            json,
            "{\"version\":\"leafsieve/1\",\"image\":{\"path\":\"img.png\",\"width\":4,\"height\":3},\
             \"masks\":[{\"id\":\"all\",\"rle\":{\"counts\":[0,12],\"width\":4,\"height\":3},\"score\":0.9,\"source\":\"test\"}]}\n"
        );
        let back = SceneDocument::from_json(&json).unwrap();
        let cands = back.candidates().unwrap();
        assert_eq!(cands[0].mask().area(), 12);
        assert_eq!(back.to_json(), json);
    }

    #[test]
    fn invalid_scenes_name_the_mask() {
        let bad_rle = MaskRecord {
            id: "m7".into(),
            rle: RleMask {
                counts: vec![3, 4],
                width: 4,
                height: 3,
            },
            score: None,
            source: String::new(),
        };
        let doc = SceneDocument::new(image_ref(4, 3), vec![bad_rle]);
        match doc.validate() {
            Err(Error::SceneRleInvalid { id, .. }) => assert_eq!(id, "m7"),
            other => panic!("{other:?}"),
        }

        let ok = MaskRecord {
            id: "a".into(),
            rle: RleMask {
                counts: vec![0, 12],
                width: 4,
                height: 3,
            },
            score: None,
            source: String::new(),
        };
        let doc = SceneDocument::new(image_ref(4, 3), vec![ok.clone(), ok.clone()]);
        assert!(matches!(doc.validate(), Err(Error::DuplicateId { id }) if id == "a"));

        let doc = SceneDocument::new(image_ref(3, 4), vec![ok.clone()]);
        assert!(matches!(doc.validate(), Err(Error::SceneDimensionMismatch { id, .. }) if id == "a"));

        let mut doc = SceneDocument::new(image_ref(4, 3), vec![ok]);
        doc.version = "leafsieve/0".into();
        assert!(matches!(doc.validate(), Err(Error::UnsupportedVersion(_))));

        let empty = MaskRecord {
            id: "e".into(),
            rle: RleMask {
                counts: vec![12],
                width: 4,
                height: 3,
            },
            score: None,
            source: String::new(),
        };
        let doc = SceneDocument::new(image_ref(4, 3), vec![empty]);
        assert!(matches!(doc.candidates(), Err(Error::EmptyCandidate { .. })));
    }

    #[test]
    fn unknown_fields_rejected() {
        let s = r#"{"version":"leafsieve/1","image":{"path":"a","width":1,"height":1},"masks":[],"extra":1}"#;
        assert!(SceneDocument::from_json(s).is_err());
    }

    #[test]
    fn labelme_rectangle_and_skips() {
        let doc: LabelmeDocument = serde_json::from_str(
            r#"{"imageHeight": 10, "imageWidth": 12, "imagePath": "p.png", "shapes": [
                {"label": "leaf", "shape_type": "polygon", "points": [[0,0],[4,0],[4,5],[0,5]]},
                {"label": "pt", "shape_type": "point", "points": [[1,1]]},
                {"label": "leaf", "points": [[6,6],[9,6],[9,9]]}
            ]}"#,
        )
        .unwrap();
        let out = doc.rasterize().unwrap();
        assert_eq!(out.masks.len(), 2);
        assert_eq!(out.skipped, 1);
        assert_eq!(out.masks[0].1.area(), 20);
        assert_eq!(out.image_path.as_deref(), Some("p.png"));
    }

    #[test]
    fn labelme_short_polygon_rejected() {
        let doc: LabelmeDocument = serde_json::from_str(
            r#"{"imageHeight": 5, "imageWidth": 5, "shapes": [{"label": "x", "points": [[0,0],[1,1]]}]}"#,
        )
        .unwrap();
        assert!(matches!(doc.rasterize(), Err(Error::InvalidShape { .. })));
    }

    #[test]
    fn measurements_csv() {
        let csv = "plant_id,leaf_area_cm2,leaf_count,fresh_mass_g,dry_mass_g\np1,120.5,8,30.1,2.5\np2,98,6,22,1.9\n";
        let recs = read_measurements(csv.as_bytes(), Path::new("m.csv")).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[1].plant_id, "p2");
        assert_eq!(recs[0].pixels_manual, None);

        let bad = "plant_id,leaf_area_cm2,leaf_count,fresh_mass_g,dry_mass_g\np1,1,1,1,1\np2,1,1,1,-0.5\n";
        match read_measurements(bad.as_bytes(), Path::new("m.csv")) {
            Err(Error::MalformedRow { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let garbage = "plant_id,leaf_area_cm2,leaf_count,fresh_mass_g,dry_mass_g\np1,abc,1,1,1\n";
        assert!(matches!(
            read_measurements(garbage.as_bytes(), Path::new("m.csv")),
            Err(Error::MalformedRow { line: 2, .. })
        ));
    }
}
