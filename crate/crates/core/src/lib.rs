//! Post-processing and evaluation toolkit for zero-shot leaf segmentation.
//!
//! Candidate masks from an automatic segmenter are reduced to leaves by four
//! filter stages ([`filter`]), and segmentations are scored against polygon
//! ground truth ([`eval`]). Masks are dense bitsets ([`mask::Bitmask`]) with a
//! row-major RLE form used only at file boundaries ([`io`]).

pub mod color;
pub mod error;
pub mod eval;
pub mod filter;
pub mod geometry;
pub mod io;
pub mod mask;
pub mod synth;

pub use color::{mask_hsv_stats, rgb_to_hsv, HsvStats, RgbImage};
pub use error::{Error, Result};
pub use eval::{EvalCounts, EvalResult, MeasurementRecord, ThresholdSet};
pub use filter::{run_pipeline, CandidateMask, FilterConfig, FilterReport, Stage, StageSet};
pub use geometry::{min_enclosing_circle, shape_ratio, Circle, Point};
pub use io::SceneDocument;
pub use mask::{Bitmask, CoverageMap, MaskBuilder, Polygon, RleMask};
