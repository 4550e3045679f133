//! Interaction engine for click- and line-based interactive segmentation.
//!
//! A simulated user refines a segmentation round by round. Each round finds
//! the largest mislabeled region and answers it with either a click (placed
//! at the region's interior maximum) or, for elongated regions after the
//! first round, a line chosen from a fixed family of chords by one
//! weight-map product. A line costs two clicks. The [`eval`] module measures
//! the number of click-equivalents needed to reach IoU thresholds (NoC).
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`.

pub mod annotation;
pub mod crop;
pub mod distance;
pub mod error;
pub mod eval;
pub mod geom;
pub mod hull;
pub mod image_grid;
pub mod interaction;
pub mod linegen;
pub mod mask;
pub mod predictor;
pub mod raster;
pub mod region;
pub mod rle;
pub mod scalar;
pub mod session;

pub use annotation::{Annotation, Kind, Sign};
pub use crop::{make_crop_transform, CropTransform};
pub use distance::distance_transform;
pub use error::{Error, Result};
pub use geom::{BBox, Point};
pub use image_grid::Image;
pub use mask::{iou, BinaryMask, Label, LabelMask};
pub use raster::raster_line;
pub use region::{connected_components, elongation, Region};
pub use scalar::Scalar;

pub type DistanceMap = distance::DistanceMap<f64>;
pub type DistanceMap32 = distance::DistanceMap<f32>;
pub type WeightMap = linegen::WeightMap<f64>;
pub type WeightMap32 = linegen::WeightMap<f32>;
pub type Selection = linegen::Selection<f64>;
pub type LineGenerator = linegen::LineGenerator<f64>;
pub type LineGenerator32 = linegen::LineGenerator<f32>;
pub type LineOutcome = linegen::LineOutcome<f64>;
pub type GeodesicPredictor = predictor::GeodesicPredictor<f64>;
pub type GeodesicPredictor32 = predictor::GeodesicPredictor<f32>;
