//! The segmentation model boundary.
//!
//! [`Predictor`] turns an image plus the ordered annotation list into a
//! binary mask. The crate ships a deterministic seeded geodesic segmenter and
//! two external transports (subprocess JSON lines, HTTP) speaking the same
//! wire format.

mod external;
mod geodesic;
pub mod wire;

pub use external::{HttpPredictor, SubprocessPredictor};
pub use geodesic::{geodesic_predict, GeodesicParams, GeodesicPredictor};

use thiserror::Error;

use crate::annotation::Annotation;
use crate::image_grid::Image;
use crate::mask::{BinaryMask, LabelMask};

#[derive(Debug, Clone, Copy)]
pub struct PredictRequest<'a> {
    pub image: &'a Image,
    pub annotations: &'a [Annotation],
    pub prev_mask: Option<&'a BinaryMask>,
}

#[derive(Debug, Error)]
pub enum PredictError {
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("malformed response: {0}")]
    Malformed(String),
    #[error("response mask does not match the {width}x{height} image: {detail}")]
    DimensionMismatch {
        width: usize,
        height: usize,
        detail: String,
    },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

pub trait Predictor: Send + Sync {
    /// Short identifier recorded in reports.
    fn id(&self) -> String;

    fn predict(&self, req: &PredictRequest<'_>) -> Result<BinaryMask, PredictError>;
}

impl<P: Predictor + ?Sized> Predictor for Box<P> {
    fn id(&self) -> String {
        (**self).id()
    }

    fn predict(&self, req: &PredictRequest<'_>) -> Result<BinaryMask, PredictError> {
        (**self).predict(req)
    }
}

impl<P: Predictor + ?Sized> Predictor for std::sync::Arc<P> {
    fn id(&self) -> String {
        (**self).id()
    }

    fn predict(&self, req: &PredictRequest<'_>) -> Result<BinaryMask, PredictError> {
        (**self).predict(req)
    }
}

/// Returns the ground-truth foreground regardless of input. Useful as an
/// upper bound and for harness checks.
#[derive(Debug, Clone)]
pub struct OraclePredictor {
    pub gt: LabelMask,
}

impl Predictor for OraclePredictor {
    fn id(&self) -> String {
        "oracle".into()
    }

    fn predict(&self, _req: &PredictRequest<'_>) -> Result<BinaryMask, PredictError> {
        Ok(self.gt.foreground())
    }
}

pub(crate) fn check_request(req: &PredictRequest<'_>) -> Result<(), PredictError> {
    let (w, h) = req.image.dims();
    for a in req.annotations {
        a.validate(w, h)
            .map_err(|e| PredictError::InvalidRequest(e.to_string()))?;
    }
    if let Some(m) = req.prev_mask {
        if m.dims() != (w, h) {
            return Err(PredictError::InvalidRequest(format!(
                "previous mask is {}x{}, image is {w}x{h}",
                m.width(),
                m.height()
            )));
        }
    }
    Ok(())
}
