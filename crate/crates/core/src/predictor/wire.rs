//! JSON wire format shared by the subprocess and HTTP transports.
//!
//! Request: `{"width", "height", "image_b64", "annotations", "prev_mask_rle"?}`
//! with the image as base64 PNG. Response: `{"mask_rle": [...]}` in the
//! format of [`crate::rle`].

use base64::Engine;
use serde::{Deserialize, Serialize};

use crate::annotation::Annotation;
use crate::mask::BinaryMask;
use crate::rle;

use super::{PredictError, PredictRequest};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireRequest {
    pub width: usize,
    pub height: usize,
    pub image_b64: String,
    pub annotations: Vec<Annotation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prev_mask_rle: Option<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireResponse {
    pub mask_rle: Vec<u32>,
}

impl WireRequest {
    pub fn from_request(req: &PredictRequest<'_>) -> Result<Self, PredictError> {
        let png = req
            .image
            .to_png_bytes()
            .map_err(|e| PredictError::InvalidRequest(e.to_string()))?;
        Ok(Self {
            width: req.image.width(),
            height: req.image.height(),
            image_b64: base64::engine::general_purpose::STANDARD.encode(png),
            annotations: req.annotations.to_vec(),
            prev_mask_rle: req.prev_mask.map(rle::encode),
        })
    }

    pub fn decode_image(&self) -> crate::Result<crate::Image> {
        let bytes = base64::engine::general_purpose::STANDARD
            .decode(&self.image_b64)
            .map_err(|e| crate::Error::InvalidGrid(format!("bad base64 image: {e}")))?;
        crate::Image::from_png_bytes(&bytes)
    }
}

impl WireResponse {
    pub fn from_mask(mask: &BinaryMask) -> Self {
        Self {
            mask_rle: rle::encode(mask),
        }
    }
}

/// Server side of the protocol: decodes `req`, runs `predictor` and encodes
/// the mask.
pub fn handle_request<P: super::Predictor + ?Sized>(
    req: &WireRequest,
    predictor: &P,
) -> Result<WireResponse, PredictError> {
    let image = req
        .decode_image()
        .map_err(|e| PredictError::InvalidRequest(e.to_string()))?;
    if image.dims() != (req.width, req.height) {
        return Err(PredictError::InvalidRequest(format!(
            "image is {}x{}, request says {}x{}",
            image.width(),
            image.height(),
            req.width,
            req.height
        )));
    }
    let prev = match &req.prev_mask_rle {
        Some(runs) => Some(
            rle::decode(runs, req.width, req.height)
                .map_err(|e| PredictError::InvalidRequest(e.to_string()))?,
        ),
        None => None,
    };
    let mask = predictor.predict(&PredictRequest {
        image: &image,
        annotations: &req.annotations,
        prev_mask: prev.as_ref(),
    })?;
    Ok(WireResponse::from_mask(&mask))
}

/// Parses one response body and checks it covers exactly `width × height`.
pub fn decode_response(body: &str, width: usize, height: usize) -> Result<BinaryMask, PredictError> {
    let resp: WireResponse =
        serde_json::from_str(body.trim()).map_err(|e| PredictError::Malformed(e.to_string()))?;
    rle::decode(&resp.mask_rle, width, height).map_err(|e| PredictError::DimensionMismatch {
        width,
        height,
        detail: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::Sign;
    use crate::geom::Point;
    use crate::image_grid::Image;

    #[test]
    fn request_shape() {
        let img = Image::from_fn_gray(3, 2, |x, _| x as u8);
        let ann = [Annotation::click(Sign::Positive, Point::new(1, 1))];
        let req = PredictRequest {
            image: &img,
            annotations: &ann,
            prev_mask: None,
        };
        let w = WireRequest::from_request(&req).unwrap();
        let v: serde_json::Value = serde_json::to_value(&w).unwrap();
        assert_eq!(v["width"], 3);
        assert_eq!(v["annotations"][0]["sign"], "pos");
        assert!(v.get("prev_mask_rle").is_none());
        assert_eq!(w.decode_image().unwrap(), img);
    }

    #[test]
    fn response_errors_are_distinct() {
        assert!(matches!(decode_response("nope", 2, 2), Err(PredictError::Malformed(_))));
        assert!(matches!(
            decode_response(r#"{"mask_rle":[3]}"#, 2, 2),
            Err(PredictError::DimensionMismatch { .. })
        ));
        let m = decode_response(r#"{"mask_rle":[1,2,1]}"#, 2, 2).unwrap();
        assert_eq!(m.data(), &[false, true, true, false]);
    }

    #[test]
    fn server_side_matches_direct_call() {
        let img = Image::from_fn_gray(16, 16, |x, _| if x < 8 { 30 } else { 220 });
        let ann = [Annotation::click(Sign::Positive, Point::new(12, 8))];
        let req = PredictRequest {
            image: &img,
            annotations: &ann,
            prev_mask: None,
        };
        let p = crate::predictor::GeodesicPredictor::<f64>::default();
        let direct = crate::predictor::Predictor::predict(&p, &req).unwrap();
        let wire = WireRequest::from_request(&req).unwrap();
        let resp = handle_request(&wire, &p).unwrap();
        assert_eq!(rle::decode(&resp.mask_rle, 16, 16).unwrap(), direct);
        let bad = WireRequest { width: 5, ..wire };
        assert!(matches!(handle_request(&bad, &p), Err(PredictError::InvalidRequest(_))));
    }
}
