//! Square crop windows around a bounding box.
//!
//! The window is the margin-expanded box, clamped to the image and padded
//! symmetrically on its shorter side to a square of side `L`, then resampled
//! to `S×S` by nearest neighbour. Mappings use integer arithmetic on pixel
//! centres so they are exact and platform independent.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{BBox, Point};

/// Smallest crop side accepted.
pub const MIN_CROP_SIDE: usize = 8;
/// Smallest source window (per axis) a degenerate bbox is grown to.
pub const MIN_WINDOW: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CropTransform {
    /// Source box after margin expansion and clamping.
    pub source: BBox,
    /// Padding added left/top/right/bottom to square the window.
    pub pad: [usize; 4],
    /// Top-left of the square window in source coordinates (may be negative).
    pub origin: (i64, i64),
    /// Window side in source pixels.
    pub window: usize,
    /// Crop side `S`.
    pub side: usize,
    pub image_width: usize,
    pub image_height: usize,
}

impl CropTransform {
    /// Source→crop scale factor, `S / L` (never above 1).
    pub fn scale(&self) -> f64 {
        self.side as f64 / self.window as f64
    }

    /// Source pixel sampled by crop pixel `(u, v)`. May fall outside the image
    /// when `(u, v)` lies in the padding.
    pub fn crop_to_source(&self, u: usize, v: usize) -> (i64, i64) {
        let l = self.window as i64;
        let s2 = 2 * self.side as i64;
        (
            self.origin.0 + (2 * u as i64 + 1) * l / s2,
            self.origin.1 + (2 * v as i64 + 1) * l / s2,
        )
    }

    /// [`crop_to_source`](Self::crop_to_source) clamped to the image bounds.
    pub fn crop_to_source_point(&self, u: usize, v: usize) -> Point {
        let (x, y) = self.crop_to_source(u, v);
        Point::new(
            x.clamp(0, self.image_width as i64 - 1) as usize,
            y.clamp(0, self.image_height as i64 - 1) as usize,
        )
    }

    /// Crop pixel containing source pixel `(x, y)`, if it lies in the window.
    pub fn source_to_crop(&self, x: i64, y: i64) -> Option<(usize, usize)> {
        let l2 = 2 * self.window as i64;
        let s = self.side as i64;
        let dx = x - self.origin.0;
        let dy = y - self.origin.1;
        if dx < 0 || dy < 0 {
            return None;
        }
        let u = (2 * dx + 1) * s / l2;
        let v = (2 * dy + 1) * s / l2;
        (u < s && v < s).then_some((u as usize, v as usize))
    }
}

/// Builds the crop window for `bbox` inside a `width×height` image.
///
/// The margin is `margin_frac` of the larger bbox side, at least one pixel
/// when `margin_frac > 0`. Windows narrower than [`MIN_WINDOW`] are grown
/// where the image allows. The window side is never below `side`, so the
/// crop only ever downsamples.
pub fn make_crop_transform(
    bbox: BBox,
    width: usize,
    height: usize,
    margin_frac: f64,
    side: usize,
) -> Result<CropTransform> {
    if !(0.0..1.0).contains(&margin_frac) {
        return Err(Error::InvalidParam(format!(
            "margin fraction {margin_frac} outside [0, 1)"
        )));
    }
    if side < MIN_CROP_SIDE {
        return Err(Error::InvalidParam(format!(
            "crop side {side} below {MIN_CROP_SIDE}"
        )));
    }
    if bbox.x1 >= width || bbox.y1 >= height {
        return Err(Error::OutOfBounds {
            x: bbox.x1 as i64,
            y: bbox.y1 as i64,
            width,
            height,
        });
    }
    let larger = bbox.width().max(bbox.height());
    let margin = if margin_frac > 0.0 {
        ((margin_frac * larger as f64).ceil() as usize).max(1)
    } else {
        0
    };
    let (x0, x1) = grow_axis(bbox.x0, bbox.x1, margin, width);
    let (y0, y1) = grow_axis(bbox.y0, bbox.y1, margin, height);
    let source = BBox::new(x0, y0, x1, y1);

    let window = source.width().max(source.height()).max(side);
    let pad_x = window - source.width();
    let pad_y = window - source.height();
    let pad = [pad_x / 2, pad_y / 2, pad_x - pad_x / 2, pad_y - pad_y / 2];
    Ok(CropTransform {
        source,
        pad,
        origin: (x0 as i64 - pad[0] as i64, y0 as i64 - pad[1] as i64),
        window,
        side,
        image_width: width,
        image_height: height,
    })
}

fn grow_axis(lo: usize, hi: usize, margin: usize, extent: usize) -> (usize, usize) {
    let mut lo = lo.saturating_sub(margin);
    let mut hi = (hi + margin).min(extent - 1);
    let mut toggle = false;
    while hi - lo + 1 < MIN_WINDOW && (lo > 0 || hi + 1 < extent) {
        if (toggle || hi + 1 >= extent) && lo > 0 {
            lo -= 1;
        } else {
            hi += 1;
        }
        toggle = !toggle;
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_bbox_no_margin_is_pure_scale() {
        let t = make_crop_transform(BBox::new(10, 20, 137, 147), 200, 200, 0.0, 64).unwrap();
        assert_eq!(t.pad, [0, 0, 0, 0]);
        assert_eq!(t.window, 128);
        assert_eq!(t.scale(), 0.5);
        assert_eq!(t.crop_to_source(0, 0), (11, 21));
        assert_eq!(t.crop_to_source(63, 63), (137, 147));
    }

    #[test]
    fn wide_bbox_padded_symmetrically() {
        // 40×10 box: 30 rows of padding, 15 above and 15 below.
        let t = make_crop_transform(BBox::new(50, 50, 89, 59), 200, 200, 0.0, 32).unwrap();
        assert_eq!(t.window, 40);
        assert_eq!(t.pad, [0, 15, 0, 15]);
        assert_eq!(t.origin, (50, 35));
    }

    #[test]
    fn centre_round_trip() {
        let b = BBox::new(17, 40, 80, 51);
        let t = make_crop_transform(b, 120, 100, 0.1, 16).unwrap();
        let (x, y) = t.crop_to_source(8, 8);
        let cx = (t.source.x0 + t.source.x1) as f64 / 2.0;
        let cy = (t.source.y0 + t.source.y1) as f64 / 2.0;
        let tol = t.window as f64 / t.side as f64;
        assert!((x as f64 - cx).abs() <= tol && (y as f64 - cy).abs() <= tol);
        let (u, v) = t.source_to_crop(x, y).unwrap();
        assert!(u.abs_diff(8) <= 1 && v.abs_diff(8) <= 1);
    }

    #[test]
    fn margin_and_degenerate_growth() {
        let t = make_crop_transform(BBox::new(5, 5, 5, 5), 20, 20, 0.0, 8).unwrap();
        assert_eq!(t.source.width(), 3);
        assert_eq!(t.source.height(), 3);
        let corner = make_crop_transform(BBox::new(0, 0, 0, 0), 20, 20, 0.0, 8).unwrap();
        assert_eq!(corner.source, BBox::new(0, 0, 2, 2));
        let m = make_crop_transform(BBox::new(10, 10, 29, 14), 100, 100, 0.1, 8).unwrap();
        assert_eq!(m.source, BBox::new(8, 8, 31, 16));
    }

    #[test]
    fn rejects_bad_params() {
        let b = BBox::new(0, 0, 4, 4);
        assert!(make_crop_transform(b, 10, 10, 1.0, 64).is_err());
        assert!(make_crop_transform(b, 10, 10, 0.1, 4).is_err());
        assert!(make_crop_transform(BBox::new(0, 0, 12, 4), 10, 10, 0.1, 64).is_err());
    }
}
