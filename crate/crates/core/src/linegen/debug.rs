use image::{Rgb, RgbImage};

use crate::scalar::Scalar;

use super::target::TargetCrop;
use super::weight::WeightMap;
use crate::geom::Point;

/// Sidecar visualization of one line selection: target in green (brightness
/// follows the weight), opposite class in red, the chosen chord in white with
/// its target run in yellow.
pub fn render_debug<T: Scalar>(crop: &TargetCrop, weights: &WeightMap<T>, line: &[Point]) -> RgbImage {
    let side = crop.side() as u32;
    let mut img = RgbImage::from_fn(side, side, |u, v| {
        let (u, v) = (u as usize, v as usize);
        let w = weights.get(u, v).to_f64_lossy();
        if w > 0.0 {
            Rgb([0, (80.0 + 175.0 * w) as u8, 0])
        } else if w < 0.0 {
            Rgb([200, 0, 0])
        } else if crop.same_class.get(u, v) {
            Rgb([40, 40, 40])
        } else {
            Rgb([0, 0, 0])
        }
    });
    for p in line {
        let c = if crop.target.get(p.x, p.y) {
            Rgb([255, 255, 0])
        } else {
            Rgb([255, 255, 255])
        };
        img.put_pixel(p.x as u32, p.y as u32, c);
    }
    img
}
