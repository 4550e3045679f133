use crate::annotation::Sign;
use crate::crop::{make_crop_transform, CropTransform};
use crate::error::Result;
use crate::hull::hull_mask;
use crate::mask::{BinaryMask, LabelMask};
use crate::region::Region;

/// Crop margin as a fraction of the larger bbox side.
pub const DEFAULT_MARGIN: f64 = 0.1;

/// The target region and its class context, resampled onto the crop canvas.
#[derive(Debug, Clone)]
pub struct TargetCrop {
    /// Target map: the region itself.
    pub target: BinaryMask,
    /// Ground-truth pixels of the target's class.
    pub same_class: BinaryMask,
    /// Ground-truth pixels of the other class. Ignore pixels and padding are
    /// in neither.
    pub opposite_class: BinaryMask,
    /// Opposite-class pixels inside the convex hull of the target. Only these
    /// can split the part of a chord that becomes the drawn line, so only
    /// these are penalized.
    pub penalized: BinaryMask,
    pub transform: CropTransform,
}

impl TargetCrop {
    pub fn side(&self) -> usize {
        self.transform.side
    }
}

/// Nearest-neighbour crop of `region` (and the ground truth around it) onto an
/// `side×side` canvas.
pub fn build_target_crop(
    region: &Region,
    gt: &LabelMask,
    sign: Sign,
    margin_frac: f64,
    side: usize,
) -> Result<TargetCrop> {
    let (w, h) = gt.dims();
    let transform = make_crop_transform(region.bbox, w, h, margin_frac, side)?;
    let region_mask = region.to_mask(w, h);
    let (same, opposite) = (sign.label(), sign.opposite_label());

    let mut target = BinaryMask::new(side, side);
    let mut same_class = BinaryMask::new(side, side);
    let mut opposite_class = BinaryMask::new(side, side);
    for v in 0..side {
        for u in 0..side {
            let (x, y) = transform.crop_to_source(u, v);
            if x < 0 || y < 0 || x as usize >= w || y as usize >= h {
                continue;
            }
            let (x, y) = (x as usize, y as usize);
            let label = gt.get(x, y);
            let is_same = label == same;
            same_class.set(u, v, is_same);
            opposite_class.set(u, v, label == opposite);
            target.set(u, v, is_same && region_mask.get(x, y));
        }
    }
    let penalized = opposite_class.and(&hull_mask(&target));
    Ok(TargetCrop {
        penalized,
        target,
        same_class,
        opposite_class,
        transform,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;
    use crate::mask::Label;
    use crate::region::connected_components;

    #[test]
    fn whole_image_region_downsamples() {
        let m = BinaryMask::from_fn(32, 32, |_, _| true);
        let gt = LabelMask::from_binary(&m);
        let r = &connected_components(&m)[0];
        let c = build_target_crop(r, &gt, Sign::Positive, 0.0, 16).unwrap();
        assert_eq!(c.target.count(), 256);
        assert_eq!(c.same_class, c.target);
        assert!(c.opposite_class.is_empty());
    }

    #[test]
    fn bar_sits_in_middle_band() {
        // 40×10 bar in a 100×100 image, crop side 20 → scale 0.5, 15 rows of
        // source padding above and below; bar rows 45..55 land on crop rows 7..12.
        let m = BinaryMask::from_fn(100, 100, |x, y| (30..70).contains(&x) && (45..55).contains(&y));
        let gt = LabelMask::from_binary(&m);
        let r = &connected_components(&m)[0];
        let c = build_target_crop(r, &gt, Sign::Positive, 0.0, 20).unwrap();
        assert_eq!(c.transform.pad, [0, 15, 0, 15]);
        let rows: Vec<usize> = (0..20).filter(|&v| (0..20).any(|u| c.target.get(u, v))).collect();
        assert_eq!(rows, (7..12).collect::<Vec<_>>());
        assert!((0..20).all(|u| c.target.get(u, 10)));
        assert_eq!(c.target, c.target.and(&c.same_class));
        assert_eq!(c.opposite_class.count() + c.same_class.count(), 400);
        assert!(c.opposite_class.get(0, 0) && !c.same_class.get(0, 0));
    }

    #[test]
    fn ignore_in_neither_class() {
        let gt = LabelMask::from_fn(12, 12, |x, _| match x {
            0..=3 => Label::Ignore,
            4..=7 => Label::Foreground,
            _ => Label::Background,
        });
        let r = Region::from_pixels((0..12).flat_map(|y| (4..8).map(move |x| Point::new(x, y))).collect());
        let c = build_target_crop(&r, &gt, Sign::Negative, 0.0, 8).unwrap();
        assert!(c.penalized.is_empty());
        assert!(c.target.is_empty());
        assert_eq!(c.same_class.and(&c.opposite_class).count(), 0);
    }
}
