use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::marker::PhantomData;

use serde::{Deserialize, Serialize};

use crate::annotation::Sign;
use crate::image_grid::Image;
use crate::mask::BinaryMask;
use crate::scalar::Scalar;

use super::{check_request, PredictError, PredictRequest, Predictor};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicParams {
    /// Weight of the intensity difference in the step cost.
    pub beta: f64,
    /// With no negative input, treat the image border as negative seeds.
    pub implicit_border_negatives: bool,
    /// Keep the border negatives once explicit negatives exist. Without this
    /// the first negative click releases the whole border and the positive
    /// seeds flood the background.
    pub keep_border_negatives: bool,
}

impl Default for GeodesicParams {
    fn default() -> Self {
        Self {
            beta: 8.0,
            implicit_border_negatives: true,
            keep_border_negatives: true,
        }
    }
}

/// Nearest-seed segmentation under an intensity-weighted grid metric.
#[derive(Debug, Clone, Default)]
pub struct GeodesicPredictor<T> {
    pub params: GeodesicParams,
    _scalar: PhantomData<T>,
}

impl<T: Scalar> GeodesicPredictor<T> {
    pub fn new(params: GeodesicParams) -> Self {
        Self {
            params,
            _scalar: PhantomData,
        }
    }
}

impl<T: Scalar> Predictor for GeodesicPredictor<T> {
    fn id(&self) -> String {
        if self.params.beta == GeodesicParams::default().beta {
            "geodesic".into()
        } else {
            format!("geodesic:{}", self.params.beta)
        }
    }

    fn predict(&self, req: &PredictRequest<'_>) -> Result<BinaryMask, PredictError> {
        check_request(req)?;
        Ok(geodesic_predict::<T>(req, &self.params))
    }
}

#[derive(Clone, Copy)]
struct Entry<T> {
    dist: T,
    idx: usize,
}

impl<T: Scalar> PartialEq for Entry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Entry<T> {}

impl<T: Scalar> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Entry<T> {
    // Reversed so BinaryHeap pops the smallest distance, then smallest index.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

/// Multi-source shortest paths over the 4-neighbour grid with step cost
/// `1 + beta · contrast`.
pub fn geodesic_distances<T: Scalar>(image: &Image, seeds: &[bool], beta: f64) -> Vec<T> {
    let (w, h) = image.dims();
    let beta = T::from_f64_lossy(beta);
    let mut dist = vec![T::infinity(); w * h];
    let mut heap = BinaryHeap::new();
    for (i, &s) in seeds.iter().enumerate() {
        if s {
            dist[i] = T::zero();
            heap.push(Entry { dist: T::zero(), idx: i });
        }
    }
    while let Some(Entry { dist: d, idx }) = heap.pop() {
        if d > dist[idx] {
            continue;
        }
        let (x, y) = (idx % w, idx / w);
        let mut relax = |j: usize| {
            let step = T::one() + beta * T::from_f64_lossy(image.contrast(idx, j));
            let nd = d + step;
            if nd < dist[j] {
                dist[j] = nd;
                heap.push(Entry { dist: nd, idx: j });
            }
        };
        if x > 0 {
            relax(idx - 1);
        }
        if x + 1 < w {
            relax(idx + 1);
        }
        if y > 0 {
            relax(idx - w);
        }
        if y + 1 < h {
            relax(idx + w);
        }
    }
    dist
}

/// Labels a pixel foreground iff it is strictly closer to a positive seed
/// than to a negative one. Annotation order does not matter.
pub fn geodesic_predict<T: Scalar>(req: &PredictRequest<'_>, params: &GeodesicParams) -> BinaryMask {
    let (w, h) = req.image.dims();
    let mut pos = vec![false; w * h];
    let mut neg = vec![false; w * h];
    for a in req.annotations {
        let seeds = match a.sign {
            Sign::Positive => &mut pos,
            Sign::Negative => &mut neg,
        };
        for p in a.pixels() {
            seeds[p.y * w + p.x] = true;
        }
    }
    if !pos.iter().any(|&b| b) {
        return BinaryMask::new(w, h);
    }
    let has_neg = neg.iter().any(|&b| b);
    if params.implicit_border_negatives && (!has_neg || params.keep_border_negatives) {
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                if (x == 0 || y == 0 || x + 1 == w || y + 1 == h) && !pos[i] {
                    neg[i] = true;
                }
            }
        }
    }
    let dpos = geodesic_distances::<T>(req.image, &pos, params.beta);
    let dneg = geodesic_distances::<T>(req.image, &neg, params.beta);
    let data = dpos.iter().zip(&dneg).map(|(p, n)| p < n).collect();
    BinaryMask::from_vec(w, h, data).expect("dimensions match image")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::Annotation;
    use crate::geom::Point;

    fn run(img: &Image, ann: &[Annotation]) -> BinaryMask {
        run_with(img, ann, GeodesicParams::default())
    }

    fn run_with(img: &Image, ann: &[Annotation], params: GeodesicParams) -> BinaryMask {
        geodesic_predict::<f64>(
            &PredictRequest {
                image: img,
                annotations: ann,
                prev_mask: None,
            },
            &params,
        )
    }

    #[test]
    fn no_annotations_is_empty() {
        let img = Image::from_fn_gray(8, 8, |_, _| 100);
        assert!(run(&img, &[]).is_empty());
        let neg_only = [Annotation::click(Sign::Negative, Point::new(3, 3))];
        assert!(run(&img, &neg_only).is_empty());
    }

    #[test]
    fn uniform_image_diamond() {
        let img = Image::from_fn_gray(21, 21, |_, _| 90);
        let m = run(&img, &[Annotation::click(Sign::Positive, Point::new(10, 10))]);
        // Oracle: on a uniform grid the geodesic metric is the L1 metric.
        for y in 0..21usize {
            for x in 0..21usize {
                let to_click = x.abs_diff(10) + y.abs_diff(10);
                let to_border = x.min(y).min(20 - x).min(20 - y);
                assert_eq!(m.get(x, y), to_click < to_border, "({x},{y})");
            }
        }
    }

    #[test]
    fn two_intensity_boundary() {
        let img = Image::from_fn_gray(40, 20, |x, _| if x < 20 { 30 } else { 220 });
        let ann = [
            Annotation::click(Sign::Positive, Point::new(10, 10)),
            Annotation::click(Sign::Negative, Point::new(30, 10)),
        ];
        let released = GeodesicParams {
            keep_border_negatives: false,
            ..GeodesicParams::default()
        };
        let m = run_with(&img, &ann, released);
        for y in 0..20 {
            for x in 0..40 {
                assert_eq!(m.get(x, y), x < 20);
            }
        }
        let kept = run(&img, &ann);
        assert!(kept.get(10, 10) && !kept.get(0, 10) && !kept.get(10, 0));
        assert!((20..40).all(|x| !kept.get(x, 10)));
    }

    #[test]
    fn border_click_stays_positive() {
        let img = Image::from_fn_gray(10, 10, |_, _| 0);
        let m = run(&img, &[Annotation::click(Sign::Positive, Point::new(0, 4))]);
        assert!(m.get(0, 4));
    }

    #[test]
    fn conflicting_seed_resolves_to_background() {
        let img = Image::from_fn_gray(10, 10, |_, _| 0);
        let p = Point::new(5, 5);
        let m = run(
            &img,
            &[Annotation::click(Sign::Positive, p), Annotation::click(Sign::Negative, p)],
        );
        assert!(!m.get(5, 5));
    }
}
