//! Line generation: turn a target region into a two-point line input.
//!
//! The target region is cropped onto a square canvas, a weight map rewards
//! pixels deep inside the target and penalizes pixels of the opposite class,
//! and the best of a fixed family of chords is picked by a single
//! matrix-vector product. The chord's longest run inside the target gives the
//! two endpoints.

mod candidates;
mod debug;
mod select;
mod target;
mod weight;

pub use candidates::{chord, gen_candidates, CandidateParams, CandidateSet};
pub use debug::render_debug;
pub use select::{extract_endpoints, score_candidate, select_line, Selection};
pub use target::{build_target_crop, TargetCrop, DEFAULT_MARGIN};
pub use weight::{build_weight_map, weights_from_masks, WeightError, WeightMap, DEFAULT_PENALTY};

use serde::{Deserialize, Serialize};

use crate::annotation::{Annotation, Sign};
use crate::geom::Point;
use crate::mask::LabelMask;
use crate::raster::raster_line;
use crate::region::Region;
use crate::scalar::Scalar;

/// Why a line could not be produced; the caller places a click instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fallback {
    EmptyTarget,
    NonPositiveScore,
    NoEndpoints,
    /// The segment drawn in source space cannot avoid the opposite class.
    CrossesOpposite,
    Budget,
}

#[derive(Debug, Clone)]
pub struct LineProposal<T> {
    pub annotation: Annotation,
    pub selection: Selection<T>,
    pub endpoints: (Point, Point),
    pub crop: TargetCrop,
    pub weights: WeightMap<T>,
}

#[derive(Debug, Clone)]
pub enum LineOutcome<T> {
    Line(Box<LineProposal<T>>),
    Fallback(Fallback),
}

/// Shared line-generation settings; the candidate set is built once.
#[derive(Debug, Clone)]
pub struct LineGenerator<T> {
    pub candidates: CandidateSet,
    pub penalty: T,
    pub margin: f64,
}

impl<T: Scalar> LineGenerator<T> {
    pub fn new(params: CandidateParams, penalty: T) -> crate::Result<Self> {
        Ok(Self {
            candidates: gen_candidates(params)?,
            penalty,
            margin: DEFAULT_MARGIN,
        })
    }

    pub fn params(&self) -> CandidateParams {
        self.candidates.params
    }

    /// Full pipeline: crop, weight, select, extract endpoints.
    pub fn line_for_region(&self, region: &Region, gt: &LabelMask, sign: Sign) -> LineOutcome<T> {
        let crop = match build_target_crop(region, gt, sign, self.margin, self.params().side) {
            Ok(c) => c,
            Err(e) => {
                log::warn!("target crop failed: {e}");
                return LineOutcome::Fallback(Fallback::EmptyTarget);
            }
        };
        let weights = match build_weight_map(&crop, self.penalty) {
            Ok(w) => w,
            Err(_) => return LineOutcome::Fallback(Fallback::EmptyTarget),
        };
        let selection = match select_line(&self.candidates, &weights) {
            Some(s) if s.score > T::zero() => s,
            _ => return LineOutcome::Fallback(Fallback::NonPositiveScore),
        };
        let Some(endpoints) = extract_endpoints(&self.candidates.lines[selection.index], &crop) else {
            return LineOutcome::Fallback(Fallback::NoEndpoints);
        };
        let Some(endpoints) = clip_to_allowed(endpoints, gt, sign) else {
            return LineOutcome::Fallback(Fallback::CrossesOpposite);
        };
        LineOutcome::Line(Box::new(LineProposal {
            annotation: Annotation::line(sign, endpoints.0, endpoints.1),
            selection,
            endpoints,
            crop,
            weights,
        }))
    }
}

const MAX_CLIP_ROUNDS: usize = 8;

/// Shrinks the segment until its source-space raster touches no pixel of the
/// opposite class. Resampling can put a crop-clean segment onto opposite
/// pixels along a staircase boundary; each round keeps the longest clean run
/// of the current raster and re-rasterizes between its ends.
pub fn clip_to_allowed(endpoints: (Point, Point), gt: &LabelMask, sign: Sign) -> Option<(Point, Point)> {
    let forbidden = sign.opposite_label();
    let (mut a, mut b) = endpoints;
    for _ in 0..MAX_CLIP_ROUNDS {
        let line = raster_line(a, b);
        let mut best: Option<(usize, usize)> = None;
        let mut start = None;
        for (i, p) in line.iter().enumerate() {
            let ok = gt.get(p.x, p.y) != forbidden;
            match (ok, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    if best.map_or(true, |(bs, be)| i - s > be - bs) {
                        best = Some((s, i));
                    }
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            if best.map_or(true, |(bs, be)| line.len() - s > be - bs) {
                best = Some((s, line.len()));
            }
        }
        let (s, e) = best?;
        if e - s == line.len() {
            return Some((a, b));
        }
        if e - s < 2 {
            return None;
        }
        (a, b) = (line[s], line[e - 1]);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::{BinaryMask, Label};
    use crate::region::connected_components;

    fn bar_gt() -> (LabelMask, Region) {
        let m = BinaryMask::from_fn(64, 64, |x, y| (12..52).contains(&x) && (30..34).contains(&y));
        let r = connected_components(&m).remove(0);
        (LabelMask::from_binary(&m), r)
    }

    #[test]
    fn horizontal_bar_gets_horizontal_line() {
        let (gt, r) = bar_gt();
        let gen = LineGenerator::<f64>::new(CandidateParams::default(), DEFAULT_PENALTY).unwrap();
        let LineOutcome::Line(p) = gen.line_for_region(&r, &gt, Sign::Positive) else {
            panic!("expected a line");
        };
        let (a, b) = p.endpoints;
        let (l, rr) = if a.x < b.x { (a, b) } else { (b, a) };
        assert!(l.x.abs_diff(12) <= 2 && rr.x.abs_diff(51) <= 2, "{l:?} {rr:?}");
        assert!((30..34).contains(&l.y) && (30..34).contains(&rr.y));
        let (score, _) = score_candidate(&gen.candidates, &p.weights, p.selection.index);
        assert_eq!(score, p.selection.score);
    }

    #[test]
    fn single_pixel_falls_back() {
        let m = BinaryMask::from_points(64, 64, [Point::new(20, 20)]);
        let r = connected_components(&m).remove(0);
        let gen = LineGenerator::<f64>::new(CandidateParams::default(), DEFAULT_PENALTY).unwrap();
        let out = gen.line_for_region(&r, &LabelMask::from_binary(&m), Sign::Positive);
        assert!(matches!(out, LineOutcome::Fallback(Fallback::NoEndpoints)));
    }

    #[test]
    fn surrounded_bar_avoids_opposite_class() {
        // Positive bar inside a ring of opposite class, same class beyond.
        let gt = LabelMask::from_fn(64, 64, |x, y| {
            let bar = (16..48).contains(&x) && (30..34).contains(&y);
            let ring = (13..51).contains(&x) && (27..37).contains(&y);
            if bar || !ring {
                Label::Foreground
            } else {
                Label::Background
            }
        });
        let m = BinaryMask::from_fn(64, 64, |x, y| (16..48).contains(&x) && (30..34).contains(&y));
        let r = connected_components(&m).remove(0);
        let gen = LineGenerator::<f64>::new(CandidateParams::default(), DEFAULT_PENALTY).unwrap();
        let LineOutcome::Line(p) = gen.line_for_region(&r, &gt, Sign::Positive) else {
            panic!("expected a line");
        };
        let drawn = p.annotation.pixels();
        assert!(drawn.len() >= 20);
        assert!(drawn.iter().all(|q| gt.get(q.x, q.y) == Label::Foreground));
        assert!(p.crop.penalized.is_empty());
    }

    #[test]
    fn clipping_removes_opposite_pixels() {
        // Foreground diagonal; a negative segment crossing it.
        let gt = LabelMask::from_binary(&BinaryMask::from_fn(20, 20, |x, y| x == y));
        let (a, b) = (Point::new(2, 0), Point::new(10, 13));
        assert!(raster_line(a, b).iter().any(|p| p.x == p.y));
        let (c, d) = clip_to_allowed((a, b), &gt, Sign::Negative).unwrap();
        let line = raster_line(c, d);
        assert!(line.len() >= 2);
        assert!(line.iter().all(|p| p.x != p.y));
        let clean = (Point::new(5, 0), Point::new(15, 0));
        assert_eq!(clip_to_allowed(clean, &gt, Sign::Negative), Some(clean));
        let blocked = (Point::new(0, 0), Point::new(1, 1));
        assert_eq!(clip_to_allowed(blocked, &gt, Sign::Negative), None);
    }
}
