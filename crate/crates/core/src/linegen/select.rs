use crate::geom::Point;
use crate::scalar::Scalar;

use super::candidates::CandidateSet;
use super::target::TargetCrop;
use super::weight::WeightMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection<T> {
    pub index: usize,
    pub score: T,
    /// Pixels of the winning candidate with positive weight, i.e. on the
    /// target.
    pub intersection: usize,
}

/// Score of candidate `i`: the dot product of its indicator row with the
/// flattened weights, accumulated in ascending pixel order.
pub fn score_candidate<T: Scalar>(cands: &CandidateSet, wm: &WeightMap<T>, i: usize) -> (T, usize) {
    let w = wm.as_slice();
    let mut score = T::zero();
    let mut hits = 0;
    for &idx in cands.flat_indices(i) {
        let v = w[idx as usize];
        score += v;
        hits += (v > T::zero()) as usize;
    }
    (score, hits)
}

/// Best candidate under the weight map. Ties go to the longer intersection
/// with the target, then to the lower index.
pub fn select_line<T: Scalar>(cands: &CandidateSet, wm: &WeightMap<T>) -> Option<Selection<T>> {
    assert_eq!(cands.params.side, wm.side(), "canvas sizes differ");
    let mut best: Option<Selection<T>> = None;
    for i in 0..cands.len() {
        let (score, intersection) = score_candidate(cands, wm, i);
        let better = match &best {
            None => true,
            Some(b) => score > b.score || (score == b.score && intersection > b.intersection),
        };
        if better {
            best = Some(Selection {
                index: i,
                score,
                intersection,
            });
        }
    }
    best
}

/// Longest contiguous run of `line` inside the target, mapped back to source
/// pixels. `None` when the run is shorter than two pixels.
pub fn extract_endpoints(line: &[Point], crop: &TargetCrop) -> Option<(Point, Point)> {
    let mut best: Option<(usize, usize)> = None;
    let mut start = None;
    let close = |s: usize, e: usize, best: &mut Option<(usize, usize)>| {
        if best.map_or(true, |(bs, be)| e - s > be - bs) {
            *best = Some((s, e));
        }
    };
    for (i, p) in line.iter().enumerate() {
        match (crop.target.get(p.x, p.y), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                close(s, i - 1, &mut best);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        close(s, line.len() - 1, &mut best);
    }
    let (s, e) = best?;
    if e == s {
        return None;
    }
    let (a, b) = (line[s], line[e]);
    Some((
        crop.transform.crop_to_source_point(a.x, a.y),
        crop.transform.crop_to_source_point(b.x, b.y),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crop::make_crop_transform;
    use crate::geom::BBox;
    use crate::linegen::candidates::{chord, CandidateParams};
    use crate::mask::BinaryMask;

    fn params(side: usize) -> CandidateParams {
        CandidateParams {
            side,
            n_theta: 4,
            n_rho: 3,
        }
    }

    fn crop_with(target: BinaryMask) -> TargetCrop {
        let side = target.width();
        let transform = make_crop_transform(BBox::new(10, 10, 10 + side - 1, 10 + side - 1), 100, 100, 0.0, side).unwrap();
        TargetCrop {
            same_class: target.clone(),
            opposite_class: BinaryMask::new(side, side),
            penalized: BinaryMask::new(side, side),
            target,
            transform,
        }
    }

    #[test]
    fn single_candidate() {
        let cands = CandidateSet::from_lines(params(8), vec![chord(0.0, 0.0, 8)]);
        let wm = WeightMap::from_raw(8, vec![0.5f64; 64], -1.0);
        let s = select_line(&cands, &wm).unwrap();
        assert_eq!(s.index, 0);
        assert_eq!(s.score, 4.0);
        assert_eq!(s.intersection, 8);
    }

    #[test]
    fn penalized_line_scores_m_times_k() {
        let cands = CandidateSet::from_lines(params(8), vec![chord(0.0, 0.0, 8)]);
        let wm = WeightMap::from_raw(8, vec![-100.0f64; 64], -100.0);
        assert_eq!(select_line(&cands, &wm).unwrap().score, -800.0);
    }

    #[test]
    fn ties_prefer_intersection_then_index() {
        let row = |y: usize, xs: std::ops::Range<usize>| xs.map(|x| Point::new(x, y)).collect::<Vec<_>>();
        let mut w = vec![0.0f64; 64];
        // Row 1: a single 1.0. Row 2: two 0.5s. Row 3: another single 1.0.
        w[8 + 3] = 1.0;
        w[16 + 2] = 0.5;
        w[16 + 5] = 0.5;
        w[24 + 6] = 1.0;
        let cands = CandidateSet::from_lines(params(8), vec![row(1, 0..8), row(2, 0..8), row(3, 0..8)]);
        let s = select_line(&cands, &WeightMap::from_raw(8, w.clone(), -1.0)).unwrap();
        assert_eq!((s.index, s.intersection), (1, 2));
        w[16 + 5] = 0.0;
        w[16 + 2] = 1.0;
        let s = select_line(&cands, &WeightMap::from_raw(8, w, -1.0)).unwrap();
        assert_eq!(s.index, 0);
    }

    #[test]
    fn endpoints_take_longest_run() {
        // Chord of 32 pixels; target covers [0,20) and [21,31) → runs of 20 and 10.
        let side = 32;
        let target = BinaryMask::from_fn(side, side, |x, y| y == 16 && x != 20 && x != 31);
        let crop = crop_with(target);
        let line = chord(0.0, 0.0, side);
        let (a, b) = extract_endpoints(&line, &crop).unwrap();
        let expect_a = crop.transform.crop_to_source_point(0, 16);
        let expect_b = crop.transform.crop_to_source_point(19, 16);
        assert_eq!((a, b), (expect_a, expect_b));
        assert_eq!((a, b), (Point::new(10, 26), Point::new(29, 26)));
    }

    #[test]
    fn endpoints_none_cases() {
        let side = 16;
        let crop = crop_with(BinaryMask::from_fn(side, side, |x, y| x == 3 && y == 3));
        assert!(extract_endpoints(&chord(0.0, 0.0, side), &crop).is_none());
        assert!(extract_endpoints(&chord(0.0, -5.0, side), &crop).is_none());
    }

    #[test]
    fn full_crop_maps_to_window_edges() {
        let side = 16;
        let crop = crop_with(BinaryMask::from_fn(side, side, |_, _| true));
        let (a, b) = extract_endpoints(&chord(0.0, 0.0, side), &crop).unwrap();
        assert_eq!(a.x, crop.transform.source.x0);
        assert_eq!(b.x, crop.transform.source.x1);
    }
}
