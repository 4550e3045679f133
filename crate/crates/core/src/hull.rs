//! Integer convex hull of pixel sets.

use crate::geom::Point;
use crate::mask::BinaryMask;

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Convex hull of the pixel centres, counter-clockwise in image coordinates
/// (y down), without collinear vertices. Andrew's monotone chain.
pub fn convex_hull(points: &[Point]) -> Vec<(i64, i64)> {
    let mut pts: Vec<(i64, i64)> = points.iter().map(|p| (p.x as i64, p.y as i64)).collect();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(pts.len() * 2);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(i64, i64)>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Pixels whose centres lie inside or on the convex hull of `mask`.
pub fn hull_mask(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = mask.dims();
    let pts: Vec<Point> = mask.points().collect();
    let hull = convex_hull(&pts);
    let mut out = BinaryMask::new(w, h);
    match hull.len() {
        0 => {}
        1 | 2 => {
            let a = Point::new(hull[0].0 as usize, hull[0].1 as usize);
            let b = Point::new(hull[hull.len() - 1].0 as usize, hull[hull.len() - 1].1 as usize);
            // Collinear set: every lattice point on the segment.
            for y in a.y.min(b.y)..=a.y.max(b.y) {
                for x in a.x.min(b.x)..=a.x.max(b.x) {
                    if cross(hull[0], hull[hull.len() - 1], (x as i64, y as i64)) == 0 {
                        out.set(x, y, true);
                    }
                }
            }
        }
        n => {
            let bbox = mask.bbox().expect("non-empty");
            for y in bbox.y0..=bbox.y1 {
                for x in bbox.x0..=bbox.x1 {
                    let p = (x as i64, y as i64);
                    if (0..n).all(|i| cross(hull[i], hull[(i + 1) % n], p) >= 0) {
                        out.set(x, y, true);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_hull() {
        let m = BinaryMask::from_fn(6, 6, |x, y| (1..4).contains(&x) && (1..4).contains(&y));
        assert_eq!(convex_hull(&m.points().collect::<Vec<_>>()).len(), 4);
        assert_eq!(hull_mask(&m), m);
    }

    #[test]
    fn u_shape_fills_gap() {
        let m = BinaryMask::from_fn(7, 5, |x, y| x == 0 || x == 6 || y == 4);
        let h = hull_mask(&m);
        assert_eq!(h.count(), 35);
    }

    #[test]
    fn collinear_and_single() {
        let m = BinaryMask::from_points(8, 8, [Point::new(1, 1), Point::new(5, 5)]);
        let h = hull_mask(&m);
        assert_eq!(h.count(), 5);
        assert!(h.get(3, 3));
        let one = BinaryMask::from_points(4, 4, [Point::new(2, 1)]);
        assert_eq!(hull_mask(&one), one);
    }
}
