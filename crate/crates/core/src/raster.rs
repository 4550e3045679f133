use crate::geom::Point;

/// 8-connected Bresenham segment from `p0` to `p1`, both inclusive.
///
/// The segment is always traced from the scan-order-smaller endpoint, so
/// swapping the endpoints yields exactly the reversed pixel list.
pub fn raster_line(p0: Point, p1: Point) -> Vec<Point> {
    if p1.scan_key() < p0.scan_key() {
        let mut v = trace(p1, p0);
        v.reverse();
        return v;
    }
    trace(p0, p1)
}

fn trace(p0: Point, p1: Point) -> Vec<Point> {
    let (mut x, mut y) = (p0.x as i64, p0.y as i64);
    let (x1, y1) = (p1.x as i64, p1.y as i64);
    let dx = (x1 - x).abs();
    let dy = -(y1 - y).abs();
    let sx = if x < x1 { 1 } else { -1 };
    let sy = if y < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    let mut out = Vec::with_capacity(dx.max(-dy) as usize + 1);
    loop {
        out.push(Point::new(x as usize, y as usize));
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn degenerate() {
        let p = Point::new(4, 2);
        assert_eq!(raster_line(p, p), vec![p]);
    }

    #[test]
    fn horizontal() {
        let l = raster_line(Point::new(0, 0), Point::new(3, 0));
        assert_eq!(l, (0..4).map(|x| Point::new(x, 0)).collect::<Vec<_>>());
    }

    #[test]
    fn diagonal() {
        let l = raster_line(Point::new(0, 0), Point::new(2, 2));
        assert_eq!(l, vec![Point::new(0, 0), Point::new(1, 1), Point::new(2, 2)]);
    }

    proptest! {
        #[test]
        fn count_connectivity_and_reversal(x0 in 0usize..40, y0 in 0usize..40, x1 in 0usize..40, y1 in 0usize..40) {
            let (a, b) = (Point::new(x0, y0), Point::new(x1, y1));
            let l = raster_line(a, b);
            let dx = x0.abs_diff(x1);
            let dy = y0.abs_diff(y1);
            prop_assert_eq!(l.len(), dx.max(dy) + 1);
            prop_assert_eq!(l[0], a);
            prop_assert_eq!(*l.last().unwrap(), b);
            for w in l.windows(2) {
                prop_assert!(w[0].x.abs_diff(w[1].x) <= 1 && w[0].y.abs_diff(w[1].y) <= 1);
                prop_assert_ne!(w[0], w[1]);
            }
            let mut rev = raster_line(b, a);
            rev.reverse();
            prop_assert_eq!(rev, l);
        }
    }
}
