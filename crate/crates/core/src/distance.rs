//! Exact Euclidean distance transform.
//!
//! Linear-time separable algorithm (Meijster, Roerdink & Hesselink) in pure
//! integer arithmetic, so squared distances are exact and the final square
//! root is the only rounding step.

use crate::geom::Point;
use crate::mask::BinaryMask;
use crate::scalar::Scalar;

/// Per-pixel distance from each set pixel to the nearest unset pixel, with
/// everything outside the grid counted as unset. Unset pixels hold 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMap<T> {
    width: usize,
    height: usize,
    squared: Vec<u64>,
    values: Vec<T>,
}

impl<T: Scalar> DistanceMap<T> {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.values[y * self.width + x]
    }

    #[inline]
    pub fn squared(&self, x: usize, y: usize) -> u64 {
        self.squared[y * self.width + x]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn squared_values(&self) -> &[u64] {
        &self.squared
    }

    /// Largest value and the first pixel holding it in row-major order
    /// (smallest `(y, x)`). `None` when every value is zero.
    pub fn argmax(&self) -> Option<(Point, T)> {
        let mut best: Option<(usize, u64)> = None;
        for (i, &d) in self.squared.iter().enumerate() {
            if d > 0 && best.map_or(true, |(_, b)| d > b) {
                best = Some((i, d));
            }
        }
        best.map(|(i, _)| (Point::new(i % self.width, i / self.width), self.values[i]))
    }

    pub fn max(&self) -> T {
        self.argmax().map_or(T::zero(), |(_, v)| v)
    }
}

/// Exact Euclidean distance transform of `mask`.
pub fn distance_transform<T: Scalar>(mask: &BinaryMask) -> DistanceMap<T> {
    let (w, h) = mask.dims();
    // One-pixel unset frame so the image border acts as background.
    let pw = w + 2;
    let ph = h + 2;
    let inside = |x: usize, y: usize| x >= 1 && y >= 1 && x <= w && y <= h && mask.get(x - 1, y - 1);

    // Column pass: distance to the nearest unset pixel in the same column.
    let mut g = vec![0i64; pw * ph];
    for x in 0..pw {
        for y in 1..ph {
            if inside(x, y) {
                g[y * pw + x] = g[(y - 1) * pw + x] + 1;
            }
        }
        for y in (0..ph - 1).rev() {
            let below = g[(y + 1) * pw + x];
            if below < g[y * pw + x] {
                g[y * pw + x] = below + 1;
            }
        }
    }

    // Row pass: lower envelope of parabolas.
    let mut squared = vec![0u64; w * h];
    let mut s = vec![0usize; pw];
    let mut t = vec![0i64; pw];
    for y in 1..=h {
        let row = &g[y * pw..(y + 1) * pw];
        let f = |x: usize, i: usize| {
            let dx = x as i64 - i as i64;
            dx * dx + row[i] * row[i]
        };
        let sep = |i: usize, u: usize| {
            let (i_, u_) = (i as i64, u as i64);
            (u_ * u_ - i_ * i_ + row[u] * row[u] - row[i] * row[i]).div_euclid(2 * (u_ - i_))
        };
        let mut q: isize = 0;
        s[0] = 0;
        t[0] = 0;
        for u in 1..pw {
            while q >= 0 && f(t[q as usize] as usize, s[q as usize]) > f(t[q as usize] as usize, u) {
                q -= 1;
            }
            if q < 0 {
                q = 0;
                s[0] = u;
            } else {
                let next = 1 + sep(s[q as usize], u);
                if next < pw as i64 {
                    q += 1;
                    s[q as usize] = u;
                    t[q as usize] = next;
                }
            }
        }
        for u in (0..pw).rev() {
            if u >= 1 && u <= w {
                squared[(y - 1) * w + (u - 1)] = f(u, s[q as usize]) as u64;
            }
            if u as i64 == t[q as usize] {
                q -= 1;
            }
        }
    }

    let values = squared
        .iter()
        .map(|&d| T::from_u64(d).unwrap().sqrt())
        .collect();
    DistanceMap {
        width: w,
        height: h,
        squared,
        values,
    }
}
