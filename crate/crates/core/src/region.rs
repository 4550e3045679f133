//! Connected regions and their shape statistics.

use std::collections::VecDeque;

use crate::geom::{BBox, Point};
use crate::mask::BinaryMask;
use crate::scalar::Scalar;

/// Exact integer sums of pixel coordinates, from which all moments derive.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MomentSums {
    pub n: i128,
    pub sx: i128,
    pub sy: i128,
    pub sxx: i128,
    pub syy: i128,
    pub sxy: i128,
}

impl MomentSums {
    pub fn add(&mut self, p: Point) {
        let (x, y) = (p.x as i128, p.y as i128);
        self.n += 1;
        self.sx += x;
        self.sy += y;
        self.sxx += x * x;
        self.syy += y * y;
        self.sxy += x * y;
    }

    /// `n²` times the covariance entries `(μ20, μ02, μ11)`, exact.
    pub fn scaled_covariance(&self) -> (i128, i128, i128) {
        (
            self.n * self.sxx - self.sx * self.sx,
            self.n * self.syy - self.sy * self.sy,
            self.n * self.sxy - self.sx * self.sy,
        )
    }
}

/// A 4-connected component of a binary mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    /// Pixels in row-major scan order.
    pub pixels: Vec<Point>,
    pub bbox: BBox,
    pub centroid: (f64, f64),
    /// Central second moments `(μ20, μ02, μ11)`, normalized by area.
    pub moments: (f64, f64, f64),
    sums: MomentSums,
}

impl Region {
    /// Builds a region from an arbitrary non-empty pixel set. Connectivity is
    /// not checked.
    pub fn from_pixels(mut pixels: Vec<Point>) -> Self {
        assert!(!pixels.is_empty(), "region needs at least one pixel");
        pixels.sort_by_key(Point::scan_key);
        pixels.dedup();
        let mut bbox = BBox::from_point(pixels[0]);
        let mut sums = MomentSums::default();
        for &p in &pixels {
            bbox.include(p);
            sums.add(p);
        }
        let n = sums.n as f64;
        let (a, c, b) = sums.scaled_covariance();
        let n2 = n * n;
        Self {
            centroid: (sums.sx as f64 / n, sums.sy as f64 / n),
            moments: (a as f64 / n2, c as f64 / n2, b as f64 / n2),
            pixels,
            bbox,
            sums,
        }
    }

    pub fn area(&self) -> usize {
        self.pixels.len()
    }

    pub fn sums(&self) -> &MomentSums {
        &self.sums
    }

    pub fn to_mask(&self, width: usize, height: usize) -> BinaryMask {
        BinaryMask::from_points(width, height, self.pixels.iter().copied())
    }

    /// Ordering used for region lists: larger first, then by bbox top-left in
    /// scan order, then by first pixel.
    fn order_key(&self) -> (std::cmp::Reverse<usize>, usize, usize, usize, usize) {
        let first = self.pixels[0];
        (
            std::cmp::Reverse(self.area()),
            self.bbox.y0,
            self.bbox.x0,
            first.y,
            first.x,
        )
    }
}

/// Partitions the set pixels of `mask` into 4-connected regions, sorted by
/// area descending with ties broken by bbox scan order.
pub fn connected_components(mask: &BinaryMask) -> Vec<Region> {
    let (w, h) = mask.dims();
    let mut seen = vec![false; w * h];
    let mut regions = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if seen[start] || !mask.data()[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut pixels = Vec::new();
        while let Some(i) = queue.pop_front() {
            let (x, y) = (i % w, i / w);
            pixels.push(Point::new(x, y));
            let mut visit = |j: usize| {
                if !seen[j] && mask.data()[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        regions.push(Region::from_pixels(pixels));
    }
    regions.sort_by_key(Region::order_key);
    regions
}

/// Second-moment elongation: `sqrt(λ1 / λ2)` of the coordinate covariance.
///
/// A single pixel gives 1; a collinear region of more than one pixel gives
/// `+∞`.
pub fn elongation<T: Scalar>(region: &Region) -> T {
    let sums = region.sums();
    if sums.n <= 1 {
        return T::one();
    }
    let (a, c, b) = sums.scaled_covariance();
    let det = a * c - b * b;
    if det <= 0 {
        return T::infinity();
    }
    // sqrt(λ1/λ2) = λ1 / sqrt(λ1·λ2) = λ1 / sqrt(det)
    let af = T::from_i128(a).unwrap();
    let cf = T::from_i128(c).unwrap();
    let bf = T::from_i128(b).unwrap();
    let two = T::one() + T::one();
    let half_diff = (af - cf) / two;
    let lambda1 = (af + cf) / two + (half_diff * half_diff + bf * bf).sqrt();
    let e = lambda1 / T::from_i128(det).unwrap().sqrt();
    e.max(T::one())
}
