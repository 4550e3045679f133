//! Hough-style `(θ, ρ)` line candidates over the square crop canvas.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::raster::raster_line;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CandidateParams {
    /// Crop side `S`.
    pub side: usize,
    pub n_theta: usize,
    pub n_rho: usize,
}

impl Default for CandidateParams {
    fn default() -> Self {
        Self {
            side: 64,
            n_theta: 36,
            n_rho: 64,
        }
    }
}

impl CandidateParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_theta < 4 || self.n_rho < 3 || self.side < crate::crop::MIN_CROP_SIDE {
            return Err(Error::InvalidParam(format!(
                "candidate params need n_theta >= 4, n_rho >= 3, side >= 8 (got {self:?})"
            )));
        }
        Ok(())
    }

    /// Total candidate count `N = n_theta × n_rho`.
    pub fn count(&self) -> usize {
        self.n_theta * self.n_rho
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * PI / self.n_theta as f64
    }

    /// Offsets span `[-S√2/2, +S√2/2]` uniformly, endpoints included.
    pub fn rho(&self, l: usize) -> f64 {
        let r = self.max_rho();
        -r + l as f64 * 2.0 * r / (self.n_rho - 1) as f64
    }

    pub fn max_rho(&self) -> f64 {
        self.side as f64 * std::f64::consts::SQRT_2 / 2.0
    }

    /// `(angle index, offset index)` of candidate `i`.
    pub fn split_index(&self, i: usize) -> (usize, usize) {
        (i / self.n_rho, i % self.n_rho)
    }
}

/// The candidate stack: every `(θ, ρ)` chord rasterized on the `S×S` canvas.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    pub params: CandidateParams,
    /// Pixels of each chord in traversal order.
    pub lines: Vec<Vec<Point>>,
    /// Row-major flat indices of each chord, ascending.
    pub(crate) flat: Vec<Vec<u32>>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Flat pixel indices of candidate `i`, in ascending order.
    pub fn flat_indices(&self, i: usize) -> &[u32] {
        &self.flat[i]
    }

    /// A single-candidate set, mainly for tests and hand-built inputs.
    pub fn from_lines(params: CandidateParams, lines: Vec<Vec<Point>>) -> Self {
        let flat = lines.iter().map(|l| flatten(l, params.side)).collect();
        Self {
            params,
            lines,
            flat,
        }
    }
}

fn flatten(line: &[Point], side: usize) -> Vec<u32> {
    let mut v: Vec<u32> = line.iter().map(|p| (p.y * side + p.x) as u32).collect();
    v.sort_unstable();
    v
}

/// Rasterized chord of the line at direction `theta` and signed offset `rho`
/// from the canvas centre `(S/2, S/2)`, clipped to the canvas.
///
/// `theta` is the direction angle, so `theta = 0` is horizontal; the line is
/// the set of `p` with `n·(p − c) = rho` for normal `n = (−sin θ, cos θ)`.
pub fn chord(theta: f64, rho: f64, side: usize) -> Vec<Point> {
    const EPS: f64 = 1e-12;
    let c = side as f64 / 2.0;
    let hi = (side - 1) as f64;
    let (sin, cos) = theta.sin_cos();
    let (dx, dy) = (cos, sin);
    let (bx, by) = (c - rho * sin, c + rho * cos);

    let mut t0 = f64::NEG_INFINITY;
    let mut t1 = f64::INFINITY;
    for (b, d) in [(bx, dx), (by, dy)] {
        if d.abs() < EPS {
            if b < -EPS || b > hi + EPS {
                return Vec::new();
            }
        } else {
            let (a, z) = ((0.0 - b) / d, (hi - b) / d);
            t0 = t0.max(a.min(z));
            t1 = t1.min(a.max(z));
        }
    }
    if t0 > t1 + EPS {
        return Vec::new();
    }
    let snap = |v: f64| v.round().clamp(0.0, hi) as usize;
    let p0 = Point::new(snap(bx + t0 * dx), snap(by + t0 * dy));
    let p1 = Point::new(snap(bx + t1 * dx), snap(by + t1 * dy));
    raster_line(p0, p1)
}

pub fn gen_candidates(params: CandidateParams) -> Result<CandidateSet> {
    params.validate()?;
    let lines: Vec<Vec<Point>> = (0..params.count())
        .map(|i| {
            let (j, l) = params.split_index(i);
            chord(params.theta(j), params.rho(l), params.side)
        })
        .collect();
    Ok(CandidateSet::from_lines(params, lines))
}
