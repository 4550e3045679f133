//! Deterministic synthetic datasets: thin bars (elongated) and compact blobs.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image_grid::Image;
use crate::mask::{BinaryMask, LabelMask};
use crate::region::{connected_components, elongation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthKind {
    Bars,
    Blobs,
}

impl SynthKind {
    pub fn name(self) -> &'static str {
        match self {
            SynthKind::Bars => "bars",
            SynthKind::Blobs => "blobs",
        }
    }

    fn tag(self) -> u64 {
        match self {
            SynthKind::Bars => 1,
            SynthKind::Blobs => 2,
        }
    }
}

impl std::str::FromStr for SynthKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "bars" => Ok(SynthKind::Bars),
            "blobs" => Ok(SynthKind::Blobs),
            other => Err(format!("unknown synthetic kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// Image side in pixels.
    pub size: usize,
    /// Instances per kind.
    pub count: usize,
    pub seed: u64,
    pub kinds: Vec<SynthKind>,
    /// Foreground/background intensity gap, sampled per instance.
    pub contrast: (i32, i32),
    /// Per-pixel uniform noise amplitude inside the object.
    pub fg_noise: i32,
    /// Per-pixel uniform noise amplitude in the background.
    pub bg_noise: i32,
    /// Width of alternating appearance bands across the object, 0 for a
    /// homogeneous object.
    pub band_period: usize,
    /// Intensity step between neighbouring bands.
    pub band_step: i32,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            size: 96,
            count: 100,
            seed: 42,
            kinds: vec![SynthKind::Bars, SynthKind::Blobs],
            contrast: (50, 100),
            fg_noise: 8,
            bg_noise: 8,
            band_period: 0,
            band_step: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.size < 32 {
            return Err(Error::InvalidParam(format!("synthetic image side {} below 32", self.size)));
        }
        let (lo, hi) = self.contrast;
        if !(0 < lo && lo <= hi && hi <= 200) {
            return Err(Error::InvalidParam(format!("contrast range {lo}..{hi} outside 1..=200")));
        }
        if !(0..=64).contains(&self.fg_noise) || !(0..=64).contains(&self.bg_noise) {
            return Err(Error::InvalidParam("noise amplitude outside 0..=64".into()));
        }
        if !(0..=128).contains(&self.band_step) {
            return Err(Error::InvalidParam("band step outside 0..=128".into()));
        }
        Ok(())
    }
}

const MAX_ATTEMPTS: usize = 1000;

fn instance_rng(seed: u64, kind: SynthKind, index: usize) -> ChaCha8Rng {
    let mut s = seed ^ kind.tag().wrapping_mul(0x9E37_79B9_7F4A_7C15);
    s = s.wrapping_add((index as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9));
    ChaCha8Rng::seed_from_u64(s)
}

/// A shape plus the direction its appearance bands run across.
struct Shape {
    mask: BinaryMask,
    axis: f64,
}

fn bar_shape(rng: &mut ChaCha8Rng, size: usize) -> Shape {
    let width = rng.gen_range(3.0..=6.0f64);
    let aspect = rng.gen_range(6.0..=12.0f64);
    let length = (width * aspect).min(size as f64 * 0.8);
    let angle = rng.gen_range(0.0..std::f64::consts::PI);
    let (dx, dy) = (angle.cos(), angle.sin());
    let half_x = (length * dx.abs() + width * dy.abs()) / 2.0;
    let half_y = (length * dy.abs() + width * dx.abs()) / 2.0;
    let lo = 2.0;
    let hi = size as f64 - 3.0;
    let cx = rng.gen_range((lo + half_x).min(hi / 2.0)..=(hi - half_x).max(hi / 2.0));
    let cy = rng.gen_range((lo + half_y).min(hi / 2.0)..=(hi - half_y).max(hi / 2.0));
    let mask = BinaryMask::from_fn(size, size, |x, y| {
        let (px, py) = (x as f64 - cx, y as f64 - cy);
        let along = px * dx + py * dy;
        let across = -px * dy + py * dx;
        along.abs() <= length / 2.0 && across.abs() <= width / 2.0
    });
    Shape { mask, axis: angle }
}

fn blob_shape(rng: &mut ChaCha8Rng, size: usize) -> Shape {
    let n = rng.gen_range(1..=3);
    let c = size as f64 / 2.0;
    let ellipses: Vec<(f64, f64, f64, f64, f64)> = (0..n)
        .map(|_| {
            let a = rng.gen_range(8.0..=18.0f64);
            let b = a / rng.gen_range(1.0..=1.8f64);
            let phi = rng.gen_range(0.0..std::f64::consts::PI);
            let ox = c + rng.gen_range(-8.0..=8.0);
            let oy = c + rng.gen_range(-8.0..=8.0);
            (ox, oy, a, b, phi)
        })
        .collect();
    let mask = BinaryMask::from_fn(size, size, |x, y| {
        ellipses.iter().any(|&(ox, oy, a, b, phi)| {
            let (px, py) = (x as f64 - ox, y as f64 - oy);
            let u = px * phi.cos() + py * phi.sin();
            let v = -px * phi.sin() + py * phi.cos();
            (u / a).powi(2) + (v / b).powi(2) <= 1.0
        })
    });
    Shape {
        mask,
        axis: rng.gen_range(0.0..std::f64::consts::PI),
    }
}

fn acceptable(mask: &BinaryMask, kind: SynthKind) -> bool {
    let regions = connected_components(mask);
    if regions.len() != 1 {
        return false;
    }
    let e: f64 = elongation(&regions[0]);
    match kind {
        SynthKind::Bars => e >= 5.0,
        SynthKind::Blobs => e < 3.0,
    }
}

fn render(rng: &mut ChaCha8Rng, shape: &Shape, cfg: &SynthConfig) -> Image {
    let bg: i32 = rng.gen_range(20..=60);
    let contrast: i32 = rng.gen_range(cfg.contrast.0..=cfg.contrast.1);
    let fg = (bg + contrast).min(255 - cfg.band_step);
    let phase = rng.gen_range(0.0..=cfg.band_period.max(1) as f64);
    let (dx, dy) = (shape.axis.cos(), shape.axis.sin());
    let (w, h) = shape.mask.dims();
    Image::from_fn_gray(w, h, |x, y| {
        let v = if shape.mask.get(x, y) {
            let band = if cfg.band_period > 0 {
                let along = x as f64 * dx + y as f64 * dy + phase;
                (along / cfg.band_period as f64).floor() as i64
            } else {
                0
            };
            let lift = if band.rem_euclid(2) == 1 { cfg.band_step } else { 0 };
            fg + lift + rng.gen_range(-cfg.fg_noise..=cfg.fg_noise)
        } else {
            bg + rng.gen_range(-cfg.bg_noise..=cfg.bg_noise)
        };
        v.clamp(0, 255) as u8
    })
}

/// Generates one instance. Deterministic in `(cfg, kind, index)`.
pub fn synth_instance(cfg: &SynthConfig, kind: SynthKind, index: usize) -> Result<(Image, LabelMask)> {
    cfg.validate()?;
    let mut rng = instance_rng(cfg.seed, kind, index);
    for _ in 0..MAX_ATTEMPTS {
        let shape = match kind {
            SynthKind::Bars => bar_shape(&mut rng, cfg.size),
            SynthKind::Blobs => blob_shape(&mut rng, cfg.size),
        };
        if acceptable(&shape.mask, kind) {
            let image = render(&mut rng, &shape, cfg);
            return Ok((image, LabelMask::from_binary(&shape.mask)));
        }
    }
    Err(Error::InvalidParam(format!(
        "no acceptable {} shape after {MAX_ATTEMPTS} attempts",
        kind.name()
    )))
}

/// Writes `images/<kind>_<nnn>.png` and `masks/<kind>_<nnn>.png` under
/// `root`. Returns the stems written.
pub fn gen_synthetic(root: impl AsRef<Path>, cfg: &SynthConfig) -> Result<Vec<String>> {
    cfg.validate()?;
    let root = root.as_ref();
    let images = root.join("images");
    let masks = root.join("masks");
    for d in [&images, &masks] {
        std::fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
    }
    let mut stems = Vec::new();
    for &kind in &cfg.kinds {
        for i in 0..cfg.count {
            let (image, gt) = synth_instance(cfg, kind, i)?;
            let stem = format!("{}_{i:03}", kind.name());
            image.write_png(images.join(format!("{stem}.png")))?;
            gt.write_png(masks.join(format!("{stem}.png")))?;
            stems.push(stem);
        }
    }
    Ok(stems)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let cfg = |seed| SynthConfig {
            seed,
            ..Default::default()
        };
        let a = synth_instance(&cfg(7), SynthKind::Bars, 3).unwrap();
        let b = synth_instance(&cfg(7), SynthKind::Bars, 3).unwrap();
        assert_eq!(a, b);
        let c = synth_instance(&cfg(8), SynthKind::Bars, 3).unwrap();
        assert_ne!(a.1, c.1);
    }

    #[test]
    fn shapes_meet_their_elongation_bounds() {
        for i in 0..20 {
            for kind in [SynthKind::Bars, SynthKind::Blobs] {
                let (_, gt) = synth_instance(&SynthConfig::default(), kind, i).unwrap();
                let r = connected_components(&gt.foreground());
                assert_eq!(r.len(), 1);
                let e: f64 = elongation(&r[0]);
                match kind {
                    SynthKind::Bars => assert!(e >= 5.0, "bar {i}: {e}"),
                    SynthKind::Blobs => assert!(e < 3.0, "blob {i}: {e}"),
                }
            }
        }
    }

    #[test]
    fn writes_loadable_dataset() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = SynthConfig {
            count: 2,
            ..Default::default()
        };
        let stems = gen_synthetic(dir.path(), &cfg).unwrap();
        assert_eq!(stems, ["bars_000", "bars_001", "blobs_000", "blobs_001"]);
        let ds = crate::eval::Dataset::open(dir.path()).unwrap();
        assert_eq!(ds.instances.len(), 4);
        let (img, gt) = crate::eval::load_instance(&ds.instances[0]).unwrap();
        assert_eq!(img.dims(), (96, 96));
        assert_eq!(gt, synth_instance(&cfg, SynthKind::Bars, 0).unwrap().1);
    }
}
