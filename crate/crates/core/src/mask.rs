//! Binary and trinary raster masks.
//!
//! Both grids are stored row-major. On disk they are 8-bit grayscale images:
//! a binary mask writes 0/255, and a label mask reads 0 as background,
//! values of at least 200 as foreground and everything in between as ignore.

use std::path::Path;

use image::{GrayImage, Luma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{BBox, Point};
use crate::scalar::Scalar;

/// Gray level at or above which a ground-truth pixel counts as foreground.
pub const GT_FOREGROUND_MIN: u8 = 200;
/// Gray level at or above which a binary mask pixel counts as set.
pub const BINARY_THRESHOLD: u8 = 128;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width >= 1 && height >= 1, "mask must be at least 1x1");
        Self {
            width,
            height,
            data: vec![false; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidGrid(format!("empty {width}x{height} mask")));
        }
        if data.len() != width * height {
            return Err(Error::InvalidGrid(format!(
                "{} values for a {width}x{height} mask",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::new(width, height);
        for y in 0..height {
            for x in 0..width {
                m.data[y * width + x] = f(x, y);
            }
        }
        m
    }

    pub fn from_points(width: usize, height: usize, pts: impl IntoIterator<Item = Point>) -> Self {
        let mut m = Self::new(width, height);
        for p in pts {
            m.set(p.x, p.y, true);
        }
        m
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    /// Like [`get`](Self::get) but `false` for coordinates off the grid.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.get(x as usize, y as usize)
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.data[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x < self.width && p.y < self.height
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| Point::new(i % self.width, i / self.width))
    }

    /// Tight bounding box of the set pixels.
    pub fn bbox(&self) -> Option<BBox> {
        let mut it = self.points();
        let first = it.next()?;
        let mut b = BBox::from_point(first);
        for p in it {
            b.include(p);
        }
        Some(b)
    }

    pub fn and(&self, other: &BinaryMask) -> BinaryMask {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn zip_with(&self, other: &BinaryMask, f: impl Fn(bool, bool) -> bool) -> BinaryMask {
        assert_eq!(self.dims(), other.dims(), "mask dimensions differ");
        BinaryMask {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn to_gray(&self) -> GrayImage {
        GrayImage::from_fn(self.width as u32, self.height as u32, |x, y| {
            Luma([if self.get(x as usize, y as usize) { 255 } else { 0 }])
        })
    }

    pub fn from_gray(img: &GrayImage) -> Self {
        let (w, h) = img.dimensions();
        Self::from_fn(w as usize, h as usize, |x, y| {
            img.get_pixel(x as u32, y as u32)[0] >= BINARY_THRESHOLD
        })
    }

    pub fn read_png(path: impl AsRef<Path>) -> Result<Self> {
        Ok(Self::from_gray(&read_gray(path.as_ref())?))
    }

    pub fn write_png(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.to_gray().save(path).map_err(|source| Error::Codec {
            path: Some(path.to_path_buf()),
            source,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Background,
    Foreground,
    Ignore,
}

impl Label {
    pub fn from_gray(v: u8) -> Self {
        match v {
            0 => Label::Background,
            v if v >= GT_FOREGROUND_MIN => Label::Foreground,
            _ => Label::Ignore,
        }
    }

    pub fn to_gray(self) -> u8 {
        match self {
            Label::Background => 0,
            Label::Foreground => 255,
            Label::Ignore => 128,
        }
    }
}

/// Ground-truth grid with an ignore label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMask {
    width: usize,
    height: usize,
    data: Vec<Label>,
}

impl LabelMask {
    pub fn from_vec(width: usize, height: usize, data: Vec<Label>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(Error::InvalidGrid(format!(
                "{} labels for a {width}x{height} mask",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> Label) -> Self {
        assert!(width >= 1 && height >= 1, "mask must be at least 1x1");
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    /// Foreground where `mask` is set, background elsewhere; no ignore pixels.
    pub fn from_binary(mask: &BinaryMask) -> Self {
        Self::from_fn(mask.width(), mask.height(), |x, y| {
            if mask.get(x, y) {
                Label::Foreground
            } else {
                Label::Background
            }
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[Label] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Label {
        self.data[y * self.width + x]
    }

    pub fn foreground(&self) -> BinaryMask {
        self.select(Label::Foreground)
    }

    pub fn select(&self, label: Label) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&l| l == label).collect(),
        }
    }

    pub fn from_gray(img: &GrayImage) -> Self {
        let (w, h) = img.dimensions();
        Self::from_fn(w as usize, h as usize, |x, y| {
            Label::from_gray(img.get_pixel(x as u32, y as u32)[0])
        })
    }

    pub fn to_gray(&self) -> GrayImage {
        GrayImage::from_fn(self.width as u32, self.height as u32, |x, y| {
            Luma([self.get(x as usize, y as usize).to_gray()])
        })
    }

    pub fn read_png(path: impl AsRef<Path>) -> Result<Self> {
        Ok(Self::from_gray(&read_gray(path.as_ref())?))
    }

    /// Decodes an encoded mask image held in memory.
    pub fn from_png_bytes(bytes: &[u8]) -> Result<Self> {
        let img = image::load_from_memory(bytes).map_err(|source| Error::Codec { path: None, source })?;
        Ok(Self::from_gray(&img.to_luma8()))
    }

    pub fn write_png(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.to_gray().save(path).map_err(|source| Error::Codec {
            path: Some(path.to_path_buf()),
            source,
        })
    }
}

fn read_gray(path: &Path) -> Result<GrayImage> {
    let img = image::open(path).map_err(|source| Error::Codec {
        path: Some(path.to_path_buf()),
        source,
    })?;
    Ok(img.to_luma8())
}

/// Intersection over union of `pred` against the ground-truth foreground,
/// counting only non-ignore pixels. Two empty sets give 1.
pub fn iou<T: Scalar>(pred: &BinaryMask, gt: &LabelMask) -> Result<T> {
    if pred.dims() != gt.dims() {
        return Err(Error::DimensionMismatch {
            expected_w: gt.width(),
            expected_h: gt.height(),
            got_w: pred.width(),
            got_h: pred.height(),
        });
    }
    let mut inter = 0usize;
    let mut union = 0usize;
    for (&p, &l) in pred.data().iter().zip(gt.data()) {
        let fg = match l {
            Label::Ignore => continue,
            Label::Foreground => true,
            Label::Background => false,
        };
        inter += (p && fg) as usize;
        union += (p || fg) as usize;
    }
    if union == 0 {
        return Ok(T::one());
    }
    Ok(T::from_usize_exact(inter) / T::from_usize_exact(union))
}
