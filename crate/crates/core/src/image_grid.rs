//! 8-bit grayscale or RGB pixel grids.

use std::io::Cursor;
use std::path::Path;

use image::{DynamicImage, GrayImage, ImageFormat, RgbImage};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

impl Image {
    pub fn gray(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        Self::with_channels(width, height, 1, data)
    }

    pub fn rgb(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        Self::with_channels(width, height, 3, data)
    }

    fn with_channels(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height * channels {
            return Err(Error::InvalidGrid(format!(
                "{} bytes for a {width}x{height}x{channels} image",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn from_fn_gray(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::gray(width, height, data).expect("consistent dimensions")
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

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Channel values of pixel `i` (row-major index).
    #[inline]
    pub fn pixel(&self, i: usize) -> &[u8] {
        &self.data[i * self.channels..(i + 1) * self.channels]
    }

    /// Mean absolute per-channel difference between pixels `a` and `b`,
    /// scaled to `[0, 1]`.
    #[inline]
    pub fn contrast(&self, a: usize, b: usize) -> f64 {
        let (pa, pb) = (self.pixel(a), self.pixel(b));
        let sum: u32 = pa
            .iter()
            .zip(pb)
            .map(|(&u, &v)| u.abs_diff(v) as u32)
            .sum();
        sum as f64 / (255.0 * self.channels as f64)
    }

    pub fn from_dynamic(img: DynamicImage) -> Self {
        if img.color().has_color() {
            let rgb = img.to_rgb8();
            let (w, h) = rgb.dimensions();
            Self::rgb(w as usize, h as usize, rgb.into_raw()).expect("rgb buffer")
        } else {
            let g = img.to_luma8();
            let (w, h) = g.dimensions();
            Self::gray(w as usize, h as usize, g.into_raw()).expect("gray buffer")
        }
    }

    pub fn to_dynamic(&self) -> DynamicImage {
        let (w, h) = (self.width as u32, self.height as u32);
        if self.channels == 1 {
            DynamicImage::ImageLuma8(GrayImage::from_raw(w, h, self.data.clone()).expect("gray buffer"))
        } else {
            DynamicImage::ImageRgb8(RgbImage::from_raw(w, h, self.data.clone()).expect("rgb buffer"))
        }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let img = image::open(path).map_err(|source| Error::Codec {
            path: Some(path.to_path_buf()),
            source,
        })?;
        Ok(Self::from_dynamic(img))
    }

    pub fn write_png(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.to_dynamic()
            .save_with_format(path, ImageFormat::Png)
            .map_err(|source| Error::Codec {
                path: Some(path.to_path_buf()),
                source,
            })
    }

    pub fn to_png_bytes(&self) -> Result<Vec<u8>> {
        let mut buf = Cursor::new(Vec::new());
        self.to_dynamic()
            .write_to(&mut buf, ImageFormat::Png)
            .map_err(|source| Error::Codec { path: None, source })?;
        Ok(buf.into_inner())
    }

    pub fn from_png_bytes(bytes: &[u8]) -> Result<Self> {
        let img = image::load_from_memory(bytes).map_err(|source| Error::Codec { path: None, source })?;
        Ok(Self::from_dynamic(img))
    }
}
