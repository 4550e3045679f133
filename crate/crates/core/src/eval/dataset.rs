use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::image_grid::Image;
use crate::mask::LabelMask;

const IMAGE_EXTENSIONS: [&str; 5] = ["png", "jpg", "jpeg", "bmp", "tif"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceRef {
    pub stem: String,
    pub image: PathBuf,
    pub mask: PathBuf,
}

/// A directory laid out as `images/<stem>.<ext>` + `masks/<stem>.<ext>`.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub root: PathBuf,
    /// Instances sorted by stem.
    pub instances: Vec<InstanceRef>,
    /// Images without a matching mask.
    pub skipped: Vec<String>,
}

fn list_by_stem(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let rd = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = Vec::new();
    for entry in rd {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        if !ext.is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.as_str())) {
            continue;
        }
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            out.push((stem.to_string(), path.clone()));
        }
    }
    out.sort();
    Ok(out)
}

impl Dataset {
    pub fn open(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        let images = list_by_stem(&root.join("images"))?;
        let masks = list_by_stem(&root.join("masks"))?;
        let mut instances = Vec::new();
        let mut skipped = Vec::new();
        for (stem, image) in images {
            // First mask with the exact stem; extensions sort deterministically.
            match masks.iter().find(|(s, _)| *s == stem) {
                Some((_, mask)) => instances.push(InstanceRef {
                    stem,
                    image,
                    mask: mask.clone(),
                }),
                None => skipped.push(format!("{stem}: no mask")),
            }
        }
        instances.dedup_by(|a, b| a.stem == b.stem);
        let name = root
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or("dataset")
            .to_string();
        Ok(Self {
            name,
            root,
            instances,
            skipped,
        })
    }
}

pub fn load_instance(inst: &InstanceRef) -> Result<(Image, LabelMask)> {
    let image = Image::read(&inst.image)?;
    let gt = LabelMask::read_png(&inst.mask)?;
    if gt.dims() != image.dims() {
        return Err(Error::DimensionMismatch {
            expected_w: image.width(),
            expected_h: image.height(),
            got_w: gt.width(),
            got_h: gt.height(),
        });
    }
    Ok((image, gt))
}
