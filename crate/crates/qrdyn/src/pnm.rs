//! Binary PGM (P5) and PPM (P6) images, maxval 255, top row first.

use std::fs;
use std::io;
use std::path::Path;

use qrdyn_core::{BoundarySet, ClassificationField, GridSpec, OrbitTag};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageField {
    pub width: usize,
    pub height: usize,
    /// 1 for grayscale, 3 for RGB.
    pub channels: usize,
    pub pixels: Vec<u8>,
}

impl ImageField {
    pub fn new(width: usize, height: usize, channels: usize, pixels: Vec<u8>) -> Result<Self, String> {
        if channels != 1 && channels != 3 {
            return Err(format!("{channels} channels; expected 1 or 3"));
        }
        if pixels.len() != width * height * channels {
            return Err(format!("{} bytes for a {width}x{height}x{channels} image", pixels.len()));
        }
        Ok(ImageField { width, height, channels, pixels })
    }

    pub fn encode(&self) -> Vec<u8> {
        let magic = if self.channels == 1 { "P5" } else { "P6" };
        let mut out = format!("{magic}\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.encode())
    }
}

/// Pixel order for a planar grid: image row 0 is the top row (largest second coordinate).
fn raster<const C: usize>(grid: &GridSpec, pixel: impl Fn(usize) -> [u8; C]) -> Result<ImageField, String> {
    if grid.axes() != 2 {
        return Err("images need a planar grid or a slice".into());
    }
    let (w, h) = (grid.shape[0], grid.shape[1]);
    let mut pixels = Vec::with_capacity(w * h * C);
    for row in 0..h {
        let j = h - 1 - row;
        for i in 0..w {
            pixels.extend_from_slice(&pixel(grid.index([i, j, 0])));
        }
    }
    ImageField::new(w, h, C, pixels)
}

/// Boundary cells 255, everything else 0.
pub fn boundary_mask(set: &BoundarySet) -> Result<ImageField, String> {
    let mask = set.mask();
    raster(&set.grid, |i| [if mask[i] { 255 } else { 0 }])
}

/// Escaping cells 255, others 0.
pub fn escape_mask(field: &ClassificationField) -> Result<ImageField, String> {
    raster(&field.grid, |i| [if field.cells[i].tag.is_escaping() { 255 } else { 0 }])
}

pub fn class_color(tag: OrbitTag) -> [u8; 3] {
    match tag {
        OrbitTag::FastEscaping => [255, 255, 255],
        OrbitTag::Escaping => [70, 130, 230],
        OrbitTag::Bounded => [0, 0, 0],
        OrbitTag::HitPole => [220, 40, 40],
        OrbitTag::Undetermined => [128, 128, 128],
    }
}

pub fn class_image(field: &ClassificationField) -> Result<ImageField, String> {
    raster(&field.grid, |i| class_color(field.cells[i].tag))
}

/// Two boundary sets on one grid: f in red, g in green, both yellow.
pub fn overlay_image(a: &BoundarySet, b: &BoundarySet) -> Result<ImageField, String> {
    let (ma, mb) = (a.mask(), b.mask());
    raster(&a.grid, |i| [if ma[i] { 255 } else { 0 }, if mb[i] { 255 } else { 0 }, 0])
}
