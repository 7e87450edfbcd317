//! Raster containers and their file formats.
//!
//! Grey images and probes travel as PGM (P2 or P5); real-valued distance maps
//! as ASPF, a small little-endian container that keeps every `f64` bit.

mod aspf;
mod pgm;

pub use aspf::{read_map, write_map};
pub use pgm::{read_pgm, write_pgm, PgmVariant};

use crate::error::{Error, Result};
use crate::lip::LipScale;

/// A grey-level image on a rectangular domain, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GreyImage {
    width: usize,
    height: usize,
    scale: LipScale,
    pixels: Vec<f64>,
}

fn check_shape(width: usize, height: usize, len: usize, what: &str) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::Size(format!(
            "{what} dimensions must be at least 1x1, got {width}x{height}"
        )));
    }
    if width.checked_mul(height) != Some(len) {
        return Err(Error::Size(format!(
            "{what} of {width}x{height} needs {} samples, got {len}",
            width.saturating_mul(height)
        )));
    }
    Ok(())
}

impl GreyImage {
    pub fn new(width: usize, height: usize, scale: LipScale, pixels: Vec<f64>) -> Result<Self> {
        check_shape(width, height, pixels.len(), "image")?;
        Ok(GreyImage {
            width,
            height,
            scale,
            pixels,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        scale: LipScale,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        GreyImage::new(width, height, scale, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn scale(&self) -> LipScale {
        self.scale
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.pixels[y * self.width + x] = value;
    }

    /// Applies `f` to every pixel, keeping shape and scale.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> GreyImage {
        GreyImage {
            pixels: self.pixels.iter().map(|&v| f(v)).collect(),
            ..self.clone()
        }
    }

    /// Copies the `width`×`height` window whose top-left corner is `(x0, y0)`.
    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> Result<GreyImage> {
        if x0 + width > self.width || y0 + height > self.height {
            return Err(Error::Size(format!(
                "window {width}x{height} at ({x0}, {y0}) exceeds image {}x{}",
                self.width, self.height
            )));
        }
        GreyImage::from_fn(width, height, self.scale, |x, y| self.get(x0 + x, y0 + y))
    }
}

/// A probe: grey values on a finite support `D_B`, given as a rectangle plus
/// an activity mask. Offsets are measured from the anchor, which is the
/// top-left cell unless stated otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuringFunction {
    width: usize,
    height: usize,
    scale: LipScale,
    values: Vec<f64>,
    active: Vec<bool>,
    anchor: (usize, usize),
}

impl StructuringFunction {
    pub fn new(width: usize, height: usize, scale: LipScale, values: Vec<f64>, active: Vec<bool>) -> Result<Self> {
        check_shape(width, height, values.len(), "structuring function")?;
        check_shape(width, height, active.len(), "structuring function mask")?;
        if !active.iter().any(|&a| a) {
            return Err(Error::validation("structuring function has no active cell", None));
        }
        Ok(StructuringFunction {
            width,
            height,
            scale,
            values,
            active,
            anchor: (0, 0),
        })
    }

    /// Every cell of `image` active.
    pub fn from_image(image: &GreyImage) -> Self {
        StructuringFunction {
            width: image.width,
            height: image.height,
            scale: image.scale,
            values: image.pixels.clone(),
            active: vec![true; image.pixels.len()],
            anchor: (0, 0),
        }
    }

    /// Support given by the nonzero pixels of `mask`.
    pub fn with_mask(image: &GreyImage, mask: &GreyImage) -> Result<Self> {
        if (mask.width, mask.height) != (image.width, image.height) {
            return Err(Error::Size(format!(
                "mask is {}x{} but probe is {}x{}",
                mask.width, mask.height, image.width, image.height
            )));
        }
        let active = mask.pixels.iter().map(|&v| v != 0.0).collect();
        StructuringFunction::new(image.width, image.height, image.scale, image.pixels.clone(), active)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn scale(&self) -> LipScale {
        self.scale
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn anchor(&self) -> (usize, usize) {
        self.anchor
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    #[inline]
    pub fn is_active(&self, x: usize, y: usize) -> bool {
        self.active[y * self.width + x]
    }

    /// Active cells as `(x, y, value)` in raster order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.values.len())
            .filter(|&i| self.active[i])
            .map(|i| (i % self.width, i / self.width, self.values[i]))
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn is_full(&self) -> bool {
        self.active.iter().all(|&a| a)
    }

    /// All active values equal.
    pub fn is_flat(&self) -> bool {
        let mut cells = self.cells().map(|(_, _, v)| v);
        let first = cells.next();
        cells.all(|v| Some(v) == first)
    }

    /// Same support, values replaced by `f(value)` on active cells.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        StructuringFunction {
            values: self
                .values
                .iter()
                .zip(&self.active)
                .map(|(&v, &a)| if a { f(v) } else { v })
                .collect(),
            ..self.clone()
        }
    }

    /// The probe values as an image, ignoring the mask.
    pub fn to_image(&self) -> GreyImage {
        GreyImage {
            width: self.width,
            height: self.height,
            scale: self.scale,
            pixels: self.values.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapMethod {
    Direct,
    Gradient,
}

impl MapMethod {
    pub(crate) fn tag(self) -> u8 {
        match self {
            MapMethod::Direct => 0,
            MapMethod::Gradient => 1,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(MapMethod::Direct),
            1 => Some(MapMethod::Gradient),
            _ => None,
        }
    }
}

/// A real-valued map over part of a source image. `origin` is the source
/// coordinate of map cell `(0, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMap {
    pub width: usize,
    pub height: usize,
    pub origin: (i32, i32),
    pub values: Vec<f64>,
    pub method: MapMethod,
}

impl DistanceMap {
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Largest absolute pointwise difference; `None` if the shapes differ.
    pub fn max_abs_diff(&self, other: &DistanceMap) -> Option<f64> {
        if (self.width, self.height, self.origin) != (other.width, other.height, other.origin) {
            return None;
        }
        Some(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }
}

/// Renders a map as an 8-bit image, `0 ↦ 0` and `ceiling ↦ 255`, saturating above.
pub fn quantize_map(map: &DistanceMap, ceiling: f64) -> Result<GreyImage> {
    if !(ceiling.is_finite() && ceiling > 0.0) {
        return Err(Error::Domain(format!("ceiling must be positive, got {ceiling}")));
    }
    let pixels = map
        .values
        .iter()
        .map(|&v| (v.clamp(0.0, ceiling) / ceiling * 255.0).round())
        .collect();
    GreyImage::new(map.width, map.height, LipScale::eight_bit(), pixels)
}
