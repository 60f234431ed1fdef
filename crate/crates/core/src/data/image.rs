use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DataError;

/// Grayscale intensity grid with values in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self, DataError> {
        if width == 0 || height == 0 {
            return Err(DataError::DegenerateImage { width, height });
        }
        if pixels.len() != width * height {
            return Err(DataError::Image(format!(
                "{width}x{height} image needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        if let Some(v) = pixels.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(DataError::Image(format!("intensity {v} outside [0, 1]")));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self, DataError> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Reads a PNG or PGM file. Color images are converted by luminance.
    pub fn load(path: &Path) -> Result<Self, DataError> {
        let img = image::open(path).map_err(|e| DataError::Unreadable {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        let luma = img.to_luma8();
        let (w, h) = luma.dimensions();
        let pixels = luma
            .as_raw()
            .iter()
            .map(|&v| f64::from(v) / 255.0)
            .collect();
        Self::new(w as usize, h as usize, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    /// Bilinear resampling with pixel centers at half-integer coordinates and
    /// edge clamping.
    pub fn resize_bilinear(&self, width: usize, height: usize) -> Result<Self, DataError> {
        if width == 0 || height == 0 {
            return Err(DataError::DegenerateImage { width, height });
        }
        let axis = |dst: usize, src_len: usize, dst_len: usize| {
            let s = ((dst as f64 + 0.5) * src_len as f64 / dst_len as f64 - 0.5)
                .clamp(0.0, (src_len - 1) as f64);
            let i0 = s.floor() as usize;
            let i1 = (i0 + 1).min(src_len - 1);
            (i0, i1, s - i0 as f64)
        };
        Ok(Self::from_fn(width, height, |x, y| {
            let (x0, x1, tx) = axis(x, self.width, width);
            let (y0, y1, ty) = axis(y, self.height, height);
            let top = self.get(x0, y0) * (1.0 - tx) + self.get(x1, y0) * tx;
            let bottom = self.get(x0, y1) * (1.0 - tx) + self.get(x1, y1) * tx;
            top * (1.0 - ty) + bottom * ty
        }))
    }

    pub fn transform(&self, t: Transform) -> Self {
        let (w, h) = (self.width, self.height);
        match t {
            Transform::FlipHorizontal => Self::from_fn(w, h, |x, y| self.get(w - 1 - x, y)),
            Transform::FlipVertical => Self::from_fn(w, h, |x, y| self.get(x, h - 1 - y)),
            // Clockwise: output (x, y) reads input (y, h − 1 − x).
            Transform::Rotate90 => Self::from_fn(h, w, |x, y| self.get(y, h - 1 - x)),
            Transform::Rotate180 => Self::from_fn(w, h, |x, y| self.get(w - 1 - x, h - 1 - y)),
            Transform::Rotate270 => Self::from_fn(h, w, |x, y| self.get(w - 1 - y, x)),
        }
    }
}

/// Geometric augmentations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transform {
    FlipHorizontal,
    FlipVertical,
    Rotate90,
    Rotate180,
    Rotate270,
}

impl Transform {
    pub const ALL: [Transform; 5] = [
        Transform::FlipHorizontal,
        Transform::FlipVertical,
        Transform::Rotate90,
        Transform::Rotate180,
        Transform::Rotate270,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Transform::FlipHorizontal => "flip-h",
            Transform::FlipVertical => "flip-v",
            Transform::Rotate90 => "rot90",
            Transform::Rotate180 => "rot180",
            Transform::Rotate270 => "rot270",
        }
    }
}

/// Name recorded in manifests for features produced by [`reduce`].
pub const REDUCER_NAME: &str = "band-mean-bilinear";

/// Reduces an image to `n` angles: bilinear resize to `n × n`, average each
/// of the `n` rows, map `[0, 1]` to `[0, π]`.
pub fn reduce(image: &GrayImage, n: usize) -> Result<Vec<f64>, DataError> {
    let small = image.resize_bilinear(n, n)?;
    Ok(small
        .pixels()
        .chunks_exact(n)
        .map(|row| (row.iter().sum::<f64>() / n as f64 * PI).clamp(0.0, PI))
        .collect())
}
