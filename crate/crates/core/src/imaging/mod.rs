//! Raster types, file decoding and the grayscale/binary conversions that
//! start the pipeline.

mod png_io;
pub mod pnm;

use std::path::Path;

use crate::error::{Error, Result};

/// 24-bit RGB raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorImage {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl ColorImage {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions(format!(
                "color image must be non-empty, got {width}x{height}"
            )));
        }
        check_len(width, height, pixels.len())?;
        Ok(ColorImage {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }
}

/// 8-bit single-channel raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        check_len(width, height, pixels.len())?;
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        GrayImage {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }
}

/// Foreground mask. Pixels are stored as 0 (background) or 1 (foreground).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        check_len(width, height, pixels.len())?;
        if let Some(bad) = pixels.iter().find(|&&p| p > 1) {
            return Err(Error::InvalidDimensions(format!(
                "binary image values must be 0 or 1, found {bad}"
            )));
        }
        Ok(BinaryImage {
            width,
            height,
            pixels,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(u8::from(f(x, y)));
            }
        }
        BinaryImage {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn is_set(&self, x: usize, y: usize) -> bool {
        self.pixels[y * self.width + x] != 0
    }

    pub fn count_ones(&self) -> usize {
        self.pixels.iter().filter(|&&p| p != 0).count()
    }

    /// Scale to 0/255 for viewing or writing as PGM.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&p| p * 255).collect(),
        }
    }
}

fn check_len(width: usize, height: usize, len: usize) -> Result<()> {
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| Error::InvalidDimensions(format!("{width}x{height} overflows")))?;
    if expected != len {
        return Err(Error::InvalidDimensions(format!(
            "{width}x{height} needs {expected} pixels, got {len}"
        )));
    }
    Ok(())
}

/// Result of decoding a file: gray files stay gray, color files stay color.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodedImage {
    Gray(GrayImage),
    Color(ColorImage),
}

impl DecodedImage {
    pub fn into_gray(self) -> GrayImage {
        match self {
            DecodedImage::Gray(g) => g,
            DecodedImage::Color(c) => to_grayscale(&c),
        }
    }
}

const PNG_SIGNATURE: &[u8] = &[0x89, b'P', b'N', b'G', b'\r', b'\n', 0x1a, b'\n'];

/// Decode a PGM (P2/P5), PPM (P3/P6) or 8-bit PNG stream.
pub fn decode_image(bytes: &[u8]) -> Result<DecodedImage> {
    if bytes.starts_with(PNG_SIGNATURE) {
        return png_io::decode_png(bytes);
    }
    if bytes.len() >= 2 && bytes[0] == b'P' {
        return pnm::decode_pnm(bytes);
    }
    Err(Error::MalformedFile(
        "unrecognized magic (expected PGM, PPM or PNG)".into(),
    ))
}

pub fn read_image(path: &Path) -> Result<DecodedImage> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes)
}

/// BT.601 luma, rounded half up: `(299 r + 587 g + 114 b + 500) / 1000` in
/// integer arithmetic, which is exact for the three-decimal weights.
pub fn to_grayscale(img: &ColorImage) -> GrayImage {
    let pixels = img
        .pixels
        .iter()
        .map(|&[r, g, b]| {
            let weighted = 299 * u32::from(r) + 587 * u32::from(g) + 114 * u32::from(b);
            ((weighted + 500) / 1000).min(255) as u8
        })
        .collect();
    GrayImage {
        width: img.width,
        height: img.height,
        pixels,
    }
}

/// Pixel sum and count; the mean is `sum / count` exactly.
fn intensity_sum(img: &GrayImage) -> Result<(u64, u64)> {
    if img.pixels.is_empty() {
        return Err(Error::EmptyImage);
    }
    let sum = img.pixels.iter().map(|&p| u64::from(p)).sum();
    Ok((sum, img.pixels.len() as u64))
}

pub fn mean_intensity(img: &GrayImage) -> Result<f64> {
    let (sum, count) = intensity_sum(img)?;
    Ok(sum as f64 / count as f64)
}

/// Foreground = pixels strictly brighter than the mean intensity.
///
/// The comparison `p > sum / count` is evaluated as `p * count > sum`, so the
/// threshold is never rounded.
pub fn binarize(img: &GrayImage) -> Result<BinaryImage> {
    let (sum, count) = intensity_sum(img)?;
    let pixels = img
        .pixels
        .iter()
        .map(|&p| u8::from(u64::from(p) * count > sum))
        .collect();
    Ok(BinaryImage {
        width: img.width,
        height: img.height,
        pixels,
    })
}
