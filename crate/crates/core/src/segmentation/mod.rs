//! Face-region extraction: largest connected component, its centroid, and
//! the elliptical crop around it.

mod ellipse;
mod label;

pub use ellipse::{crop_face, derive_ellipse, rasterize_ellipse, EllipseSpec, FaceCrop};
pub use label::{label_components, largest_component, ComponentMap, Connectivity};

use crate::error::{Error, Result};
use crate::imaging::{BinaryImage, GrayImage};

/// Center of mass of a binary mask, kept as exact integer moments.
///
/// `x = Σ m·x / Σ m` and `y = Σ m·y / Σ m` with `m ∈ {0, 1}` and zero-based
/// coordinates; equality compares the rationals exactly.
#[derive(Debug, Clone, Copy, Eq)]
pub struct Centroid {
    sum_x: u64,
    sum_y: u64,
    mass: u64,
}

impl Centroid {
    pub fn from_moments(sum_x: u64, sum_y: u64, mass: u64) -> Self {
        Centroid { sum_x, sum_y, mass }
    }

    pub fn x(&self) -> f64 {
        self.sum_x as f64 / self.mass as f64
    }

    pub fn y(&self) -> f64 {
        self.sum_y as f64 / self.mass as f64
    }

    pub fn mass(&self) -> u64 {
        self.mass
    }

    /// `(Σ x, Σ y, Σ m)`.
    pub fn moments(&self) -> (u64, u64, u64) {
        (self.sum_x, self.sum_y, self.mass)
    }

    /// Nearest pixel, rounding halves up.
    pub fn rounded(&self) -> (usize, usize) {
        let round = |s: u64| ((2 * s + self.mass) / (2 * self.mass)) as usize;
        (round(self.sum_x), round(self.sum_y))
    }
}

impl PartialEq for Centroid {
    fn eq(&self, other: &Self) -> bool {
        let a = u128::from(self.mass);
        let b = u128::from(other.mass);
        u128::from(self.sum_x) * b == u128::from(other.sum_x) * a
            && u128::from(self.sum_y) * b == u128::from(other.sum_y) * a
    }
}

pub fn centroid(mask: &BinaryImage) -> Result<Centroid> {
    let w = mask.width();
    let (mut sx, mut sy, mut m) = (0u64, 0u64, 0u64);
    for (i, &p) in mask.pixels().iter().enumerate() {
        if p != 0 {
            sx += (i % w) as u64;
            sy += (i / w) as u64;
            m += 1;
        }
    }
    if m == 0 {
        return Err(Error::NoForeground);
    }
    Ok(Centroid::from_moments(sx, sy, m))
}

/// Nearest-neighbour resampling; source pixel for output `x` is
/// `floor((x + 0.5) * src_w / dst_w)`.
pub fn resample_nearest(img: &GrayImage, width: usize, height: usize) -> GrayImage {
    let (sw, sh) = (img.width(), img.height());
    if sw == 0 || sh == 0 {
        return GrayImage::from_fn(width, height, |_, _| 0);
    }
    let xs: Vec<usize> = (0..width)
        .map(|x| ((2 * x + 1) * sw) / (2 * width))
        .collect();
    let ys: Vec<usize> = (0..height)
        .map(|y| ((2 * y + 1) * sh) / (2 * height))
        .collect();
    GrayImage::from_fn(width, height, |x, y| img.get(xs[x], ys[y]))
}
