//! Thermal face identification by Haar wavelet reduction and series
//! matching.
//!
//! The pipeline for one image:
//!
//! 1. [`imaging`]: decode PGM/PPM/PNG, convert to 8-bit luma, binarize at
//!    the mean intensity.
//! 2. [`segmentation`]: keep the largest connected component, take its
//!    centroid, fit an axis-aligned ellipse around it and crop the face.
//! 3. [`wavelet`]: two levels of the quad Haar decomposition; the LL band is
//!    kept.
//! 4. [`features`]: flatten the band row-major into a series of intensities.
//! 5. [`classify`]: L1 distance between series; the nearest enrolled series
//!    (or the mean-reference rule) names the subject.
//!
//! [`eval`] runs the odd/even train/test protocol over a manifest of images
//! and reports rank-1 recognition rates per level and classifier.
//!
//! ```
//! use thermal_face::classify::sim;
//! use thermal_face::features::{FeatureSeries, Level};
//! use thermal_face::wavelet::haar_full_1d;
//!
//! assert_eq!(haar_full_1d(&[10.0, 4.0, 9.0, 5.0]).unwrap(), [7.0, 0.0, 3.0, 2.0]);
//!
//! let a = FeatureSeries::new(vec![1.0, 2.0, 3.0], Level::LL2);
//! let b = FeatureSeries::new(vec![3.0, 2.0, 1.0], Level::LL2);
//! assert_eq!(sim(&a, &b).unwrap(), 4.0);
//! ```

pub mod classify;
pub mod config;
mod error;
pub mod eval;
pub mod features;
pub mod imaging;
pub mod segmentation;
pub mod synth;
pub mod wavelet;

pub use classify::{ClassifierKind, GalleryModel, MatchResult};
pub use config::Config;
pub use error::{Error, Result, Stage};
pub use features::{FeatureSeries, Level};
pub use imaging::{BinaryImage, ColorImage, GrayImage};
