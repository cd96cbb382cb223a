//! End-to-end feature extraction for one image:
//! decode, grayscale, binarize, largest component, centroid, ellipse, crop,
//! optional resampling, Haar decomposition, vectorization.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result, Stage, StageExt};
use crate::features::{vectorize, FeatureSeries, Level};
use crate::imaging::{self, pnm, BinaryImage, GrayImage};
use crate::segmentation::{
    self, centroid, crop_face, derive_ellipse, label_components, largest_component, Centroid,
    Connectivity, EllipseSpec, FaceCrop,
};
use crate::wavelet::{decompose_to_level, Plane};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    pub connectivity: Connectivity,
    /// Square edge every crop is resampled to; `None` keeps the padded crop.
    pub crop_size: Option<usize>,
    pub quantize: bool,
    pub debug_dir: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            connectivity: Connectivity::Eight,
            crop_size: Some(128),
            quantize: true,
            debug_dir: None,
        }
    }
}

/// Every intermediate of the preprocessing stages.
#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub gray: GrayImage,
    pub binary: BinaryImage,
    pub largest: BinaryImage,
    pub centroid: Centroid,
    pub ellipse: EllipseSpec,
    pub crop: FaceCrop,
}

pub fn preprocess(gray: GrayImage, connectivity: Connectivity) -> Result<Preprocessed> {
    let binary = imaging::binarize(&gray).stage(Stage::Imaging)?;
    let seg = || -> Result<_> {
        let labels = label_components(&binary, connectivity);
        let largest = largest_component(&labels)?;
        let c = centroid(&largest)?;
        let ellipse = derive_ellipse(&largest, &c)?;
        let crop = crop_face(&gray, &ellipse)?;
        Ok((largest, c, ellipse, crop))
    };
    let (largest, centroid, ellipse, crop) = seg().stage(Stage::Segmentation)?;
    Ok(Preprocessed {
        gray,
        binary,
        largest,
        centroid,
        ellipse,
        crop,
    })
}

pub fn load_gray(path: &Path) -> Result<GrayImage> {
    imaging::read_image(path)
        .map(imaging::DecodedImage::into_gray)
        .stage(Stage::Imaging)
}

/// Crop resampled to the configured geometry, as a real-valued plane.
pub fn normalize_crop(crop: &FaceCrop, crop_size: Option<usize>) -> Plane {
    let gray = crop.to_gray();
    match crop_size {
        Some(n) => Plane::from_gray(&segmentation::resample_nearest(&gray, n, n)),
        None => Plane::from_gray(&gray),
    }
}

/// Decode and preprocess `path`, returning the normalized face plane.
pub fn extract_face(path: &Path, cfg: &PipelineConfig) -> Result<Plane> {
    let gray = load_gray(path)?;
    let pre = preprocess(gray, cfg.connectivity)?;
    let face = normalize_crop(&pre.crop, cfg.crop_size);
    if let Some(dir) = &cfg.debug_dir {
        write_debug(dir, path, &pre, &face).stage(Stage::Eval)?;
    }
    Ok(face)
}

/// Series for each requested level from one normalized face; the deepest
/// level is decomposed once and shallower LL bands are read off the pyramid.
pub fn series_from_face(
    face: &Plane,
    levels: &[Level],
    quantize: bool,
) -> Result<Vec<FeatureSeries>> {
    let deepest = levels.iter().map(|l| l.depth()).max().unwrap_or(0);
    let pyramid = if deepest > 0 {
        Some(decompose_to_level(face, deepest).stage(Stage::Wavelet)?)
    } else {
        None
    };
    Ok(levels
        .iter()
        .map(|&level| {
            let band = match (level.depth(), &pyramid) {
                (0, _) => face,
                (d, Some(p)) => &p.ll(d as usize).expect("pyramid covers every level").plane,
                (_, None) => unreachable!("pyramid built when any level > 0"),
            };
            vectorize(band, level, quantize)
        })
        .collect())
}

pub fn run_pipeline(path: &Path, level: Level, cfg: &PipelineConfig) -> Result<FeatureSeries> {
    let face = extract_face(path, cfg)?;
    let mut series = series_from_face(&face, &[level], cfg.quantize)?;
    Ok(series.remove(0))
}

fn write_debug(dir: &Path, source: &Path, pre: &Preprocessed, face: &Plane) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stem = source
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into());
    let outputs = [
        ("gray", pre.gray.clone()),
        ("binary", pre.binary.to_gray()),
        ("largest", pre.largest.to_gray()),
        ("crop", pre.crop.to_gray()),
        ("face", face.to_gray_rounded()),
    ];
    for (name, img) in outputs {
        let path = dir.join(format!("{stem}_{name}.pgm"));
        std::fs::write(&path, pnm::encode_pgm(&img)).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}
