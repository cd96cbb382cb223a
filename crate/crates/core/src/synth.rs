//! Seeded synthetic thermal-face datasets: one bright elliptical blob per
//! image on a dark background, with a blocky texture that identifies the
//! subject and small per-image noise.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::eval::{format_manifest, ManifestEntry};
use crate::imaging::{pnm, GrayImage};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthConfig {
    pub subjects: usize,
    pub per_subject: usize,
    pub width: usize,
    pub height: usize,
    /// Per-pixel noise amplitude; each image adds uniform integers in
    /// `[-noise, noise]`.
    pub noise: u8,
    /// Edge of the square texture cells.
    pub block: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            subjects: 10,
            per_subject: 4,
            width: 80,
            height: 96,
            noise: 2,
            block: 6,
            seed: 7,
        }
    }
}

const BACKGROUND: i32 = 12;
const TEXTURE_LO: i32 = 150;
const TEXTURE_HI: i32 = 240;

#[derive(Debug, Clone)]
pub struct SynthImage {
    pub subject_id: String,
    pub index: usize,
    pub image: GrayImage,
}

struct Subject {
    semi_minor: i64,
    semi_major: i64,
    cells_x: usize,
    cells: Vec<i32>,
}

impl Subject {
    fn random(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Self {
        let semi_minor = (cfg.width as f64 * 0.3) as i64 + rng.gen_range(-2..=2);
        let semi_major = (cfg.height as f64 * 0.36) as i64 + rng.gen_range(-2..=2);
        let cells_x = cfg.width.div_ceil(cfg.block);
        let cells_y = cfg.height.div_ceil(cfg.block);
        let cells = (0..cells_x * cells_y)
            .map(|_| rng.gen_range(TEXTURE_LO..=TEXTURE_HI))
            .collect();
        Subject {
            semi_minor: semi_minor.max(2),
            semi_major: semi_major.max(2),
            cells_x,
            cells,
        }
    }

    /// Noise-free rendering.
    fn base(&self, cfg: &SynthConfig) -> Vec<i32> {
        let (cx, cy) = (cfg.width as i64 / 2, cfg.height as i64 / 2);
        let (a2, b2) = (self.semi_minor.pow(2), self.semi_major.pow(2));
        let mut out = Vec::with_capacity(cfg.width * cfg.height);
        for y in 0..cfg.height {
            for x in 0..cfg.width {
                let dx = x as i64 - cx;
                let dy = y as i64 - cy;
                out.push(if b2 * dx * dx + a2 * dy * dy <= a2 * b2 {
                    self.cells[(y / cfg.block) * self.cells_x + x / cfg.block]
                } else {
                    BACKGROUND
                });
            }
        }
        out
    }
}

pub fn generate(cfg: &SynthConfig) -> Vec<SynthImage> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let noise = i32::from(cfg.noise);
    let mut out = Vec::with_capacity(cfg.subjects * cfg.per_subject);
    for s in 0..cfg.subjects {
        let subject = Subject::random(cfg, &mut rng);
        let base = subject.base(cfg);
        for index in 0..cfg.per_subject {
            let pixels = base
                .iter()
                .map(|&v| (v + rng.gen_range(-noise..=noise)).clamp(0, 255) as u8)
                .collect();
            out.push(SynthImage {
                subject_id: format!("s{s:02}"),
                index,
                image: GrayImage::new(cfg.width, cfg.height, pixels)
                    .expect("sized by construction"),
            });
        }
    }
    out
}

/// Write every image as a binary PGM plus `manifest.csv` (relative paths)
/// into `dir`. Returns the manifest path.
pub fn write_dataset(dir: &Path, cfg: &SynthConfig) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut entries = Vec::new();
    for img in generate(cfg) {
        let name = format!("{}_{:02}.pgm", img.subject_id, img.index);
        let path = dir.join(&name);
        std::fs::write(&path, pnm::encode_pgm(&img.image)).map_err(|e| Error::io(&path, e))?;
        entries.push(ManifestEntry {
            path: PathBuf::from(name),
            subject_id: img.subject_id,
        });
    }
    let manifest = dir.join("manifest.csv");
    std::fs::write(&manifest, format_manifest(&entries)).map_err(|e| Error::io(&manifest, e))?;
    Ok(manifest)
}
