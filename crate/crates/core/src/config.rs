//! Run configuration: flat `key = value` text, overridable from the command
//! line.
//!
//! ```text
//! # comments and blank lines are ignored
//! connectivity = 8
//! crop_size = 128
//! level = ll2
//! classifier = nearest
//! quantize = true
//! debug_dir = /tmp/debug
//! ```

use std::path::{Path, PathBuf};

use crate::classify::ClassifierKind;
use crate::error::{Error, Result};
use crate::eval::PipelineConfig;
use crate::features::Level;
use crate::segmentation::Connectivity;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub connectivity: Connectivity,
    /// Square resampling edge; 0 keeps the padded crop as is.
    pub crop_size: usize,
    pub level: Level,
    /// `None` lets evaluation run every classifier; single-probe commands
    /// then use nearest-series matching.
    pub classifier: Option<ClassifierKind>,
    pub quantize: bool,
    pub debug_dir: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            connectivity: Connectivity::Eight,
            crop_size: 128,
            level: Level::LL2,
            classifier: None,
            quantize: true,
            debug_dir: None,
        }
    }
}

fn parse_bool(v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(Error::InvalidConfig(format!(
            "expected a boolean, got {other:?}"
        ))),
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected key = value", n + 1))
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::InvalidConfig(format!("line {}: {e}", n + 1)))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Config::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "connectivity" => {
                let n = value
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("bad connectivity {value:?}")))?;
                self.connectivity = Connectivity::from_neighbours(n)?;
            }
            "crop_size" => {
                self.crop_size = value
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("bad crop_size {value:?}")))?;
            }
            "level" => self.level = value.parse()?,
            "classifier" => self.classifier = Some(value.parse()?),
            "quantize" => self.quantize = parse_bool(value)?,
            "debug_dir" => {
                self.debug_dir = (!value.is_empty()).then(|| PathBuf::from(value));
            }
            other => return Err(Error::InvalidConfig(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Levels above 2 are allowed only when the resampled crop divides
    /// evenly; with resampling off the check happens per image.
    pub fn validate(&self) -> Result<()> {
        let depth = u32::from(self.level.depth());
        if self.crop_size > 0 {
            let div = 1usize.checked_shl(depth).unwrap_or(0);
            if div == 0 || !self.crop_size.is_multiple_of(div) {
                return Err(Error::InvalidConfig(format!(
                    "crop_size {} is not divisible by 2^{depth}",
                    self.crop_size
                )));
            }
        } else if depth > 2 {
            return Err(Error::InvalidConfig(
                "levels above 2 need a fixed crop_size".into(),
            ));
        }
        Ok(())
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            connectivity: self.connectivity,
            crop_size: (self.crop_size > 0).then_some(self.crop_size),
            quantize: self.quantize,
            debug_dir: self.debug_dir.clone(),
        }
    }
}
