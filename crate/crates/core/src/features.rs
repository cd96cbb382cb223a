use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::wavelet::Plane;

/// Which representation a series was taken from: the padded crop itself
/// (level 0) or the LL band of a given decomposition depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Level(u8);

impl Level {
    pub const ORIGINAL: Level = Level(0);
    pub const LL1: Level = Level(1);
    pub const LL2: Level = Level(2);

    pub fn new(depth: u8) -> Self {
        Level(depth)
    }

    pub fn depth(self) -> u8 {
        self.0
    }

    pub fn is_original(self) -> bool {
        self.0 == 0
    }

    /// Row label in the style of a recognition-rate table.
    pub fn table_label(self) -> String {
        match self.0 {
            0 => "Original image".into(),
            d => format!("LL{d}"),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => f.write_str("original"),
            d => write!(f, "ll{d}"),
        }
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let lower = s.trim().to_ascii_lowercase();
        if lower == "original" || lower == "0" {
            return Ok(Level::ORIGINAL);
        }
        lower
            .strip_prefix("ll")
            .unwrap_or(&lower)
            .parse::<u8>()
            .map(Level)
            .map_err(|_| Error::InvalidConfig(format!("unknown level {s:?}")))
    }
}

impl Serialize for Level {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Level {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Row-major flattening of a band, the classifier's input.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSeries {
    values: Vec<f64>,
    level: Level,
}

impl FeatureSeries {
    pub fn new(values: Vec<f64>, level: Level) -> Self {
        FeatureSeries { values, level }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn level(&self) -> Level {
        self.level
    }

    /// True when every value is an integer in `[0, 255]`.
    pub fn is_quantized(&self) -> bool {
        self.values
            .iter()
            .all(|&v| v.fract() == 0.0 && (0.0..=255.0).contains(&v))
    }
}

/// Round half up and clamp to the 8-bit range.
#[inline]
pub fn quantize(v: f64) -> f64 {
    (v + 0.5).floor().clamp(0.0, 255.0)
}

/// Concatenate the rows of `band`. With `quantize_values` each value is
/// rounded half up and clamped to `[0, 255]`; otherwise values pass through.
pub fn vectorize(band: &Plane, level: Level, quantize_values: bool) -> FeatureSeries {
    let values = if quantize_values {
        band.data().iter().map(|&v| quantize(v)).collect()
    } else {
        band.data().to_vec()
    };
    FeatureSeries { values, level }
}
