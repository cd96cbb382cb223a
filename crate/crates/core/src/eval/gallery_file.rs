//! Gallery persistence: one CSV record per enrolled series,
//! `subject_id,level,length,v1,...,vN`, no header.

use std::path::Path;

use crate::classify::{build_mean_reference, Enrolled, GalleryModel};
use crate::error::{Error, Result};
use crate::features::{FeatureSeries, Level};

pub fn format_gallery(model: &GalleryModel) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_writer(Vec::new());
    for e in model.entries() {
        let mut record = Vec::with_capacity(e.series.len() + 3);
        record.push(e.subject_id.clone());
        record.push(e.series.level().to_string());
        record.push(e.series.len().to_string());
        // f64 Display is the shortest exact round-trip and prints integers bare
        record.extend(e.series.values().iter().map(f64::to_string));
        w.write_record(&record).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

pub fn parse_gallery(text: &str) -> Result<GalleryModel> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut entries = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|e| Error::MalformedGallery(format!("line {line}: {e}")))?;
        if record.len() < 3 {
            return Err(Error::MalformedGallery(format!(
                "line {line}: too few fields"
            )));
        }
        let level: Level = record[1].parse().map_err(|_| {
            Error::MalformedGallery(format!("line {line}: bad level {:?}", &record[1]))
        })?;
        let length: usize = record[2].parse().map_err(|_| {
            Error::MalformedGallery(format!("line {line}: bad length {:?}", &record[2]))
        })?;
        if record.len() - 3 != length {
            return Err(Error::MalformedGallery(format!(
                "line {line}: declares {length} values, has {}",
                record.len() - 3
            )));
        }
        let values = record
            .iter()
            .skip(3)
            .map(|v| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::MalformedGallery(format!("line {line}: bad value {v:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        entries.push(Enrolled::new(&record[0], FeatureSeries::new(values, level)));
    }
    build_mean_reference(entries).map_err(|e| match e {
        Error::LengthMismatch(msg) => Error::MalformedGallery(msg),
        other => other,
    })
}

pub fn read_gallery(path: &Path) -> Result<GalleryModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_gallery(&text)
}

pub fn write_gallery(path: &Path, model: &GalleryModel) -> Result<()> {
    super::write_atomic(path, format_gallery(model).as_bytes())
}
