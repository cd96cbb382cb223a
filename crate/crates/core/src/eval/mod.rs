//! Dataset manifests, the odd/even protocol, recognition-rate evaluation and
//! the on-disk formats (gallery file, report CSV/JSON).

mod gallery_file;
mod manifest;
mod pipeline;

pub use gallery_file::{format_gallery, parse_gallery, read_gallery, write_gallery};
pub use manifest::{
    format_manifest, load_manifest, parse_manifest, split_odd_even, DatasetManifest, ManifestEntry,
    SplitPlan,
};
pub use pipeline::{
    extract_face, load_gray, normalize_crop, preprocess, run_pipeline, series_from_face,
    PipelineConfig, Preprocessed,
};

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{build_mean_reference, ClassifierKind, Enrolled};
use crate::error::{Error, Result, Stage, StageExt};
use crate::features::{FeatureSeries, Level};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalConfig {
    pub dataset: String,
    pub pipeline: PipelineConfig,
    pub levels: Vec<Level>,
    pub classifiers: Vec<ClassifierKind>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            dataset: "dataset".into(),
            pipeline: PipelineConfig::default(),
            levels: vec![Level::ORIGINAL, Level::LL1, Level::LL2],
            classifiers: ClassifierKind::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub level: Level,
    pub classifier: ClassifierKind,
    pub correct: usize,
    pub total: usize,
    pub rate_percent: f64,
    /// Mean wall time per probe classification.
    pub mean_match_nanos: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub dataset: String,
    pub rows: Vec<EvalRow>,
}

/// Series for every manifest entry at every requested level, indexed
/// `[level][entry]`. Images are processed in parallel; the first failure
/// (in manifest order) is reported with its path.
pub fn extract_all(
    m: &DatasetManifest,
    levels: &[Level],
    cfg: &PipelineConfig,
) -> Result<Vec<Vec<FeatureSeries>>> {
    let per_entry: Vec<Result<Vec<FeatureSeries>>> = m
        .entries()
        .par_iter()
        .map(|e| {
            let face = extract_face(&e.path, cfg)?;
            series_from_face(&face, levels, cfg.quantize)
        })
        .collect();

    let mut by_level: Vec<Vec<FeatureSeries>> = vec![Vec::with_capacity(m.len()); levels.len()];
    for (entry, result) in m.entries().iter().zip(per_entry) {
        let series = result.map_err(|e| e.at_path(&entry.path))?;
        for (slot, s) in by_level.iter_mut().zip(series) {
            if let Some(first) = slot.first() {
                if first.len() != s.len() {
                    return Err(Error::InconsistentSeriesLength {
                        expected: first.len(),
                        found: s.len(),
                        path: entry.path.display().to_string(),
                    })
                    .stage(Stage::Eval);
                }
            }
            slot.push(s);
        }
    }
    Ok(by_level)
}

/// Enroll the training rows, classify every test row and count rank-1 hits.
pub fn score_split(
    series: &[FeatureSeries],
    subjects: &[&str],
    split: &SplitPlan,
    classifier: ClassifierKind,
) -> Result<(usize, usize, u64)> {
    let training = split
        .train
        .iter()
        .map(|&i| Enrolled::new(subjects[i], series[i].clone()))
        .collect();
    let gallery = build_mean_reference(training).stage(Stage::Classify)?;
    let mut correct = 0;
    let mut nanos = 0u128;
    for &i in &split.test {
        let t = Instant::now();
        let result = classifier
            .classify(&series[i], subjects[i], &gallery)
            .stage(Stage::Classify)?;
        nanos += t.elapsed().as_nanos();
        if result.predicted == subjects[i] {
            correct += 1;
        }
    }
    let total = split.test.len();
    let mean = if total == 0 {
        0
    } else {
        (nanos / total as u128) as u64
    };
    Ok((correct, total, mean))
}

pub fn evaluate(m: &DatasetManifest, cfg: &EvalConfig) -> Result<EvalReport> {
    let by_level = extract_all(m, &cfg.levels, &cfg.pipeline)?;
    let split = split_odd_even(m);
    let subjects: Vec<&str> = m.entries().iter().map(|e| e.subject_id.as_str()).collect();

    let mut rows = Vec::new();
    for (&level, series) in cfg.levels.iter().zip(&by_level) {
        for &classifier in &cfg.classifiers {
            let (correct, total, mean_match_nanos) =
                score_split(series, &subjects, &split, classifier)?;
            rows.push(EvalRow {
                level,
                classifier,
                correct,
                total,
                rate_percent: rate(correct, total),
                mean_match_nanos,
            });
        }
    }
    Ok(EvalReport {
        dataset: cfg.dataset.clone(),
        rows,
    })
}

pub fn rate(correct: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * correct as f64 / total as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::InvalidConfig(format!(
                "unknown report format {other:?}"
            ))),
        }
    }
}

pub const REPORT_CSV_HEADER: &str = "dataset,level,classifier,correct,total,rate_percent";

pub fn emit_report(r: &EvalReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Table => emit_table(r),
        ReportFormat::Csv => emit_csv(r),
        ReportFormat::Json => serde_json::to_string_pretty(r).expect("report serializes") + "\n",
    }
}

pub fn parse_report_json(text: &str) -> Result<EvalReport> {
    serde_json::from_str(text).map_err(|e| Error::MalformedFile(format!("report json: {e}")))
}

fn emit_csv(r: &EvalReport) -> String {
    let mut out = String::from(REPORT_CSV_HEADER);
    out.push('\n');
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for row in &r.rows {
        w.write_record([
            r.dataset.clone(),
            row.level.to_string(),
            row.classifier.to_string(),
            row.correct.to_string(),
            row.total.to_string(),
            format!("{:.2}", row.rate_percent),
        ])
        .expect("in-memory csv write");
    }
    out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf8"));
    out
}

/// One row per (level, classifier), dataset name on the first row only.
fn emit_table(r: &EvalReport) -> String {
    let header = [
        "Name of the database",
        "Label",
        "Classifier",
        "Recognition rate (%)",
        "Correct/Total",
        "Match time (us)",
    ];
    let mut cells: Vec<[String; 6]> = vec![header.map(String::from)];
    for (i, row) in r.rows.iter().enumerate() {
        cells.push([
            if i == 0 {
                r.dataset.clone()
            } else {
                String::new()
            },
            row.level.table_label(),
            row.classifier.to_string(),
            format!("{:.2}", row.rate_percent),
            format!("{}/{}", row.correct, row.total),
            format!("{:.1}", row.mean_match_nanos as f64 / 1000.0),
        ]);
    }
    let widths: Vec<usize> = (0..6)
        .map(|c| {
            cells
                .iter()
                .map(|r| r[c].chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for (i, row) in cells.iter().enumerate() {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        writeln!(out, "{}", line.join("  ").trim_end()).unwrap();
        if i == 0 {
            let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
            writeln!(out, "{}", rule.join("  ")).unwrap();
        }
    }
    out
}

/// Write via a temporary file in the same directory, then rename over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}
