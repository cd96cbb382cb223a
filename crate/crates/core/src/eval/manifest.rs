use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub subject_id: String,
}

/// Ordered list of labelled images. Paths are unique and every subject has
/// at least two images, so both halves of the odd/even split see it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetManifest {
    entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn new(entries: Vec<ManifestEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::MalformedManifest("no entries".into()));
        }
        let mut seen = HashSet::new();
        for e in &entries {
            if !seen.insert(&e.path) {
                return Err(Error::MalformedManifest(format!(
                    "duplicate path {}",
                    e.path.display()
                )));
            }
        }
        // report the first undersized subject in file order
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for e in &entries {
            *counts.entry(e.subject_id.as_str()).or_default() += 1;
        }
        if let Some(e) = entries.iter().find(|e| counts[e.subject_id.as_str()] < 2) {
            return Err(Error::SubjectTooSmall {
                subject: e.subject_id.clone(),
                count: counts[e.subject_id.as_str()],
            });
        }
        Ok(DatasetManifest { entries })
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Distinct subjects in order of first appearance.
    pub fn subjects(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.entries
            .iter()
            .map(|e| e.subject_id.as_str())
            .filter(|s| seen.insert(*s))
            .collect()
    }
}

/// Parse manifest CSV text (`path,subject_id` header). Relative paths are
/// resolved against `base_dir`.
pub fn parse_manifest(text: &str, base_dir: &Path) -> Result<DatasetManifest> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::MalformedManifest(e.to_string()))?
        .clone();
    if headers.len() != 2 || &headers[0] != "path" || &headers[1] != "subject_id" {
        return Err(Error::MalformedManifest(format!(
            "expected header `path,subject_id`, got `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut entries = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::MalformedManifest(format!("row {}: {e}", i + 2)))?;
        let (path, subject) = (&record[0], &record[1]);
        if path.is_empty() || subject.is_empty() {
            return Err(Error::MalformedManifest(format!(
                "row {}: empty field",
                i + 2
            )));
        }
        let path = Path::new(path);
        let path = if path.is_absolute() {
            path.to_path_buf()
        } else {
            base_dir.join(path)
        };
        entries.push(ManifestEntry {
            path,
            subject_id: subject.to_owned(),
        });
    }
    DatasetManifest::new(entries)
}

pub fn load_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_manifest(&text, base)
}

/// Manifest CSV for a list of entries, paths written as given.
pub fn format_manifest(entries: &[ManifestEntry]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["path", "subject_id"]).unwrap();
    for e in entries {
        w.write_record([e.path.to_string_lossy().as_ref(), e.subject_id.as_str()])
            .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// Indices into the manifest (equivalently, rows of the stacked series
/// matrix) for each half of the split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Within each subject's images in file order, the 1st, 3rd, 5th, ... go to
/// training and the 2nd, 4th, ... to testing.
pub fn split_odd_even(m: &DatasetManifest) -> SplitPlan {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    let mut plan = SplitPlan {
        train: Vec::new(),
        test: Vec::new(),
    };
    for (i, e) in m.entries.iter().enumerate() {
        let n = seen.entry(e.subject_id.as_str()).or_default();
        if (*n).is_multiple_of(2) {
            plan.train.push(i);
        } else {
            plan.test.push(i);
        }
        *n += 1;
    }
    plan
}
