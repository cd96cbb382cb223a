//! Series dissimilarity and the two identification rules built on it.
//!
//! Scores are sums of absolute differences, so lower is better and 0 means
//! identical. The nearest-series rule compares a probe against every enrolled
//! series. The mean-reference rule reduces each series to its L1 deviation
//! from the column-wise training mean and matches those scalars instead.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureSeries, Level};

/// Sum of absolute elementwise differences.
pub fn sim(a: &FeatureSeries, b: &FeatureSeries) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(format!(
            "series of length {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(l1(a.values(), b.values()))
}

#[inline]
fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Enrolled {
    pub subject_id: String,
    pub series: FeatureSeries,
}

impl Enrolled {
    pub fn new(subject_id: impl Into<String>, series: FeatureSeries) -> Self {
        Enrolled {
            subject_id: subject_id.into(),
            series,
        }
    }
}

/// Enrolled training series plus the mean-reference statistics derived from
/// them. Immutable once built.
///
/// The column mean `X[j] = S[j] / k` is kept as column sums `S` and count
/// `k`; signatures are stored scaled by `k` (`Σ_j |k·s[j] - S[j]|`) so that
/// for integer series every comparison is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct GalleryModel {
    level: Level,
    series_length: usize,
    entries: Vec<Enrolled>,
    column_sums: Vec<f64>,
    scaled_signatures: Vec<f64>,
}

impl GalleryModel {
    pub fn level(&self) -> Level {
        self.level
    }

    pub fn series_length(&self) -> usize {
        self.series_length
    }

    pub fn entries(&self) -> &[Enrolled] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Column-wise mean of the training series (`X`).
    pub fn mean_series(&self) -> Vec<f64> {
        let k = self.entries.len() as f64;
        self.column_sums.iter().map(|s| s / k).collect()
    }

    /// Per-series deviation from the mean (`Y`), in insertion order.
    pub fn row_signatures(&self) -> Vec<(&str, f64)> {
        let k = self.entries.len() as f64;
        self.entries
            .iter()
            .zip(&self.scaled_signatures)
            .map(|(e, s)| (e.subject_id.as_str(), s / k))
            .collect()
    }

    fn scaled_signature(&self, values: &[f64]) -> f64 {
        let k = self.entries.len() as f64;
        values
            .iter()
            .zip(&self.column_sums)
            .map(|(v, s)| (k * v - s).abs())
            .sum()
    }

    fn check_probe(&self, probe: &FeatureSeries) -> Result<()> {
        if probe.len() != self.series_length {
            return Err(Error::LengthMismatch(format!(
                "probe has {} values, gallery series have {}",
                probe.len(),
                self.series_length
            )));
        }
        Ok(())
    }

    /// The probe's deviation from the training mean (`z`).
    pub fn signature(&self, probe: &FeatureSeries) -> Result<f64> {
        self.check_probe(probe)?;
        Ok(self.scaled_signature(probe.values()) / self.entries.len() as f64)
    }
}

pub fn build_mean_reference(training: Vec<Enrolled>) -> Result<GalleryModel> {
    let first = training.first().ok_or(Error::EmptyGallery)?;
    let (n, level) = (first.series.len(), first.series.level());
    for e in &training {
        if e.series.len() != n {
            return Err(Error::LengthMismatch(format!(
                "subject {:?} has {} values, expected {n}",
                e.subject_id,
                e.series.len()
            )));
        }
        if e.series.level() != level {
            return Err(Error::LengthMismatch(format!(
                "subject {:?} enrolled at level {}, expected {level}",
                e.subject_id,
                e.series.level()
            )));
        }
    }
    let mut column_sums = vec![0.0; n];
    for e in &training {
        for (s, v) in column_sums.iter_mut().zip(e.series.values()) {
            *s += v;
        }
    }
    let mut model = GalleryModel {
        level,
        series_length: n,
        entries: training,
        column_sums,
        scaled_signatures: Vec::new(),
    };
    model.scaled_signatures = model
        .entries
        .iter()
        .map(|e| model.scaled_signature(e.series.values()))
        .collect();
    Ok(model)
}

/// Ranked candidates, best (lowest score) first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub probe_id: String,
    pub ranked: Vec<(String, f64)>,
    pub predicted: String,
}

impl MatchResult {
    fn from_scores(probe_id: &str, scores: Vec<(String, f64)>) -> Result<Self> {
        let mut ranked = scores;
        // stable: equal scores keep insertion order
        ranked.sort_by(|a, b| a.1.total_cmp(&b.1));
        let predicted = ranked.first().ok_or(Error::EmptyGallery)?.0.clone();
        Ok(MatchResult {
            probe_id: probe_id.to_owned(),
            ranked,
            predicted,
        })
    }

    pub fn best_score(&self) -> f64 {
        self.ranked[0].1
    }
}

pub fn nearest_series(probe: &FeatureSeries, gallery: &GalleryModel) -> Result<MatchResult> {
    nearest_series_for(probe, "probe", gallery)
}

pub fn nearest_series_for(
    probe: &FeatureSeries,
    probe_id: &str,
    gallery: &GalleryModel,
) -> Result<MatchResult> {
    if gallery.is_empty() {
        return Err(Error::EmptyGallery);
    }
    gallery.check_probe(probe)?;
    let scores = gallery
        .entries
        .iter()
        .map(|e| (e.subject_id.clone(), l1(probe.values(), e.series.values())))
        .collect();
    MatchResult::from_scores(probe_id, scores)
}

/// Pick the training series whose signature is closest to `z`.
pub fn mean_reference_classify(z: f64, gallery: &GalleryModel) -> Result<MatchResult> {
    if gallery.is_empty() {
        return Err(Error::EmptyGallery);
    }
    let scores = gallery
        .row_signatures()
        .into_iter()
        .map(|(id, y)| (id.to_owned(), (y - z).abs()))
        .collect();
    MatchResult::from_scores("probe", scores)
}

/// Mean-reference rule applied to a probe series. Compares in the scaled
/// domain so integer series never see a rounded mean.
pub fn mean_reference_for(
    probe: &FeatureSeries,
    probe_id: &str,
    gallery: &GalleryModel,
) -> Result<MatchResult> {
    if gallery.is_empty() {
        return Err(Error::EmptyGallery);
    }
    gallery.check_probe(probe)?;
    let k = gallery.len() as f64;
    let z = gallery.scaled_signature(probe.values());
    let scores = gallery
        .entries
        .iter()
        .zip(&gallery.scaled_signatures)
        .map(|(e, y)| (e.subject_id.clone(), (y - z).abs() / k))
        .collect();
    MatchResult::from_scores(probe_id, scores)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum ClassifierKind {
    #[default]
    Nearest,
    MeanReference,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 2] = [ClassifierKind::Nearest, ClassifierKind::MeanReference];

    pub fn classify(
        self,
        probe: &FeatureSeries,
        probe_id: &str,
        gallery: &GalleryModel,
    ) -> Result<MatchResult> {
        match self {
            ClassifierKind::Nearest => nearest_series_for(probe, probe_id, gallery),
            ClassifierKind::MeanReference => mean_reference_for(probe, probe_id, gallery),
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassifierKind::Nearest => "nearest",
            ClassifierKind::MeanReference => "mean",
        })
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nearest" => Ok(ClassifierKind::Nearest),
            "mean" | "mean_reference" | "mean-reference" => Ok(ClassifierKind::MeanReference),
            other => Err(Error::InvalidConfig(format!(
                "unknown classifier {other:?}"
            ))),
        }
    }
}

impl Serialize for ClassifierKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ClassifierKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(v: &[f64]) -> FeatureSeries {
        FeatureSeries::new(v.to_vec(), Level::LL2)
    }

    fn enrolled(id: &str, v: &[f64]) -> Enrolled {
        Enrolled::new(id, series(v))
    }

    #[test]
    fn sim_examples() {
        let a = series(&[1.0, 2.0, 3.0]);
        assert_eq!(sim(&a, &a).unwrap(), 0.0);
        assert_eq!(sim(&a, &series(&[3.0, 2.0, 1.0])).unwrap(), 4.0);
        assert!(matches!(
            sim(&a, &series(&[1.0])),
            Err(Error::LengthMismatch(_))
        ));
    }

    #[test]
    fn sim_bound_for_320x240_frame() {
        let n = 320 * 240;
        let black = series(&vec![0.0; n]);
        let white = series(&vec![255.0; n]);
        assert_eq!(sim(&black, &white).unwrap(), 19_584_000.0);
    }

    #[test]
    fn nearest_exact_and_perturbed() {
        let g = build_mean_reference(vec![
            enrolled("a", &[0.0, 0.0, 0.0]),
            enrolled("b", &[100.0, 50.0, 7.0]),
            enrolled("c", &[255.0, 255.0, 255.0]),
        ])
        .unwrap();
        let r = nearest_series(&series(&[100.0, 50.0, 7.0]), &g).unwrap();
        assert_eq!((r.predicted.as_str(), r.best_score()), ("b", 0.0));
        let r = nearest_series(&series(&[100.0, 51.0, 7.0]), &g).unwrap();
        assert_eq!((r.predicted.as_str(), r.best_score()), ("b", 1.0));
        assert!(r.ranked.windows(2).all(|w| w[0].1 <= w[1].1));
    }

    #[test]
    fn nearest_ties_keep_insertion_order() {
        let g = build_mean_reference(vec![enrolled("x", &[2.0]), enrolled("y", &[0.0])]).unwrap();
        let r = nearest_series(&series(&[1.0]), &g).unwrap();
        assert_eq!(r.predicted, "x");
    }

    #[test]
    fn probe_length_checked() {
        let g = build_mean_reference(vec![enrolled("x", &[2.0, 3.0])]).unwrap();
        assert!(matches!(
            nearest_series(&series(&[1.0]), &g),
            Err(Error::LengthMismatch(_))
        ));
    }

    #[test]
    fn mean_reference_examples() {
        let one = build_mean_reference(vec![enrolled("a", &[3.0, 9.0])]).unwrap();
        assert_eq!(one.mean_series(), vec![3.0, 9.0]);
        assert_eq!(one.row_signatures(), vec![("a", 0.0)]);

        let two =
            build_mean_reference(vec![enrolled("a", &[0.0, 0.0]), enrolled("b", &[2.0, 2.0])])
                .unwrap();
        assert_eq!(two.mean_series(), vec![1.0, 1.0]);
        assert_eq!(two.row_signatures(), vec![("a", 2.0), ("b", 2.0)]);

        let same = build_mean_reference(vec![enrolled("a", &[5.0, 6.0]); 4]).unwrap();
        assert!(same.row_signatures().iter().all(|(_, y)| *y == 0.0));
    }

    #[test]
    fn mean_reference_thirds_are_exact() {
        // X = [1/3]; Y = [1/3, 1/3, 2/3] is not representable in binary but
        // the scaled comparison is.
        let g = build_mean_reference(vec![
            enrolled("a", &[0.0]),
            enrolled("b", &[0.0]),
            enrolled("c", &[1.0]),
        ])
        .unwrap();
        let r = mean_reference_for(&series(&[1.0]), "p", &g).unwrap();
        assert_eq!(r.predicted, "c");
        assert_eq!(r.best_score(), 0.0);
    }

    #[test]
    fn mean_reference_scalar_matching() {
        // X = [50], Y = [10, 50, 40]
        let g = build_mean_reference(vec![
            enrolled("s1", &[40.0]),
            enrolled("s2", &[100.0]),
            enrolled("s3", &[10.0]),
        ])
        .unwrap();
        assert_eq!(g.mean_series(), vec![50.0]);
        assert_eq!(mean_reference_classify(15.0, &g).unwrap().predicted, "s1");

        let g = build_mean_reference(vec![
            enrolled("s1", &[10.0, 0.0]),
            enrolled("s2", &[0.0, 0.0]),
            enrolled("s3", &[50.0, 0.0]),
        ])
        .unwrap();
        // X = [20, 0], Y = [10, 20, 30]
        assert_eq!(
            g.row_signatures(),
            vec![("s1", 10.0), ("s2", 20.0), ("s3", 30.0)]
        );
        assert_eq!(mean_reference_classify(12.0, &g).unwrap().predicted, "s1");
        // |10-15| == |20-15| -> earlier entry wins
        assert_eq!(mean_reference_classify(15.0, &g).unwrap().predicted, "s1");
        assert_eq!(mean_reference_classify(29.0, &g).unwrap().predicted, "s3");
    }

    #[test]
    fn mean_reference_probe_equal_to_training_series() {
        let g = build_mean_reference(vec![
            enrolled("a", &[10.0, 0.0]),
            enrolled("b", &[0.0, 0.0]),
            enrolled("c", &[60.0, 30.0]),
        ])
        .unwrap();
        let ys: Vec<f64> = g.row_signatures().iter().map(|r| r.1).collect();
        assert!(ys[0] != ys[1] && ys[1] != ys[2] && ys[0] != ys[2]);
        for e in g.entries() {
            let z = g.signature(&e.series).unwrap();
            assert_eq!(
                mean_reference_classify(z, &g).unwrap().predicted,
                e.subject_id
            );
            assert_eq!(
                mean_reference_for(&e.series, "p", &g).unwrap().predicted,
                e.subject_id
            );
        }
    }

    #[test]
    fn mean_reference_collapses_distinct_series() {
        // Two different probes with the same deviation from X get the same
        // scalar and thus the same prediction: a limitation of the rule.
        let g = build_mean_reference(vec![enrolled("a", &[0.0, 0.0]), enrolled("b", &[4.0, 4.0])])
            .unwrap();
        let p = series(&[3.0, 2.0]);
        let q = series(&[2.0, 3.0]);
        assert_ne!(p, q);
        assert_eq!(g.signature(&p).unwrap(), g.signature(&q).unwrap());
    }

    #[test]
    fn empty_and_inconsistent_galleries() {
        assert!(matches!(
            build_mean_reference(vec![]),
            Err(Error::EmptyGallery)
        ));
        assert!(matches!(
            build_mean_reference(vec![enrolled("a", &[1.0]), enrolled("b", &[1.0, 2.0])]),
            Err(Error::LengthMismatch(_))
        ));
    }

    #[test]
    fn classifier_names() {
        assert_eq!(
            "mean".parse::<ClassifierKind>().unwrap(),
            ClassifierKind::MeanReference
        );
        assert_eq!(ClassifierKind::Nearest.to_string(), "nearest");
        assert!("knn".parse::<ClassifierKind>().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn triple() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
            (1usize..64).prop_flat_map(|n| {
                let v = || proptest::collection::vec((0u8..=255).prop_map(f64::from), n);
                (v(), v(), v())
            })
        }

        proptest! {
            #[test]
            fn bounded_by_full_swing((a, b, _) in triple()) {
                let s = sim(&series(&a), &series(&b)).unwrap();
                prop_assert!(s <= 255.0 * a.len() as f64);
            }

            #[test]
            fn appending_worse_series_keeps_prediction((a, b, p) in triple()) {
                let g = build_mean_reference(vec![enrolled("a", &a), enrolled("b", &b)]).unwrap();
                let probe = series(&p);
                let before = nearest_series(&probe, &g).unwrap();
                // a series strictly farther from the probe than the current best
                let worse: Vec<f64> = p.iter().map(|&v| if v < 128.0 { 255.0 } else { 0.0 }).collect();
                prop_assume!(sim(&probe, &series(&worse)).unwrap() > before.best_score());
                let g2 = build_mean_reference(vec![enrolled("a", &a), enrolled("b", &b), enrolled("w", &worse)]).unwrap();
                prop_assert_eq!(nearest_series(&probe, &g2).unwrap().predicted, before.predicted);
            }
        }
    }
}
