mod common;

use std::path::Path;

use thermal_face::classify::{build_mean_reference, ClassifierKind, Enrolled};
use thermal_face::eval::{
    evaluate, extract_face, format_manifest, load_manifest, run_pipeline, DatasetManifest,
    EvalConfig, ManifestEntry, PipelineConfig,
};
use thermal_face::features::Level;
use thermal_face::imaging::{pnm, GrayImage};
use thermal_face::synth::{self, SynthConfig};
use thermal_face::{Error, Stage};

fn dataset(dir: &Path, cfg: &SynthConfig) -> DatasetManifest {
    load_manifest(&synth::write_dataset(dir, cfg).unwrap()).unwrap()
}

/// Odd/even split and pairwise L1 argmin over the resampled crops, done
/// independently of the library's split and classifier.
fn brute_force_original_rate(m: &DatasetManifest, cfg: &PipelineConfig) -> (usize, usize) {
    let crops: Vec<Vec<f64>> = m
        .entries()
        .iter()
        .map(|e| extract_face(&e.path, cfg).unwrap().data().to_vec())
        .collect();
    let mut seen = std::collections::HashMap::new();
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (i, e) in m.entries().iter().enumerate() {
        let n: &mut usize = seen.entry(e.subject_id.clone()).or_default();
        if (*n).is_multiple_of(2) {
            train.push(i)
        } else {
            test.push(i)
        }
        *n += 1;
    }
    let gallery: Vec<(String, Vec<f64>)> = train
        .iter()
        .map(|&i| (m.entries()[i].subject_id.clone(), crops[i].clone()))
        .collect();
    let correct = test
        .iter()
        .filter(|&&i| common::brute_force_argmin(&crops[i], &gallery) == m.entries()[i].subject_id)
        .count();
    (correct, test.len())
}

fn original_nearest(m: &DatasetManifest, pipeline: &PipelineConfig) -> (usize, usize) {
    let report = evaluate(
        m,
        &EvalConfig {
            pipeline: pipeline.clone(),
            levels: vec![Level::ORIGINAL],
            classifiers: vec![ClassifierKind::Nearest],
            ..EvalConfig::default()
        },
    )
    .unwrap();
    (report.rows[0].correct, report.rows[0].total)
}

#[test]
fn original_rate_matches_brute_force() {
    let dir = tempfile::tempdir().unwrap();
    let m = dataset(dir.path(), &SynthConfig::default());
    let cfg = PipelineConfig::default();
    assert_eq!(
        original_nearest(&m, &cfg),
        brute_force_original_rate(&m, &cfg)
    );
}

#[test]
fn noisy_dataset_still_matches_brute_force() {
    let dir = tempfile::tempdir().unwrap();
    let m = dataset(
        dir.path(),
        &SynthConfig {
            noise: 60,
            per_subject: 6,
            seed: 21,
            ..SynthConfig::default()
        },
    );
    let cfg = PipelineConfig::default();
    let ours = original_nearest(&m, &cfg);
    assert_eq!(ours, brute_force_original_rate(&m, &cfg));
    assert_eq!(ours.1, 30);
}

#[test]
fn train_equals_test_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let m = dataset(
        dir.path(),
        &SynthConfig {
            noise: 40,
            ..SynthConfig::default()
        },
    );
    let cfg = PipelineConfig::default();
    for level in [Level::ORIGINAL, Level::LL1, Level::LL2] {
        let series: Vec<_> = m
            .entries()
            .iter()
            .map(|e| {
                (
                    e.subject_id.clone(),
                    run_pipeline(&e.path, level, &cfg).unwrap(),
                )
            })
            .collect();
        let gallery = build_mean_reference(
            series
                .iter()
                .map(|(id, s)| Enrolled::new(id.clone(), s.clone()))
                .collect(),
        )
        .unwrap();
        for (id, s) in &series {
            let r = ClassifierKind::Nearest.classify(s, id, &gallery).unwrap();
            assert_eq!(&r.predicted, id);
            assert_eq!(r.best_score(), 0.0);
        }
    }
}

#[test]
fn report_rows_are_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let m = dataset(
        dir.path(),
        &SynthConfig {
            noise: 30,
            ..SynthConfig::default()
        },
    );
    let report = evaluate(&m, &EvalConfig::default()).unwrap();
    assert_eq!(report.rows.len(), 6);
    for row in &report.rows {
        assert_eq!(row.total, 20);
        assert!(row.correct <= row.total);
        assert_eq!(
            row.rate_percent,
            100.0 * row.correct as f64 / row.total as f64
        );
    }
}

#[test]
fn blank_image_fails_in_segmentation_with_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let blank = dir.path().join("blank.pgm");
    std::fs::write(
        &blank,
        pnm::encode_pgm(&GrayImage::from_fn(16, 16, |_, _| 90)),
    )
    .unwrap();
    let good = synth::generate(&SynthConfig {
        subjects: 1,
        per_subject: 3,
        ..SynthConfig::default()
    });
    let mut entries = vec![ManifestEntry {
        path: blank.clone(),
        subject_id: "s00".into(),
    }];
    for (i, img) in good.iter().enumerate() {
        let p = dir.path().join(format!("g{i}.pgm"));
        std::fs::write(&p, pnm::encode_pgm(&img.image)).unwrap();
        entries.push(ManifestEntry {
            path: p,
            subject_id: "s00".into(),
        });
    }
    std::fs::write(dir.path().join("m.csv"), format_manifest(&entries)).unwrap();
    let m = load_manifest(&dir.path().join("m.csv")).unwrap();
    let err = evaluate(&m, &EvalConfig::default()).unwrap_err();
    assert!(matches!(err.root(), Error::NoForeground), "{err}");
    assert_eq!(err.stage(), Some(Stage::Segmentation));
    assert!(err.to_string().contains("blank.pgm"), "{err}");
}

#[test]
fn raw_crops_without_resampling() {
    let imgs = synth::generate(&SynthConfig {
        subjects: 1,
        per_subject: 1,
        ..SynthConfig::default()
    });
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("one.pgm");
    std::fs::write(&p, pnm::encode_pgm(&imgs[0].image)).unwrap();
    let cfg = PipelineConfig {
        crop_size: None,
        ..PipelineConfig::default()
    };
    let face = extract_face(&p, &cfg).unwrap();
    assert_eq!(face.width() % 4, 0);
    assert_eq!(face.height() % 4, 0);
    let ll2 = run_pipeline(&p, Level::LL2, &cfg).unwrap();
    assert_eq!(ll2.len(), face.width() * face.height() / 16);
}
