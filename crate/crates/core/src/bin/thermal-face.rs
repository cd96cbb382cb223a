use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use thermal_face::classify::{build_mean_reference, ClassifierKind, Enrolled};
use thermal_face::eval::{
    self, emit_report, evaluate, load_gray, load_manifest, preprocess, read_gallery, run_pipeline,
    split_odd_even, write_atomic, write_gallery, EvalConfig, ReportFormat,
};
use thermal_face::features::Level;
use thermal_face::imaging::pnm::encode_pgm;
use thermal_face::segmentation::Connectivity;
use thermal_face::synth::{self, SynthConfig};
use thermal_face::{Config, Error, Result, Stage};

#[derive(Parser)]
#[command(
    name = "thermal-face",
    version,
    about = "Thermal face identification by Haar wavelets and series matching"
)]
struct Cli {
    #[command(flatten)]
    opts: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every subcommand; flags override the config file.
#[derive(Args)]
struct ConfigArgs {
    /// key=value config file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Feature level: original, ll1, ll2
    #[arg(long, global = true)]
    level: Option<Level>,
    /// nearest or mean
    #[arg(long, global = true)]
    classifier: Option<ClassifierKind>,
    /// 4 or 8
    #[arg(long, global = true)]
    connectivity: Option<u8>,
    /// Square edge crops are resampled to (0 disables resampling)
    #[arg(long, global = true)]
    crop_size: Option<usize>,
    /// Keep real-valued coefficients instead of rounding to 0..=255
    #[arg(long, global = true)]
    no_quantize: bool,
    /// Write intermediate images as PGM here
    #[arg(long, global = true)]
    debug_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the gray, binary, largest-component and crop images for one input
    Preprocess { input: PathBuf, output_dir: PathBuf },
    /// Print the feature series of one image as a gallery record
    Extract {
        input: PathBuf,
        #[arg(long, default_value = "probe")]
        subject: String,
    },
    /// Enroll the training half of a manifest into a gallery file
    Enroll {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        gallery: PathBuf,
    },
    /// Identify one probe image against a gallery
    Identify {
        probe: PathBuf,
        #[arg(long)]
        gallery: PathBuf,
        #[arg(long, default_value_t = 5)]
        top: usize,
    },
    /// Run the odd/even protocol at every level and report recognition rates
    Evaluate {
        #[arg(long)]
        manifest: PathBuf,
        /// Report file
        #[arg(long)]
        out: PathBuf,
        /// Format of the report file: csv, json or table
        #[arg(long, default_value = "csv")]
        report: ReportFormat,
        /// Dataset name shown in the report (defaults to the manifest's directory)
        #[arg(long)]
        dataset: Option<String>,
    },
    /// Generate a seeded synthetic dataset with a manifest
    Synth {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 10)]
        subjects: usize,
        #[arg(long, default_value_t = 4)]
        per_subject: usize,
        #[arg(long, default_value_t = 2)]
        noise: u8,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

impl ConfigArgs {
    fn resolve(&self) -> Result<Config> {
        let mut cfg = match &self.config {
            Some(path) => Config::load(path)?,
            None => Config::default(),
        };
        if let Some(level) = self.level {
            cfg.level = level;
        }
        if let Some(c) = self.classifier {
            cfg.classifier = Some(c);
        }
        if let Some(n) = self.connectivity {
            cfg.connectivity = Connectivity::from_neighbours(n)?;
        }
        if let Some(size) = self.crop_size {
            cfg.crop_size = size;
        }
        if self.no_quantize {
            cfg.quantize = false;
        }
        if let Some(dir) = &self.debug_dir {
            cfg.debug_dir = Some(dir.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn cmd_preprocess(input: &Path, out_dir: &Path, cfg: &Config) -> Result<()> {
    let gray = load_gray(input)?;
    let pre = preprocess(gray, cfg.connectivity)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    for (name, img) in [
        ("gray", pre.gray.clone()),
        ("binary", pre.binary.to_gray()),
        ("largest", pre.largest.to_gray()),
        ("crop", pre.crop.to_gray()),
    ] {
        write_atomic(&out_dir.join(format!("{name}.pgm")), &encode_pgm(&img))?;
    }
    let (cx, cy) = pre.ellipse.center();
    println!(
        "centroid x={:.3} y={:.3}",
        pre.centroid.x(),
        pre.centroid.y()
    );
    println!(
        "ellipse center=({cx},{cy}) semi_minor={} semi_major={}",
        pre.ellipse.semi_minor(),
        pre.ellipse.semi_major()
    );
    println!("crop {}x{}", pre.crop.width(), pre.crop.height());
    Ok(())
}

fn cmd_extract(input: &Path, subject: &str, cfg: &Config) -> Result<()> {
    let series = run_pipeline(input, cfg.level, &cfg.pipeline())?;
    let gallery = build_mean_reference(vec![Enrolled::new(subject, series)])?;
    print!("{}", eval::format_gallery(&gallery));
    Ok(())
}

fn cmd_enroll(manifest: &Path, gallery_out: &Path, cfg: &Config) -> Result<()> {
    let m = load_manifest(manifest).map_err(|e| e.at_stage(Stage::Eval))?;
    let train: Vec<_> = split_odd_even(&m)
        .train
        .iter()
        .map(|&i| m.entries()[i].clone())
        .collect();
    let series = extract_entries(&train, cfg.level, &cfg.pipeline())?;
    let enrolled = train
        .into_iter()
        .zip(series)
        .map(|(e, s)| Enrolled::new(e.subject_id, s))
        .collect();
    let model = build_mean_reference(enrolled).map_err(|e| e.at_stage(Stage::Classify))?;
    write_gallery(gallery_out, &model)?;
    println!("enrolled {} series (train split)", model.len());
    Ok(())
}

fn extract_entries(
    entries: &[eval::ManifestEntry],
    level: Level,
    pipeline: &eval::PipelineConfig,
) -> Result<Vec<thermal_face::FeatureSeries>> {
    use rayon::prelude::*;
    let results: Vec<Result<_>> = entries
        .par_iter()
        .map(|e| run_pipeline(&e.path, level, pipeline))
        .collect();
    entries
        .iter()
        .zip(results)
        .map(|(e, r)| r.map_err(|err| err.at_path(&e.path)))
        .collect()
}

fn cmd_identify(probe: &Path, gallery_path: &Path, top: usize, cfg: &Config) -> Result<()> {
    let gallery = read_gallery(gallery_path)?;
    if gallery.level() != cfg.level {
        return Err(Error::LengthMismatch(format!(
            "gallery enrolled at level {}, probe configured for {}",
            gallery.level(),
            cfg.level
        ))
        .at_stage(Stage::Classify));
    }
    let series = run_pipeline(probe, cfg.level, &cfg.pipeline())?;
    let classifier = cfg.classifier.unwrap_or_default();
    let probe_id = probe.display().to_string();
    let result = classifier
        .classify(&series, &probe_id, &gallery)
        .map_err(|e| e.at_stage(Stage::Classify))?;
    for (rank, (subject, score)) in result.ranked.iter().take(top).enumerate() {
        println!("{:>2}  {subject}  {score}", rank + 1);
    }
    println!("predicted {}", result.predicted);
    Ok(())
}

fn cmd_evaluate(
    manifest: &Path,
    out: &Path,
    format: ReportFormat,
    dataset: Option<String>,
    cfg: &Config,
) -> Result<()> {
    let m = load_manifest(manifest).map_err(|e| e.at_stage(Stage::Eval))?;
    let dataset = dataset.unwrap_or_else(|| {
        manifest
            .canonicalize()
            .ok()
            .and_then(|p| {
                p.parent()
                    .and_then(|d| d.file_name())
                    .map(|n| n.to_string_lossy().into_owned())
            })
            .unwrap_or_else(|| "dataset".into())
    });
    let eval_cfg = EvalConfig {
        dataset,
        pipeline: cfg.pipeline(),
        levels: vec![Level::ORIGINAL, Level::LL1, Level::LL2],
        classifiers: match cfg.classifier {
            Some(c) => vec![c],
            None => ClassifierKind::ALL.to_vec(),
        },
    };
    let report = evaluate(&m, &eval_cfg)?;
    write_atomic(out, emit_report(&report, format).as_bytes())?;
    print!("{}", emit_report(&report, ReportFormat::Table));
    Ok(())
}

fn cmd_synth(out_dir: &Path, cfg: SynthConfig) -> Result<()> {
    let manifest = synth::write_dataset(out_dir, &cfg)?;
    println!(
        "wrote {} images, manifest {}",
        cfg.subjects * cfg.per_subject,
        manifest.display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let cfg = cli.opts.resolve()?;
    match cli.command {
        Command::Preprocess { input, output_dir } => cmd_preprocess(&input, &output_dir, &cfg),
        Command::Extract { input, subject } => cmd_extract(&input, &subject, &cfg),
        Command::Enroll { manifest, gallery } => cmd_enroll(&manifest, &gallery, &cfg),
        Command::Identify {
            probe,
            gallery,
            top,
        } => cmd_identify(&probe, &gallery, top, &cfg),
        Command::Evaluate {
            manifest,
            out,
            report,
            dataset,
        } => cmd_evaluate(&manifest, &out, report, dataset, &cfg),
        Command::Synth {
            out_dir,
            subjects,
            per_subject,
            noise,
            seed,
        } => cmd_synth(
            &out_dir,
            SynthConfig {
                subjects,
                per_subject,
                noise,
                seed,
                ..SynthConfig::default()
            },
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
