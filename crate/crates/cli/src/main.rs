//! Batch CLI for the driver attention pipeline.
//!
//! Exit codes: 0 = success, 1 = fatal input error, 2 = completed with
//! warnings.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use vigil_core::classify::{attention_classify, ClassifyOptions};
use vigil_core::pipeline::{self, ingest, PipelineConfig, StageOverrides};
use vigil_core::synth::{self, GazeProfile, ScenarioSpec};

#[derive(Parser)]
#[command(
    name = "vigil",
    about = "Driver attention analytics from head-orientation and vehicle perception logs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Pipeline config file (key = value lines).
    #[arg(long)]
    config: PathBuf,
    /// Override a config key, e.g. --set filter.hampel_window=15.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> Result<PipelineConfig> {
        let mut config = PipelineConfig::from_file(&self.config)
            .with_context(|| format!("loading {}", self.config.display()))?;
        config.apply_overrides(&self.overrides)?;
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate all configured input logs and print record counts.
    Ingest(ConfigArgs),
    /// Estimate per-frame head poses; writes headpose.jsonl.
    Headpose(ConfigArgs),
    /// Track detections; writes tracks.jsonl.
    Track(ConfigArgs),
    /// Segment cases and compute per-case metrics; writes metrics.jsonl.
    /// Reuses persisted headpose.jsonl / tracks.jsonl when present.
    Analyze(ConfigArgs),
    /// Classify a metrics.jsonl file; writes labels.jsonl.
    Classify {
        /// Per-case metrics (JSONL).
        #[arg(long)]
        metrics: PathBuf,
        /// Output labels file (JSONL).
        #[arg(long)]
        out: PathBuf,
        /// Feed stage 2 binary stage-1 labels instead of normalized scores.
        #[arg(long)]
        binary: bool,
    },
    /// Run the whole pipeline and emit report.json plus plot CSVs.
    Report(ConfigArgs),
    /// Generate a synthetic scenario directory with ground truth.
    Synth {
        /// Gaze profile: attentive | inattentive | alternating | drift.
        #[arg(long, default_value = "attentive")]
        profile: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Laps per driver.
        #[arg(long, default_value_t = 3)]
        laps: u32,
        /// Comma-separated driver names.
        #[arg(long, default_value = "A")]
        drivers: String,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Print the full default configuration.
    Defaults,
}

fn issues_to_exit(issues: usize) -> u8 {
    if issues > 0 {
        2
    } else {
        0
    }
}

fn cmd_ingest(args: &ConfigArgs) -> Result<u8> {
    let config = args.load()?;
    config.validate()?;
    let ego_file = std::fs::File::open(&config.inputs.ego)?;
    let traj = vigil_core::geometry::read_trajectory_csv(ego_file)?;
    println!("ego: {} poses [{:.2}, {:.2}] s", traj.samples().len(), traj.first_t(), traj.last_t());

    let (frames, frame_issues) = ingest::read_landmarks(&config.inputs.landmarks)?;
    println!("landmarks: {} frames, {} bad lines", frames.len(), frame_issues.len());

    let (detections, det_issues) = ingest::read_detections(&config.inputs.detections, &traj)?;
    println!("detections: {} records, {} bad lines", detections.len(), det_issues.len());

    ingest::read_intrinsics(&config.inputs.intrinsics)?;
    let zones = ingest::read_zones(&config.inputs.zones)?;
    println!("zones: {}", zones.zones.len());
    if let Some(path) = &config.inputs.annotations {
        let annotations = ingest::read_annotations(path)?;
        println!("annotations: {}", annotations.len());
    }
    Ok(issues_to_exit(frame_issues.len() + det_issues.len()))
}

fn cmd_headpose(args: &ConfigArgs) -> Result<u8> {
    let config = args.load()?;
    let artifacts = pipeline::run_pipeline(&config)?;
    std::fs::create_dir_all(&config.output_dir)?;
    let out = config.output_dir.join("headpose.jsonl");
    ingest::write_headpose_samples(&out, &artifacts.head_samples)?;
    println!("{} samples -> {}", artifacts.head_samples.len(), out.display());
    Ok(issues_to_exit(artifacts.report.warnings.len()))
}

fn cmd_track(args: &ConfigArgs) -> Result<u8> {
    let config = args.load()?;
    let artifacts = pipeline::run_pipeline(&config)?;
    std::fs::create_dir_all(&config.output_dir)?;
    let out = config.output_dir.join("tracks.jsonl");
    let all: Vec<_> = artifacts.tracks.all().cloned().collect();
    ingest::write_tracks(&out, &all)?;
    println!(
        "{} vehicle + {} pedestrian tracks -> {}",
        artifacts.tracks.vehicles.len(),
        artifacts.tracks.pedestrians.len(),
        out.display()
    );
    Ok(issues_to_exit(artifacts.report.warnings.len()))
}

fn cmd_analyze(args: &ConfigArgs) -> Result<u8> {
    let config = args.load()?;
    // Reuse persisted stage outputs when they exist.
    let mut overrides = StageOverrides::default();
    let headpose_path = config.output_dir.join("headpose.jsonl");
    if headpose_path.exists() {
        let (samples, _) = ingest::read_headpose_samples(&headpose_path)?;
        println!("reusing {} ({} samples)", headpose_path.display(), samples.len());
        overrides.head_samples = Some(samples);
    }
    let tracks_path = config.output_dir.join("tracks.jsonl");
    if tracks_path.exists() {
        let (tracks, _) = ingest::read_tracks(&tracks_path)?;
        println!("reusing {} ({} tracks)", tracks_path.display(), tracks.len());
        overrides.tracks = Some(tracks);
    }
    let artifacts = pipeline::run_pipeline_with(&config, overrides)?;
    std::fs::create_dir_all(&config.output_dir)?;
    let out = config.output_dir.join("metrics.jsonl");
    ingest::write_metrics(&out, &artifacts.metrics)?;
    println!("{} cases -> {}", artifacts.metrics.len(), out.display());
    Ok(issues_to_exit(artifacts.report.warnings.len()))
}

fn cmd_classify(metrics_path: &std::path::Path, out: &std::path::Path, binary: bool) -> Result<u8> {
    let (metrics, issues) = ingest::read_metrics(metrics_path)?;
    if metrics.len() < 2 {
        bail!("need at least 2 cases to classify, got {}", metrics.len());
    }
    let outcome = attention_classify(&metrics, &ClassifyOptions { stage2_binary: binary })?;
    ingest::write_labels(out, &outcome.labels)?;
    let lows = outcome
        .labels
        .iter()
        .filter(|l| l.attention == vigil_core::classify::AttentionLevel::Low)
        .count();
    println!(
        "{} cases -> {} ({} low / {} regular)",
        outcome.labels.len(),
        out.display(),
        lows,
        outcome.labels.len() - lows
    );
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    Ok(issues_to_exit(issues.len() + outcome.warnings.len()))
}

fn cmd_report(args: &ConfigArgs) -> Result<u8> {
    let config = args.load()?;
    let artifacts = pipeline::run_and_emit(&config)?;
    let report = &artifacts.report;
    println!(
        "{} cases: {} regular / {} low (scenario I/II: {}/{})",
        report.summary.cases,
        report.summary.regular,
        report.summary.low,
        report.summary.scenario_i,
        report.summary.scenario_ii
    );
    println!("report: {}", config.output_dir.join("report.json").display());
    if !report.warnings.is_empty() {
        eprintln!("{} warnings recorded in the report ledger", report.warnings.len());
    }
    Ok(issues_to_exit(report.warnings.len()))
}

fn cmd_synth(profile: &str, seed: u64, laps: u32, drivers: &str, out_dir: &std::path::Path) -> Result<u8> {
    let drivers: Vec<&str> = drivers.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if drivers.is_empty() {
        bail!("no drivers given");
    }
    let mut profiles: Vec<(String, u32, GazeProfile)> = Vec::new();
    for driver in &drivers {
        for lap in 1..=laps {
            let gaze = match profile {
                "attentive" => GazeProfile::Attentive,
                "inattentive" => GazeProfile::Inattentive,
                "alternating" => {
                    if lap % 2 == 1 {
                        GazeProfile::Attentive
                    } else {
                        GazeProfile::Inattentive
                    }
                }
                "drift" => {
                    if lap == 1 {
                        GazeProfile::Attentive
                    } else {
                        GazeProfile::Inattentive
                    }
                }
                other => bail!("unknown profile '{other}'"),
            };
            profiles.push((driver.to_string(), lap, gaze));
        }
    }
    let spec = ScenarioSpec::with_profiles(seed, &profiles);
    let scenario = synth::generate(&spec)?;
    synth::write_scenario_dir(&scenario, out_dir)?;
    println!(
        "scenario with {} laps ({} drivers) -> {}",
        profiles.len(),
        drivers.len(),
        out_dir.display()
    );
    println!("run: vigil report --config {}", out_dir.join("pipeline.conf").display());
    Ok(0)
}

fn run() -> Result<u8> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Headpose(args) => cmd_headpose(args),
        Command::Track(args) => cmd_track(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Classify { metrics, out, binary } => cmd_classify(metrics, out, *binary),
        Command::Report(args) => cmd_report(args),
        Command::Synth { profile, seed, laps, drivers, out_dir } => {
            cmd_synth(profile, *seed, *laps, drivers, out_dir)
        }
        Command::Defaults => {
            print!("{}", PipelineConfig::defaults_dump());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
