//! Batch orchestration: configuration, ingestion, the full stage chain,
//! and report/plot emission. Re-running on identical inputs produces
//! byte-identical outputs.

mod config;
pub mod ingest;
mod plotdata;
mod report;

pub use config::{InputPaths, PipelineConfig};
pub use plotdata::emit_plot_data;
pub use report::{
    AttentionReport, CaseReport, DriverLap, DriverSummary, SessionSummary, StageAccounting,
    WarningRecord,
};

pub use ingest::LineIssue;

use crate::attention::{
    case_observation_metrics, split_cases, AttentionError, CaseMetrics, CaseWindow,
    TrackObservation,
};
use crate::classify::{attention_classify, ClassifyError, ClassifyOutcome};
use crate::geometry::{read_trajectory_csv, Angle, EgoTrajectory};
use crate::headpose::{
    calibrate_mount_offset, estimate_series, to_vehicle_yaw, FaceTemplate, HeadPoseSample,
    MountOffset,
};
use crate::tracker::{track_scene, SceneTracks};
use crate::yawfilter::{filter_pipeline, YawSample, YawSeries};
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("config error: {0}")]
    Config(String),
    #[error("pipeline stage failed: {0}")]
    Stage(String),
}

/// Everything one run produced, for report emission and inspection.
#[derive(Debug)]
pub struct PipelineArtifacts {
    pub config: PipelineConfig,
    pub trajectory: EgoTrajectory,
    pub head_samples: Vec<HeadPoseSample>,
    pub yaw_raw: YawSeries,
    pub yaw_filtered: YawSeries,
    pub tracks: SceneTracks,
    pub cases: Vec<CaseWindow>,
    pub metrics: Vec<CaseMetrics>,
    pub observations: Vec<Vec<TrackObservation>>,
    pub classification: Option<ClassifyOutcome>,
    pub report: AttentionReport,
}

/// Builds the raw vehicle-frame yaw series from camera-frame head poses.
fn vehicle_yaw_series(
    samples: &[HeadPoseSample],
    sign: f64,
    offset: Angle,
) -> Result<YawSeries, PipelineError> {
    let mut yaw_samples: Vec<YawSample> = samples
        .iter()
        .map(|s| YawSample {
            t: s.t,
            yaw: to_vehicle_yaw(s.yaw, sign, offset),
            ambiguous: s.ambiguous,
            interpolated: false,
        })
        .collect();
    yaw_samples.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
    yaw_samples.dedup_by(|a, b| a.t == b.t);
    YawSeries::new(yaw_samples).map_err(|e| PipelineError::Stage(e.to_string()))
}

/// Persisted stage outputs substituted for recomputation, letting stages
/// re-run independently.
#[derive(Debug, Default)]
pub struct StageOverrides {
    pub head_samples: Option<Vec<HeadPoseSample>>,
    pub tracks: Option<Vec<crate::tracker::Track>>,
}

/// Runs ingest → headpose → filter → track → split → observe → metrics →
/// classify → report. Per-record problems become warnings; only unreadable
/// inputs or invalid configuration abort.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineArtifacts, PipelineError> {
    run_pipeline_with(config, StageOverrides::default())
}

/// [`run_pipeline`] with selected stages replaced by persisted outputs.
pub fn run_pipeline_with(
    config: &PipelineConfig,
    overrides: StageOverrides,
) -> Result<PipelineArtifacts, PipelineError> {
    config.validate()?;
    let mut warnings: Vec<WarningRecord> = Vec::new();
    let mut accounting: Vec<StageAccounting> = Vec::new();

    // Ingestion.
    let traj_file = std::fs::File::open(&config.inputs.ego)
        .map_err(|e| PipelineError::Io { path: config.inputs.ego.clone(), source: e })?;
    let trajectory = read_trajectory_csv(traj_file).map_err(|e| PipelineError::Parse {
        path: config.inputs.ego.clone(),
        message: e.to_string(),
    })?;
    let intrinsics = ingest::read_intrinsics(&config.inputs.intrinsics)?;
    let template = match &config.inputs.template {
        Some(path) => ingest::read_template(path)?,
        None => FaceTemplate::default(),
    };
    let zones = ingest::read_zones(&config.inputs.zones)?;
    let annotations = match &config.inputs.annotations {
        Some(path) => ingest::read_annotations(path)?,
        None => Vec::new(),
    };

    let (frames, landmark_issues) = ingest::read_landmarks(&config.inputs.landmarks)?;
    let landmark_total = frames.len() + landmark_issues.len();
    accounting.push(StageAccounting::new("ingest.landmarks", landmark_total, frames.len()));
    for issue in landmark_issues {
        warnings.push(WarningRecord::new(
            "ingest.landmarks",
            "ParseError",
            format!("line {}: {}", issue.line, issue.message),
        ));
    }

    let (detections, detection_issues) =
        ingest::read_detections(&config.inputs.detections, &trajectory)?;
    let detection_total = detections.len() + detection_issues.len();
    accounting.push(StageAccounting::new("ingest.detections", detection_total, detections.len()));
    for issue in detection_issues {
        warnings.push(WarningRecord::new(
            "ingest.detections",
            "ParseError",
            format!("line {}: {}", issue.line, issue.message),
        ));
    }

    // Head pose.
    let head_samples = match overrides.head_samples {
        Some(samples) => {
            accounting.push(StageAccounting::new("headpose", samples.len(), samples.len()));
            samples
        }
        None => {
            let (samples, failures) = estimate_series(&frames, &template, &intrinsics);
            accounting.push(StageAccounting::new("headpose", frames.len(), samples.len()));
            for f in failures {
                warnings.push(WarningRecord::new("headpose", "FrameSkipped", f.reason).at(f.t));
            }
            samples
        }
    };

    // Camera-to-vehicle mount.
    let (mount_offset, mount_calibrated) = match config.mount.offset {
        MountOffset::Fixed(deg) => (
            Angle::wrap(deg).map_err(|e| PipelineError::Config(e.to_string()))?,
            false,
        ),
        MountOffset::Auto => match calibrate_mount_offset(&head_samples, &trajectory) {
            Some(offset) => (offset, true),
            None => {
                warnings.push(WarningRecord::new(
                    "headpose",
                    "CalibrationFailed",
                    "too few straight-driving samples; mount offset defaulted to 0°",
                ));
                (Angle::wrap_unchecked(0.0), false)
            }
        },
    };

    // Yaw filtering.
    let yaw_raw = vehicle_yaw_series(&head_samples, config.mount.sign, mount_offset)?;
    let (yaw_filtered, filter_warnings) = filter_pipeline(&yaw_raw, &config.filter)
        .map_err(|e| PipelineError::Config(e.to_string()))?;
    let kept_original =
        yaw_filtered.samples().iter().filter(|s| !s.interpolated).count();
    accounting.push(StageAccounting::new("yawfilter", yaw_raw.len(), kept_original));
    let interpolated = yaw_filtered.len() - kept_original;
    if interpolated > 0 {
        warnings.push(WarningRecord::new(
            "yawfilter",
            "GapFilled",
            format!("{interpolated} samples interpolated into gaps"),
        ));
    }
    for w in filter_warnings {
        warnings.push(WarningRecord::new("yawfilter", "FilterWarning", w.message));
    }

    // Tracking.
    let tracks = match overrides.tracks {
        Some(flat) => {
            let mut scene = SceneTracks::default();
            for track in flat {
                match track.class {
                    crate::tracker::ObjectClass::Vehicle => scene.vehicles.push(track),
                    crate::tracker::ObjectClass::Pedestrian => scene.pedestrians.push(track),
                }
            }
            scene
        }
        None => track_scene(&detections, &config.tracker_vehicle, &config.tracker_pedestrian)
            .map_err(|e| PipelineError::Stage(e.to_string()))?,
    };
    for w in &tracks.warnings {
        warnings.push(WarningRecord::new("tracker", "ScanFailure", w.clone()));
    }

    // Case segmentation across all zones, in time order.
    let mut cases: Vec<CaseWindow> = Vec::new();
    for zone in &zones.zones {
        let (zone_cases, zone_warnings) = split_cases(&trajectory, zone, &annotations)
            .map_err(|e| PipelineError::Stage(e.to_string()))?;
        for w in zone_warnings {
            warnings.push(WarningRecord::new("cases", "Segmentation", w));
        }
        cases.extend(zone_cases);
    }
    cases.sort_by(|a, b| a.t0.partial_cmp(&b.t0).unwrap());

    // Observation and metrics.
    let all_tracks: Vec<crate::tracker::Track> = tracks.all().cloned().collect();
    let mut metrics = Vec::new();
    let mut observations = Vec::new();
    let mut kept_cases = Vec::new();
    for case in &cases {
        match case_observation_metrics(
            &yaw_filtered,
            &all_tracks,
            &trajectory,
            case,
            &config.gating,
            &config.regions,
        ) {
            Ok((m, obs)) => {
                metrics.push(m);
                observations.push(obs);
                kept_cases.push(case.clone());
            }
            Err(AttentionError::EmptyCase(id)) => {
                warnings.push(
                    WarningRecord::new("attention", "EmptyCase", "no gated tracks; case excluded")
                        .for_case(&id),
                );
            }
            Err(e) => return Err(PipelineError::Stage(e.to_string())),
        }
    }
    accounting.push(StageAccounting::new("cases", cases.len(), kept_cases.len()));

    // Classification.
    let classification = if metrics.len() >= 2 {
        match attention_classify(&metrics, &config.classify) {
            Ok(outcome) => {
                for w in &outcome.warnings {
                    warnings.push(WarningRecord::new("classify", "Degenerate", w.clone()));
                }
                Some(outcome)
            }
            Err(ClassifyError::DegenerateClustering(reason)) => {
                warnings.push(WarningRecord::new("classify", "Degenerate", reason));
                None
            }
            Err(e) => return Err(PipelineError::Stage(e.to_string())),
        }
    } else {
        if !metrics.is_empty() {
            warnings.push(WarningRecord::new(
                "classify",
                "TooFewCases",
                "at least 2 cases are required to fit the classifiers",
            ));
        }
        None
    };

    // Report assembly.
    let case_reports = kept_cases
        .iter()
        .zip(&metrics)
        .enumerate()
        .map(|(i, (window, m))| {
            let label = classification.as_ref().map(|c| &c.labels[i]);
            CaseReport {
                window: window.clone(),
                metrics: m.clone(),
                scenario: label.map(|l| l.scenario),
                attention: label.map(|l| l.attention),
                z_veh: label.map(|l| l.z_veh),
                z_ped: label.map(|l| l.z_ped),
            }
        })
        .collect();
    let mut report = AttentionReport {
        cases: case_reports,
        summary: SessionSummary::default(),
        drivers: Vec::new(),
        mount_offset_deg: mount_offset.degrees(),
        mount_calibrated,
        warnings,
        accounting,
    };
    report.finalize();

    Ok(PipelineArtifacts {
        config: config.clone(),
        trajectory,
        head_samples,
        yaw_raw,
        yaw_filtered,
        tracks,
        cases: kept_cases,
        metrics,
        observations,
        classification,
        report,
    })
}

/// Runs the pipeline and writes report.json plus all plot CSVs and stage
/// dumps into the configured output directory.
pub fn run_and_emit(config: &PipelineConfig) -> Result<PipelineArtifacts, PipelineError> {
    let artifacts = run_pipeline(config)?;
    let out = &config.output_dir;
    std::fs::create_dir_all(out)
        .map_err(|e| PipelineError::Io { path: out.clone(), source: e })?;
    std::fs::write(out.join("report.json"), artifacts.report.to_json_pretty())
        .map_err(|e| PipelineError::Io { path: out.join("report.json"), source: e })?;
    if let Some(outcome) = &artifacts.classification {
        // Audit dump: fitted centroids and assignments of every stage.
        let text = serde_json::to_string_pretty(outcome)
            .map_err(|e| PipelineError::Stage(format!("serialize classifier models: {e}")))?;
        std::fs::write(out.join("classify_models.json"), text + "\n")
            .map_err(|e| PipelineError::Io { path: out.join("classify_models.json"), source: e })?;
    }
    ingest::write_headpose_samples(&out.join("headpose.jsonl"), &artifacts.head_samples)?;
    let all_tracks: Vec<crate::tracker::Track> = artifacts.tracks.all().cloned().collect();
    ingest::write_tracks(&out.join("tracks.jsonl"), &all_tracks)?;
    ingest::write_metrics(&out.join("metrics.jsonl"), &artifacts.metrics)?;
    emit_plot_data(&artifacts, out)?;
    Ok(artifacts)
}
