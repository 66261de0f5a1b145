//! Log ingestion and stage persistence.
//!
//! JSONL throughout for record streams: one JSON object per line. Readers
//! are lenient per record (bad lines are reported and skipped) but fatal
//! on unreadable files, so a batch never dies on one corrupt line.

use super::PipelineError;
use crate::attention::{CaseAnnotation, CaseMetrics, ZoneSet};
use crate::geometry::{interpolate_pose, EgoTrajectory};
use crate::headpose::{CameraIntrinsics, FaceTemplate, HeadPoseSample, LandmarkFrame};
use crate::tracker::{Detection, ObjectClass, Track};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

/// One skipped record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LineIssue {
    pub line: usize,
    pub message: String,
}

fn open(path: &Path) -> Result<std::fs::File, PipelineError> {
    std::fs::File::open(path).map_err(|e| PipelineError::Io { path: path.to_path_buf(), source: e })
}

fn create(path: &Path) -> Result<std::fs::File, PipelineError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| PipelineError::Io { path: parent.to_path_buf(), source: e })?;
    }
    std::fs::File::create(path)
        .map_err(|e| PipelineError::Io { path: path.to_path_buf(), source: e })
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<(Vec<T>, Vec<LineIssue>), PipelineError> {
    let reader = BufReader::new(open(path)?);
    let mut records = Vec::new();
    let mut issues = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| PipelineError::Io { path: path.to_path_buf(), source: e })?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<T>(&line) {
            Ok(r) => records.push(r),
            Err(e) => issues.push(LineIssue { line: i + 1, message: e.to_string() }),
        }
    }
    Ok((records, issues))
}

fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), PipelineError> {
    let mut file = create(path)?;
    for r in records {
        let line = serde_json::to_string(r)
            .map_err(|e| PipelineError::Stage(format!("serialize {}: {e}", path.display())))?;
        writeln!(file, "{line}")
            .map_err(|e| PipelineError::Io { path: path.to_path_buf(), source: e })?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Landmark log: {"t": <s>, "A": [u,v], "B": [u,v], "C": [u,v], "D": [u,v]}
// ---------------------------------------------------------------------------

pub fn read_landmarks(path: &Path) -> Result<(Vec<LandmarkFrame>, Vec<LineIssue>), PipelineError> {
    let (mut frames, issues): (Vec<LandmarkFrame>, _) = read_jsonl(path)?;
    frames.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
    Ok((frames, issues))
}

pub fn write_landmarks(path: &Path, frames: &[LandmarkFrame]) -> Result<(), PipelineError> {
    write_jsonl(path, frames)
}

// ---------------------------------------------------------------------------
// Detection log:
// {"t": <s>, "class": "vehicle"|"pedestrian", "x": <m>, "y": <m>,
//  "frame": "world"|"ego", "conf": <0..1>}
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectionFrameKind {
    World,
    Ego,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub t: f64,
    pub class: ObjectClass,
    pub x: f64,
    pub y: f64,
    pub frame: DetectionFrameKind,
    pub conf: f64,
}

/// Reads detections, converting ego-frame records to the world frame with
/// the interpolated ego pose at the record timestamp.
pub fn read_detections(
    path: &Path,
    traj: &EgoTrajectory,
) -> Result<(Vec<Detection>, Vec<LineIssue>), PipelineError> {
    let (records, mut issues): (Vec<DetectionRecord>, _) = read_jsonl(path)?;
    let mut detections = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        if !(r.t.is_finite() && r.x.is_finite() && r.y.is_finite()) {
            issues.push(LineIssue { line: i + 1, message: "non-finite detection".into() });
            continue;
        }
        let (x, y) = match r.frame {
            DetectionFrameKind::World => (r.x, r.y),
            DetectionFrameKind::Ego => match interpolate_pose(traj, r.t) {
                Ok(pose) => crate::geometry::ego_to_world(
                    &pose,
                    crate::geometry::EgoPoint { x_fwd: r.x, y_lat: r.y },
                ),
                Err(e) => {
                    issues.push(LineIssue {
                        line: i + 1,
                        message: format!("ego-frame record outside trajectory: {e}"),
                    });
                    continue;
                }
            },
        };
        detections.push(Detection { t: r.t, class: r.class, x, y, confidence: r.conf });
    }
    detections.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
    Ok((detections, issues))
}

pub fn write_detections(path: &Path, detections: &[Detection]) -> Result<(), PipelineError> {
    let records: Vec<DetectionRecord> = detections
        .iter()
        .map(|d| DetectionRecord {
            t: d.t,
            class: d.class,
            x: d.x,
            y: d.y,
            frame: DetectionFrameKind::World,
            conf: d.confidence,
        })
        .collect();
    write_jsonl(path, &records)
}

// ---------------------------------------------------------------------------
// Single-document JSON configs.
// ---------------------------------------------------------------------------

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, PipelineError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| PipelineError::Io { path: path.to_path_buf(), source: e })?;
    serde_json::from_str(&text)
        .map_err(|e| PipelineError::Parse { path: path.to_path_buf(), message: e.to_string() })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let mut file = create(path)?;
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| PipelineError::Stage(format!("serialize {}: {e}", path.display())))?;
    writeln!(file, "{text}")
        .map_err(|e| PipelineError::Io { path: path.to_path_buf(), source: e })
}

pub fn read_intrinsics(path: &Path) -> Result<CameraIntrinsics, PipelineError> {
    let k: CameraIntrinsics = read_json(path)?;
    k.validate()
        .map_err(|e| PipelineError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
    Ok(k)
}

pub fn write_intrinsics(path: &Path, k: &CameraIntrinsics) -> Result<(), PipelineError> {
    write_json(path, k)
}

pub fn read_template(path: &Path) -> Result<FaceTemplate, PipelineError> {
    let t: FaceTemplate = read_json(path)?;
    t.validate()
        .map_err(|e| PipelineError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
    Ok(t)
}

pub fn read_zones(path: &Path) -> Result<ZoneSet, PipelineError> {
    let zones: ZoneSet = read_json(path)?;
    if zones.zones.is_empty() {
        return Err(PipelineError::Parse {
            path: path.to_path_buf(),
            message: "zone set is empty".into(),
        });
    }
    for zone in &zones.zones {
        zone.validate()
            .map_err(|e| PipelineError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
    }
    Ok(zones)
}

pub fn write_zones(path: &Path, zones: &ZoneSet) -> Result<(), PipelineError> {
    write_json(path, zones)
}

// ---------------------------------------------------------------------------
// Annotations CSV: case_id,driver_id,lap
// ---------------------------------------------------------------------------

pub fn read_annotations(path: &Path) -> Result<Vec<CaseAnnotation>, PipelineError> {
    let mut rdr = csv::Reader::from_reader(open(path)?);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let ann: CaseAnnotation = row.map_err(|e| PipelineError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        out.push(ann);
    }
    Ok(out)
}

pub fn write_annotations(path: &Path, annotations: &[CaseAnnotation]) -> Result<(), PipelineError> {
    let mut wtr = csv::Writer::from_writer(create(path)?);
    for a in annotations {
        wtr.serialize(a)
            .map_err(|e| PipelineError::Stage(format!("write {}: {e}", path.display())))?;
    }
    wtr.flush()
        .map_err(|e| PipelineError::Io { path: path.to_path_buf(), source: e })?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Stage persistence (JSONL mirroring the in-memory types).
// ---------------------------------------------------------------------------

pub fn write_headpose_samples(path: &Path, samples: &[HeadPoseSample]) -> Result<(), PipelineError> {
    write_jsonl(path, samples)
}

pub fn read_headpose_samples(
    path: &Path,
) -> Result<(Vec<HeadPoseSample>, Vec<LineIssue>), PipelineError> {
    read_jsonl(path)
}

pub fn write_tracks(path: &Path, tracks: &[Track]) -> Result<(), PipelineError> {
    write_jsonl(path, tracks)
}

pub fn read_tracks(path: &Path) -> Result<(Vec<Track>, Vec<LineIssue>), PipelineError> {
    read_jsonl(path)
}

pub fn write_metrics(path: &Path, metrics: &[CaseMetrics]) -> Result<(), PipelineError> {
    write_jsonl(path, metrics)
}

pub fn read_metrics(path: &Path) -> Result<(Vec<CaseMetrics>, Vec<LineIssue>), PipelineError> {
    read_jsonl(path)
}

pub fn write_labels(path: &Path, labels: &[crate::classify::CaseLabel]) -> Result<(), PipelineError> {
    write_jsonl(path, labels)
}
