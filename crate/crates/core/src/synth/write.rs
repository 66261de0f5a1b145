//! Scenario directory emission: all ingestion files plus ground truth and
//! a ready-to-run pipeline config.

use super::{GeneratedScenario, SynthError};
use crate::attention::ZoneSet;
use crate::geometry::write_trajectory_csv;
use crate::pipeline::ingest;
use std::path::Path;

fn io_err(e: impl std::fmt::Display) -> SynthError {
    SynthError::SpecError(format!("write failed: {e}"))
}

/// Writes ego.csv, landmarks.jsonl, detections.jsonl, intrinsics.json,
/// zones.json, annotations.csv, truth.json and pipeline.conf.
pub fn write_scenario_dir(scenario: &GeneratedScenario, dir: &Path) -> Result<(), SynthError> {
    std::fs::create_dir_all(dir).map_err(io_err)?;

    let ego_file = std::fs::File::create(dir.join("ego.csv")).map_err(io_err)?;
    write_trajectory_csv(ego_file, &scenario.ego).map_err(io_err)?;

    ingest::write_landmarks(&dir.join("landmarks.jsonl"), &scenario.landmarks).map_err(io_err)?;
    ingest::write_detections(&dir.join("detections.jsonl"), &scenario.detections)
        .map_err(io_err)?;
    ingest::write_intrinsics(&dir.join("intrinsics.json"), &scenario.spec.camera.intrinsics)
        .map_err(io_err)?;
    ingest::write_zones(
        &dir.join("zones.json"),
        &ZoneSet { zones: vec![scenario.zone.clone()] },
    )
    .map_err(io_err)?;
    ingest::write_annotations(&dir.join("annotations.csv"), &scenario.annotations)
        .map_err(io_err)?;

    let truth = serde_json::to_string_pretty(&scenario.truth).map_err(io_err)?;
    std::fs::write(dir.join("truth.json"), truth).map_err(io_err)?;

    let config = format!(
        "# generated scenario (seed {})\n\
         inputs.ego = ego.csv\n\
         inputs.landmarks = landmarks.jsonl\n\
         inputs.detections = detections.jsonl\n\
         inputs.intrinsics = intrinsics.json\n\
         inputs.zones = zones.json\n\
         inputs.annotations = annotations.csv\n\
         output.dir = out\n\
         headpose.mount_sign = {}\n\
         headpose.mount_offset = auto\n",
        scenario.spec.seed, scenario.spec.camera.mount_sign,
    );
    std::fs::write(dir.join("pipeline.conf"), config).map_err(io_err)?;
    Ok(())
}
