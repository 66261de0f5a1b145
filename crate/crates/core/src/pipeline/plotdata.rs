//! Plot-data CSV emission: path overlay, angle traces, per-case bars and
//! the raw-vs-filtered yaw dump.

use super::{PipelineArtifacts, PipelineError};
use crate::attention::{gate, GazeRegion};
use crate::geometry::{bearing, interpolate_pose, world_to_ego};
use std::io::Write;
use std::path::Path;

fn create(path: &Path) -> Result<std::fs::File, PipelineError> {
    std::fs::File::create(path)
        .map_err(|e| PipelineError::Io { path: path.to_path_buf(), source: e })
}

fn fmt(v: f64) -> String {
    format!("{v:.6}")
}

/// `t,ego_x,ego_y,ego_heading,yaw_world,track_id,class,obj_x,obj_y` —
/// one row per track state with the driver's world-frame gaze direction.
fn write_overlay(path: &Path, artifacts: &PipelineArtifacts) -> Result<(), PipelineError> {
    let mut f = create(path)?;
    writeln!(f, "t,ego_x,ego_y,ego_heading,yaw_world,track_id,class,obj_x,obj_y")
        .map_err(|e| PipelineError::Io { path: path.to_path_buf(), source: e })?;
    for track in artifacts.tracks.all() {
        for s in &track.states {
            let Ok(pose) = interpolate_pose(&artifacts.trajectory, s.t) else { continue };
            let yaw_world = artifacts
                .yaw_filtered
                .yaw_at(s.t)
                .map(|y| fmt(pose.heading.add_degrees(y.degrees()).degrees()))
                .unwrap_or_default();
            writeln!(
                f,
                "{},{},{},{},{},{},{},{},{}",
                fmt(s.t),
                fmt(pose.x),
                fmt(pose.y),
                fmt(pose.heading.degrees()),
                yaw_world,
                track.id,
                track.class.as_str(),
                fmt(s.x),
                fmt(s.y)
            )
            .map_err(|e| PipelineError::Io { path: path.to_path_buf(), source: e })?;
        }
    }
    Ok(())
}

/// `t,yaw_ego,track_id,bearing,region` — angle traces of gated track
/// states inside cases, for intersection plots.
fn write_angles(path: &Path, artifacts: &PipelineArtifacts) -> Result<(), PipelineError> {
    let mut f = create(path)?;
    writeln!(f, "t,yaw_ego,track_id,bearing,region")
        .map_err(|e| PipelineError::Io { path: path.to_path_buf(), source: e })?;
    for case in &artifacts.cases {
        for track in artifacts.tracks.all() {
            for s in &track.states {
                if s.t < case.t0 || s.t > case.t1 {
                    continue;
                }
                let Ok(pose) = interpolate_pose(&artifacts.trajectory, s.t) else { continue };
                let Ok(ego) = world_to_ego(&pose, (s.x, s.y)) else { continue };
                if !gate(ego, &artifacts.config.gating) {
                    continue;
                }
                let Ok(b) = bearing(ego) else { continue };
                let Some(yaw) = artifacts.yaw_filtered.yaw_at(s.t) else { continue };
                let region = match crate::attention::gaze_hit(yaw, b, &artifacts.config.regions) {
                    Some(GazeRegion::Fv) => "FV",
                    Some(GazeRegion::Pv) => "PV",
                    None => "",
                };
                writeln!(
                    f,
                    "{},{},{},{},{}",
                    fmt(s.t),
                    fmt(yaw.degrees()),
                    track.id,
                    fmt(b.degrees()),
                    region
                )
                .map_err(|e| PipelineError::Io { path: path.to_path_buf(), source: e })?;
            }
        }
    }
    Ok(())
}

/// Per-case stacked-bar data: object composition and FV/PV fractions.
fn write_case_bars(path: &Path, artifacts: &PipelineArtifacts) -> Result<(), PipelineError> {
    let mut f = create(path)?;
    writeln!(
        f,
        "case_id,driver_id,lap,scenario,attention,n_veh,n_ped,ped_share,veh_fv,veh_pv,ped_fv,ped_pv,s_veh,s_ped"
    )
    .map_err(|e| PipelineError::Io { path: path.to_path_buf(), source: e })?;
    for case in &artifacts.report.cases {
        let m = &case.metrics;
        writeln!(
            f,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            case.window.case_id,
            case.window.driver_id,
            case.window.lap,
            case.scenario.map(|s| format!("{s:?}")).unwrap_or_default(),
            case.attention.map(|a| format!("{a:?}")).unwrap_or_default(),
            m.n_veh,
            m.n_ped,
            fmt(m.ped_share),
            fmt(m.veh_fv),
            fmt(m.veh_pv),
            fmt(m.ped_fv),
            fmt(m.ped_pv),
            fmt(m.s_veh),
            fmt(m.s_ped)
        )
        .map_err(|e| PipelineError::Io { path: path.to_path_buf(), source: e })?;
    }
    Ok(())
}

/// `t,raw_yaw,filtered_yaw` — before/after view of the yaw filter; the
/// filtered column is empty where a sample was removed or unavailable.
fn write_yaw_dump(path: &Path, artifacts: &PipelineArtifacts) -> Result<(), PipelineError> {
    let mut f = create(path)?;
    writeln!(f, "t,raw_yaw,filtered_yaw")
        .map_err(|e| PipelineError::Io { path: path.to_path_buf(), source: e })?;
    for s in artifacts.yaw_raw.samples() {
        let filtered = artifacts
            .yaw_filtered
            .yaw_at(s.t)
            .map(|y| fmt(y.degrees()))
            .unwrap_or_default();
        writeln!(f, "{},{},{}", fmt(s.t), fmt(s.yaw.degrees()), filtered)
            .map_err(|e| PipelineError::Io { path: path.to_path_buf(), source: e })?;
    }
    Ok(())
}

/// Writes all plot CSVs into `out_dir`.
pub fn emit_plot_data(artifacts: &PipelineArtifacts, out_dir: &Path) -> Result<(), PipelineError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| PipelineError::Io { path: out_dir.to_path_buf(), source: e })?;
    write_overlay(&out_dir.join("overlay.csv"), artifacts)?;
    write_angles(&out_dir.join("angles.csv"), artifacts)?;
    write_case_bars(&out_dir.join("cases.csv"), artifacts)?;
    write_yaw_dump(&out_dir.join("yaw_filter.csv"), artifacts)?;
    Ok(())
}
