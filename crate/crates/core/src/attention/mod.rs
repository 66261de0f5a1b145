//! Driver-relevance gating, gaze-region intersection and per-case
//! observation metrics.
//!
//! Objects are first gated to the field the driver is expected to monitor
//! (±45° field of view, 15 m ahead, 10 m to either side). The filtered
//! head yaw is then intersected with each gated object's bearing against
//! the Focus Vision / Peripheral Vision regions, and per-case fractions of
//! observed objects are aggregated per class.

mod cases;
mod observe;

pub use cases::{split_cases, CaseAnnotation, CaseWindow, Zone, ZoneSet};
pub use observe::{case_observation_metrics, observe_tracks, TrackObservation};

use crate::geometry::{bearing, Angle, EgoPoint};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AttentionError {
    #[error("invalid config: {0}")]
    BadConfig(&'static str),
    #[error("invalid zone polygon: {0}")]
    BadZone(String),
    #[error("case {0}: no gated tracks")]
    EmptyCase(String),
}

/// Driver-relevance gate: forward range, lateral range, field of view.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GatingConfig {
    /// Half field of view, degrees per side.
    pub fov_half: f64,
    /// Forward range, meters.
    pub range_fwd: f64,
    /// Lateral range, meters per side.
    pub range_lat: f64,
}

impl Default for GatingConfig {
    fn default() -> Self {
        Self { fov_half: 45.0, range_fwd: 15.0, range_lat: 10.0 }
    }
}

impl GatingConfig {
    pub fn validate(&self) -> Result<(), AttentionError> {
        if !(self.fov_half > 0.0 && self.range_fwd > 0.0 && self.range_lat > 0.0) {
            return Err(AttentionError::BadConfig("gating values must be positive"));
        }
        Ok(())
    }
}

/// Angular gaze regions about the head-yaw direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GazeRegions {
    /// Focus Vision half-span, degrees (total FV span is twice this).
    pub fv_half: f64,
    /// Peripheral Vision band beyond FV, degrees per side.
    pub pv_band: f64,
    /// Weight of a PV observation relative to an FV one.
    pub pv_weight: f64,
    /// Minimum cumulative dwell for an observation to count, seconds.
    pub dwell_min: f64,
}

impl Default for GazeRegions {
    fn default() -> Self {
        Self { fv_half: 5.0, pv_band: 5.0, pv_weight: 0.5, dwell_min: 0.2 }
    }
}

impl GazeRegions {
    pub fn validate(&self) -> Result<(), AttentionError> {
        if !(self.fv_half > 0.0) {
            return Err(AttentionError::BadConfig("fv_half must be positive"));
        }
        if !(self.pv_band >= 0.0) {
            return Err(AttentionError::BadConfig("pv_band must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.pv_weight) {
            return Err(AttentionError::BadConfig("pv_weight must lie in [0, 1]"));
        }
        if !(self.dwell_min >= 0.0) {
            return Err(AttentionError::BadConfig("dwell_min must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GazeRegion {
    Fv,
    Pv,
}

/// True iff the point lies in the driver-relevant field: strictly ahead,
/// within forward/lateral range and inside the field of view.
pub fn gate(p: EgoPoint, cfg: &GatingConfig) -> bool {
    if !(p.x_fwd > 0.0 && p.x_fwd <= cfg.range_fwd && p.y_lat.abs() <= cfg.range_lat) {
        return false;
    }
    // x_fwd > 0 rules out the degenerate origin.
    bearing(p).map(|b| b.degrees().abs() <= cfg.fov_half).unwrap_or(false)
}

/// Region of the driver's vision an object bearing falls into, given the
/// head yaw (both vehicle-frame).
pub fn gaze_hit(yaw: Angle, obj_bearing: Angle, regions: &GazeRegions) -> Option<GazeRegion> {
    let d = yaw.abs_diff(obj_bearing);
    if d <= regions.fv_half {
        Some(GazeRegion::Fv)
    } else if d <= regions.fv_half + regions.pv_band {
        Some(GazeRegion::Pv)
    } else {
        None
    }
}

/// Per-case observation metrics over unique gated tracks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseMetrics {
    pub case_id: String,
    /// Unique gated tracks per class.
    pub n_veh: usize,
    pub n_ped: usize,
    /// Fraction of each class's tracks best-observed in each region.
    pub veh_fv: f64,
    pub veh_pv: f64,
    pub ped_fv: f64,
    pub ped_pv: f64,
    /// n_ped / (n_veh + n_ped).
    pub ped_share: f64,
    /// Weighted observation scores: fv + pv_weight · pv.
    pub s_veh: f64,
    pub s_ped: f64,
    /// No gated tracks of the class in this case.
    pub veh_absent: bool,
    pub ped_absent: bool,
}

/// Aggregates per-track observations into case metrics.
pub fn case_metrics(
    case_id: &str,
    observations: &[TrackObservation],
    regions: &GazeRegions,
) -> Result<CaseMetrics, AttentionError> {
    regions.validate()?;
    if observations.is_empty() {
        return Err(AttentionError::EmptyCase(case_id.to_string()));
    }
    let mut n = [0usize; 2];
    let mut fv = [0usize; 2];
    let mut pv = [0usize; 2];
    for obs in observations {
        let k = match obs.class {
            crate::tracker::ObjectClass::Vehicle => 0,
            crate::tracker::ObjectClass::Pedestrian => 1,
        };
        n[k] += 1;
        match obs.region {
            Some(GazeRegion::Fv) => fv[k] += 1,
            Some(GazeRegion::Pv) => pv[k] += 1,
            None => {}
        }
    }
    let frac = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let veh_fv = frac(fv[0], n[0]);
    let veh_pv = frac(pv[0], n[0]);
    let ped_fv = frac(fv[1], n[1]);
    let ped_pv = frac(pv[1], n[1]);
    Ok(CaseMetrics {
        case_id: case_id.to_string(),
        n_veh: n[0],
        n_ped: n[1],
        veh_fv,
        veh_pv,
        ped_fv,
        ped_pv,
        ped_share: n[1] as f64 / (n[0] + n[1]) as f64,
        s_veh: veh_fv + regions.pv_weight * veh_pv,
        s_ped: ped_fv + regions.pv_weight * ped_pv,
        veh_absent: n[0] == 0,
        ped_absent: n[1] == 0,
    })
}
