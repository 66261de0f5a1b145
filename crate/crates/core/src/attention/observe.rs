//! Per-track observation decision: intersect the filtered head yaw with
//! each gated track's bearing across a case window and accumulate dwell.

use super::{case_metrics, gate, gaze_hit, AttentionError, CaseMetrics, CaseWindow, GatingConfig,
    GazeRegion, GazeRegions};
use crate::geometry::{bearing, interpolate_pose, world_to_ego, EgoTrajectory};
use crate::tracker::{ObjectClass, Track};
use crate::yawfilter::YawSeries;

/// Fallback dwell step when a track has a single in-case state.
const DEFAULT_STATE_DT: f64 = 0.1;

/// A unique gated track and the best region the driver observed it in.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrackObservation {
    pub track_id: u64,
    pub class: ObjectClass,
    pub region: Option<GazeRegion>,
}

/// Classifies every track that is gated at least once inside the case:
/// FV if cumulative FV dwell reaches `dwell_min`, else PV if cumulative
/// FV+PV dwell does, else observed-not-at-all. Timestamps where the yaw
/// series has an open gap contribute nothing.
pub fn observe_tracks(
    yaw: &YawSeries,
    tracks: &[Track],
    traj: &EgoTrajectory,
    case: &CaseWindow,
    gating: &GatingConfig,
    regions: &GazeRegions,
) -> Vec<TrackObservation> {
    let mut out = Vec::new();
    for track in tracks {
        let states: Vec<_> = track
            .states
            .iter()
            .filter(|s| s.t >= case.t0 && s.t <= case.t1)
            .collect();
        if states.is_empty() {
            continue;
        }
        let median_dt = {
            let mut dts: Vec<f64> = states.windows(2).map(|w| w[1].t - w[0].t).collect();
            if dts.is_empty() {
                DEFAULT_STATE_DT
            } else {
                dts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                dts[dts.len() / 2]
            }
        };

        let mut gated_once = false;
        let mut fv_dwell = 0.0;
        let mut pv_dwell = 0.0;
        for (i, state) in states.iter().enumerate() {
            let Ok(pose) = interpolate_pose(traj, state.t) else { continue };
            let Ok(ego) = world_to_ego(&pose, (state.x, state.y)) else { continue };
            if !gate(ego, gating) {
                continue;
            }
            gated_once = true;
            let Some(yaw_now) = yaw.yaw_at(state.t) else { continue };
            let Ok(obj_bearing) = bearing(ego) else { continue };
            let dt = states
                .get(i + 1)
                .map(|next| next.t - state.t)
                .unwrap_or(median_dt);
            match gaze_hit(yaw_now, obj_bearing, regions) {
                Some(GazeRegion::Fv) => fv_dwell += dt,
                Some(GazeRegion::Pv) => pv_dwell += dt,
                None => {}
            }
        }
        if !gated_once {
            continue;
        }
        let region = if fv_dwell >= regions.dwell_min {
            Some(GazeRegion::Fv)
        } else if fv_dwell + pv_dwell >= regions.dwell_min {
            Some(GazeRegion::Pv)
        } else {
            None
        };
        out.push(TrackObservation { track_id: track.id, class: track.class, region });
    }
    out
}

/// Convenience: observation pass plus metric aggregation for one case.
pub fn case_observation_metrics(
    yaw: &YawSeries,
    tracks: &[Track],
    traj: &EgoTrajectory,
    case: &CaseWindow,
    gating: &GatingConfig,
    regions: &GazeRegions,
) -> Result<(CaseMetrics, Vec<TrackObservation>), AttentionError> {
    let observations = observe_tracks(yaw, tracks, traj, case, gating, regions);
    let metrics = case_metrics(&case.case_id, &observations, regions)?;
    Ok((metrics, observations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Angle, Pose2D};
    use crate::tracker::{StateProvenance, TrackState};
    use crate::yawfilter::YawSample;

    fn straight_traj() -> EgoTrajectory {
        // Stationary at origin facing +x for 10 s (objects move instead).
        EgoTrajectory::new(
            (0..=100)
                .map(|k| (k as f64 * 0.1, Pose2D::new(0.0, 0.0, 0.0).unwrap()))
                .collect(),
        )
        .unwrap()
    }

    fn yaw_series(deg: f64) -> YawSeries {
        YawSeries::new(
            (0..=100)
                .map(|k| YawSample::new(k as f64 * 0.1, Angle::wrap(deg).unwrap()))
                .collect(),
        )
        .unwrap()
    }

    fn static_track(id: u64, class: ObjectClass, x: f64, y: f64) -> Track {
        Track {
            id,
            class,
            states: (0..=100)
                .map(|k| TrackState {
                    t: k as f64 * 0.1,
                    x,
                    y,
                    vx: 0.0,
                    vy: 0.0,
                    provenance: StateProvenance::Extracted,
                })
                .collect(),
        }
    }

    fn case() -> CaseWindow {
        CaseWindow {
            case_id: "c1".into(),
            driver_id: "A".into(),
            lap: 1,
            t0: 0.0,
            t1: 10.0,
            zone: "z".into(),
        }
    }

    #[test]
    fn track_straight_ahead_with_zero_yaw_is_fv() {
        let tracks = vec![static_track(0, ObjectClass::Vehicle, 10.0, 0.0)];
        let obs = observe_tracks(
            &yaw_series(0.0),
            &tracks,
            &straight_traj(),
            &case(),
            &GatingConfig::default(),
            &GazeRegions::default(),
        );
        assert_eq!(obs.len(), 1);
        assert_eq!(obs[0].region, Some(GazeRegion::Fv));
    }

    #[test]
    fn never_glanced_track_is_unobserved() {
        // Bearing 30° while yaw stays near 0 → gated but not observed.
        let tracks = vec![static_track(0, ObjectClass::Vehicle, 8.0, 8.0 * 30f64.to_radians().tan())];
        let obs = observe_tracks(
            &yaw_series(5.0),
            &tracks,
            &straight_traj(),
            &case(),
            &GatingConfig::default(),
            &GazeRegions::default(),
        );
        assert_eq!(obs.len(), 1);
        assert_eq!(obs[0].region, None);
    }

    #[test]
    fn ungated_track_excluded_entirely() {
        let tracks = vec![static_track(0, ObjectClass::Vehicle, 30.0, 0.0)];
        let obs = observe_tracks(
            &yaw_series(0.0),
            &tracks,
            &straight_traj(),
            &case(),
            &GatingConfig::default(),
            &GazeRegions::default(),
        );
        assert!(obs.is_empty());
    }

    #[test]
    fn scripted_glance_marks_only_its_target() {
        // Yaw dwells 0.4 s at the bearing of track 1 (30°), otherwise 0°.
        let mut samples = Vec::new();
        for k in 0..=100 {
            let t = k as f64 * 0.1;
            let deg = if (5.0..5.4).contains(&t) { 30.0 } else { 0.0 };
            samples.push(YawSample::new(t, Angle::wrap(deg).unwrap()));
        }
        let yaw = YawSeries::new(samples).unwrap();
        let y30 = 8.0 * 30f64.to_radians().tan();
        let tracks = vec![
            static_track(0, ObjectClass::Vehicle, 8.0, y30),
            static_track(1, ObjectClass::Pedestrian, 8.0, -y30),
        ];
        let obs = observe_tracks(
            &yaw,
            &tracks,
            &straight_traj(),
            &case(),
            &GatingConfig::default(),
            &GazeRegions::default(),
        );
        assert_eq!(obs.len(), 2);
        assert_eq!(obs[0].region, Some(GazeRegion::Fv));
        assert_eq!(obs[1].region, None);
    }

    #[test]
    fn open_yaw_gap_contributes_nothing() {
        // Yaw data exists only outside the case-relevant span.
        let mut samples = vec![YawSample::new(0.0, Angle::wrap(0.0).unwrap())];
        samples.push(YawSample::new(9.9, Angle::wrap(0.0).unwrap()));
        let mut yaw = YawSeries::new(samples).unwrap();
        yaw.max_interp_gap = 0.5;
        let tracks = vec![static_track(0, ObjectClass::Vehicle, 10.0, 0.0)];
        let obs = observe_tracks(
            &yaw,
            &tracks,
            &straight_traj(),
            &case(),
            &GatingConfig::default(),
            &GazeRegions::default(),
        );
        // Gated (so present) but unobservable: no yaw info inside the gap.
        assert_eq!(obs.len(), 1);
        assert_eq!(obs[0].region, None);
    }

    #[test]
    fn duplicated_states_do_not_change_outcome() {
        let base = static_track(0, ObjectClass::Vehicle, 10.0, 0.0);
        let mut dup = base.clone();
        dup.states = base
            .states
            .iter()
            .flat_map(|s| {
                let mut shifted = *s;
                shifted.t += 1e-6;
                [*s, shifted]
            })
            .collect();
        let args = (straight_traj(), case(), GatingConfig::default(), GazeRegions::default());
        let yaw = yaw_series(0.0);
        let a = observe_tracks(&yaw, &[base], &args.0, &args.1, &args.2, &args.3);
        let b = observe_tracks(&yaw, &[dup], &args.0, &args.1, &args.2, &args.3);
        assert_eq!(a[0].region, b[0].region);
    }
}
