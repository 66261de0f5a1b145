//! Camera-to-vehicle yaw mapping.
//!
//! The interior camera is not aligned with the vehicle axis and its
//! extrinsic is unknown, so the mount offset is either configured or
//! calibrated as the median camera yaw over straight-driving segments,
//! where an attentive or idle driver faces down the road.

use super::HeadPoseSample;
use crate::geometry::{Angle, EgoTrajectory};
use serde::{Deserialize, Serialize};

pub const STRAIGHT_MAX_RATE_DEG_S: f64 = 1.0;
pub const STRAIGHT_MIN_DURATION_S: f64 = 3.0;
const MIN_CALIBRATION_SAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MountOffset {
    /// Calibrate from straight-driving segments.
    Auto,
    /// Fixed offset in degrees (camera yaw reading when the driver faces
    /// straight ahead).
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MountConfig {
    /// +1 or −1, depending on whether the camera sees head turns mirrored.
    pub sign: f64,
    pub offset: MountOffset,
}

impl Default for MountConfig {
    fn default() -> Self {
        Self { sign: 1.0, offset: MountOffset::Auto }
    }
}

/// Maximal intervals of the trajectory where |heading rate| stays below
/// `max_rate_deg_s` for at least `min_duration_s`.
pub fn straight_segments(
    traj: &EgoTrajectory,
    max_rate_deg_s: f64,
    min_duration_s: f64,
) -> Vec<(f64, f64)> {
    let samples = traj.samples();
    let mut segments = Vec::new();
    let mut start: Option<f64> = None;
    let mut last_ok = samples[0].0;
    for win in samples.windows(2) {
        let (t0, p0) = win[0];
        let (t1, p1) = win[1];
        let dt = t1 - t0;
        let rate = p0.heading.shortest_arc_to(p1.heading).abs() / dt;
        if rate < max_rate_deg_s {
            start.get_or_insert(t0);
            last_ok = t1;
        } else if let Some(s) = start.take() {
            if last_ok - s >= min_duration_s {
                segments.push((s, last_ok));
            }
        }
    }
    if let Some(s) = start {
        if last_ok - s >= min_duration_s {
            segments.push((s, last_ok));
        }
    }
    segments
}

/// Median camera yaw over straight-driving segments, or `None` when too
/// few samples fall inside them.
pub fn calibrate_mount_offset(
    samples: &[HeadPoseSample],
    traj: &EgoTrajectory,
) -> Option<Angle> {
    let segments = straight_segments(traj, STRAIGHT_MAX_RATE_DEG_S, STRAIGHT_MIN_DURATION_S);
    let mut yaws: Vec<f64> = samples
        .iter()
        .filter(|s| segments.iter().any(|&(a, b)| s.t >= a && s.t <= b))
        .map(|s| s.yaw.degrees())
        .collect();
    if yaws.len() < MIN_CALIBRATION_SAMPLES {
        return None;
    }
    yaws.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = yaws.len() / 2;
    let median = if yaws.len() % 2 == 1 {
        yaws[mid]
    } else {
        0.5 * (yaws[mid - 1] + yaws[mid])
    };
    Some(Angle::wrap_unchecked(median))
}

/// `yaw_vehicle = sign · (yaw_camera − mount_offset)`.
pub fn to_vehicle_yaw(camera_yaw: Angle, sign: f64, mount_offset: Angle) -> Angle {
    Angle::wrap_unchecked(sign * (camera_yaw.degrees() - mount_offset.degrees()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Pose2D;
    use approx::assert_abs_diff_eq;

    fn sample(t: f64, yaw: f64) -> HeadPoseSample {
        HeadPoseSample {
            t,
            yaw: Angle::wrap(yaw).unwrap(),
            pitch: Angle::wrap(0.0).unwrap(),
            roll: Angle::wrap(0.0).unwrap(),
            reproj_err: 0.0,
            ambiguity_ratio: 0.0,
            ambiguous: false,
            gimbal: false,
        }
    }

    /// Straight for 5 s, then a 90° turn over 2 s, then straight again.
    fn turny_trajectory() -> EgoTrajectory {
        let mut samples = Vec::new();
        let mut heading = 0.0;
        for k in 0..=120 {
            let t = k as f64 * 0.1;
            if (5.0..7.0).contains(&t) {
                heading += 4.5; // 45°/s
            }
            samples.push((t, Pose2D::new(t, 0.0, heading).unwrap()));
        }
        EgoTrajectory::new(samples).unwrap()
    }

    #[test]
    fn straight_segments_found() {
        let segs = straight_segments(&turny_trajectory(), 1.0, 3.0);
        assert_eq!(segs.len(), 2);
        assert!(segs[0].0 < 0.2 && (segs[0].1 - 5.0).abs() < 0.2);
        assert!((segs[1].0 - 7.0).abs() < 0.2);
    }

    #[test]
    fn offset_is_median_over_straights() {
        let traj = turny_trajectory();
        let mut samples = Vec::new();
        for k in 0..120 {
            let t = k as f64 * 0.1;
            // Camera mounted at −20°; driver glances to 30° during the turn.
            let yaw = if (5.0..7.0).contains(&t) { 10.0 } else { -20.0 };
            samples.push(sample(t, yaw));
        }
        let offset = calibrate_mount_offset(&samples, &traj).unwrap();
        assert_abs_diff_eq!(offset.degrees(), -20.0, epsilon = 1e-9);
    }

    #[test]
    fn too_few_samples_gives_none() {
        let traj = turny_trajectory();
        let samples = vec![sample(0.0, 1.0), sample(0.1, 2.0)];
        assert!(calibrate_mount_offset(&samples, &traj).is_none());
    }

    #[test]
    fn vehicle_yaw_mapping() {
        let y = to_vehicle_yaw(Angle::wrap(-5.0).unwrap(), 1.0, Angle::wrap(-20.0).unwrap());
        assert_abs_diff_eq!(y.degrees(), 15.0);
        let y = to_vehicle_yaw(Angle::wrap(-5.0).unwrap(), -1.0, Angle::wrap(-20.0).unwrap());
        assert_abs_diff_eq!(y.degrees(), -15.0);
    }
}
