//! Head orientation from four coplanar facial landmarks.
//!
//! Per frame: undistort the landmark pixels, fit the exact 4-point
//! homography from the planar face template, decompose it into the two
//! candidate poses, keep the one with lower reprojection error and read
//! the yaw/pitch/roll off the rotation. Only yaw feeds the rest of the
//! pipeline; pitch/roll are kept for diagnostics.

mod calibrate;
mod camera;
pub mod euler;
mod homography;
mod ippe;

pub use calibrate::{calibrate_mount_offset, straight_segments, to_vehicle_yaw, MountConfig, MountOffset};
pub use camera::{undistort_normalize, CameraIntrinsics};
pub use homography::{apply_homography, homography_4pt};
pub use ippe::{ippe_decompose, reprojection_rms, select_pose, PoseCandidate, PoseSelection};

use crate::geometry::Angle;
use euler::extract_yaw;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Ambiguity ratio above which a sample is flagged for the filter stage.
pub const AMBIGUITY_FLAG_THRESHOLD: f64 = 0.9;

#[derive(Debug, Error)]
pub enum HeadPoseError {
    #[error("invalid intrinsics: {0}")]
    BadIntrinsics(&'static str),
    #[error("invalid face template: {0}")]
    BadTemplate(&'static str),
    #[error("distortion inversion diverged")]
    UndistortFailure,
    #[error("degenerate landmark configuration for homography")]
    DegenerateHomography,
    #[error("no feasible pose with the plane in front of the camera")]
    PoseInfeasible,
    #[error("non-finite landmark coordinates")]
    BadLandmarks,
}

/// Four named coplanar template points (z = 0), millimeters. A/B are the
/// outer eye canthi, C/D the jaw angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub struct FaceTemplate {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub c: [f64; 2],
    pub d: [f64; 2],
}

impl Default for FaceTemplate {
    fn default() -> Self {
        Self {
            a: [-45.0, 35.0],
            b: [45.0, 35.0],
            c: [-65.0, -45.0],
            d: [65.0, -45.0],
        }
    }
}

impl FaceTemplate {
    pub fn validate(&self) -> Result<(), HeadPoseError> {
        let pts = self.points_mm();
        if pts.iter().flatten().any(|v| !v.is_finite()) {
            return Err(HeadPoseError::BadTemplate("non-finite coordinate"));
        }
        homography::check_not_collinear(&pts)
            .map_err(|_| HeadPoseError::BadTemplate("three points collinear"))?;
        let sym = (self.a[0] + self.b[0]).abs()
            + (self.a[1] - self.b[1]).abs()
            + (self.c[0] + self.d[0]).abs()
            + (self.c[1] - self.d[1]).abs();
        if sym > 1e-6 {
            return Err(HeadPoseError::BadTemplate(
                "template not bilaterally symmetric about its vertical axis",
            ));
        }
        Ok(())
    }

    pub fn points_mm(&self) -> [[f64; 2]; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Template points in meters, the unit used for pose recovery.
    pub fn points_m(&self) -> [[f64; 2]; 4] {
        self.points_mm().map(|p| [p[0] * 1e-3, p[1] * 1e-3])
    }
}

/// One landmark observation: pixel positions of the template points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandmarkFrame {
    pub t: f64,
    #[serde(rename = "A")]
    pub px_a: [f64; 2],
    #[serde(rename = "B")]
    pub px_b: [f64; 2],
    #[serde(rename = "C")]
    pub px_c: [f64; 2],
    #[serde(rename = "D")]
    pub px_d: [f64; 2],
}

impl LandmarkFrame {
    pub fn pixels(&self) -> [[f64; 2]; 4] {
        [self.px_a, self.px_b, self.px_c, self.px_d]
    }
}

/// Head orientation at one timestamp, camera frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeadPoseSample {
    pub t: f64,
    pub yaw: Angle,
    pub pitch: Angle,
    pub roll: Angle,
    /// RMS pixel reprojection error over the four landmarks.
    pub reproj_err: f64,
    /// Selected candidate's error ÷ rejected candidate's, in [0, 1].
    pub ambiguity_ratio: f64,
    /// ambiguity_ratio above [`AMBIGUITY_FLAG_THRESHOLD`].
    pub ambiguous: bool,
    /// |pitch| close enough to 90° that yaw/roll are ill-conditioned.
    pub gimbal: bool,
}

/// Full per-frame chain: undistort → homography → pose candidates →
/// selection → Euler angles.
pub fn estimate_head_pose(
    frame: &LandmarkFrame,
    template: &FaceTemplate,
    intrinsics: &CameraIntrinsics,
) -> Result<HeadPoseSample, HeadPoseError> {
    template.validate()?;
    let pixels = frame.pixels();
    if pixels.iter().flatten().any(|v| !v.is_finite()) {
        return Err(HeadPoseError::BadLandmarks);
    }
    let img_norm = undistort_normalize(&pixels, intrinsics)?;
    let model = template.points_m();
    let h = homography_4pt(&model, &img_norm)?;
    let candidates = ippe_decompose(&h)?;
    let sel = select_pose(&candidates, &model, &img_norm)?;
    let angles = extract_yaw(&sel.rotation);

    // Reprojection error in pixels, through the full distortion model.
    let mut sum_sq = 0.0;
    for (m, obs) in model.iter().zip(&pixels) {
        let x = sel.rotation * nalgebra::Vector3::new(m[0], m[1], 0.0) + sel.translation;
        let (u, v) = intrinsics.project_normalized(x.x / x.z, x.y / x.z);
        sum_sq += (u - obs[0]).powi(2) + (v - obs[1]).powi(2);
    }
    let reproj_err = (sum_sq / 4.0).sqrt();

    Ok(HeadPoseSample {
        t: frame.t,
        yaw: angles.yaw,
        pitch: angles.pitch,
        roll: angles.roll,
        reproj_err,
        ambiguity_ratio: sel.ambiguity_ratio,
        ambiguous: sel.ambiguity_ratio > AMBIGUITY_FLAG_THRESHOLD,
        gimbal: angles.gimbal,
    })
}

/// A frame the estimator had to skip, with the reason.
#[derive(Debug, Clone)]
pub struct FrameFailure {
    pub t: f64,
    pub reason: String,
}

/// Runs the estimator over a whole landmark log. Failed frames are
/// recorded and skipped; the batch never aborts.
pub fn estimate_series(
    frames: &[LandmarkFrame],
    template: &FaceTemplate,
    intrinsics: &CameraIntrinsics,
) -> (Vec<HeadPoseSample>, Vec<FrameFailure>) {
    let mut samples = Vec::with_capacity(frames.len());
    let mut failures = Vec::new();
    for frame in frames {
        match estimate_head_pose(frame, template, intrinsics) {
            Ok(s) => samples.push(s),
            Err(e) => failures.push(FrameFailure {
                t: frame.t,
                reason: e.to_string(),
            }),
        }
    }
    (samples, failures)
}
