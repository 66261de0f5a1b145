//! Forward rendering of facial landmarks: the inverse of the head pose
//! estimator, used as its oracle and as the landmark-log generator.

use super::{ScenarioSpec, StreamPurpose};
use crate::headpose::euler::rotation_ypr;
use crate::headpose::{CameraIntrinsics, FaceTemplate, LandmarkFrame};
use nalgebra::Vector3;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Projects the face template under one head pose (camera-frame angles in
/// degrees, translation in meters) through the full distortion model.
pub fn project_template(
    template: &FaceTemplate,
    intrinsics: &CameraIntrinsics,
    yaw: f64,
    pitch: f64,
    roll: f64,
    translation: [f64; 3],
) -> [[f64; 2]; 4] {
    let r = rotation_ypr(yaw, pitch, roll);
    let t = Vector3::new(translation[0], translation[1], translation[2]);
    template.points_m().map(|m| {
        let x = r * Vector3::new(m[0], m[1], 0.0) + t;
        let (u, v) = intrinsics.project_normalized(x.x / x.z, x.y / x.z);
        [u, v]
    })
}

/// One rendered frame with optional pixel noise and gross corruption.
#[allow(clippy::too_many_arguments)]
pub fn render_frame(
    t: f64,
    template: &FaceTemplate,
    intrinsics: &CameraIntrinsics,
    yaw: f64,
    pitch: f64,
    roll: f64,
    depth_m: f64,
    noise_px: f64,
    noise_rng: &mut ChaCha8Rng,
) -> LandmarkFrame {
    let mut px = project_template(template, intrinsics, yaw, pitch, roll, [0.0, 0.0, depth_m]);
    if noise_px > 0.0 {
        let n = Normal::new(0.0, noise_px).unwrap();
        for p in px.iter_mut() {
            p[0] += n.sample(noise_rng);
            p[1] += n.sample(noise_rng);
        }
    }
    LandmarkFrame { t, px_a: px[0], px_b: px[1], px_c: px[2], px_d: px[3] }
}

/// Renders the landmark log for a true vehicle-frame yaw series: maps yaw
/// into the camera frame via the mount model, projects the template, adds
/// pixel noise, and corrupts a fraction of frames with uniform garbage.
pub fn render_landmarks(spec: &ScenarioSpec, yaw_vehicle: &[(f64, f64)]) -> Vec<LandmarkFrame> {
    let template = FaceTemplate::default();
    let cam = &spec.camera;
    let mut noise_rng = super::stream(spec.seed, 0, StreamPurpose::LandmarkNoise);
    let mut outlier_rng = super::stream(spec.seed, 0, StreamPurpose::Outliers);
    let image_extent = 2.0 * cam.intrinsics.cx.max(cam.intrinsics.cy);

    yaw_vehicle
        .iter()
        .map(|&(t, yaw_veh)| {
            if cam.outlier_rate > 0.0 && outlier_rng.gen::<f64>() < cam.outlier_rate {
                let mut garbage = [[0.0; 2]; 4];
                for p in garbage.iter_mut() {
                    p[0] = outlier_rng.gen_range(0.0..image_extent);
                    p[1] = outlier_rng.gen_range(0.0..image_extent);
                }
                return LandmarkFrame {
                    t,
                    px_a: garbage[0],
                    px_b: garbage[1],
                    px_c: garbage[2],
                    px_d: garbage[3],
                };
            }
            let yaw_cam = cam.mount_offset_deg + cam.mount_sign * yaw_veh;
            render_frame(
                t,
                &template,
                &cam.intrinsics,
                yaw_cam,
                cam.head_pitch_deg,
                0.0,
                cam.head_depth_m,
                cam.landmark_noise_px,
                &mut noise_rng,
            )
        })
        .collect()
}
