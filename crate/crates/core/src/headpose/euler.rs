//! Rotation construction and Tait–Bryan decomposition in the camera frame.
//!
//! The decomposition order is intrinsic yaw (about the camera vertical
//! axis, y), then pitch (about x), then roll (about z):
//! `R = Ry(yaw) · Rx(pitch) · Rz(roll)`.

use crate::geometry::Angle;
use nalgebra::Matrix3;

pub const GIMBAL_PITCH_LIMIT_DEG: f64 = 89.0;

pub fn rot_y(deg: f64) -> Matrix3<f64> {
    let (s, c) = deg.to_radians().sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

pub fn rot_x(deg: f64) -> Matrix3<f64> {
    let (s, c) = deg.to_radians().sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

pub fn rot_z(deg: f64) -> Matrix3<f64> {
    let (s, c) = deg.to_radians().sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// `Ry(yaw) · Rx(pitch) · Rz(roll)`, all in degrees.
pub fn rotation_ypr(yaw: f64, pitch: f64, roll: f64) -> Matrix3<f64> {
    rot_y(yaw) * rot_x(pitch) * rot_z(roll)
}

/// How far a matrix is from the rotation group: `max(‖RᵀR − I‖∞, |det − 1|)`.
pub fn rotation_defect(r: &Matrix3<f64>) -> f64 {
    let gram = r.transpose() * r - Matrix3::identity();
    gram.amax().max((r.determinant() - 1.0).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub yaw: Angle,
    pub pitch: Angle,
    pub roll: Angle,
    /// Pitch within 1° of ±90°; yaw/roll become poorly conditioned.
    pub gimbal: bool,
}

/// Decomposes a rotation into yaw/pitch/roll per the module convention.
/// For `R = Ry(ψ)` exactly this returns yaw = ψ, pitch = roll = 0.
pub fn extract_yaw(r: &Matrix3<f64>) -> EulerAngles {
    let pitch_rad = (-r[(1, 2)]).clamp(-1.0, 1.0).asin();
    let yaw_rad = r[(0, 2)].atan2(r[(2, 2)]);
    let roll_rad = r[(1, 0)].atan2(r[(1, 1)]);
    let pitch = Angle::wrap_unchecked(pitch_rad.to_degrees());
    EulerAngles {
        yaw: Angle::wrap_unchecked(yaw_rad.to_degrees()),
        pitch,
        roll: Angle::wrap_unchecked(roll_rad.to_degrees()),
        gimbal: pitch.degrees().abs() > GIMBAL_PITCH_LIMIT_DEG,
    }
}
