//! Minimal 4-point homography estimation (planar model → normalized image).

use super::HeadPoseError;
use nalgebra::{Matrix3, OMatrix, OVector, U8};

/// Fails when any three of the four points are (nearly) collinear.
pub fn check_not_collinear(points: &[[f64; 2]; 4]) -> Result<(), HeadPoseError> {
    // Scale-relative area threshold.
    let scale = points
        .iter()
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let tol = 1e-9 * scale * scale;
    for skip in 0..4 {
        let tri: Vec<&[f64; 2]> = points
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, p)| p)
            .collect();
        let area2 = (tri[1][0] - tri[0][0]) * (tri[2][1] - tri[0][1])
            - (tri[1][1] - tri[0][1]) * (tri[2][0] - tri[0][0]);
        if area2.abs() < tol {
            return Err(HeadPoseError::DegenerateHomography);
        }
    }
    Ok(())
}

/// Isotropic (Hartley) normalization: centroid to origin, mean distance √2.
fn normalizer(points: &[[f64; 2]; 4]) -> Result<Matrix3<f64>, HeadPoseError> {
    let cx = points.iter().map(|p| p[0]).sum::<f64>() / 4.0;
    let cy = points.iter().map(|p| p[1]).sum::<f64>() / 4.0;
    let mean_dist = points
        .iter()
        .map(|p| (p[0] - cx).hypot(p[1] - cy))
        .sum::<f64>()
        / 4.0;
    if mean_dist < 1e-15 {
        return Err(HeadPoseError::DegenerateHomography);
    }
    let s = std::f64::consts::SQRT_2 / mean_dist;
    Ok(Matrix3::new(s, 0.0, -s * cx, 0.0, s, -s * cy, 0.0, 0.0, 1.0))
}

fn apply(t: &Matrix3<f64>, p: &[f64; 2]) -> [f64; 2] {
    [
        t[(0, 0)] * p[0] + t[(0, 1)] * p[1] + t[(0, 2)],
        t[(1, 0)] * p[0] + t[(1, 1)] * p[1] + t[(1, 2)],
    ]
}

/// Exact homography through four correspondences, normalized so that
/// `H[2][2] = 1`. Model points in meters, image points in normalized
/// camera coordinates.
pub fn homography_4pt(
    model_xy: &[[f64; 2]; 4],
    img_norm: &[[f64; 2]; 4],
) -> Result<Matrix3<f64>, HeadPoseError> {
    check_not_collinear(model_xy)?;
    let t_model = normalizer(model_xy)?;
    let t_img = normalizer(img_norm)?;

    // Solve the 8×8 system for h11..h32 with h33 fixed at 1, in the
    // normalized frames for conditioning.
    let mut a = OMatrix::<f64, U8, U8>::zeros();
    let mut b = OVector::<f64, U8>::zeros();
    for i in 0..4 {
        let m = apply(&t_model, &model_xy[i]);
        let q = apply(&t_img, &img_norm[i]);
        let (x, y) = (m[0], m[1]);
        let (u, v) = (q[0], q[1]);
        let r = 2 * i;
        a[(r, 0)] = x;
        a[(r, 1)] = y;
        a[(r, 2)] = 1.0;
        a[(r, 6)] = -u * x;
        a[(r, 7)] = -u * y;
        b[r] = u;
        a[(r + 1, 3)] = x;
        a[(r + 1, 4)] = y;
        a[(r + 1, 5)] = 1.0;
        a[(r + 1, 6)] = -v * x;
        a[(r + 1, 7)] = -v * y;
        b[r + 1] = v;
    }
    let h = a
        .lu()
        .solve(&b)
        .ok_or(HeadPoseError::DegenerateHomography)?;
    if h.iter().any(|x| !x.is_finite()) {
        return Err(HeadPoseError::DegenerateHomography);
    }
    let h_norm = Matrix3::new(h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], 1.0);

    let t_img_inv = t_img
        .try_inverse()
        .ok_or(HeadPoseError::DegenerateHomography)?;
    let mut full = t_img_inv * h_norm * t_model;
    let scale = full[(2, 2)];
    if scale.abs() < 1e-12 {
        return Err(HeadPoseError::DegenerateHomography);
    }
    full /= scale;
    Ok(full)
}

/// Maps a planar model point through a homography.
pub fn apply_homography(h: &Matrix3<f64>, p: &[f64; 2]) -> [f64; 2] {
    let w = h[(2, 0)] * p[0] + h[(2, 1)] * p[1] + h[(2, 2)];
    [
        (h[(0, 0)] * p[0] + h[(0, 1)] * p[1] + h[(0, 2)]) / w,
        (h[(1, 0)] * p[0] + h[(1, 1)] * p[1] + h[(1, 2)]) / w,
    ]
}
