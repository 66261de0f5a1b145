//! Pinhole camera model with radial (k1, k2) + tangential (p1, p2)
//! distortion, and the fixed-point undistortion used before homography
//! estimation.

use super::HeadPoseError;
use serde::{Deserialize, Serialize};

const UNDISTORT_ITERATIONS: usize = 10;
const UNDISTORT_RESIDUAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    #[serde(default)]
    pub k1: f64,
    #[serde(default)]
    pub k2: f64,
    #[serde(default)]
    pub p1: f64,
    #[serde(default)]
    pub p2: f64,
}

impl CameraIntrinsics {
    pub fn validate(&self) -> Result<(), HeadPoseError> {
        if !(self.fx > 0.0 && self.fy > 0.0) {
            return Err(HeadPoseError::BadIntrinsics("fx and fy must be positive"));
        }
        if !(0.0..=4096.0).contains(&self.cx) || !(0.0..=4096.0).contains(&self.cy) {
            return Err(HeadPoseError::BadIntrinsics(
                "principal point outside plausible image bounds (0-4096)",
            ));
        }
        let coeffs = [self.k1, self.k2, self.p1, self.p2];
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(HeadPoseError::BadIntrinsics("non-finite distortion coefficient"));
        }
        Ok(())
    }

    /// Applies the distortion model to a normalized image point.
    pub fn distort(&self, x: f64, y: f64) -> (f64, f64) {
        let r2 = x * x + y * y;
        let radial = 1.0 + self.k1 * r2 + self.k2 * r2 * r2;
        let xd = x * radial + 2.0 * self.p1 * x * y + self.p2 * (r2 + 2.0 * x * x);
        let yd = y * radial + self.p1 * (r2 + 2.0 * y * y) + 2.0 * self.p2 * x * y;
        (xd, yd)
    }

    /// Projects a distorted normalized point to pixel coordinates.
    pub fn to_pixel(&self, xd: f64, yd: f64) -> (f64, f64) {
        (self.fx * xd + self.cx, self.fy * yd + self.cy)
    }

    /// Full forward model: undistorted normalized point → pixel.
    pub fn project_normalized(&self, x: f64, y: f64) -> (f64, f64) {
        let (xd, yd) = self.distort(x, y);
        self.to_pixel(xd, yd)
    }

    /// Inverts the distortion model by fixed-point iteration.
    fn undistort_point(&self, u: f64, v: f64) -> Result<(f64, f64), HeadPoseError> {
        let xd = (u - self.cx) / self.fx;
        let yd = (v - self.cy) / self.fy;
        let (mut x, mut y) = (xd, yd);
        for _ in 0..UNDISTORT_ITERATIONS {
            let r2 = x * x + y * y;
            let radial = 1.0 + self.k1 * r2 + self.k2 * r2 * r2;
            let dx = 2.0 * self.p1 * x * y + self.p2 * (r2 + 2.0 * x * x);
            let dy = self.p1 * (r2 + 2.0 * y * y) + 2.0 * self.p2 * x * y;
            x = (xd - dx) / radial;
            y = (yd - dy) / radial;
            if !x.is_finite() || !y.is_finite() {
                return Err(HeadPoseError::UndistortFailure);
            }
        }
        let (rx, ry) = self.distort(x, y);
        if (rx - xd).hypot(ry - yd) > UNDISTORT_RESIDUAL_TOL {
            return Err(HeadPoseError::UndistortFailure);
        }
        Ok((x, y))
    }
}

/// Converts four pixel landmarks to undistorted normalized image points.
pub fn undistort_normalize(
    points: &[[f64; 2]; 4],
    intrinsics: &CameraIntrinsics,
) -> Result<[[f64; 2]; 4], HeadPoseError> {
    intrinsics.validate()?;
    let mut out = [[0.0; 2]; 4];
    for (i, p) in points.iter().enumerate() {
        if !p[0].is_finite() || !p[1].is_finite() {
            return Err(HeadPoseError::UndistortFailure);
        }
        let (x, y) = intrinsics.undistort_point(p[0], p[1])?;
        out[i] = [x, y];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn plain() -> CameraIntrinsics {
        CameraIntrinsics {
            fx: 600.0,
            fy: 600.0,
            cx: 64.0,
            cy: 64.0,
            k1: 0.0,
            k2: 0.0,
            p1: 0.0,
            p2: 0.0,
        }
    }

    #[test]
    fn principal_point_maps_to_origin() {
        let k = plain();
        let pts = [[k.cx, k.cy]; 4];
        let n = undistort_normalize(&pts, &k).unwrap();
        assert_abs_diff_eq!(n[0][0], 0.0);
        assert_abs_diff_eq!(n[0][1], 0.0);
    }

    #[test]
    fn unit_normalized_coordinate() {
        let k = plain();
        let pts = [[k.cx + k.fx, k.cy]; 4];
        let n = undistort_normalize(&pts, &k).unwrap();
        assert_abs_diff_eq!(n[0][0], 1.0);
        assert_abs_diff_eq!(n[0][1], 0.0);
    }

    #[test]
    fn distortion_round_trip_on_grid() {
        // Forward-distort a grid with the forward model, then invert; the
        // forward model is the oracle for the fixed-point inversion.
        let k = CameraIntrinsics { k1: 0.1, ..plain() };
        for i in 0..10 {
            for j in 0..10 {
                let x = -0.3 + 0.0667 * i as f64;
                let y = -0.3 + 0.0667 * j as f64;
                let (u, v) = k.project_normalized(x, y);
                let pts = [[u, v]; 4];
                let n = undistort_normalize(&pts, &k).unwrap();
                assert_abs_diff_eq!(n[0][0], x, epsilon = 1e-6);
                assert_abs_diff_eq!(n[0][1], y, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn tangential_round_trip() {
        let k = CameraIntrinsics { k1: -0.05, k2: 0.01, p1: 0.002, p2: -0.001, ..plain() };
        let (u, v) = k.project_normalized(0.2, -0.25);
        let n = undistort_normalize(&[[u, v]; 4], &k).unwrap();
        assert_abs_diff_eq!(n[0][0], 0.2, epsilon = 1e-6);
        assert_abs_diff_eq!(n[0][1], -0.25, epsilon = 1e-6);
    }

    #[test]
    fn wild_point_fails() {
        // Strong distortion far outside the model's validity diverges.
        let k = CameraIntrinsics { k1: -0.9, k2: 0.5, ..plain() };
        let res = undistort_normalize(&[[4e4, -4e4]; 4], &k);
        assert!(matches!(res, Err(HeadPoseError::UndistortFailure)));
    }

    #[test]
    fn bad_intrinsics_rejected() {
        let k = CameraIntrinsics { fx: -1.0, ..plain() };
        assert!(k.validate().is_err());
        let k = CameraIntrinsics { cx: 9000.0, ..plain() };
        assert!(k.validate().is_err());
    }
}
