//! Planar pose from a homography via the first-order (Jacobian) method:
//! the two candidate rotations are recovered from the homography's
//! behavior at the model origin, translation from the origin's projection.

use super::HeadPoseError;
use nalgebra::{Matrix2, Matrix3, Vector3};

#[derive(Debug, Clone, Copy)]
pub struct PoseCandidate {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

/// Rotation taking the +z axis onto the unit vector along `v` (Rodrigues).
fn rotation_z_to(v: &Vector3<f64>) -> Matrix3<f64> {
    let u = v.normalize();
    let axis = Vector3::new(-u.y, u.x, 0.0); // e3 × u
    let sin_t = axis.norm();
    let cos_t = u.z;
    if sin_t < 1e-14 {
        // u is ±e3; -e3 cannot occur for (p, q, 1) directions.
        return Matrix3::identity();
    }
    let k = axis / sin_t;
    let kx = Matrix3::new(0.0, -k.z, k.y, k.z, 0.0, -k.x, -k.y, k.x, 0.0);
    Matrix3::identity() + kx * sin_t + kx * kx * (1.0 - cos_t)
}

/// Builds an orthonormal right-handed rotation whose first two columns are
/// the normalized/orthogonalized inputs.
fn rotation_from_columns(c1: Vector3<f64>, c2: Vector3<f64>) -> Matrix3<f64> {
    let s1 = c1.normalize();
    let mut s2 = c2 - s1 * s1.dot(&c2);
    s2.normalize_mut();
    let s3 = s1.cross(&s2);
    Matrix3::from_columns(&[s1, s2, s3])
}

/// Decomposes a plane-to-image homography (normalized camera coordinates,
/// `H[2][2] = 1`) into its two candidate rigid poses. Returns one candidate
/// only in the degenerate fronto-parallel case where both coincide.
pub fn ippe_decompose(h: &Matrix3<f64>) -> Result<Vec<PoseCandidate>, HeadPoseError> {
    if h.determinant().abs() < 1e-15 || h[(2, 2)].abs() < 1e-12 {
        return Err(HeadPoseError::PoseInfeasible);
    }
    let h = h / h[(2, 2)];

    // Projection of the model origin and the homography Jacobian there.
    let p = h[(0, 2)];
    let q = h[(1, 2)];
    let j = Matrix2::new(
        h[(0, 0)] - h[(2, 0)] * p,
        h[(0, 1)] - h[(2, 1)] * p,
        h[(1, 0)] - h[(2, 0)] * q,
        h[(1, 1)] - h[(2, 1)] * q,
    );

    // Rotate the viewing ray of the origin onto the optical axis; in that
    // frame the pose constraint reduces to a 2×2 problem.
    let rv = rotation_z_to(&Vector3::new(p, q, 1.0));
    let b = Matrix2::new(
        rv[(0, 0)] - p * rv[(2, 0)],
        rv[(0, 1)] - p * rv[(2, 1)],
        rv[(1, 0)] - q * rv[(2, 0)],
        rv[(1, 1)] - q * rv[(2, 1)],
    );
    let b_inv = b.try_inverse().ok_or(HeadPoseError::PoseInfeasible)?;
    let a = b_inv * j;

    // Scale: gamma = 1 / largest singular value of A; the upper 2×2 block
    // of the reduced rotation is gamma*A.
    let c11 = a[(0, 0)] * a[(0, 0)] + a[(1, 0)] * a[(1, 0)];
    let c22 = a[(0, 1)] * a[(0, 1)] + a[(1, 1)] * a[(1, 1)];
    let c12 = a[(0, 0)] * a[(0, 1)] + a[(1, 0)] * a[(1, 1)];
    let lambda_max = 0.5 * ((c11 + c22) + ((c11 - c22).powi(2) + 4.0 * c12 * c12).sqrt());
    if !(lambda_max > 1e-20) || !lambda_max.is_finite() {
        return Err(HeadPoseError::PoseInfeasible);
    }
    let gamma = 1.0 / lambda_max.sqrt();

    let rt = a * gamma;
    // Third-row entries of the reduced rotation, determined up to a joint
    // sign flip — the planar two-fold ambiguity.
    let s20_sq = (1.0 - (rt[(0, 0)] * rt[(0, 0)] + rt[(1, 0)] * rt[(1, 0)])).max(0.0);
    let s21_sq = (1.0 - (rt[(0, 1)] * rt[(0, 1)] + rt[(1, 1)] * rt[(1, 1)])).max(0.0);
    let cross = -(rt[(0, 0)] * rt[(0, 1)] + rt[(1, 0)] * rt[(1, 1)]);
    let s20 = s20_sq.sqrt();
    let s21 = if s20 > 1e-9 { cross / s20 } else { s21_sq.sqrt() };

    let translation = Vector3::new(p, q, 1.0) * gamma;
    let make = |sign: f64| -> PoseCandidate {
        let c1 = Vector3::new(rt[(0, 0)], rt[(1, 0)], sign * s20);
        let c2 = Vector3::new(rt[(0, 1)], rt[(1, 1)], sign * s21);
        PoseCandidate {
            rotation: rv * rotation_from_columns(c1, c2),
            translation,
        }
    };

    if s20 < 1e-9 && s21.abs() < 1e-9 {
        // Fronto-parallel: the two solutions coincide.
        return Ok(vec![make(1.0)]);
    }
    Ok(vec![make(1.0), make(-1.0)])
}

/// RMS distance, in the coordinates of `img`, between the projections of
/// the model points under (R, t) and the observed points. Infinite when a
/// model point lands behind the camera.
pub fn reprojection_rms(
    rotation: &Matrix3<f64>,
    translation: &Vector3<f64>,
    model_xy: &[[f64; 2]; 4],
    img: &[[f64; 2]; 4],
) -> f64 {
    let mut sum_sq = 0.0;
    for (m, obs) in model_xy.iter().zip(img) {
        let x = rotation * Vector3::new(m[0], m[1], 0.0) + translation;
        if x.z <= 0.0 {
            return f64::INFINITY;
        }
        let du = x.x / x.z - obs[0];
        let dv = x.y / x.z - obs[1];
        sum_sq += du * du + dv * dv;
    }
    (sum_sq / 4.0).sqrt()
}

#[derive(Debug, Clone, Copy)]
pub struct PoseSelection {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
    /// RMS reprojection error of the selected candidate, in the units of
    /// the image points handed in (normalized coordinates in the pipeline).
    pub reproj_rms: f64,
    /// Selected error ÷ rejected error, in [0, 1]; 1 when both are zero,
    /// 0 when there is no viable rival.
    pub ambiguity_ratio: f64,
}

/// Least-squares translation for a fixed rotation: each correspondence
/// contributes two linear constraints from `[I | -z] (R m + t) = 0`.
fn refine_translation(
    rotation: &Matrix3<f64>,
    model_xy: &[[f64; 2]; 4],
    img: &[[f64; 2]; 4],
) -> Option<Vector3<f64>> {
    let mut ata = Matrix3::<f64>::zeros();
    let mut atb = Vector3::<f64>::zeros();
    for (m, z) in model_xy.iter().zip(img) {
        let rm = rotation * Vector3::new(m[0], m[1], 0.0);
        // Rows: [1, 0, -u] and [0, 1, -v].
        let rows = [
            (Vector3::new(1.0, 0.0, -z[0]), -(rm.x - z[0] * rm.z)),
            (Vector3::new(0.0, 1.0, -z[1]), -(rm.y - z[1] * rm.z)),
        ];
        for (a, b) in rows {
            ata += a * a.transpose();
            atb += a * b;
        }
    }
    let t = ata.try_inverse()? * atb;
    (t.z > 0.0).then_some(t)
}

/// Picks the candidate with the lower RMS reprojection error (ties go to
/// the earlier candidate). Each candidate's translation is first refined
/// by least squares over the four correspondences, which sharpens the
/// error contrast between the two near-planar solutions.
pub fn select_pose(
    candidates: &[PoseCandidate],
    model_xy: &[[f64; 2]; 4],
    img_norm: &[[f64; 2]; 4],
) -> Result<PoseSelection, HeadPoseError> {
    if candidates.is_empty() {
        return Err(HeadPoseError::PoseInfeasible);
    }
    let candidates: Vec<PoseCandidate> = candidates
        .iter()
        .map(|c| PoseCandidate {
            rotation: c.rotation,
            translation: refine_translation(&c.rotation, model_xy, img_norm)
                .unwrap_or(c.translation),
        })
        .collect();
    let errs: Vec<f64> = candidates
        .iter()
        .map(|c| reprojection_rms(&c.rotation, &c.translation, model_xy, img_norm))
        .collect();
    let mut best = 0;
    for (i, e) in errs.iter().enumerate() {
        if *e < errs[best] {
            best = i;
        }
    }
    if !errs[best].is_finite() {
        return Err(HeadPoseError::PoseInfeasible);
    }
    let rejected = errs
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != best)
        .map(|(_, e)| *e)
        .fold(f64::INFINITY, f64::min);
    let ambiguity_ratio = if rejected.is_infinite() {
        0.0
    } else if errs[best] == 0.0 && rejected == 0.0 {
        1.0
    } else {
        errs[best] / rejected
    };
    Ok(PoseSelection {
        rotation: candidates[best].rotation,
        translation: candidates[best].translation,
        reproj_rms: errs[best],
        ambiguity_ratio,
    })
}
