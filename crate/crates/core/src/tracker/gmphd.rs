//! The GM-PHD recursion: constant-velocity prediction with adaptive birth,
//! the standard measurement update, and pruning/merging of the intensity.

use super::{GaussianComponent, GmphdParams, TrackerError};
use nalgebra::{Matrix2, Matrix2x4, Matrix4, Matrix4x2, Vector2, Vector4};

const JITTER: f64 = 1e-9;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GaussianMixture {
    components: Vec<GaussianComponent>,
}

impl GaussianMixture {
    pub fn from_components(components: Vec<GaussianComponent>) -> Self {
        Self { components }
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Integral of the intensity: the expected object count.
    pub fn total_weight(&self) -> f64 {
        self.components.iter().map(|c| c.weight).sum()
    }
}

/// Constant-velocity transition matrix.
fn transition(dt: f64) -> Matrix4<f64> {
    let mut f = Matrix4::identity();
    f[(0, 2)] = dt;
    f[(1, 3)] = dt;
    f
}

/// Discrete white-acceleration process noise.
fn process_noise(dt: f64, accel: f64) -> Matrix4<f64> {
    let q = accel * accel;
    let d2 = dt * dt;
    let d3 = d2 * dt;
    let d4 = d3 * dt;
    let mut m = Matrix4::zeros();
    m[(0, 0)] = d4 / 4.0;
    m[(1, 1)] = d4 / 4.0;
    m[(0, 2)] = d3 / 2.0;
    m[(2, 0)] = d3 / 2.0;
    m[(1, 3)] = d3 / 2.0;
    m[(3, 1)] = d3 / 2.0;
    m[(2, 2)] = d2;
    m[(3, 3)] = d2;
    m * q
}

fn observation() -> Matrix2x4<f64> {
    Matrix2x4::new(1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0)
}

fn symmetrize4(m: &Matrix4<f64>) -> Matrix4<f64> {
    (m + m.transpose()) * 0.5
}

/// Survival-scaled constant-velocity prediction, plus one adaptive birth
/// component per previous-scan measurement.
pub fn predict(
    mixture: &GaussianMixture,
    params: &GmphdParams,
    dt: f64,
    prev_measurements: &[[f64; 2]],
) -> GaussianMixture {
    let f = transition(dt);
    let q = process_noise(dt, params.process_noise_accel);
    let mut out = Vec::with_capacity(mixture.len() + prev_measurements.len());
    for c in mixture.components() {
        out.push(GaussianComponent {
            weight: c.weight * params.p_survival,
            mean: f * c.mean,
            covariance: symmetrize4(&(f * c.covariance * f.transpose() + q)),
        });
    }
    if params.birth_weight > 0.0 {
        let birth_cov = Matrix4::from_diagonal(&Vector4::from(params.birth_cov_diag));
        for m in prev_measurements {
            out.push(GaussianComponent {
                weight: params.birth_weight,
                mean: Vector4::new(m[0], m[1], 0.0, 0.0),
                covariance: birth_cov,
            });
        }
    }
    GaussianMixture::from_components(out)
}

/// Per-component data shared across all measurements of a scan.
struct UpdateTerms {
    eta: Vector2<f64>,
    s_inv: Matrix2<f64>,
    s_det: f64,
    gain: Matrix4x2<f64>,
    cov_updated: Matrix4<f64>,
}

fn innovation_terms(
    c: &GaussianComponent,
    meas_var: f64,
) -> Result<UpdateTerms, TrackerError> {
    let h = observation();
    let r = Matrix2::identity() * meas_var;
    let mut s = h * c.covariance * h.transpose() + r;
    s = (s + s.transpose()) * 0.5;
    // Repair a non-PD innovation covariance by jittering the diagonal.
    let chol = match nalgebra::Cholesky::new(s) {
        Some(ch) => ch,
        None => {
            s += Matrix2::identity() * JITTER;
            nalgebra::Cholesky::new(s).ok_or(TrackerError::ScanFailure(f64::NAN))?
        }
    };
    let s_det = {
        let l = chol.l();
        let d = l[(0, 0)] * l[(1, 1)];
        d * d
    };
    let s_inv = chol.inverse();
    let gain = c.covariance * h.transpose() * s_inv;
    // Joseph form keeps the posterior covariance symmetric PSD.
    let i_kh = Matrix4::identity() - gain * h;
    let cov_updated =
        symmetrize4(&(i_kh * c.covariance * i_kh.transpose() + gain * r * gain.transpose()));
    Ok(UpdateTerms { eta: h * c.mean, s_inv, s_det, gain, cov_updated })
}

fn gaussian_density(terms: &UpdateTerms, z: &Vector2<f64>) -> f64 {
    let d = z - terms.eta;
    let maha_sq = (d.transpose() * terms.s_inv * d)[(0, 0)];
    (-0.5 * maha_sq).exp() / (2.0 * std::f64::consts::PI * terms.s_det.sqrt())
}

/// Standard GM-PHD measurement update: missed-detection copies weighted by
/// (1 − p_detect), plus one component per (measurement, prior component)
/// pair normalized against the clutter intensity.
pub fn update(
    mixture: &GaussianMixture,
    measurements: &[[f64; 2]],
    params: &GmphdParams,
) -> Result<GaussianMixture, TrackerError> {
    let meas_var = params.meas_noise * params.meas_noise;
    let terms: Vec<UpdateTerms> = mixture
        .components()
        .iter()
        .map(|c| innovation_terms(c, meas_var))
        .collect::<Result<_, _>>()?;

    let mut out = Vec::with_capacity(mixture.len() * (measurements.len() + 1));
    for c in mixture.components() {
        let w = c.weight * (1.0 - params.p_detect);
        if w > 0.0 {
            out.push(GaussianComponent { weight: w, mean: c.mean, covariance: c.covariance });
        }
    }

    for m in measurements {
        let z = Vector2::new(m[0], m[1]);
        let detection_weights: Vec<f64> = mixture
            .components()
            .iter()
            .zip(&terms)
            .map(|(c, t)| params.p_detect * c.weight * gaussian_density(t, &z))
            .collect();
        let denom = params.clutter_density + detection_weights.iter().sum::<f64>();
        if denom <= 0.0 {
            continue;
        }
        for ((c, t), w) in mixture.components().iter().zip(&terms).zip(&detection_weights) {
            let weight = w / denom;
            if weight > 0.0 {
                out.push(GaussianComponent {
                    weight,
                    mean: c.mean + t.gain * (z - t.eta),
                    covariance: t.cov_updated,
                });
            }
        }
    }
    Ok(GaussianMixture::from_components(out))
}

/// Drops sub-threshold components, greedily merges everything within the
/// Mahalanobis² radius of the strongest remaining component
/// (moment-preserving), and caps the component count.
pub fn prune_merge(mixture: &GaussianMixture, params: &GmphdParams) -> GaussianMixture {
    let mut pool: Vec<GaussianComponent> = mixture
        .components()
        .iter()
        .filter(|c| c.weight >= params.prune_threshold)
        .cloned()
        .collect();

    let mut merged: Vec<GaussianComponent> = Vec::new();
    while !pool.is_empty() {
        let strongest = pool
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.weight.partial_cmp(&b.1.weight).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let center = pool.remove(strongest);
        // Distances are measured in each candidate's own covariance, so a
        // broad (e.g. freshly born) component near a sharp target is
        // absorbed rather than left to drift as a ghost.
        let (mut group, rest): (Vec<GaussianComponent>, Vec<GaussianComponent>) =
            pool.into_iter().partition(|c| {
                let d = c.mean - center.mean;
                match c.covariance.try_inverse() {
                    Some(inv) => (d.transpose() * inv * d)[(0, 0)] <= params.merge_threshold,
                    None => false,
                }
            });
        pool = rest;
        group.push(center);

        let weight: f64 = group.iter().map(|c| c.weight).sum();
        let mut mean = Vector4::zeros();
        for c in &group {
            mean += c.mean * c.weight;
        }
        mean /= weight;
        let mut cov = Matrix4::zeros();
        for c in &group {
            let d = c.mean - mean;
            cov += (c.covariance + d * d.transpose()) * c.weight;
        }
        cov /= weight;
        merged.push(GaussianComponent { weight, mean, covariance: symmetrize4(&cov) });
    }

    merged.sort_by(|a, b| b.weight.partial_cmp(&a.weight).unwrap());
    merged.truncate(params.max_components);
    GaussianMixture::from_components(merged)
}
