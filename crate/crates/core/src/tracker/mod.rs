//! GM-PHD multi-target tracking of vehicle/pedestrian centroid detections
//! in the 2D top-down world frame.
//!
//! The filter propagates a Gaussian-mixture intensity whose integral is the
//! expected object count; clutter and missed detections are handled without
//! explicit data association. Identity comes afterwards: per-scan state
//! extraction followed by nearest-neighbor linking.

mod extract;
mod gmphd;
mod ospa;

pub use extract::{extract_tracks, ScanEstimate, LINK_GATE_MAHALANOBIS_SQ, MAX_MISSED_SCANS};
pub use gmphd::{predict, prune_merge, update, GaussianMixture};
pub use ospa::ospa;

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrackerError {
    #[error("invalid tracker params: {0}")]
    BadParams(&'static str),
    #[error("scan at t={0}: innovation covariance unrecoverable")]
    ScanFailure(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectClass {
    Vehicle,
    Pedestrian,
}

impl ObjectClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            ObjectClass::Vehicle => "vehicle",
            ObjectClass::Pedestrian => "pedestrian",
        }
    }
}

/// One centroid detection in the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub t: f64,
    pub class: ObjectClass,
    pub x: f64,
    pub y: f64,
    pub confidence: f64,
}

/// One weighted Gaussian over the state [x, y, vx, vy].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianComponent {
    pub weight: f64,
    pub mean: Vector4<f64>,
    pub covariance: Matrix4<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmphdParams {
    pub p_survival: f64,
    pub p_detect: f64,
    /// Clutter intensity per m² per scan.
    pub clutter_density: f64,
    /// White-acceleration process noise, m/s².
    pub process_noise_accel: f64,
    /// Measurement noise standard deviation, m.
    pub meas_noise: f64,
    pub prune_threshold: f64,
    /// Mahalanobis² radius for moment-preserving merging.
    pub merge_threshold: f64,
    pub max_components: usize,
    pub birth_weight: f64,
    /// Diagonal of the birth covariance: [m², m², (m/s)², (m/s)²].
    pub birth_cov_diag: [f64; 4],
    pub extract_threshold: f64,
    /// Detections below this confidence are dropped at ingestion.
    pub min_confidence: f64,
}

impl Default for GmphdParams {
    fn default() -> Self {
        Self {
            p_survival: 0.99,
            p_detect: 0.9,
            clutter_density: 1e-4,
            process_noise_accel: 1.0,
            meas_noise: 0.5,
            prune_threshold: 1e-5,
            merge_threshold: 4.0,
            max_components: 100,
            birth_weight: 0.05,
            birth_cov_diag: [4.0, 4.0, 4.0, 4.0],
            extract_threshold: 0.5,
            min_confidence: 0.3,
        }
    }
}

impl GmphdParams {
    /// Default parameters tuned per class: pedestrians move less erratically
    /// in acceleration terms.
    pub fn default_for(class: ObjectClass) -> Self {
        match class {
            ObjectClass::Vehicle => Self::default(),
            ObjectClass::Pedestrian => Self { process_noise_accel: 0.5, ..Self::default() },
        }
    }

    pub fn validate(&self) -> Result<(), TrackerError> {
        let probs = [self.p_survival, self.p_detect];
        if probs.iter().any(|p| !(*p > 0.0 && *p <= 1.0)) {
            return Err(TrackerError::BadParams("probabilities must lie in (0, 1]"));
        }
        if !(self.clutter_density >= 0.0) {
            return Err(TrackerError::BadParams("clutter_density must be >= 0"));
        }
        let positive = [
            self.process_noise_accel,
            self.meas_noise,
            self.prune_threshold,
            self.merge_threshold,
            self.extract_threshold,
        ];
        if positive.iter().any(|v| !(*v > 0.0)) {
            return Err(TrackerError::BadParams("thresholds and noises must be positive"));
        }
        if self.max_components < 1 {
            return Err(TrackerError::BadParams("max_components must be >= 1"));
        }
        if !(self.birth_weight >= 0.0) {
            return Err(TrackerError::BadParams("birth_weight must be >= 0"));
        }
        if self.birth_cov_diag.iter().any(|v| !(*v > 0.0)) {
            return Err(TrackerError::BadParams("birth covariance diagonal must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateProvenance {
    /// Backed by an extracted mixture component in that scan.
    Extracted,
    /// Propagated through a scan with no matching estimate.
    Coasted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackState {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub provenance: StateProvenance,
}

/// Identity-stable time series of one tracked object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Track {
    pub id: u64,
    pub class: ObjectClass,
    pub states: Vec<TrackState>,
}

impl Track {
    pub fn first_t(&self) -> f64 {
        self.states[0].t
    }

    pub fn last_t(&self) -> f64 {
        self.states[self.states.len() - 1].t
    }
}

/// All detections sharing one timestamp, for one class.
#[derive(Debug, Clone, PartialEq)]
pub struct Scan {
    pub t: f64,
    pub measurements: Vec<[f64; 2]>,
}

/// Groups world-frame detections of one class into time-ordered scans,
/// dropping detections under the confidence floor.
pub fn group_scans(detections: &[Detection], class: ObjectClass, min_confidence: f64) -> Vec<Scan> {
    let mut filtered: Vec<&Detection> = detections
        .iter()
        .filter(|d| d.class == class && d.confidence >= min_confidence)
        .collect();
    filtered.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
    let mut scans: Vec<Scan> = Vec::new();
    for d in filtered {
        match scans.last_mut() {
            Some(scan) if scan.t == d.t => scan.measurements.push([d.x, d.y]),
            _ => scans.push(Scan { t: d.t, measurements: vec![[d.x, d.y]] }),
        }
    }
    scans
}

/// Output of [`track_scene`]: tracks per class plus non-fatal scan issues.
#[derive(Debug, Clone, Default)]
pub struct SceneTracks {
    pub vehicles: Vec<Track>,
    pub pedestrians: Vec<Track>,
    pub warnings: Vec<String>,
}

impl SceneTracks {
    pub fn all(&self) -> impl Iterator<Item = &Track> {
        self.vehicles.iter().chain(self.pedestrians.iter())
    }
}

/// Runs the full GM-PHD recursion over one class's scans and links the
/// per-scan extractions into tracks.
pub fn track_class(
    scans: &[Scan],
    class: ObjectClass,
    params: &GmphdParams,
) -> Result<(Vec<Track>, Vec<String>), TrackerError> {
    params.validate()?;
    let mut warnings = Vec::new();
    let mut mixture = GaussianMixture::default();
    let mut prev_meas: Vec<[f64; 2]> = Vec::new();
    let mut prev_t: Option<f64> = None;
    let mut per_scan: Vec<(f64, GaussianMixture)> = Vec::with_capacity(scans.len());

    for scan in scans {
        let dt = match prev_t {
            Some(p) => (scan.t - p).max(1e-6),
            None => 0.0,
        };
        let predicted = predict(&mixture, params, dt, &prev_meas);
        mixture = match update(&predicted, &scan.measurements, params) {
            Ok(m) => m,
            Err(_) => {
                warnings.push(format!(
                    "{} scan at t={}: innovation covariance unrecoverable; prediction carried forward",
                    class.as_str(),
                    scan.t
                ));
                predicted
            }
        };
        mixture = prune_merge(&mixture, params);
        per_scan.push((scan.t, mixture.clone()));
        prev_meas = scan.measurements.clone();
        prev_t = Some(scan.t);
    }

    Ok((extract_tracks(&per_scan, class, params), warnings))
}

/// Tracks vehicles and pedestrians independently; the two classes never
/// share mixture components.
pub fn track_scene(
    detections: &[Detection],
    vehicle_params: &GmphdParams,
    pedestrian_params: &GmphdParams,
) -> Result<SceneTracks, TrackerError> {
    let veh_scans = group_scans(detections, ObjectClass::Vehicle, vehicle_params.min_confidence);
    let ped_scans =
        group_scans(detections, ObjectClass::Pedestrian, pedestrian_params.min_confidence);
    let (vehicles, mut warnings) = track_class(&veh_scans, ObjectClass::Vehicle, vehicle_params)?;
    let (pedestrians, ped_warnings) =
        track_class(&ped_scans, ObjectClass::Pedestrian, pedestrian_params)?;
    warnings.extend(ped_warnings);
    Ok(SceneTracks { vehicles, pedestrians, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn det(t: f64, class: ObjectClass, x: f64, y: f64) -> Detection {
        Detection { t, class, x, y, confidence: 1.0 }
    }

    #[test]
    fn grouping_filters_and_orders() {
        let dets = vec![
            det(0.2, ObjectClass::Vehicle, 1.0, 0.0),
            det(0.1, ObjectClass::Vehicle, 2.0, 0.0),
            det(0.1, ObjectClass::Vehicle, 3.0, 0.0),
            det(0.1, ObjectClass::Pedestrian, 4.0, 0.0),
            Detection { t: 0.1, class: ObjectClass::Vehicle, x: 9.0, y: 0.0, confidence: 0.1 },
        ];
        let scans = group_scans(&dets, ObjectClass::Vehicle, 0.3);
        assert_eq!(scans.len(), 2);
        assert_eq!(scans[0].t, 0.1);
        assert_eq!(scans[0].measurements.len(), 2);
        assert_eq!(scans[1].measurements.len(), 1);
    }

    #[test]
    fn single_persistent_target_gives_one_track() {
        let mut dets = Vec::new();
        for k in 0..50 {
            let t = k as f64 * 0.1;
            dets.push(det(t, ObjectClass::Vehicle, 10.0 + 2.0 * t, 5.0));
        }
        let params = GmphdParams { clutter_density: 1e-6, p_detect: 0.99, ..Default::default() };
        let out = track_scene(&dets, &params, &params).unwrap();
        assert_eq!(out.vehicles.len(), 1, "tracks: {:?}", out.vehicles.len());
        assert!(out.pedestrians.is_empty());
        let track = &out.vehicles[0];
        // Born from the adaptive birth model: confirmed from the second scan.
        assert!(track.states.len() >= 47);
        let last = track.states.last().unwrap();
        assert!((last.x - (10.0 + 2.0 * last.t)).abs() < 0.5);
        assert!((last.vx - 2.0).abs() < 0.5);
    }

    #[test]
    fn two_parallel_targets_keep_identity() {
        let mut dets = Vec::new();
        for k in 0..60 {
            let t = k as f64 * 0.1;
            dets.push(det(t, ObjectClass::Vehicle, 3.0 * t, 0.0));
            dets.push(det(t, ObjectClass::Vehicle, 3.0 * t, 20.0));
        }
        let params = GmphdParams { clutter_density: 1e-6, p_detect: 0.99, ..Default::default() };
        let out = track_scene(&dets, &params, &params).unwrap();
        assert_eq!(out.vehicles.len(), 2);
        for track in &out.vehicles {
            let y0 = track.states[0].y;
            for s in &track.states {
                assert!((s.y - y0).abs() < 2.0, "identity swap: y {} vs {}", s.y, y0);
            }
        }
    }

    #[test]
    fn empty_detections_give_empty_tracks() {
        let params = GmphdParams::default();
        let out = track_scene(&[], &params, &params).unwrap();
        assert!(out.vehicles.is_empty() && out.pedestrians.is_empty());
    }

    #[test]
    fn expected_count_tracks_cardinality() {
        // p_detect = 1, no clutter, 3 well-separated persistent targets:
        // the total mixture weight stays within ±0.1 of 3 after burn-in.
        let params = GmphdParams {
            p_detect: 1.0,
            clutter_density: 0.0,
            ..Default::default()
        };
        let spots = [[0.0, 0.0], [40.0, 0.0], [0.0, 40.0]];
        let mut mixture = GaussianMixture::default();
        let mut prev: Vec<[f64; 2]> = Vec::new();
        for k in 0..40 {
            let meas: Vec<[f64; 2]> =
                spots.iter().map(|s| [s[0] + 0.01 * k as f64, s[1]]).collect();
            let dt = if k == 0 { 0.0 } else { 0.1 };
            let predicted = predict(&mixture, &params, dt, &prev);
            mixture = update(&predicted, &meas, &params).unwrap();
            mixture = prune_merge(&mixture, &params);
            if k >= 10 {
                let total = mixture.total_weight();
                assert!((total - 3.0).abs() <= 0.1, "scan {k}: total weight {total}");
            }
            prev = meas;
        }
    }

    #[test]
    fn measurement_order_does_not_change_posterior() {
        let params = GmphdParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut mixture = GaussianMixture::default();
        // Seed a few components via two scans.
        let seed_meas = vec![[0.0, 0.0], [15.0, 5.0], [-8.0, 12.0]];
        for k in 0..2 {
            let predicted = predict(&mixture, &params, if k == 0 { 0.0 } else { 0.1 }, &seed_meas);
            mixture = update(&predicted, &seed_meas, &params).unwrap();
        }

        let mut meas: Vec<[f64; 2]> = (0..4)
            .map(|_| [rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0)])
            .collect();
        let a = update(&predict(&mixture, &params, 0.1, &meas), &meas, &params).unwrap();
        meas.reverse();
        let b = update(&predict(&mixture, &params, 0.1, &meas), &meas, &params).unwrap();

        let key = |m: &GaussianMixture| {
            let mut v: Vec<(i64, i64, i64)> = m
                .components()
                .iter()
                .map(|c| {
                    (
                        (c.weight * 1e12) as i64,
                        (c.mean[0] * 1e9) as i64,
                        (c.mean[1] * 1e9) as i64,
                    )
                })
                .collect();
            v.sort();
            v
        };
        assert_eq!(key(&a), key(&b));
        assert!((a.total_weight() - b.total_weight()).abs() < 1e-9);
    }

    #[test]
    fn covariances_stay_symmetric_positive_definite() {
        let params = GmphdParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut mixture = GaussianMixture::default();
        let mut prev: Vec<[f64; 2]> = vec![[0.0, 0.0]];
        for k in 0..30 {
            let mut meas = vec![[0.5 * k as f64, 0.0]];
            for _ in 0..2 {
                meas.push([rng.gen_range(-30.0..30.0), rng.gen_range(-30.0..30.0)]);
            }
            let predicted = predict(&mixture, &params, if k == 0 { 0.0 } else { 0.1 }, &prev);
            mixture = update(&predicted, &meas, &params).unwrap();
            mixture = prune_merge(&mixture, &params);
            for c in mixture.components() {
                let asym = (c.covariance - c.covariance.transpose()).amax();
                assert!(asym <= 1e-9, "asymmetry {asym}");
                assert!(
                    nalgebra::Cholesky::new(c.covariance).is_some(),
                    "covariance not PD at scan {k}"
                );
            }
            prev = meas;
        }
    }

    #[test]
    fn params_validation() {
        assert!(GmphdParams::default().validate().is_ok());
        assert!(GmphdParams { p_detect: 0.0, ..Default::default() }.validate().is_err());
        assert!(GmphdParams { max_components: 0, ..Default::default() }.validate().is_err());
        assert!(GmphdParams { meas_noise: -1.0, ..Default::default() }.validate().is_err());
    }
}
