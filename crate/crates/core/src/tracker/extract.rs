//! State extraction and identity linking. The plain GM-PHD intensity is
//! label-free; identities come from nearest-neighbor gating of per-scan
//! extractions against constant-velocity predictions of open tracks.

use super::gmphd::GaussianMixture;
use super::{GmphdParams, ObjectClass, StateProvenance, Track, TrackState};
use nalgebra::{Matrix2, Vector2, Vector4};

/// 99% χ² gate for 2 degrees of freedom.
pub const LINK_GATE_MAHALANOBIS_SQ: f64 = 9.21;
/// A track missing more than this many consecutive scans is closed.
pub const MAX_MISSED_SCANS: usize = 3;

/// One extracted state estimate at a scan.
#[derive(Debug, Clone)]
pub struct ScanEstimate {
    pub t: f64,
    pub mean: Vector4<f64>,
    pub pos_cov: Matrix2<f64>,
    pub weight: f64,
}

fn extract_scan(t: f64, mixture: &GaussianMixture, params: &GmphdParams) -> Vec<ScanEstimate> {
    mixture
        .components()
        .iter()
        .filter(|c| c.weight > params.extract_threshold)
        .map(|c| ScanEstimate {
            t,
            mean: c.mean,
            pos_cov: c.covariance.fixed_view::<2, 2>(0, 0).into_owned(),
            weight: c.weight,
        })
        .collect()
}

struct OpenTrack {
    track: Track,
    missed: usize,
    last_pos_cov: Matrix2<f64>,
}

impl OpenTrack {
    fn last(&self) -> &TrackState {
        self.track.states.last().expect("open track has states")
    }

    fn close(mut self) -> Track {
        while matches!(
            self.track.states.last().map(|s| s.provenance),
            Some(StateProvenance::Coasted)
        ) {
            self.track.states.pop();
        }
        self.track
    }
}

/// Links per-scan mixture extractions into identity-stable tracks.
pub fn extract_tracks(
    per_scan: &[(f64, GaussianMixture)],
    class: ObjectClass,
    params: &GmphdParams,
) -> Vec<Track> {
    let mut open: Vec<OpenTrack> = Vec::new();
    let mut closed: Vec<Track> = Vec::new();
    let mut next_id: u64 = 0;
    let accel_var = params.process_noise_accel * params.process_noise_accel;

    for (t, mixture) in per_scan {
        let estimates = extract_scan(*t, mixture, params);

        // Candidate (track, estimate) pairs inside the gate, best first.
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (ti, ot) in open.iter().enumerate() {
            let last = ot.last();
            let dt = t - last.t;
            let pred = Vector2::new(last.x + last.vx * dt, last.y + last.vy * dt);
            let growth = accel_var * dt.powi(4) / 4.0;
            for (ei, est) in estimates.iter().enumerate() {
                let gate_cov =
                    est.pos_cov + ot.last_pos_cov + Matrix2::identity() * growth;
                let Some(inv) = gate_cov.try_inverse() else { continue };
                let d = Vector2::new(est.mean[0], est.mean[1]) - pred;
                let maha_sq = (d.transpose() * inv * d)[(0, 0)];
                if maha_sq <= LINK_GATE_MAHALANOBIS_SQ {
                    pairs.push((maha_sq, ti, ei));
                }
            }
        }
        pairs.sort_by(|a, b| {
            a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
        });

        let mut track_taken = vec![false; open.len()];
        let mut est_taken = vec![false; estimates.len()];
        for (_, ti, ei) in pairs {
            if track_taken[ti] || est_taken[ei] {
                continue;
            }
            track_taken[ti] = true;
            est_taken[ei] = true;
            let est = &estimates[ei];
            open[ti].track.states.push(TrackState {
                t: *t,
                x: est.mean[0],
                y: est.mean[1],
                vx: est.mean[2],
                vy: est.mean[3],
                provenance: StateProvenance::Extracted,
            });
            open[ti].missed = 0;
            open[ti].last_pos_cov = est.pos_cov;
        }

        // Unmatched tracks coast; stale ones close.
        let mut still_open = Vec::with_capacity(open.len());
        for (ti, mut ot) in open.into_iter().enumerate() {
            if track_taken[ti] {
                still_open.push(ot);
                continue;
            }
            ot.missed += 1;
            if ot.missed > MAX_MISSED_SCANS {
                closed.push(ot.close());
            } else {
                let last = *ot.last();
                let dt = t - last.t;
                ot.track.states.push(TrackState {
                    t: *t,
                    x: last.x + last.vx * dt,
                    y: last.y + last.vy * dt,
                    vx: last.vx,
                    vy: last.vy,
                    provenance: StateProvenance::Coasted,
                });
                still_open.push(ot);
            }
        }
        open = still_open;

        // Unmatched estimates start new tracks.
        for (ei, est) in estimates.iter().enumerate() {
            if est_taken[ei] {
                continue;
            }
            open.push(OpenTrack {
                track: Track {
                    id: next_id,
                    class,
                    states: vec![TrackState {
                        t: *t,
                        x: est.mean[0],
                        y: est.mean[1],
                        vx: est.mean[2],
                        vy: est.mean[3],
                        provenance: StateProvenance::Extracted,
                    }],
                },
                missed: 0,
                last_pos_cov: est.pos_cov,
            });
            next_id += 1;
        }
    }

    closed.extend(open.into_iter().map(OpenTrack::close));
    closed.sort_by_key(|t| t.id);
    closed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracker::GaussianComponent;
    use nalgebra::Matrix4;

    fn mixture_at(positions: &[[f64; 2]], weight: f64) -> GaussianMixture {
        GaussianMixture::from_components(
            positions
                .iter()
                .map(|p| GaussianComponent {
                    weight,
                    mean: Vector4::new(p[0], p[1], 0.0, 0.0),
                    covariance: Matrix4::identity() * 0.25,
                })
                .collect(),
        )
    }

    #[test]
    fn empty_sequence_gives_no_tracks() {
        let params = GmphdParams::default();
        assert!(extract_tracks(&[], ObjectClass::Vehicle, &params).is_empty());
    }

    #[test]
    fn sub_threshold_components_ignored() {
        let params = GmphdParams::default();
        let scans = vec![(0.0, mixture_at(&[[0.0, 0.0]], 0.3))];
        assert!(extract_tracks(&scans, ObjectClass::Vehicle, &params).is_empty());
    }

    #[test]
    fn persistent_estimate_forms_single_track() {
        let params = GmphdParams::default();
        let scans: Vec<(f64, GaussianMixture)> = (0..20)
            .map(|k| (k as f64 * 0.1, mixture_at(&[[k as f64 * 0.1, 0.0]], 0.9)))
            .collect();
        let tracks = extract_tracks(&scans, ObjectClass::Vehicle, &params);
        assert_eq!(tracks.len(), 1);
        assert_eq!(tracks[0].states.len(), 20);
    }

    #[test]
    fn miss_then_reacquire_keeps_identity() {
        let params = GmphdParams::default();
        let mut scans = Vec::new();
        for k in 0..20 {
            let t = k as f64 * 0.1;
            if (8..10).contains(&k) {
                scans.push((t, mixture_at(&[], 0.9)));
            } else {
                scans.push((t, mixture_at(&[[t, 0.0]], 0.9)));
            }
        }
        let tracks = extract_tracks(&scans, ObjectClass::Vehicle, &params);
        assert_eq!(tracks.len(), 1);
        let coasted = tracks[0]
            .states
            .iter()
            .filter(|s| s.provenance == StateProvenance::Coasted)
            .count();
        assert_eq!(coasted, 2);
    }

    #[test]
    fn long_gap_closes_and_trims_coasted_tail() {
        let params = GmphdParams::default();
        let mut scans = Vec::new();
        for k in 0..20 {
            let t = k as f64 * 0.1;
            if k < 5 {
                scans.push((t, mixture_at(&[[0.0, 0.0]], 0.9)));
            } else {
                scans.push((t, mixture_at(&[], 0.9)));
            }
        }
        let tracks = extract_tracks(&scans, ObjectClass::Vehicle, &params);
        assert_eq!(tracks.len(), 1);
        assert_eq!(tracks[0].states.len(), 5);
        assert!(tracks[0]
            .states
            .iter()
            .all(|s| s.provenance == StateProvenance::Extracted));
    }
}
