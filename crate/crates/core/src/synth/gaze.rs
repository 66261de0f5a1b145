//! True head-yaw generation over a scene, per gaze profile, plus the
//! generator's own bookkeeping of which objects the driver observed.

use super::scene::{ego_pose_at, lap_start, object_position, Scene};
use super::{GazeProfile, GlanceStart, GlanceTarget, ObservedTruth, ScenarioSpec, StreamPurpose};
use crate::attention::{gate, GatingConfig, GazeRegion, GazeRegions};
use crate::geometry::{bearing, world_to_ego, Angle};
use rand_distr::{Distribution, Normal};

/// Maximum head slew rate for the attentive profile, deg/s.
const SLEW_DEG_S: f64 = 200.0;
/// Dwell held on each target before moving on, seconds.
const HOLD_S: f64 = 0.5;
/// Angular tolerance for "at the target bearing", degrees.
const AT_TARGET_DEG: f64 = 1.5;
/// Gaussian jitter added to the attentive/scripted yaw, degrees.
const JITTER_DEG: f64 = 0.3;

struct ObjectBook {
    fv_dwell: f64,
    pv_dwell: f64,
    credit: f64,
    gated: bool,
}

/// Generates the true vehicle-frame yaw series at camera ticks and marks
/// each object observed/unobserved under the same FV/PV dwell rules the
/// analysis applies.
pub fn gen_gaze(spec: &ScenarioSpec, scene: &Scene) -> (Vec<(f64, f64)>, Vec<ObservedTruth>) {
    let gating = GatingConfig::default();
    let regions = GazeRegions::default();
    let dt = 1.0 / spec.camera.rate_hz;
    let lap_duration = spec.junction.lap_duration();

    let mut yaw_series = Vec::new();
    let mut observed = Vec::new();

    for (lap_index, lap) in spec.laps.iter().enumerate() {
        let t0 = lap_start(spec, lap_index);
        let roster = &scene.rosters[lap_index];
        let mut rng = super::stream(spec.seed, lap.scene_seed, StreamPurpose::Gaze);
        let jitter = Normal::new(0.0, JITTER_DEG).unwrap();
        let inattentive = Normal::new(0.0, 3.0).unwrap();

        // Resolve scripted glances to lap-relative (start, end, target).
        let script: Vec<(f64, f64, GlanceTarget)> = match &lap.gaze {
            GazeProfile::Scripted(glances) => glances
                .iter()
                .map(|g| {
                    let start = match &g.start {
                        GlanceStart::At(s) => *s,
                        GlanceStart::AfterObjectSpawn { object, delay_s } => {
                            roster.get(*object).map(|o| o.spawn).unwrap_or(0.0) + delay_s
                        }
                    };
                    (start, start + g.dwell_s, g.target.clone())
                })
                .collect(),
            _ => Vec::new(),
        };

        let mut books: Vec<ObjectBook> = roster
            .iter()
            .map(|_| ObjectBook { fv_dwell: 0.0, pv_dwell: 0.0, credit: 0.0, gated: false })
            .collect();
        let mut yaw = 0.0f64;
        let mut target: Option<usize> = None;
        let mut held = 0.0f64;

        let steps = (lap_duration * spec.camera.rate_hz).floor() as usize;
        for k in 0..=steps {
            let lt = k as f64 * dt;
            let pose = ego_pose_at(&spec.junction, lt);

            // Gated objects and their current bearings.
            let mut gated_now: Vec<(usize, f64)> = Vec::new();
            for (i, o) in roster.iter().enumerate() {
                let Some((x, y)) = object_position(o, lt) else { continue };
                let Ok(ego) = world_to_ego(&pose, (x, y)) else { continue };
                if gate(ego, &gating) {
                    if let Ok(b) = bearing(ego) {
                        books[i].gated = true;
                        gated_now.push((i, b.degrees()));
                    }
                }
            }

            let emitted = match &lap.gaze {
                GazeProfile::Inattentive => inattentive.sample(&mut rng),
                GazeProfile::Attentive => {
                    // Drop the target once held long enough or ungated.
                    if let Some(tgt) = target {
                        let still = gated_now.iter().any(|&(i, _)| i == tgt);
                        if !still || held >= HOLD_S {
                            target = None;
                            held = 0.0;
                        }
                    }
                    // Pick the gated object with the least glance credit.
                    if target.is_none() {
                        target = gated_now
                            .iter()
                            .min_by(|a, b| {
                                books[a.0]
                                    .credit
                                    .partial_cmp(&books[b.0].credit)
                                    .unwrap()
                                    .then(a.0.cmp(&b.0))
                            })
                            .map(|&(i, _)| i);
                    }
                    let desired = target
                        .and_then(|tgt| gated_now.iter().find(|&&(i, _)| i == tgt))
                        .map(|&(_, b)| b)
                        .unwrap_or(0.0);
                    let step = (desired - yaw).clamp(-SLEW_DEG_S * dt, SLEW_DEG_S * dt);
                    yaw += step;
                    if let Some(tgt) = target {
                        if (yaw - desired).abs() <= AT_TARGET_DEG {
                            held += dt;
                            books[tgt].credit += dt;
                        }
                    }
                    yaw + jitter.sample(&mut rng)
                }
                GazeProfile::Scripted(_) => {
                    // The script is the truth: snap to the active glance.
                    let active = script.iter().find(|(s, e, _)| lt >= *s && lt < *e);
                    match active {
                        Some((_, _, GlanceTarget::Bearing(b))) => *b,
                        Some((_, _, GlanceTarget::Object(idx))) => gated_now
                            .iter()
                            .find(|&&(i, _)| i == *idx)
                            .map(|&(_, b)| b)
                            .unwrap_or_else(|| {
                                // Follow even outside the gate.
                                object_position(&roster[*idx], lt)
                                    .and_then(|(x, y)| world_to_ego(&pose, (x, y)).ok())
                                    .and_then(|e| bearing(e).ok())
                                    .map(|b| b.degrees())
                                    .unwrap_or(0.0)
                            }),
                        None => 0.0,
                    }
                }
            };
            let emitted = Angle::wrap_unchecked(emitted).degrees();
            yaw_series.push((t0 + lt, emitted));

            // Observation bookkeeping under the analysis dwell rules.
            let yaw_angle = Angle::wrap_unchecked(emitted);
            for &(i, b) in &gated_now {
                match crate::attention::gaze_hit(yaw_angle, Angle::wrap_unchecked(b), &regions) {
                    Some(GazeRegion::Fv) => books[i].fv_dwell += dt,
                    Some(GazeRegion::Pv) => books[i].pv_dwell += dt,
                    None => {}
                }
            }
        }

        for (i, book) in books.iter().enumerate() {
            let region = if book.fv_dwell >= regions.dwell_min {
                Some(GazeRegion::Fv)
            } else if book.fv_dwell + book.pv_dwell >= regions.dwell_min {
                Some(GazeRegion::Pv)
            } else {
                None
            };
            observed.push(ObservedTruth {
                object_id: scene.truth.objects
                    [lap_index * roster.len() + i]
                    .id,
                lap_index,
                gated: book.gated,
                region,
            });
        }
    }
    (yaw_series, observed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{gen_scene, GazeProfile, Glance, ScenarioSpec};

    fn spec_with(gaze: GazeProfile, seed: u64) -> ScenarioSpec {
        ScenarioSpec::with_profiles(seed, &[("A".into(), 1, gaze)])
    }

    fn observed_fraction(spec: &ScenarioSpec) -> f64 {
        let scene = gen_scene(spec).unwrap();
        let (_, observed) = gen_gaze(spec, &scene);
        let gated: Vec<_> = observed.iter().filter(|o| o.gated).collect();
        assert!(!gated.is_empty());
        gated.iter().filter(|o| o.region.is_some()).count() as f64 / gated.len() as f64
    }

    #[test]
    fn attentive_observes_most_gated_objects() {
        for seed in [1, 2, 3] {
            let frac = observed_fraction(&spec_with(GazeProfile::Attentive, seed));
            assert!(frac >= 0.9, "seed {seed}: observed {frac}");
        }
    }

    #[test]
    fn inattentive_observes_almost_nothing() {
        for seed in [1, 2, 3] {
            let frac = observed_fraction(&spec_with(GazeProfile::Inattentive, seed));
            assert!(frac <= 0.1, "seed {seed}: observed {frac}");
        }
    }

    #[test]
    fn scripted_glance_observes_exactly_its_target() {
        // Glance at the corner pedestrian (roster index 4) while gated.
        let glance = Glance {
            start: super::super::GlanceStart::At(7.0),
            target: GlanceTarget::Object(4),
            dwell_s: 0.4,
        };
        let spec = spec_with(GazeProfile::Scripted(vec![glance]), 4);
        let scene = gen_scene(&spec).unwrap();
        let (_, observed) = gen_gaze(&spec, &scene);
        for o in &observed {
            let idx = o.object_id % scene.rosters[0].len();
            if idx == 4 {
                assert_eq!(o.region, Some(GazeRegion::Fv), "target pedestrian not FV");
            } else {
                assert_eq!(o.region, None, "object {idx} unexpectedly observed");
            }
        }
    }

    #[test]
    fn gaze_is_deterministic() {
        let spec = spec_with(GazeProfile::Attentive, 5);
        let scene = gen_scene(&spec).unwrap();
        let a = gen_gaze(&spec, &scene);
        let b = gen_gaze(&spec, &scene);
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }
}
