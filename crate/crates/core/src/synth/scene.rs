//! Scene generation: ego path through the T-junction, object motion,
//! detections with misses, noise and clutter, and the analysis zone.

use super::{
    stream, GroundTruth, LapSpec, ObjectSpec, ScenarioSpec, StreamPurpose, SynthError, TJunction,
    TrueObject,
};
use crate::attention::{gate, CaseAnnotation, GatingConfig, Zone};
use crate::geometry::{ego_to_world, EgoPoint, EgoTrajectory, Pose2D};
use crate::tracker::{Detection, ObjectClass};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

#[derive(Debug, Clone)]
pub struct Scene {
    pub ego: EgoTrajectory,
    pub detections: Vec<Detection>,
    pub zone: Zone,
    pub annotations: Vec<CaseAnnotation>,
    pub truth: GroundTruth,
    /// Per-lap object rosters, lap-relative (used by the gaze generator).
    pub(crate) rosters: Vec<Vec<ObjectSpec>>,
}

/// Ego pose at lap-relative time `t` along the T-junction path.
pub(crate) fn ego_pose_at(j: &TJunction, t: f64) -> Pose2D {
    let s = (j.speed * t).clamp(0.0, j.path_length());
    let arc = std::f64::consts::FRAC_PI_2 * j.turn_radius;
    let r = j.turn_radius;
    if s <= j.approach_len {
        let x = -r - j.approach_len + s;
        Pose2D { x, y: 0.0, heading: crate::geometry::Angle::wrap_unchecked(0.0) }
    } else if s <= j.approach_len + arc {
        let phi = (s - j.approach_len) / r;
        Pose2D {
            x: -r + r * phi.sin(),
            y: r - r * phi.cos(),
            heading: crate::geometry::Angle::wrap_unchecked(phi.to_degrees()),
        }
    } else {
        let d = s - j.approach_len - arc;
        Pose2D { x: 0.0, y: r + d, heading: crate::geometry::Angle::wrap_unchecked(90.0) }
    }
}

/// Default analysis zone covering the junction and the first stretch of
/// the exit street.
pub(crate) fn default_zone(j: &TJunction) -> Zone {
    let r = j.turn_radius;
    Zone {
        name: "t-junction".into(),
        polygon_xy: vec![
            [-r - 8.0, -6.0],
            [6.0, -6.0],
            [6.0, r + 20.0],
            [-r - 8.0, r + 20.0],
        ],
    }
}

/// Default mixed roster: parked and oncoming vehicles plus pedestrians,
/// placed so that while gated their bearings stay well off the forward
/// axis (a driver staring straight ahead observes none of them).
fn default_roster(rng: &mut ChaCha8Rng) -> Vec<ObjectSpec> {
    let mut j = |lo: f64, hi: f64| rng.gen_range(lo..hi);
    vec![
        // Parked vehicles on the far side of the exit street.
        ObjectSpec {
            class: ObjectClass::Vehicle,
            spawn: 0.0,
            start: [4.2 + j(-0.3, 0.3), 22.0 + j(-1.0, 1.0)],
            vel: [0.0, 0.0],
        },
        ObjectSpec {
            class: ObjectClass::Vehicle,
            spawn: 0.0,
            start: [4.2 + j(-0.3, 0.3), 28.0 + j(-1.0, 1.0)],
            vel: [0.0, 0.0],
        },
        // Staggered oncoming (southbound) vehicles met on the exit street.
        ObjectSpec {
            class: ObjectClass::Vehicle,
            spawn: 0.0,
            start: [-4.0 + j(-0.2, 0.2), 48.0 + j(-2.0, 2.0)],
            vel: [0.0, -3.0 + j(-0.2, 0.2)],
        },
        ObjectSpec {
            class: ObjectClass::Vehicle,
            spawn: 0.0,
            start: [-4.0 + j(-0.2, 0.2), 60.0 + j(-2.0, 2.0)],
            vel: [0.0, -3.0 + j(-0.2, 0.2)],
        },
        // Pedestrian on the corner sidewalk, walking west.
        ObjectSpec {
            class: ObjectClass::Pedestrian,
            spawn: 0.0,
            start: [7.0 + j(-0.5, 0.5), 4.5 + j(-0.3, 0.3)],
            vel: [-1.0 + j(-0.1, 0.1), 0.0],
        },
        // Pedestrian on the left sidewalk of the exit street, southbound.
        ObjectSpec {
            class: ObjectClass::Pedestrian,
            spawn: 0.0,
            start: [-4.2 + j(-0.3, 0.3), 20.0 + j(-1.0, 1.0)],
            vel: [0.0, -0.8 + j(-0.1, 0.1)],
        },
    ]
}

pub(crate) fn object_position(o: &ObjectSpec, lap_t: f64) -> Option<(f64, f64)> {
    if lap_t < o.spawn {
        return None;
    }
    let dt = lap_t - o.spawn;
    Some((o.start[0] + o.vel[0] * dt, o.start[1] + o.vel[1] * dt))
}

fn sample_poisson(rng: &mut ChaCha8Rng, lambda: f64) -> usize {
    if lambda <= 0.0 {
        return 0;
    }
    let l = (-lambda).exp();
    let mut k = 0usize;
    let mut p = 1.0;
    loop {
        p *= rng.gen::<f64>();
        if p <= l {
            return k;
        }
        k += 1;
    }
}

/// Uniform clutter position over the gating region, in the ego frame.
fn clutter_point(rng: &mut ChaCha8Rng, gating: &GatingConfig) -> EgoPoint {
    loop {
        let p = EgoPoint {
            x_fwd: rng.gen_range(0.0..gating.range_fwd) + f64::EPSILON,
            y_lat: rng.gen_range(-gating.range_lat..gating.range_lat),
        };
        if gate(p, gating) {
            return p;
        }
    }
}

pub(crate) fn lap_start(spec: &ScenarioSpec, lap_index: usize) -> f64 {
    lap_index as f64 * (spec.junction.lap_duration() + spec.lap_gap_s)
}

fn lap_roster(spec: &ScenarioSpec, lap: &LapSpec) -> Vec<ObjectSpec> {
    match &lap.roster {
        Some(r) => r.clone(),
        None => {
            let mut rng = stream(spec.seed, lap.scene_seed, StreamPurpose::Roster);
            default_roster(&mut rng)
        }
    }
}

/// Generates the ego trajectory, true object paths and the detection log.
pub fn gen_scene(spec: &ScenarioSpec) -> Result<Scene, SynthError> {
    spec.validate()?;
    let j = &spec.junction;
    let lap_duration = j.lap_duration();
    let gating = GatingConfig::default();
    let noise = Normal::new(0.0, spec.sensor.meas_noise.max(f64::EPSILON))
        .map_err(|e| SynthError::SpecError(e.to_string()))?;

    let mut ego_samples: Vec<(f64, Pose2D)> = Vec::new();
    let mut detections: Vec<Detection> = Vec::new();
    let mut truth = GroundTruth::default();
    let mut rosters = Vec::new();
    let mut annotations = Vec::new();
    let mut object_id = 0usize;

    for (lap_index, lap) in spec.laps.iter().enumerate() {
        let t0 = lap_start(spec, lap_index);
        truth.lap_windows.push((t0, t0 + lap_duration));
        annotations.push(CaseAnnotation {
            case_id: format!("case-{:02}", lap_index + 1),
            driver_id: lap.driver_id.clone(),
            lap: lap.lap_number,
        });

        // Ego poses.
        let ego_steps = (lap_duration * spec.ego_rate_hz).floor() as usize;
        for k in 0..=ego_steps {
            let lt = k as f64 / spec.ego_rate_hz;
            ego_samples.push((t0 + lt, ego_pose_at(j, lt)));
        }

        let roster = lap_roster(spec, lap);
        let mut drop_rng = stream(spec.seed, lap.scene_seed, StreamPurpose::DetectionDrop);
        let mut noise_rng = stream(spec.seed, lap.scene_seed, StreamPurpose::DetectionNoise);
        let mut clutter_rng = stream(spec.seed, lap.scene_seed, StreamPurpose::Clutter);
        let mut conf_rng = stream(spec.seed, lap.scene_seed, StreamPurpose::Confidence);

        let mut lap_objects: Vec<TrueObject> = roster
            .iter()
            .map(|o| {
                let obj = TrueObject {
                    id: object_id,
                    lap_index,
                    class: o.class,
                    spawn_t: t0 + o.spawn,
                    states: Vec::new(),
                    n_detections: 0,
                };
                object_id += 1;
                obj
            })
            .collect();

        let sensor_steps = (lap_duration * spec.sensor.rate_hz).floor() as usize;
        for k in 0..=sensor_steps {
            let lt = k as f64 / spec.sensor.rate_hz;
            let t = t0 + lt;
            for (o, tracked) in roster.iter().zip(lap_objects.iter_mut()) {
                let Some((x, y)) = object_position(o, lt) else { continue };
                tracked.states.push((t, x, y));
                if drop_rng.gen::<f64>() < spec.sensor.p_detect {
                    tracked.n_detections += 1;
                    detections.push(Detection {
                        t,
                        class: o.class,
                        x: x + noise.sample(&mut noise_rng),
                        y: y + noise.sample(&mut noise_rng),
                        confidence: conf_rng.gen_range(0.55..0.95),
                    });
                }
            }
            // Clutter, uniform over the gating region around the ego.
            let n_clutter = sample_poisson(&mut clutter_rng, spec.sensor.clutter_rate);
            let pose = ego_pose_at(j, lt);
            for _ in 0..n_clutter {
                let p = clutter_point(&mut clutter_rng, &gating);
                let (x, y) = ego_to_world(&pose, p);
                truth.n_clutter += 1;
                detections.push(Detection {
                    t,
                    class: if clutter_rng.gen::<f64>() < 0.65 {
                        ObjectClass::Vehicle
                    } else {
                        ObjectClass::Pedestrian
                    },
                    x,
                    y,
                    confidence: conf_rng.gen_range(0.3..0.8),
                });
            }
        }
        truth.objects.extend(lap_objects);
        rosters.push(roster);
    }

    truth.n_detections_total = detections.len();
    let ego = EgoTrajectory::new(ego_samples)
        .map_err(|e| SynthError::SpecError(format!("degenerate ego path: {e}")))?;
    Ok(Scene {
        ego,
        detections,
        zone: default_zone(j),
        annotations,
        truth,
        rosters,
    })
}
