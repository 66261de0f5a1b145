//! Synthetic scenario generation with ground truth.
//!
//! Fabricates everything the pipeline ingests — ego trajectory through a
//! T-junction, object paths, centroid detections with noise/misses/clutter,
//! a gaze trace driving rendered facial landmarks — plus the ground truth
//! needed to verify every stage independently. Fixed seed → byte-identical
//! output; random streams are split by purpose so toggling one noise
//! source does not shift the others.

mod cohort;
mod gaze;
mod landmarks;
mod scene;
mod write;

pub use cohort::{gen_metric_cohort, CohortCase, CohortSpec};
pub use gaze::gen_gaze;
pub use landmarks::{project_template, render_frame, render_landmarks};
pub use scene::{gen_scene, Scene};
pub use write::write_scenario_dir;

use crate::attention::GazeRegion;
use crate::headpose::CameraIntrinsics;
use crate::tracker::ObjectClass;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid scenario spec: {0}")]
    SpecError(String),
}

/// Random-stream purposes. Each (lap, purpose) pair gets an independent
/// ChaCha stream, so e.g. disabling clutter never shifts detection noise.
#[derive(Debug, Clone, Copy)]
pub(crate) enum StreamPurpose {
    Roster = 1,
    DetectionDrop = 2,
    DetectionNoise = 3,
    Clutter = 4,
    Confidence = 5,
    Gaze = 6,
    LandmarkNoise = 7,
    Outliers = 8,
}

pub(crate) fn stream(scenario_seed: u64, lap_key: u64, purpose: StreamPurpose) -> ChaCha8Rng {
    let mixed = scenario_seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(lap_key.rotate_left(17));
    let mut rng = ChaCha8Rng::seed_from_u64(mixed);
    rng.set_stream(purpose as u64);
    rng
}

/// T-junction layout: drive east along the approach leg, quarter-turn
/// left, exit north along the cross street. The junction center is the
/// world origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TJunction {
    pub approach_len: f64,
    pub exit_len: f64,
    pub turn_radius: f64,
    /// Ego speed, m/s.
    pub speed: f64,
}

impl Default for TJunction {
    fn default() -> Self {
        Self { approach_len: 40.0, exit_len: 40.0, turn_radius: 6.0, speed: 5.0 }
    }
}

impl TJunction {
    pub fn path_length(&self) -> f64 {
        self.approach_len + std::f64::consts::FRAC_PI_2 * self.turn_radius + self.exit_len
    }

    pub fn lap_duration(&self) -> f64 {
        self.path_length() / self.speed
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorSpec {
    pub rate_hz: f64,
    pub p_detect: f64,
    /// Expected clutter detections per scan, uniform over the gating region.
    pub clutter_rate: f64,
    /// Detection noise standard deviation, m.
    pub meas_noise: f64,
}

impl Default for SensorSpec {
    fn default() -> Self {
        Self { rate_hz: 10.0, p_detect: 0.95, clutter_rate: 0.5, meas_noise: 0.2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraSpec {
    pub intrinsics: CameraIntrinsics,
    /// Camera yaw reading for a straight-ahead driver, degrees.
    pub mount_offset_deg: f64,
    /// ±1: whether head turns appear mirrored.
    pub mount_sign: f64,
    pub landmark_noise_px: f64,
    /// Fraction of frames replaced by gross corruptions.
    pub outlier_rate: f64,
    pub rate_hz: f64,
    /// Head distance from the camera, meters.
    pub head_depth_m: f64,
    /// Constant head pitch, degrees (drivers look slightly down the road).
    pub head_pitch_deg: f64,
}

impl Default for CameraSpec {
    fn default() -> Self {
        // A 4K narrow-FOV interior camera at ~arm's length. Planar pose
        // from four coplanar landmarks is ill-conditioned near the
        // fronto-parallel pose, so per-degree yaw accuracy needs this
        // much angular resolution on the face.
        Self {
            intrinsics: CameraIntrinsics {
                fx: 4300.0,
                fy: 4300.0,
                cx: 2048.0,
                cy: 1536.0,
                k1: -0.05,
                k2: 0.0,
                p1: 0.0,
                p2: 0.0,
            },
            mount_offset_deg: -12.0,
            mount_sign: 1.0,
            landmark_noise_px: 0.0,
            outlier_rate: 0.0,
            rate_hz: 10.0,
            head_depth_m: 0.42,
            head_pitch_deg: -8.0,
        }
    }
}

/// One scripted glance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Glance {
    pub start: GlanceStart,
    pub target: GlanceTarget,
    pub dwell_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GlanceStart {
    /// Lap-relative seconds.
    At(f64),
    /// Delay after a roster object spawns (e.g. a glance landing 1.67 s
    /// after a pedestrian appears).
    AfterObjectSpawn { object: usize, delay_s: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GlanceTarget {
    /// Fixed vehicle-frame bearing, degrees.
    Bearing(f64),
    /// Follow a roster object's live bearing.
    Object(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GazeProfile {
    /// Visits every gated object's bearing for at least 0.4 s.
    Attentive,
    /// Stares ahead: yaw ~ N(0°, 3°), ignoring objects.
    Inattentive,
    /// Explicit glance list; the script is the truth.
    Scripted(Vec<Glance>),
}

/// One object's true motion: constant velocity from a spawn point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub class: ObjectClass,
    /// Lap-relative spawn time, seconds.
    pub spawn: f64,
    pub start: [f64; 2],
    pub vel: [f64; 2],
}

/// One traversal of the junction by one driver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LapSpec {
    /// Seed for everything scene-related in this lap. Two laps with the
    /// same scene seed have identical objects, detections and clutter, so
    /// paired cohorts can differ in gaze alone.
    pub scene_seed: u64,
    pub gaze: GazeProfile,
    pub driver_id: String,
    pub lap_number: u32,
    /// Explicit roster; `None` generates the default jittered T-junction
    /// population (4 vehicles, 2 pedestrians).
    pub roster: Option<Vec<ObjectSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub seed: u64,
    pub junction: TJunction,
    pub laps: Vec<LapSpec>,
    pub sensor: SensorSpec,
    pub camera: CameraSpec,
    /// Ego pose log rate, Hz.
    pub ego_rate_hz: f64,
    /// Idle time between laps, seconds (no samples are emitted in it).
    pub lap_gap_s: f64,
}

impl ScenarioSpec {
    /// A ready-to-run scenario: every lap uses a distinct scene seed
    /// derived from `seed`.
    pub fn with_profiles(seed: u64, profiles: &[(String, u32, GazeProfile)]) -> Self {
        let laps = profiles
            .iter()
            .enumerate()
            .map(|(i, (driver, lap_number, gaze))| LapSpec {
                scene_seed: seed.wrapping_add(1000 + i as u64),
                gaze: gaze.clone(),
                driver_id: driver.clone(),
                lap_number: *lap_number,
                roster: None,
            })
            .collect();
        Self {
            seed,
            junction: TJunction::default(),
            laps,
            sensor: SensorSpec::default(),
            camera: CameraSpec::default(),
            ego_rate_hz: 100.0,
            lap_gap_s: 3.0,
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if self.laps.is_empty() {
            return Err(SynthError::SpecError("no laps".into()));
        }
        for (rate, name) in [
            (self.sensor.rate_hz, "sensor rate"),
            (self.camera.rate_hz, "camera rate"),
            (self.ego_rate_hz, "ego rate"),
        ] {
            if !(rate > 0.0) {
                return Err(SynthError::SpecError(format!("{name} must be positive")));
            }
        }
        if !(self.junction.speed > 0.0
            && self.junction.turn_radius > 0.0
            && self.junction.approach_len > 0.0
            && self.junction.exit_len > 0.0)
        {
            return Err(SynthError::SpecError("junction geometry must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.sensor.p_detect) {
            return Err(SynthError::SpecError("p_detect must lie in [0, 1]".into()));
        }
        self.camera
            .intrinsics
            .validate()
            .map_err(|e| SynthError::SpecError(e.to_string()))?;
        Ok(())
    }
}

/// Per-object truth for one lap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrueObject {
    pub id: usize,
    pub lap_index: usize,
    pub class: ObjectClass,
    /// Absolute spawn time.
    pub spawn_t: f64,
    /// Positions at sensor ticks while alive.
    pub states: Vec<(f64, f64, f64)>,
    /// Non-clutter detections attributed to this object.
    pub n_detections: usize,
}

/// What the generator itself says the driver observed, per object.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservedTruth {
    pub object_id: usize,
    pub lap_index: usize,
    /// Whether the object was ever inside the gate during its lap.
    pub gated: bool,
    pub region: Option<GazeRegion>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct GroundTruth {
    pub objects: Vec<TrueObject>,
    pub n_clutter: usize,
    pub n_detections_total: usize,
    /// True vehicle-frame yaw at camera ticks.
    pub true_yaw: Vec<(f64, f64)>,
    pub observed: Vec<ObservedTruth>,
    /// Absolute [start, end] of each lap.
    pub lap_windows: Vec<(f64, f64)>,
}

/// A fully generated scenario: logs plus ground truth.
#[derive(Debug, Clone)]
pub struct GeneratedScenario {
    pub ego: crate::geometry::EgoTrajectory,
    pub detections: Vec<crate::tracker::Detection>,
    pub landmarks: Vec<crate::headpose::LandmarkFrame>,
    pub zone: crate::attention::Zone,
    pub annotations: Vec<crate::attention::CaseAnnotation>,
    pub truth: GroundTruth,
    pub spec: ScenarioSpec,
}

/// End-to-end generation: scene, gaze, landmarks.
pub fn generate(spec: &ScenarioSpec) -> Result<GeneratedScenario, SynthError> {
    spec.validate()?;
    let scene = gen_scene(spec)?;
    let (yaw_truth, observed) = gen_gaze(spec, &scene);
    let landmarks = render_landmarks(spec, &yaw_truth);

    let mut truth = scene.truth;
    truth.true_yaw = yaw_truth;
    truth.observed = observed;

    Ok(GeneratedScenario {
        ego: scene.ego,
        detections: scene.detections,
        landmarks,
        zone: scene.zone,
        annotations: scene.annotations,
        truth,
        spec: spec.clone(),
    })
}
