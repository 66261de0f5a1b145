//! Planar geometry shared by the whole pipeline: wrapped angles, ego poses,
//! trajectory interpolation and world↔ego frame transforms.
//!
//! Conventions (used consistently everywhere downstream):
//! - angles are degrees in the half-open interval (−180, +180];
//! - headings/bearings are counterclockwise-positive, 0° = vehicle forward;
//! - ego frame: `x_fwd` ahead of the vehicle, `y_lat` to its left;
//! - the world frame is planar metric (UTM-style), x east, y north.

mod io;

pub use io::{read_trajectory_csv, write_trajectory_csv};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("non-finite input: {0}")]
    InvalidInput(&'static str),
    #[error("timestamp {t} outside trajectory range [{first}, {last}]")]
    OutOfRange { t: f64, first: f64, last: f64 },
    #[error("bearing undefined at the ego origin")]
    DegenerateBearing,
    #[error("trajectory needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("trajectory timestamps not strictly increasing at index {0}")]
    NonMonotonicTimestamps(usize),
}

/// An angle in degrees, wrapped to (−180, +180].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    /// Wraps a finite value in degrees into (−180, +180].
    pub fn wrap(deg: f64) -> Result<Self, GeometryError> {
        if !deg.is_finite() {
            return Err(GeometryError::InvalidInput("angle"));
        }
        Ok(Self::wrap_unchecked(deg))
    }

    /// Wrap without the finiteness check, for values already known finite.
    pub(crate) fn wrap_unchecked(deg: f64) -> Self {
        let mut r = deg.rem_euclid(360.0);
        if r > 180.0 {
            r -= 360.0;
        }
        // rem_euclid can produce 360.0 when deg is a tiny negative number.
        if r == 360.0 || r == 0.0 {
            r = 0.0;
        }
        Angle(r)
    }

    pub fn degrees(self) -> f64 {
        self.0
    }

    pub fn radians(self) -> f64 {
        self.0.to_radians()
    }

    pub fn from_radians(rad: f64) -> Result<Self, GeometryError> {
        Self::wrap(rad.to_degrees())
    }

    /// Signed shortest rotation, in degrees, taking `self` onto `other`.
    pub fn shortest_arc_to(self, other: Angle) -> f64 {
        Angle::wrap_unchecked(other.0 - self.0).0
    }

    /// Absolute angular separation in degrees, in [0, 180].
    pub fn abs_diff(self, other: Angle) -> f64 {
        self.shortest_arc_to(other).abs()
    }

    /// Adds raw degrees and re-wraps.
    pub fn add_degrees(self, deg: f64) -> Angle {
        Angle::wrap_unchecked(self.0 + deg)
    }

    /// Interpolates from `self` towards `other` along the shortest arc.
    /// `frac` = 0 gives `self`, 1 gives `other`.
    pub fn lerp(self, other: Angle, frac: f64) -> Angle {
        self.add_degrees(self.shortest_arc_to(other) * frac)
    }
}

/// Wraps raw degrees into (−180, +180].
pub fn wrap_angle(deg: f64) -> Result<Angle, GeometryError> {
    Angle::wrap(deg)
}

/// A planar pose in the world frame: position in meters, heading as the
/// vehicle forward direction (counterclockwise-positive from east).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose2D {
    pub x: f64,
    pub y: f64,
    pub heading: Angle,
}

impl Pose2D {
    pub fn new(x: f64, y: f64, heading_deg: f64) -> Result<Self, GeometryError> {
        if !x.is_finite() || !y.is_finite() {
            return Err(GeometryError::InvalidInput("pose position"));
        }
        Ok(Self {
            x,
            y,
            heading: Angle::wrap(heading_deg)?,
        })
    }
}

/// A point in the ego (vehicle-local) frame: `x_fwd` meters ahead,
/// `y_lat` meters to the left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EgoPoint {
    pub x_fwd: f64,
    pub y_lat: f64,
}

impl EgoPoint {
    pub fn new(x_fwd: f64, y_lat: f64) -> Result<Self, GeometryError> {
        if !x_fwd.is_finite() || !y_lat.is_finite() {
            return Err(GeometryError::InvalidInput("ego point"));
        }
        Ok(Self { x_fwd, y_lat })
    }

    pub fn range(self) -> f64 {
        self.x_fwd.hypot(self.y_lat)
    }
}

/// Time-ordered ego poses. Timestamps are strictly increasing and there are
/// at least two samples, so interpolation is always well defined inside the
/// covered interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgoTrajectory {
    samples: Vec<(f64, Pose2D)>,
}

impl EgoTrajectory {
    pub fn new(samples: Vec<(f64, Pose2D)>) -> Result<Self, GeometryError> {
        if samples.len() < 2 {
            return Err(GeometryError::TooFewSamples(samples.len()));
        }
        for (i, win) in samples.windows(2).enumerate() {
            if !(win[1].0 > win[0].0) {
                return Err(GeometryError::NonMonotonicTimestamps(i + 1));
            }
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[(f64, Pose2D)] {
        &self.samples
    }

    pub fn first_t(&self) -> f64 {
        self.samples[0].0
    }

    pub fn last_t(&self) -> f64 {
        self.samples[self.samples.len() - 1].0
    }

    pub fn covers(&self, t: f64) -> bool {
        t >= self.first_t() && t <= self.last_t()
    }
}

/// Interpolates the ego pose at time `t`. Position is linear, heading
/// follows the shortest angular arc between the bracketing samples.
pub fn interpolate_pose(traj: &EgoTrajectory, t: f64) -> Result<Pose2D, GeometryError> {
    let samples = traj.samples();
    if !t.is_finite() {
        return Err(GeometryError::InvalidInput("timestamp"));
    }
    if !traj.covers(t) {
        return Err(GeometryError::OutOfRange {
            t,
            first: traj.first_t(),
            last: traj.last_t(),
        });
    }
    // First sample with timestamp >= t.
    let hi = samples.partition_point(|s| s.0 < t);
    if hi == 0 {
        return Ok(samples[0].1);
    }
    let (t1, p1) = samples[hi];
    if t1 == t {
        return Ok(p1);
    }
    let (t0, p0) = samples[hi - 1];
    let frac = (t - t0) / (t1 - t0);
    Ok(Pose2D {
        x: p0.x + (p1.x - p0.x) * frac,
        y: p0.y + (p1.y - p0.y) * frac,
        heading: p0.heading.lerp(p1.heading, frac),
    })
}

/// Rigid transform of a world point into the ego frame of `pose`:
/// translate by −position, rotate by −heading.
pub fn world_to_ego(pose: &Pose2D, world_point: (f64, f64)) -> Result<EgoPoint, GeometryError> {
    let (wx, wy) = world_point;
    if !wx.is_finite() || !wy.is_finite() {
        return Err(GeometryError::InvalidInput("world point"));
    }
    let dx = wx - pose.x;
    let dy = wy - pose.y;
    let (sin_h, cos_h) = pose.heading.radians().sin_cos();
    Ok(EgoPoint {
        x_fwd: cos_h * dx + sin_h * dy,
        y_lat: -sin_h * dx + cos_h * dy,
    })
}

/// Inverse of [`world_to_ego`].
pub fn ego_to_world(pose: &Pose2D, p: EgoPoint) -> (f64, f64) {
    let (sin_h, cos_h) = pose.heading.radians().sin_cos();
    (
        pose.x + cos_h * p.x_fwd - sin_h * p.y_lat,
        pose.y + sin_h * p.x_fwd + cos_h * p.y_lat,
    )
}

/// Bearing of an ego-frame point: 0° straight ahead, positive to the left.
pub fn bearing(p: EgoPoint) -> Result<Angle, GeometryError> {
    if p.x_fwd == 0.0 && p.y_lat == 0.0 {
        return Err(GeometryError::DegenerateBearing);
    }
    Ok(Angle::wrap_unchecked(p.y_lat.atan2(p.x_fwd).to_degrees()))
}
