//! Batch analytics for driver attention.
//!
//! Fuses a driver head-orientation log (facial landmarks from an interior
//! camera) with a vehicle perception log (vehicle/pedestrian centroid
//! detections) to compute per-case observation metrics and classify each
//! case as Regular or Low attention.
//!
//! Pipeline stages, in order:
//!
//! 1. [`headpose`] — landmarks → per-frame head yaw via homography + planar
//!    pose decomposition.
//! 2. [`yawfilter`] — outlier removal, gap fill and smoothing of the yaw
//!    series.
//! 3. [`tracker`] — GM-PHD multi-target tracking of centroid detections.
//! 4. [`attention`] — gating, case segmentation, gaze/bearing intersection,
//!    per-case metrics.
//! 5. [`classify`] — cascaded k-means producing Regular/Low labels.
//!
//! [`geometry`] carries the shared angle/frame machinery, [`synth`]
//! fabricates complete synthetic scenarios with ground truth, and
//! [`pipeline`] orchestrates ingestion through report emission.

pub mod attention;
pub mod classify;
pub mod geometry;
pub mod headpose;
pub mod pipeline;
pub mod synth;
pub mod tracker;
pub mod yawfilter;
