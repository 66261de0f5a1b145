//! Case segmentation: one case per contiguous traversal of an analysis
//! zone, annotated with driver and lap.

use super::AttentionError;
use crate::geometry::EgoTrajectory;
use serde::{Deserialize, Serialize};

/// Minimum traversal duration for a case, seconds.
pub const MIN_CASE_DURATION_S: f64 = 3.0;

/// A named analysis zone: a simple polygon in world meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Zone {
    pub name: String,
    pub polygon_xy: Vec<[f64; 2]>,
}

/// Zone config file: `{"zones":[{"name":..., "polygon_xy": [[x,y],...]}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneSet {
    pub zones: Vec<Zone>,
}

fn segments_intersect(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let cross = |o: [f64; 2], p: [f64; 2], q: [f64; 2]| {
        (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])
    };
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

impl Zone {
    pub fn validate(&self) -> Result<(), AttentionError> {
        let n = self.polygon_xy.len();
        if n < 3 {
            return Err(AttentionError::BadZone(format!(
                "zone '{}' needs at least 3 vertices",
                self.name
            )));
        }
        if self.polygon_xy.iter().flatten().any(|v| !v.is_finite()) {
            return Err(AttentionError::BadZone(format!(
                "zone '{}' has non-finite vertices",
                self.name
            )));
        }
        // Simplicity: no two non-adjacent edges may cross.
        for i in 0..n {
            let (a, b) = (self.polygon_xy[i], self.polygon_xy[(i + 1) % n]);
            for j in i + 1..n {
                if j == i || (j + 1) % n == i || (i + 1) % n == j {
                    continue;
                }
                let (c, d) = (self.polygon_xy[j], self.polygon_xy[(j + 1) % n]);
                if segments_intersect(a, b, c, d) {
                    return Err(AttentionError::BadZone(format!(
                        "zone '{}' is self-intersecting (edges {} and {})",
                        self.name, i, j
                    )));
                }
            }
        }
        Ok(())
    }

    /// Even-odd ray casting.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let poly = &self.polygon_xy;
        let mut inside = false;
        let n = poly.len();
        let mut j = n - 1;
        for i in 0..n {
            let (xi, yi) = (poly[i][0], poly[i][1]);
            let (xj, yj) = (poly[j][0], poly[j][1]);
            if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
                inside = !inside;
            }
            j = i;
        }
        inside
    }
}

/// Driver/lap annotation for one zone traversal, in traversal order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseAnnotation {
    pub case_id: String,
    pub driver_id: String,
    pub lap: u32,
}

/// One traversal of a zone by one driver on one lap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseWindow {
    pub case_id: String,
    pub driver_id: String,
    pub lap: u32,
    pub t0: f64,
    pub t1: f64,
    pub zone: String,
}

/// Splits the drive into cases: one per maximal contiguous interval where
/// the ego position is inside the zone, discarding traversals shorter than
/// [`MIN_CASE_DURATION_S`]. Annotations are matched to traversals in time
/// order; missing ones are synthesized (and reported in the warning list).
pub fn split_cases(
    traj: &EgoTrajectory,
    zone: &Zone,
    annotations: &[CaseAnnotation],
) -> Result<(Vec<CaseWindow>, Vec<String>), AttentionError> {
    zone.validate()?;
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    let mut start: Option<f64> = None;
    let mut last_inside = 0.0;
    for &(t, pose) in traj.samples() {
        if zone.contains(pose.x, pose.y) {
            start.get_or_insert(t);
            last_inside = t;
        } else if let Some(s) = start.take() {
            intervals.push((s, last_inside));
        }
    }
    if let Some(s) = start {
        intervals.push((s, last_inside));
    }
    intervals.retain(|&(a, b)| b - a >= MIN_CASE_DURATION_S);

    let mut warnings = Vec::new();
    if intervals.is_empty() {
        warnings.push(format!("trajectory never traverses zone '{}'", zone.name));
    }
    if !annotations.is_empty() && annotations.len() != intervals.len() {
        warnings.push(format!(
            "zone '{}': {} traversals but {} annotations; extras synthesized or ignored",
            zone.name,
            intervals.len(),
            annotations.len()
        ));
    }
    let cases = intervals
        .iter()
        .enumerate()
        .map(|(i, &(t0, t1))| match annotations.get(i) {
            Some(a) => CaseWindow {
                case_id: a.case_id.clone(),
                driver_id: a.driver_id.clone(),
                lap: a.lap,
                t0,
                t1,
                zone: zone.name.clone(),
            },
            None => CaseWindow {
                case_id: format!("{}-{}", zone.name, i + 1),
                driver_id: "?".to_string(),
                lap: 0,
                t0,
                t1,
                zone: zone.name.clone(),
            },
        })
        .collect();
    Ok((cases, warnings))
}
