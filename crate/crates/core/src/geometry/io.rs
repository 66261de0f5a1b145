//! Ego trajectory CSV: header `t,x,y,heading_deg`, seconds / meters /
//! degrees in (−180, 180].

use super::{EgoTrajectory, GeometryError, Pose2D};
use std::io::{Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrajectoryIoError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("record {0}: {1}")]
    Record(u64, String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(serde::Deserialize, serde::Serialize)]
struct TrajRow {
    t: f64,
    x: f64,
    y: f64,
    heading_deg: f64,
}

pub fn read_trajectory_csv<R: Read>(reader: R) -> Result<EgoTrajectory, TrajectoryIoError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut samples = Vec::new();
    let mut iter = rdr.deserialize();
    loop {
        let line = iter.reader().position().line();
        let row: TrajRow = match iter.next() {
            None => break,
            Some(result) => result?,
        };
        let pose = Pose2D::new(row.x, row.y, row.heading_deg)
            .map_err(|e| TrajectoryIoError::Record(line, e.to_string()))?;
        if !row.t.is_finite() {
            return Err(TrajectoryIoError::Record(line, "non-finite timestamp".into()));
        }
        samples.push((row.t, pose));
    }
    Ok(EgoTrajectory::new(samples)?)
}

pub fn write_trajectory_csv<W: Write>(
    writer: W,
    traj: &EgoTrajectory,
) -> Result<(), TrajectoryIoError> {
    let mut wtr = csv::Writer::from_writer(writer);
    for &(t, pose) in traj.samples() {
        wtr.serialize(TrajRow {
            t,
            x: pose.x,
            y: pose.y,
            heading_deg: pose.heading.degrees(),
        })?;
    }
    wtr.flush()?;
    Ok(())
}
