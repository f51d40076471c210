//! JSON-lines and CSV writers for workspace samples and trajectories.

use std::io::Write;

use loopkin_core::apps::{TrajectoryPoint, WorkspaceSample};
use loopkin_core::mrdf::Robot;
use loopkin_core::Transform;
use serde_json::json;

use crate::wire::pose_value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

const POSE_COLUMNS: [&str; 7] = ["tx", "ty", "tz", "qw", "qx", "qy", "qz"];

fn pose_fields(t: Option<&Transform>) -> Vec<String> {
    match t {
        Some(t) => {
            let q = t.quaternion();
            t.translation.iter().chain(q.iter()).map(|v| v.to_string()).collect()
        }
        None => vec![String::new(); 7],
    }
}

fn csv_error(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}

pub fn write_workspace(robot: &Robot, samples: &[WorkspaceSample], format: Format, out: impl Write) -> std::io::Result<()> {
    match format {
        Format::Jsonl => {
            let mut out = out;
            for s in samples {
                let rec = json!({"lengths": s.lengths, "pose": s.pose.as_ref().map(pose_value)});
                writeln!(out, "{rec}")?;
            }
            out.flush()
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let header: Vec<String> =
                robot.actuators.iter().map(|a| a.name.clone()).chain(POSE_COLUMNS.iter().map(|c| c.to_string())).collect();
            w.write_record(&header).map_err(csv_error)?;
            for s in samples {
                let row: Vec<String> =
                    s.lengths.iter().map(|v| v.to_string()).chain(pose_fields(s.pose.as_ref())).collect();
                w.write_record(&row).map_err(csv_error)?;
            }
            w.flush()
        }
    }
}

pub fn write_trajectory(robot: &Robot, points: &[TrajectoryPoint], format: Format, out: impl Write) -> std::io::Result<()> {
    match format {
        Format::Jsonl => {
            let mut out = out;
            for p in points {
                let rec = json!({
                    "t": p.t,
                    "target": pose_value(&p.target),
                    "lengths": p.lengths,
                    "pose": pose_value(&p.pose),
                    "psi": p.psi,
                    "converged": p.converged,
                    "iterations": p.iterations,
                });
                writeln!(out, "{rec}")?;
            }
            out.flush()
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let mut header = vec!["t".to_string()];
            header.extend(POSE_COLUMNS.iter().map(|c| format!("target_{c}")));
            header.extend(robot.actuators.iter().map(|a| a.name.clone()));
            header.extend(POSE_COLUMNS.iter().map(|c| c.to_string()));
            header.extend(["psi", "converged", "iterations"].map(String::from));
            w.write_record(&header).map_err(csv_error)?;
            for p in points {
                let mut row = vec![p.t.to_string()];
                row.extend(pose_fields(Some(&p.target)));
                row.extend(p.lengths.iter().map(|v| v.to_string()));
                row.extend(pose_fields(Some(&p.pose)));
                row.extend([p.psi.to_string(), p.converged.to_string(), p.iterations.to_string()]);
                w.write_record(&row).map_err(csv_error)?;
            }
            w.flush()
        }
    }
}
