//! Workspace sampling (FK over a length grid) and trajectory generation
//! (sequential IK along an interpolated path).

use alloc::vec::Vec;

use crate::fk::{forward_kinematics, Configuration, FkOptions};
use crate::geometry::{slerp_quaternion, Transform, Vec3};
use crate::ik::{relevant_actuators, solve_ik, IkOptions, IkProblem};
use crate::mrdf::Robot;
use crate::topology::Topology;

pub const DEFAULT_GRID_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AppError {
    #[error("grid of {size} points exceeds the cap of {cap}")]
    GridTooLarge { size: u128, cap: usize },
    #[error("expected {expected} sample counts (one per relevant actuator group), got {got}")]
    SampleCount { expected: usize, got: usize },
    #[error("every sample count must be at least 2")]
    TooFewSamples,
    #[error("a trajectory needs at least 2 via points and at least as many samples")]
    TooFewVia,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkspaceSpec {
    pub end_effector: usize,
    /// Samples per relevant actuator group, ascending actuator ID.
    pub counts: Vec<usize>,
    pub cap: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkspaceSample {
    pub lengths: Vec<f64>,
    /// `None` where FK failed at this grid point.
    pub pose: Option<Transform>,
}

/// Evaluates FK on the Cartesian grid of relevant actuator lengths, row-major
/// with the highest actuator ID varying fastest. Other actuators stay at
/// their current lengths; each point starts from `config`, which is not
/// modified.
pub fn sample_workspace(
    robot: &Robot,
    topo: &Topology,
    config: &Configuration,
    spec: &WorkspaceSpec,
) -> Result<Vec<WorkspaceSample>, AppError> {
    let axes: Vec<usize> = relevant_actuators(robot, topo, spec.end_effector)
        .iter()
        .enumerate()
        .filter_map(|(i, &r)| r.then_some(i))
        .collect();
    if spec.counts.len() != axes.len() {
        return Err(AppError::SampleCount { expected: axes.len(), got: spec.counts.len() });
    }
    if spec.counts.iter().any(|&n| n < 2) {
        return Err(AppError::TooFewSamples);
    }
    let size = spec.counts.iter().fold(1u128, |acc, &n| acc.saturating_mul(n as u128));
    if size > spec.cap as u128 {
        return Err(AppError::GridTooLarge { size, cap: spec.cap });
    }
    let opts = FkOptions::default();
    let mut out = Vec::with_capacity(size as usize);
    let mut index = alloc::vec![0usize; axes.len()];
    for _ in 0..size {
        let mut lengths = config.lengths.clone();
        for (k, &i) in axes.iter().enumerate() {
            let (lo, hi) = robot.actuators[i].bounds;
            let x = (lo + (hi - lo) * index[k] as f64 / (spec.counts[k] - 1) as f64).min(hi);
            for &p in robot.peers(i) {
                lengths[p] = x;
            }
        }
        let mut scratch = config.clone();
        let pose = forward_kinematics(robot, topo, &lengths, &mut scratch, &opts)
            .ok()
            .map(|_| scratch.world[spec.end_effector]);
        out.push(WorkspaceSample { lengths, pose });
        for k in (0..axes.len()).rev() {
            index[k] += 1;
            if index[k] < spec.counts[k] {
                break;
            }
            index[k] = 0;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    #[default]
    Linear,
    CatmullRom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySpec {
    pub end_effector: usize,
    pub via: Vec<Transform>,
    pub samples: usize,
    pub interpolation: Interpolation,
    pub ik: IkOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub target: Transform,
    pub lengths: Vec<f64>,
    pub pose: Transform,
    pub psi: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn lerp(a: Vec3, b: Vec3, s: f64) -> Vec3 {
    [a[0] + (b[0] - a[0]) * s, a[1] + (b[1] - a[1]) * s, a[2] + (b[2] - a[2]) * s]
}

fn catmull_rom(p0: Vec3, p1: Vec3, p2: Vec3, p3: Vec3, s: f64) -> Vec3 {
    let (s2, s3) = (s * s, s * s * s);
    core::array::from_fn(|k| {
        0.5 * (2.0 * p1[k]
            + (p2[k] - p0[k]) * s
            + (2.0 * p0[k] - 5.0 * p1[k] + 4.0 * p2[k] - p3[k]) * s2
            + (3.0 * p1[k] - p0[k] - 3.0 * p2[k] + p3[k]) * s3)
    })
}

/// Curve point at `t ∈ [0, 1]`: uniform in segments, slerp on rotation.
pub fn interpolate(via: &[Transform], kind: Interpolation, t: f64) -> Transform {
    let m = via.len() - 1;
    let u = t.clamp(0.0, 1.0) * m as f64;
    let seg = (libm::floor(u) as usize).min(m - 1);
    let s = u - seg as f64;
    let (a, b) = (&via[seg], &via[seg + 1]);
    let translation = match kind {
        Interpolation::Linear => lerp(a.translation, b.translation, s),
        Interpolation::CatmullRom => {
            let p0 = via[seg.saturating_sub(1)].translation;
            let p3 = via[(seg + 2).min(m)].translation;
            catmull_rom(p0, a.translation, b.translation, p3, s)
        }
    };
    let q = slerp_quaternion(a.quaternion(), b.quaternion(), s);
    Transform::from_quaternion(q, translation)
}

/// Solves IK at `samples` uniform parameters along the curve, each warm
/// started from the previous solution.
pub fn generate_trajectory(
    robot: &Robot,
    topo: &Topology,
    config: &Configuration,
    spec: &TrajectorySpec,
) -> Result<Vec<TrajectoryPoint>, AppError> {
    if spec.via.len() < 2 || spec.samples < spec.via.len() || spec.samples < 2 {
        return Err(AppError::TooFewVia);
    }
    let mut current = config.clone();
    let mut out = Vec::with_capacity(spec.samples);
    for k in 0..spec.samples {
        let t = k as f64 / (spec.samples - 1) as f64;
        let target = interpolate(&spec.via, spec.interpolation, t);
        let problem = IkProblem {
            end_effector: spec.end_effector,
            target,
            initial: current.clone(),
            options: spec.ik,
        };
        let r = solve_ik(robot, topo, &problem);
        current = r.configuration;
        out.push(TrajectoryPoint {
            t,
            target,
            lengths: r.lengths,
            pose: current.world[spec.end_effector],
            psi: r.psi,
            converged: r.converged,
            iterations: r.iterations,
        });
    }
    Ok(out)
}
