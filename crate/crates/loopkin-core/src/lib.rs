//! Kinematics core for closed-chain robots driven by linear actuators.
//!
//! The crate is `no_std` and only needs an allocator. It covers the full
//! pipeline: rigid-body geometry, the compiled robot model, four-bar
//! contraction and per-actuator path extraction, the sequential forward
//! solver, coordinate-descent inverse kinematics and the two sampling
//! applications built on top of them.
#![no_std]
// `!(a < b)` is used on purpose so NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod apps;
pub mod fk;
pub mod geometry;
pub mod ik;
mod math;
pub mod mrdf;
pub mod topology;

pub use fk::{Configuration, FkError, FkOptions};
pub use geometry::{JointType, Transform, Vec3};
pub use ik::{IkOptions, IkProblem, IkResult, Solver1d};
pub use mrdf::{CompileError, DescriptionError, Robot, RobotDescription};
pub use topology::{ItepKind, Topology, TopologyError};
