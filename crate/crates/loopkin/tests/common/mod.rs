#![allow(dead_code)]

use loopkin::models::lookup;
use loopkin::stats::random_lengths;
use loopkin_core::fk::{forward_kinematics, Configuration, FkOptions};
use loopkin_core::mrdf::{compile, Robot};
use loopkin_core::{Topology, Transform};
use rand::Rng;

pub struct Loaded {
    pub robot: Robot,
    pub topo: Topology,
    pub ee: usize,
    pub rest: Configuration,
}

pub fn load(name: &str) -> Loaded {
    let model = lookup(name).unwrap_or_else(|e| panic!("{name}: {e}"));
    let robot = compile(&model.description).unwrap_or_else(|e| panic!("{name}: {e}"));
    let topo = Topology::build(&robot).unwrap_or_else(|e| panic!("{name}: {e}"));
    let ee = robot.link_id(&model.end_effector).unwrap();
    let rest = Configuration::rest(&robot);
    Loaded { robot, topo, ee, rest }
}

impl Loaded {
    pub fn fk(&self, lengths: &[f64]) -> Result<Configuration, loopkin_core::FkError> {
        let mut cfg = self.rest.clone();
        forward_kinematics(&self.robot, &self.topo, lengths, &mut cfg, &FkOptions::default())?;
        Ok(cfg)
    }

    /// Random in-bounds lengths and the end-effector pose FK reaches there.
    pub fn reachable_target(&self, rng: &mut impl Rng) -> (Vec<f64>, Transform) {
        let lengths = random_lengths(&self.robot, rng);
        let cfg = self.fk(&lengths).expect("generator lengths must be solvable");
        (lengths, cfg.world[self.ee])
    }

    pub fn joint(&self, parent: &str, child: &str) -> usize {
        let (p, c) = (self.robot.link_id(parent).unwrap(), self.robot.link_id(child).unwrap());
        self.robot.joint_between(p, c).unwrap()
    }
}
