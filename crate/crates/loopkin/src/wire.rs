//! JSON shapes shared by the CLI and the session service.

use std::collections::BTreeMap;

use loopkin_core::fk::Configuration;
use loopkin_core::mrdf::{redundancy_classes, LinkRole, Robot};
use loopkin_core::{Topology, Transform};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Translation plus unit quaternion `[w, x, y, z]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseJson {
    pub translation: [f64; 3],
    pub quaternion: [f64; 4],
}

impl From<&Transform> for PoseJson {
    fn from(t: &Transform) -> Self {
        Self { translation: t.translation, quaternion: t.quaternion() }
    }
}

impl PoseJson {
    pub fn to_transform(&self) -> Result<Transform, String> {
        let finite = self.translation.iter().chain(&self.quaternion).all(|v| v.is_finite());
        let n2: f64 = self.quaternion.iter().map(|c| c * c).sum();
        if !finite {
            return Err("pose has non-finite components".into());
        }
        if n2 < 1e-24 {
            return Err("pose quaternion has zero norm".into());
        }
        Ok(Transform::from_quaternion(self.quaternion, self.translation))
    }
}

pub fn pose_value(t: &Transform) -> Value {
    serde_json::to_value(PoseJson::from(t)).expect("poses serialize")
}

/// Actuator lengths keyed by name, in ID order.
pub fn lengths_value(robot: &Robot, lengths: &[f64]) -> Value {
    let map: serde_json::Map<String, Value> =
        robot.actuators.iter().zip(lengths).map(|(a, l)| (a.name.clone(), json!(l))).collect();
    Value::Object(map)
}

/// Applies a partial `name → length` map. A value given for one member of
/// a redundancy class is copied to peers that are not given explicitly.
pub fn apply_lengths(robot: &Robot, base: &[f64], partial: &BTreeMap<String, f64>) -> Result<Vec<f64>, String> {
    let mut out = base.to_vec();
    let mut given = vec![false; robot.actuators.len()];
    for (name, &v) in partial {
        let i = robot.actuator_id(name).ok_or_else(|| format!("unknown actuator \"{name}\""))?;
        if !v.is_finite() {
            return Err(format!("actuator {name}: length must be finite"));
        }
        out[i] = v;
        given[i] = true;
    }
    for (name, &v) in partial {
        let i = robot.actuator_id(name).expect("checked above");
        for &p in robot.peers(i) {
            if !given[p] {
                out[p] = v;
            }
        }
    }
    Ok(out)
}

pub fn state_value(robot: &Robot, config: &Configuration, revision: u64) -> Value {
    let links: Vec<Value> = robot
        .links
        .iter()
        .enumerate()
        .map(|(i, l)| json!({"id": i, "name": l.name, "pose": pose_value(&config.world[i])}))
        .collect();
    json!({"revision": revision, "lengths": lengths_value(robot, &config.lengths), "links": links})
}

fn label(i: usize) -> String {
    format!("L{i}")
}

/// Four-bars, contracted graph, redundancy classes and ITEPs.
pub fn topology_value(robot: &Robot, topo: &Topology) -> Value {
    let counts = robot.counts();
    let links: Vec<Value> = robot
        .links
        .iter()
        .enumerate()
        .filter(|(_, l)| l.role == LinkRole::Body)
        .map(|(i, l)| json!({"id": label(i), "name": l.name}))
        .collect();
    let four_bars: Vec<Value> = topo
        .four_bars
        .iter()
        .map(|fb| {
            json!({
                "links": fb.links.iter().map(|&l| label(l)).collect::<Vec<_>>(),
                "input_joint": robot.joints[fb.input()].name,
            })
        })
        .collect();
    let mut edges = Vec::new();
    for (p, row) in topo.contracted.j.iter().enumerate() {
        for (c, &code) in row.iter().enumerate() {
            let body = |k: usize| robot.links[k].role == LinkRole::Body;
            if code != 0 && body(p) && body(c) {
                let kind = loopkin_core::geometry::JointType::from_code(code).map(|t| t.letter()).unwrap_or('?');
                edges.push(json!({"parent": label(p), "child": label(c), "type": kind.to_string()}));
            }
        }
    }
    let names = |ids: &[usize]| ids.iter().map(|&a| robot.actuators[a].name.clone()).collect::<Vec<_>>();
    let classes: Vec<Value> = redundancy_classes(&robot.rd).iter().map(|g| json!(names(g))).collect();
    let iteps: Vec<Value> = topo
        .iteps
        .iter()
        .map(|it| {
            json!({
                "actuators": names(&it.members),
                "type": it.kind.letter().to_string(),
                "path": it.path.iter().map(|&l| label(l)).collect::<Vec<_>>(),
                "loop_links": it.loop_links.iter().map(|&l| label(l)).collect::<Vec<_>>(),
                "loop_mobility": it.loop_mobility(),
            })
        })
        .collect();
    let [a, b, c, d] = topo.histogram();
    json!({
        "robot": robot.name,
        "counts": {"links": counts.links, "joints": counts.joints, "actuators": counts.actuators},
        "links": links,
        "four_bars": four_bars,
        "contracted_edges": edges,
        "redundancy_classes": classes,
        "iteps": iteps,
        "histogram": {"A": a, "B": b, "C": c, "D": d},
    })
}
