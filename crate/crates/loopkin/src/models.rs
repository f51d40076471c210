//! Built-in robots and unit fixtures.
//!
//! Every mechanism is planar in the x–y plane with revolute axes along z.
//! Links are authored by the world position of their frame origin at rest,
//! so every rest joint parameter is zero. Redundant actuator pairs sit
//! mirror-symmetrically at `z = ±w`.

use std::collections::HashMap;

use loopkin_core::geometry::{norm, sub, Vec3};
use loopkin_core::mrdf::{
    ActuatorSpec, Geometry, JointKind, JointSpec, LinkSpec, Mount, Pose, RobotDescription, Visual,
};

pub const BUILTIN: [&str; 8] = ["TCCHS", "STHS", "SSHS", "RH", "LHD", "VD", "DJ", "SH"];
pub const UNIT_FIXTURES: [&str; 6] = ["A", "B", "C", "D", "fourbar_parallelogram", "indirect_lock"];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("unknown model \"{0}\"")]
    Unknown(String),
    #[error("scale must be finite and positive, got {0}")]
    BadScale(f64),
    #[error("four-bar \"{0}\" is degenerate (zero area)")]
    DegenerateFourBar(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Uniform length scale applied to every point and bound.
    pub scale: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { scale: 1.0 }
    }
}

/// A catalog entry: the description plus its designated end-effector link.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub description: RobotDescription,
    pub end_effector: String,
}

const Z: Vec3 = [0.0, 0.0, 1.0];

fn round9(v: f64) -> f64 {
    let r = (v * 1e9).round() / 1e9;
    if r == 0.0 { 0.0 } else { r }
}

fn round_vec(v: Vec3) -> Vec3 {
    [round9(v[0]), round9(v[1]), round9(v[2])]
}

fn round_mm(v: f64) -> f64 {
    (v * 1e3).round() / 1e3
}

/// Planar mechanism builder working in world rest coordinates.
pub struct Builder {
    name: String,
    scale: f64,
    links: Vec<LinkSpec>,
    origin: HashMap<String, Vec3>,
    points: HashMap<String, Vec<Vec3>>,
    joints: Vec<JointSpec>,
    actuators: Vec<ActuatorSpec>,
    error: Option<ModelError>,
}

impl Builder {
    pub fn new(name: &str, params: ModelParams) -> Result<Self, ModelError> {
        if !(params.scale.is_finite() && params.scale > 0.0) {
            return Err(ModelError::BadScale(params.scale));
        }
        Ok(Self {
            name: name.into(),
            scale: params.scale,
            links: Vec::new(),
            origin: HashMap::new(),
            points: HashMap::new(),
            joints: Vec::new(),
            actuators: Vec::new(),
            error: None,
        })
    }

    fn s(&self, p: [f64; 2]) -> Vec3 {
        [p[0] * self.scale, p[1] * self.scale, 0.0]
    }

    fn touch(&mut self, link: &str, p: Vec3) {
        self.points.entry(link.into()).or_default().push(p);
    }

    fn add_link(&mut self, name: &str, at: Vec3, transformation: Pose) {
        self.links.push(LinkSpec { name: name.into(), transformation, visual: Visual::unit_box() });
        self.origin.insert(name.into(), at);
        self.touch(name, at);
    }

    fn rel(&self, link: &str, p: Vec3) -> Vec3 {
        round_vec(sub(p, self.origin[link]))
    }

    pub fn base(&mut self, name: &str) -> &mut Self {
        self.add_link(name, [0.0; 3], Pose::default());
        self
    }

    /// Child link with its frame at `at`, joined to `parent` by a z revolute.
    pub fn revolute(&mut self, parent: &str, child: &str, at: [f64; 2]) -> &mut Self {
        let p = self.s(at);
        self.add_link(child, p, Pose::default());
        self.touch(parent, p);
        self.joints.push(JointSpec {
            name: format!("{parent}_{child}"),
            parent: parent.into(),
            child: child.into(),
            kind: JointKind::Revolute,
            origin: Pose::at(self.rel(parent, p)),
            axis: Some(Z),
        });
        self
    }

    /// Child link sliding along the planar direction `dir`.
    pub fn prismatic(&mut self, parent: &str, child: &str, at: [f64; 2], dir: [f64; 2]) -> &mut Self {
        let p = self.s(at);
        self.add_link(child, p, Pose::default());
        self.touch(parent, p);
        let n = (dir[0] * dir[0] + dir[1] * dir[1]).sqrt();
        self.joints.push(JointSpec {
            name: format!("{parent}_{child}"),
            parent: parent.into(),
            child: child.into(),
            kind: JointKind::Prismatic,
            origin: Pose::at(self.rel(parent, p)),
            axis: Some(round_vec([dir[0] / n, dir[1] / n, 0.0])),
        });
        self
    }

    /// Rigid attachment, merged away at compile time.
    pub fn fixed(&mut self, parent: &str, child: &str, at: [f64; 2]) -> &mut Self {
        let p = self.s(at);
        self.add_link(child, p, Pose::default());
        self.joints.push(JointSpec {
            name: format!("{parent}_{child}"),
            parent: parent.into(),
            child: child.into(),
            kind: JointKind::Fixed,
            origin: Pose::at(self.rel(parent, p)),
            axis: None,
        });
        self
    }

    /// Four-bar `ground → b → c → d`, closed by a pin between `d` and the
    /// ground at `pin`. Each member's frame sits at its inbound pivot.
    pub fn four_bar(&mut self, ground: &str, members: [(&str, [f64; 2]); 3], pin: [f64; 2]) -> &mut Self {
        let pts = [self.s(members[0].1), self.s(members[1].1), self.s(members[2].1), self.s(pin)];
        let area = 0.5
            * (0..4)
                .map(|k| {
                    let (a, b) = (pts[k], pts[(k + 1) % 4]);
                    a[0] * b[1] - b[0] * a[1]
                })
                .sum::<f64>()
                .abs();
        if area < 1e-9 && self.error.is_none() {
            self.error = Some(ModelError::DegenerateFourBar(members[0].0.into()));
        }
        let mut parent = ground;
        for (name, at) in members {
            self.revolute(parent, name, at);
            parent = name;
        }
        let d = members[2].0;
        let p = pts[3];
        self.touch(d, p);
        self.touch(ground, p);
        for (from, to) in [(d, ground), (ground, d)] {
            self.joints.push(JointSpec {
                name: format!("{from}_{to}_pin"),
                parent: from.into(),
                child: to.into(),
                kind: JointKind::Fixed,
                origin: Pose::at(self.rel(from, p)),
                axis: None,
            });
        }
        self
    }

    /// Linear actuator between two planar points at depth `z`. Bounds are
    /// the rest length scaled by `1 - shrink` and `1 + stretch`.
    #[allow(clippy::too_many_arguments)]
    pub fn actuator(
        &mut self,
        name: &str,
        tube_parent: &str,
        tube_at: [f64; 2],
        rod_parent: &str,
        rod_at: [f64; 2],
        z: f64,
        (shrink, stretch): (f64, f64),
        redundant: &[&str],
    ) -> &mut Self {
        let depth = round9(z * self.scale);
        let mut t = self.s(tube_at);
        let mut r = self.s(rod_at);
        t[2] = depth;
        r[2] = depth;
        let d = sub(r, t);
        let rest = norm(d);
        let phi = d[1].atan2(d[0]);
        let tube = format!("{name}_tube");
        let rod = format!("{name}_rod");
        let t_rel = self.rel(tube_parent, t);
        let r_rel = self.rel(rod_parent, r);
        for (link, parent, at, rel, yaw, radius, frac) in [
            (&tube, tube_parent, t, t_rel, phi, 0.06, 0.55),
            (&rod, rod_parent, r, r_rel, phi + std::f64::consts::PI, 0.035, 0.6),
        ] {
            let len = round9(rest * frac);
            self.links.push(LinkSpec {
                name: link.clone(),
                transformation: Pose::new([0.0; 3], [0.0, 0.0, yaw]),
                visual: Visual {
                    offset: Pose::new([round9(len / 2.0), 0.0, 0.0], [0.0, std::f64::consts::FRAC_PI_2, 0.0]),
                    geometry: Geometry::Cylinder { radius: round9(radius * self.scale), length: len },
                },
            });
            self.origin.insert(link.clone(), at);
            self.touch(parent, at);
            self.joints.push(JointSpec {
                name: format!("{link}_mount"),
                parent: parent.into(),
                child: link.clone(),
                kind: JointKind::Revolute,
                origin: Pose::at(rel),
                axis: Some(Z),
            });
        }
        self.actuators.push(ActuatorSpec {
            name: name.into(),
            tube: Mount { link: tube, parent: tube_parent.into() },
            rod: Mount { link: rod, parent: rod_parent.into() },
            bounds: [round_mm(rest * (1.0 - shrink)), round_mm(rest * (1.0 + stretch))],
            redundant: redundant.iter().map(|s| s.to_string()).collect(),
        });
        self
    }

    /// Mirrored pair at `z = ±w`, each listing the other as redundant.
    #[allow(clippy::too_many_arguments)]
    pub fn pair(
        &mut self,
        names: [&str; 2],
        tube_parent: &str,
        tube_at: [f64; 2],
        rod_parent: &str,
        rod_at: [f64; 2],
        w: f64,
        range: (f64, f64),
    ) -> &mut Self {
        self.actuator(names[0], tube_parent, tube_at, rod_parent, rod_at, w, range, &[names[1]]);
        self.actuator(names[1], tube_parent, tube_at, rod_parent, rod_at, -w, range, &[names[0]])
    }

    /// Body visuals: one box per link spanning the points it carries.
    fn finish_visuals(&mut self) {
        for link in &mut self.links {
            if link.name.ends_with("_tube") || link.name.ends_with("_rod") {
                continue;
            }
            let pts = &self.points[&link.name];
            let o = self.origin[&link.name];
            let mut lo = [f64::INFINITY; 3];
            let mut hi = [f64::NEG_INFINITY; 3];
            for p in pts {
                for k in 0..3 {
                    lo[k] = lo[k].min(p[k]);
                    hi[k] = hi[k].max(p[k]);
                }
            }
            let pad = 0.08 * self.scale;
            let center: Vec3 = std::array::from_fn(|k| 0.5 * (lo[k] + hi[k]) - o[k]);
            let size: Vec3 = std::array::from_fn(|k| round9((hi[k] - lo[k]).max(0.0) + pad));
            link.visual = Visual { offset: Pose::at(round_vec(center)), geometry: Geometry::Box { size } };
        }
    }

    pub fn build(mut self) -> Result<RobotDescription, ModelError> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        self.finish_visuals();
        Ok(RobotDescription {
            name: self.name,
            links: self.links,
            joints: self.joints,
            actuators: self.actuators,
        })
    }
}

fn model(desc: RobotDescription, end_effector: &str) -> Model {
    Model { description: desc, end_effector: end_effector.into() }
}

/// Shield linkage shared by the hydraulic supports: base → rear link →
/// shield → front link, pinned back to the base.
fn shield_linkage(b: &mut Builder) {
    b.base("L0_base").four_bar(
        "L0_base",
        [("L1_rear_link", [-1.05, 0.31]), ("L2_shield", [-1.82, 0.83]), ("L3_front_link", [-1.33, 1.09])],
        [-0.31, 0.6],
    );
}

const COLUMN_RANGE: (f64, f64) = (0.06, 0.06);

fn tcchs(p: ModelParams) -> Result<Model, ModelError> {
    let mut b = Builder::new("TCCHS", p)?;
    shield_linkage(&mut b);
    b.revolute("L2_shield", "L4_canopy", [-1.2, 2.1])
        .revolute("L2_shield", "L5_tail_beam", [-1.6, 1.6])
        .prismatic("L5_tail_beam", "L6_insert_plate", [-2.3, 1.32], [-1.0, -0.4])
        .revolute("L4_canopy", "L7_front_beam", [1.6, 2.3])
        .four_bar(
            "L7_front_beam",
            [("L8_guard_link", [2.2, 2.25]), ("L9_face_guard", [2.55, 2.05]), ("L10_guard_rocker", [2.5, 1.55])],
            [2.0, 2.0],
        )
        .pair(["A0", "A1"], "L0_base", [1.25, 0.35], "L4_canopy", [1.47, 2.25], 0.5, COLUMN_RANGE)
        .pair(["A2", "A3"], "L0_base", [-0.87, 0.35], "L4_canopy", [-0.92, 2.2], 0.5, COLUMN_RANGE)
        .pair(["A4", "A5"], "L2_shield", [-1.3, 1.2], "L5_tail_beam", [-2.1, 1.3], 0.4, (0.1, 0.1))
        .pair(["A6", "A7"], "L5_tail_beam", [-1.786, 1.526], "L6_insert_plate", [-2.486, 1.246], 0.35, (0.15, 0.15))
        .pair(["A8", "A9"], "L4_canopy", [1.0, 2.1], "L7_front_beam", [1.8, 2.05], 0.45, (0.1, 0.1))
        .actuator("A10", "L7_front_beam", [2.03, 1.9], "L9_face_guard", [2.57, 1.98], 0.0, (0.1, 0.1), &[]);
    Ok(model(b.build()?, "L4_canopy"))
}

fn sths(p: ModelParams) -> Result<Model, ModelError> {
    let mut b = Builder::new("STHS", p)?;
    shield_linkage(&mut b);
    b.revolute("L2_shield", "L4_canopy", [-1.2, 2.1])
        .four_bar(
            "L4_canopy",
            [("L5_guard_link", [1.3, 2.25]), ("L6_face_guard", [1.6, 2.05]), ("L7_guard_rocker", [1.55, 1.6])],
            [1.1, 2.0],
        )
        .pair(["A0", "A1"], "L0_base", [0.2, 0.35], "L4_canopy", [0.4, 2.2], 0.5, COLUMN_RANGE)
        .actuator("A2", "L2_shield", [-1.5, 1.5], "L4_canopy", [-0.7, 2.05], 0.0, (0.08, 0.08), &[])
        .actuator("A3", "L4_canopy", [1.02, 1.93], "L6_face_guard", [1.53, 2.0], 0.0, (0.1, 0.1), &[]);
    Ok(model(b.build()?, "L4_canopy"))
}

fn sshs(p: ModelParams) -> Result<Model, ModelError> {
    let mut b = Builder::new("SSHS", p)?;
    shield_linkage(&mut b);
    b.revolute("L2_shield", "L4_canopy", [-1.2, 2.1])
        .prismatic("L4_canopy", "L5_extension", [1.2, 2.3], [1.0, 0.0])
        .revolute("L5_extension", "L6_guard_plate", [1.9, 2.3])
        .prismatic("L6_guard_plate", "L7_guard_slide", [1.95, 1.8], [0.0, -1.0])
        .pair(["A0", "A1"], "L0_base", [1.14, 0.35], "L4_canopy", [1.12, 2.25], 0.5, COLUMN_RANGE)
        .pair(["A2", "A3"], "L0_base", [-0.97, 0.35], "L4_canopy", [-0.93, 2.2], 0.5, COLUMN_RANGE)
        .actuator("A4", "L4_canopy", [0.7, 2.3], "L5_extension", [1.4, 2.3], 0.0, (0.15, 0.15), &[])
        .actuator("A5", "L5_extension", [1.4, 2.15], "L6_guard_plate", [2.0, 2.0], 0.0, (0.1, 0.1), &[])
        .actuator("A6", "L6_guard_plate", [1.95, 2.2], "L7_guard_slide", [1.95, 1.6], 0.0, (0.15, 0.15), &[]);
    Ok(model(b.build()?, "L4_canopy"))
}

fn rh(p: ModelParams) -> Result<Model, ModelError> {
    let mut b = Builder::new("RH", p)?;
    b.base("L0_chassis")
        .revolute("L0_chassis", "L1_shovel", [2.0, 0.3])
        .revolute("L0_chassis", "L2_stabilizer", [-2.0, 0.5])
        .revolute("L0_chassis", "L3_cutting_boom", [0.8, 1.2])
        .revolute("L1_shovel", "L4_star_wheel_arm", [2.6, 0.2])
        .revolute("L2_stabilizer", "L5_rear_foot", [-2.6, 0.1])
        .prismatic("L3_cutting_boom", "L6_cutter_head", [2.6, 1.7], [1.0, 0.28])
        .pair(["A0", "A1"], "L0_chassis", [1.2, 0.6], "L1_shovel", [2.15, 0.7], 0.6, (0.1, 0.1))
        .pair(["A2", "A3"], "L0_chassis", [-1.2, 0.9], "L2_stabilizer", [-2.2, 0.9], 0.6, (0.1, 0.1))
        .pair(["A4", "A5"], "L0_chassis", [0.4, 0.5], "L3_cutting_boom", [1.8, 1.2], 0.4, (0.1, 0.1))
        .actuator("A6", "L1_shovel", [2.2, 0.45], "L4_star_wheel_arm", [2.9, 0.35], 0.0, (0.1, 0.1), &[])
        .actuator("A7", "L2_stabilizer", [-2.1, 0.75], "L5_rear_foot", [-2.8, 0.3], 0.0, (0.1, 0.1), &[])
        .actuator("A8", "L3_cutting_boom", [1.6, 1.42], "L6_cutter_head", [2.8, 1.756], 0.0, (0.15, 0.15), &[]);
    Ok(model(b.build()?, "L3_cutting_boom"))
}

fn lhd(p: ModelParams) -> Result<Model, ModelError> {
    let mut b = Builder::new("LHD", p)?;
    b.base("L0_front_frame")
        .prismatic("L0_front_frame", "L1_ejector", [0.6, 0.8], [1.0, 0.0])
        .four_bar(
            "L0_front_frame",
            [("L2_boom", [0.0, 1.5]), ("L3_bucket", [2.2, 1.0]), ("L4_bucket_link", [2.3, 1.6])],
            [0.5, 2.1],
        )
        .actuator("A0", "L0_front_frame", [0.2, 0.8], "L1_ejector", [0.8, 0.8], 0.0, (0.2, 0.2), &[])
        .actuator("A1", "L0_front_frame", [0.6, 0.6], "L3_bucket", [2.0, 0.8], 0.0, (0.08, 0.08), &[]);
    Ok(model(b.build()?, "L3_bucket"))
}

fn vd(p: ModelParams) -> Result<Model, ModelError> {
    let mut b = Builder::new("VD", p)?;
    b.base("L0_door_frame")
        .four_bar(
            "L0_door_frame",
            [("L1_door_leaf", [0.0, 0.0]), ("L2_coupler", [1.2, 0.3]), ("L3_rocker", [1.3, -0.5])],
            [0.3, -0.6],
        )
        .actuator("A0", "L0_door_frame", [-0.3, -0.8], "L1_door_leaf", [0.8, 0.1], 0.0, (0.1, 0.1), &[]);
    Ok(model(b.build()?, "L1_door_leaf"))
}

fn dj(p: ModelParams) -> Result<Model, ModelError> {
    let mut b = Builder::new("DJ", p)?;
    b.base("L0_carrier")
        .revolute("L0_carrier", "L1_outrigger", [-1.5, 0.4])
        .prismatic("L0_carrier", "L2_stinger", [2.0, 0.3], [1.0, -0.2])
        .four_bar(
            "L0_carrier",
            [("L3_boom", [0.5, 1.0]), ("L4_feed_link", [2.5, 1.5]), ("L5_rock_drill", [2.6, 1.0])],
            [0.6, 0.5],
        )
        .actuator("A0", "L0_carrier", [-1.0, 0.8], "L1_outrigger", [-1.82, 0.8], 0.0, (0.1, 0.1), &[])
        .actuator("A1", "L0_carrier", [1.5, 0.4], "L2_stinger", [2.4, 0.22], 0.0, (0.15, 0.15), &[])
        .actuator("A2", "L0_carrier", [1.0, 0.3], "L5_rock_drill", [2.4, 0.8], 0.0, (0.06, 0.08), &[]);
    Ok(model(b.build()?, "L5_rock_drill"))
}

fn sh(p: ModelParams) -> Result<Model, ModelError> {
    let mut b = Builder::new("SH", p)?;
    b.base("L0_body")
        .revolute("L0_body", "L1_front_arm", [2.0, 0.6])
        .revolute("L0_body", "L2_rear_arm", [-2.0, 0.6])
        .revolute("L0_body", "L3_cowl", [0.0, 1.0])
        .pair(["A0", "A1"], "L0_body", [1.0, 0.2], "L1_front_arm", [2.16, 0.2], 0.5, (0.1, 0.1))
        .pair(["A2", "A3"], "L0_body", [-1.0, 0.2], "L2_rear_arm", [-2.16, 0.2], 0.5, (0.1, 0.1))
        .pair(["A4", "A5"], "L0_body", [-0.6, 0.5], "L3_cowl", [0.3, 0.64], 0.7, (0.1, 0.1))
        .pair(["A6", "A7"], "L0_body", [-0.6, 0.5], "L3_cowl", [0.3, 0.64], 0.3, (0.1, 0.1));
    let mut desc = b.build()?;
    // The four cowl cylinders form one class.
    for a in &mut desc.actuators[4..8] {
        a.redundant = ["A4", "A5", "A6", "A7"].iter().filter(|n| **n != a.name).map(|s| s.to_string()).collect();
    }
    Ok(model(desc, "L1_front_arm"))
}

/// One of the eight built-in robots, case-insensitive.
pub fn builtin_robot(name: &str, params: ModelParams) -> Result<Model, ModelError> {
    match name.to_ascii_uppercase().as_str() {
        "TCCHS" => tcchs(params),
        "STHS" => sths(params),
        "SSHS" => sshs(params),
        "RH" => rh(params),
        "LHD" => lhd(params),
        "VD" => vd(params),
        "DJ" => dj(params),
        "SH" => sh(params),
        _ => Err(ModelError::Unknown(name.into())),
    }
}

/// Minimal fixtures with closed-form oracles.
///
/// * `A`: prismatic joint with mounts on its axis, `l = 1 + θ`.
/// * `B`: unit mount radii about one pivot, `l² = 2 − 2 cos(π/2 + θ)`.
/// * `C`: generic double-rocker four-bar driven through its crank.
/// * `fourbar_parallelogram`: parallelogram driven through its crank.
/// * `D` / `indirect_lock`: shield linkage with a hinged top link, two
///   column classes (both D) or a column pair (C) plus a jack (D).
pub fn unit_fixture(kind: &str) -> Result<Model, ModelError> {
    let p = ModelParams::default();
    match kind {
        "A" => {
            let mut b = Builder::new("unit_A", p)?;
            b.base("L0")
                .prismatic("L0", "L1", [0.0, 0.0], [1.0, 0.0])
                .actuator("A0", "L0", [0.0, 0.0], "L1", [1.0, 0.0], 0.0, (0.5, 1.0), &[]);
            Ok(model(b.build()?, "L1"))
        }
        "B" => {
            let mut b = Builder::new("unit_B", p)?;
            b.base("L0").revolute("L0", "L1", [0.0, 0.0]).actuator(
                "A0",
                "L0",
                [1.0, 0.0],
                "L1",
                [0.0, 1.0],
                0.0,
                (1.0 - 0.3 / 2f64.sqrt(), 1.9 / 2f64.sqrt() - 1.0),
                &[],
            );
            let mut desc = b.build()?;
            desc.actuators[0].bounds = [0.3, 1.9];
            Ok(model(desc, "L1"))
        }
        "C" => {
            let mut b = Builder::new("unit_C", p)?;
            b.base("L0")
                .four_bar("L0", [("L1", [0.0, 0.0]), ("L2", [0.3, 1.0]), ("L3", [1.4, 1.2])], [1.2, 0.1])
                .actuator("A0", "L0", [-0.8, 0.2], "L1", [0.2, 0.6], 0.0, (0.1, 0.1), &[]);
            Ok(model(b.build()?, "L2"))
        }
        "fourbar_parallelogram" => {
            let mut b = Builder::new("unit_parallelogram", p)?;
            b.base("L0")
                .four_bar("L0", [("L1", [0.0, 0.0]), ("L2", [0.0, 1.0]), ("L3", [1.0, 1.0])], [1.0, 0.0])
                .actuator("A0", "L0", [-1.0, 0.0], "L1", [0.0, 0.8], 0.0, (0.0, 0.0), &[]);
            let mut desc = b.build()?;
            desc.actuators[0].bounds = [0.75, 1.6];
            Ok(model(desc, "L2"))
        }
        "D" => {
            let mut b = Builder::new("unit_D", p)?;
            shield_linkage(&mut b);
            b.revolute("L2_shield", "L4_canopy", [-1.2, 2.1])
                .actuator("A0", "L0_base", [0.9, 0.35], "L4_canopy", [1.2, 2.25], 0.0, COLUMN_RANGE, &[])
                .actuator("A1", "L0_base", [-0.5, 0.35], "L4_canopy", [-0.5, 2.15], 0.0, COLUMN_RANGE, &[]);
            Ok(model(b.build()?, "L4_canopy"))
        }
        "indirect_lock" => {
            let mut b = Builder::new("unit_indirect_lock", p)?;
            shield_linkage(&mut b);
            b.revolute("L2_shield", "L4_canopy", [-1.2, 2.1])
                .actuator("A0", "L0_base", [0.2, 0.35], "L4_canopy", [0.4, 2.2], 0.0, COLUMN_RANGE, &[])
                .actuator("A1", "L2_shield", [-1.5, 1.5], "L4_canopy", [-0.7, 2.05], 0.0, (0.08, 0.08), &[]);
            Ok(model(b.build()?, "L4_canopy"))
        }
        _ => Err(ModelError::Unknown(kind.into())),
    }
}

/// Looks up a built-in robot or a unit fixture by name.
pub fn lookup(name: &str) -> Result<Model, ModelError> {
    builtin_robot(name, ModelParams::default()).or_else(|_| unit_fixture(name))
}
