//! Robot description types, compilation into the matrix model, and
//! structural validation.
//!
//! A [`RobotDescription`] mirrors the JSON document field for field; JSON
//! text handling lives in the std companion crate. [`compile`] turns a
//! description into a [`Robot`]: fixed chains are merged, IDs assigned,
//! and the joint/actuator/redundancy matrices built.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geometry::{normalize, JointType, Transform, Vec3};

// ---------------------------------------------------------------------------
// Description
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotDescription {
    pub name: String,
    pub links: Vec<LinkSpec>,
    #[serde(default)]
    pub joints: Vec<JointSpec>,
    #[serde(default)]
    pub actuators: Vec<ActuatorSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose {
    #[serde(default)]
    pub translation: Vec3,
    #[serde(default)]
    pub rpy: Vec3,
}

impl Pose {
    pub fn new(translation: Vec3, rpy: Vec3) -> Self {
        Self { translation, rpy }
    }

    pub fn at(translation: Vec3) -> Self {
        Self { translation, rpy: [0.0; 3] }
    }

    pub fn transform(&self) -> Transform {
        Transform::from_rpy(self.translation, self.rpy)
    }

    fn is_finite(&self) -> bool {
        self.translation.iter().chain(self.rpy.iter()).all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Geometry {
    Box { size: Vec3 },
    Cylinder { radius: f64, length: f64 },
    Capsule { radius: f64, length: f64 },
    Sphere { radius: f64 },
    Mesh { path: String },
}

impl Geometry {
    fn dims_positive(&self) -> bool {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        match self {
            Geometry::Box { size } => size.iter().all(|v| ok(*v)),
            Geometry::Cylinder { radius, length } | Geometry::Capsule { radius, length } => {
                ok(*radius) && ok(*length)
            }
            Geometry::Sphere { radius } => ok(*radius),
            Geometry::Mesh { .. } => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Visual {
    #[serde(default)]
    pub offset: Pose,
    pub geometry: Geometry,
}

impl Visual {
    pub fn unit_box() -> Self {
        Self { offset: Pose::default(), geometry: Geometry::Box { size: [1.0, 1.0, 1.0] } }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSpec {
    pub name: String,
    #[serde(default)]
    pub transformation: Pose,
    #[serde(default = "Visual::unit_box")]
    pub visual: Visual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JointKind {
    Revolute,
    Prismatic,
    Fixed,
}

impl JointKind {
    pub fn joint_type(self) -> JointType {
        match self {
            JointKind::Revolute => JointType::Revolute,
            JointKind::Prismatic => JointType::Prismatic,
            JointKind::Fixed => JointType::Fixed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointSpec {
    pub name: String,
    pub parent: String,
    pub child: String,
    #[serde(rename = "type")]
    pub kind: JointKind,
    #[serde(default)]
    pub origin: Pose,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<Vec3>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mount {
    pub link: String,
    pub parent: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActuatorSpec {
    pub name: String,
    pub tube: Mount,
    pub rod: Mount,
    pub bounds: [f64; 2],
    #[serde(default)]
    pub redundant: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DescriptionError {
    #[error("duplicate {kind} name \"{name}\"")]
    DuplicateName { kind: &'static str, name: String },
    #[error("unresolved reference \"{name}\" in {context}")]
    UnresolvedName { context: String, name: String },
    #[error("actuator \"{actuator}\": bounds [{lo}, {hi}] must satisfy lo < hi")]
    InvalidBounds { actuator: String, lo: f64, hi: f64 },
    #[error("joint \"{0}\": axis required for revolute/prismatic joints")]
    MissingAxis(String),
    #[error("joint \"{0}\": fixed joints take no axis")]
    UnexpectedAxis(String),
    #[error("joint \"{0}\": axis must be finite and nonzero")]
    DegenerateAxis(String),
    #[error("joint \"{0}\": parent and child are the same link")]
    SelfLoop(String),
    #[error("{0}: non-finite pose value")]
    NonFinite(String),
    #[error("link \"{0}\": visual dimensions must be positive")]
    BadGeometry(String),
}

impl RobotDescription {
    /// Parse-level checks: names, references, axes, bounds and dimensions.
    pub fn check(&self) -> Result<(), DescriptionError> {
        let links = unique_names("link", self.links.iter().map(|l| l.name.as_str()))?;
        unique_names("joint", self.joints.iter().map(|j| j.name.as_str()))?;
        let acts = unique_names("actuator", self.actuators.iter().map(|a| a.name.as_str()))?;

        let resolve = |context: String, name: &str| {
            if links.contains_key(name) {
                Ok(())
            } else {
                Err(DescriptionError::UnresolvedName { context, name: name.into() })
            }
        };

        for l in &self.links {
            if !l.transformation.is_finite() || !l.visual.offset.is_finite() {
                return Err(DescriptionError::NonFinite(format!("link \"{}\"", l.name)));
            }
            if !l.visual.geometry.dims_positive() {
                return Err(DescriptionError::BadGeometry(l.name.clone()));
            }
        }
        for j in &self.joints {
            resolve(format!("joint \"{}\" parent", j.name), &j.parent)?;
            resolve(format!("joint \"{}\" child", j.name), &j.child)?;
            if j.parent == j.child {
                return Err(DescriptionError::SelfLoop(j.name.clone()));
            }
            if !j.origin.is_finite() {
                return Err(DescriptionError::NonFinite(format!("joint \"{}\"", j.name)));
            }
            match (j.kind, j.axis) {
                (JointKind::Fixed, Some(_)) => return Err(DescriptionError::UnexpectedAxis(j.name.clone())),
                (JointKind::Fixed, None) => {}
                (_, None) => return Err(DescriptionError::MissingAxis(j.name.clone())),
                (_, Some(a)) => {
                    if normalize(a).is_none() {
                        return Err(DescriptionError::DegenerateAxis(j.name.clone()));
                    }
                }
            }
        }
        for a in &self.actuators {
            resolve(format!("actuator \"{}\" tube link", a.name), &a.tube.link)?;
            resolve(format!("actuator \"{}\" tube parent", a.name), &a.tube.parent)?;
            resolve(format!("actuator \"{}\" rod link", a.name), &a.rod.link)?;
            resolve(format!("actuator \"{}\" rod parent", a.name), &a.rod.parent)?;
            let [lo, hi] = a.bounds;
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(DescriptionError::InvalidBounds { actuator: a.name.clone(), lo, hi });
            }
            for r in &a.redundant {
                if !acts.contains_key(r.as_str()) {
                    return Err(DescriptionError::UnresolvedName {
                        context: format!("actuator \"{}\" redundancy list", a.name),
                        name: r.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

fn unique_names<'a>(
    kind: &'static str,
    names: impl Iterator<Item = &'a str>,
) -> Result<BTreeMap<&'a str, usize>, DescriptionError> {
    let mut map = BTreeMap::new();
    for (i, n) in names.enumerate() {
        if map.insert(n, i).is_some() {
            return Err(DescriptionError::DuplicateName { kind, name: n.into() });
        }
    }
    Ok(map)
}

// ---------------------------------------------------------------------------
// Compiled model
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkRole {
    Body,
    Tube(usize),
    Rod(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VisualShape {
    pub offset: Transform,
    pub geometry: Geometry,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub name: String,
    /// Link frame relative to the frame of its inbound joint.
    pub transform: Transform,
    pub parent_joint: Option<usize>,
    pub visuals: Vec<VisualShape>,
    pub role: LinkRole,
    /// Names of description links folded into this one by fixed joints.
    pub merged: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Joint {
    pub name: String,
    pub kind: JointType,
    pub parent: usize,
    pub child: usize,
    /// Joint frame in the parent link frame.
    pub origin: Transform,
    /// Unit axis in the joint frame; zero for fixed joints.
    pub axis: Vec3,
    /// Partner joint when this joint is half of a loop-closure pair.
    pub closure_partner: Option<usize>,
}

impl Joint {
    pub fn is_closure(&self) -> bool {
        self.closure_partner.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Actuator {
    pub name: String,
    pub tube: usize,
    pub rod: usize,
    pub tube_parent: usize,
    pub rod_parent: usize,
    pub tube_joint: usize,
    pub rod_joint: usize,
    pub bounds: (f64, f64),
    pub group: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Robot {
    pub name: String,
    pub links: Vec<Link>,
    pub joints: Vec<Joint>,
    pub actuators: Vec<Actuator>,
    pub base: usize,
    /// Redundancy classes, each sorted, ordered by smallest member.
    pub groups: Vec<Vec<usize>>,
    /// Joint matrix, `j[p][c]` = type code of the joint from link p to c.
    pub j: Vec<Vec<u8>>,
    pub at: Vec<Vec<u8>>,
    pub ar: Vec<Vec<u8>>,
    pub rd: Vec<Vec<u8>>,
    /// Tree distance of every link from the base.
    pub depth: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Counts {
    pub links: usize,
    pub joints: usize,
    pub actuators: usize,
}

impl Robot {
    pub fn link_id(&self, name: &str) -> Option<usize> {
        self.links.iter().position(|l| l.name == name || l.merged.iter().any(|m| m == name))
    }

    pub fn joint_id(&self, name: &str) -> Option<usize> {
        self.joints.iter().position(|j| j.name == name)
    }

    pub fn actuator_id(&self, name: &str) -> Option<usize> {
        self.actuators.iter().position(|a| a.name == name)
    }

    /// Number of links that are not actuator tubes or rods.
    pub fn body_link_count(&self) -> usize {
        self.links.iter().filter(|l| l.role == LinkRole::Body).count()
    }

    /// Counts in the physical sense: body links; tree joints plus one per
    /// closure pair plus two mounts per actuator; actuators.
    pub fn counts(&self) -> Counts {
        let tree = self.joints.iter().filter(|j| !j.is_closure()).count();
        let closures = self.joints.iter().filter(|j| j.is_closure()).count() / 2;
        Counts { links: self.body_link_count(), joints: tree + closures, actuators: self.actuators.len() }
    }

    /// Redundancy peers of `actuator`, itself included.
    pub fn peers(&self, actuator: usize) -> &[usize] {
        &self.groups[self.actuators[actuator].group]
    }

    pub fn representative(&self, actuator: usize) -> usize {
        self.peers(actuator)[0]
    }

    /// Joint between two links in the given direction, if declared.
    pub fn joint_between(&self, parent: usize, child: usize) -> Option<usize> {
        self.joints.iter().position(|j| j.parent == parent && j.child == child)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompileError {
    #[error(transparent)]
    Description(#[from] DescriptionError),
    #[error("link \"{0}\" has more than one parent joint")]
    MultipleParents(String),
    #[error("more than one base link: {0:?}")]
    MultipleBases(Vec<String>),
    #[error("no base link: every link has a parent joint")]
    NoBase,
    #[error("joint cycle through links {0:?} (fixed chains must resolve to a rigid aggregate)")]
    Cycle(Vec<String>),
    #[error("actuator \"{actuator}\": {reason}")]
    Mount { actuator: String, reason: String },
    #[error("closure pair \"{0}\" connects a link to itself after fixed-merge")]
    DegenerateClosure(String),
    #[error("link \"{0}\" is used by more than one actuator")]
    SharedActuatorLink(String),
}

struct Raw<'a> {
    index: BTreeMap<&'a str, usize>,
}

impl Raw<'_> {
    fn id(&self, name: &str) -> usize {
        self.index[name]
    }
}

/// Compiles a description into the matrix model.
pub fn compile(desc: &RobotDescription) -> Result<Robot, CompileError> {
    desc.check()?;
    let raw = Raw {
        index: desc.links.iter().enumerate().map(|(i, l)| (l.name.as_str(), i)).collect(),
    };
    let n = desc.links.len();

    // Mutual fixed pairs are loop closures; everything else spans the tree.
    let mut closure_of = vec![None; desc.joints.len()];
    for (i, a) in desc.joints.iter().enumerate() {
        if a.kind != JointKind::Fixed || closure_of[i].is_some() {
            continue;
        }
        if let Some(k) = desc.joints.iter().enumerate().position(|(k, b)| {
            k != i && closure_of[k].is_none() && b.kind == JointKind::Fixed && b.parent == a.child && b.child == a.parent
        }) {
            closure_of[i] = Some(k);
            closure_of[k] = Some(i);
        }
    }

    let mut inbound: Vec<Option<usize>> = vec![None; n];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j) in desc.joints.iter().enumerate() {
        if closure_of[i].is_some() {
            continue;
        }
        let c = raw.id(&j.child);
        if inbound[c].is_some() {
            return Err(CompileError::MultipleParents(j.child.clone()));
        }
        inbound[c] = Some(i);
        children[raw.id(&j.parent)].push(i);
    }
    let bases: Vec<usize> = (0..n).filter(|&i| inbound[i].is_none()).collect();
    let base = match bases.as_slice() {
        [] => return Err(CompileError::NoBase),
        [b] => *b,
        many => return Err(CompileError::MultipleBases(many.iter().map(|&i| desc.links[i].name.clone()).collect())),
    };

    // BFS over raw tree joints; unreached links sit on a cycle.
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([base]);
    seen[base] = true;
    while let Some(p) = queue.pop_front() {
        order.push(p);
        for &ji in &children[p] {
            let c = raw.id(&desc.joints[ji].child);
            if !seen[c] {
                seen[c] = true;
                queue.push_back(c);
            }
        }
    }
    if order.len() != n {
        let names = (0..n).filter(|&i| !seen[i]).map(|i| desc.links[i].name.clone()).collect();
        return Err(CompileError::Cycle(names));
    }

    // Fixed-merge: rep[i] is the surviving link, x[i] the frame of raw link
    // i expressed in the frame of rep[i].
    let mut rep: Vec<usize> = (0..n).collect();
    let mut x = vec![Transform::IDENTITY; n];
    for &c in order.iter().skip(1) {
        let j = &desc.joints[inbound[c].unwrap()];
        if j.kind == JointKind::Fixed {
            let p = raw.id(&j.parent);
            rep[c] = rep[p];
            x[c] = x[p] * j.origin.transform() * desc.links[c].transformation.transform();
        }
    }

    // Actuator links: revolute-mounted leaves owned by a single actuator.
    let mut act_link = vec![None; n];
    for (ai, a) in desc.actuators.iter().enumerate() {
        for (mount, role) in [(&a.tube, LinkRole::Tube(ai)), (&a.rod, LinkRole::Rod(ai))] {
            let li = raw.id(&mount.link);
            let bad = |reason: String| CompileError::Mount { actuator: a.name.clone(), reason };
            if act_link[li].is_some() {
                return Err(CompileError::SharedActuatorLink(mount.link.clone()));
            }
            act_link[li] = Some(role);
            let Some(ji) = inbound[li] else {
                return Err(bad(format!("link \"{}\" has no mount joint", mount.link)));
            };
            let j = &desc.joints[ji];
            if j.kind != JointKind::Revolute {
                return Err(bad(format!("link \"{}\" is not mounted by a revolute joint", mount.link)));
            }
            if j.parent != mount.parent {
                return Err(bad(format!(
                    "link \"{}\" is mounted on \"{}\", not on \"{}\"",
                    mount.link, j.parent, mount.parent
                )));
            }
            let has_children = !children[li].is_empty()
                || desc.joints.iter().enumerate().any(|(k, jj)| closure_of[k].is_some() && (jj.parent == mount.link || jj.child == mount.link));
            if has_children {
                return Err(bad(format!("link \"{}\" must be a leaf", mount.link)));
            }
        }
    }

    // Depth over the merged tree and final ID order.
    let mut depth_raw = vec![0usize; n];
    for &c in order.iter().skip(1) {
        let j = &desc.joints[inbound[c].unwrap()];
        let p = raw.id(&j.parent);
        depth_raw[c] = depth_raw[p] + usize::from(j.kind != JointKind::Fixed);
    }
    let mut body: Vec<usize> = (0..n).filter(|&i| rep[i] == i && act_link[i].is_none()).collect();
    body.sort_by_key(|&i| (depth_raw[i], i));
    let mut new_id = vec![usize::MAX; n];
    let mut links_order = body.clone();
    for a in &desc.actuators {
        links_order.push(raw.id(&a.tube.link));
        links_order.push(raw.id(&a.rod.link));
    }
    for (k, &i) in links_order.iter().enumerate() {
        new_id[i] = k;
    }
    let id_of = |raw_link: usize| new_id[rep[raw_link]];
    let nl = links_order.len();

    let mut links: Vec<Link> = links_order
        .iter()
        .map(|&i| Link {
            name: desc.links[i].name.clone(),
            transform: desc.links[i].transformation.transform(),
            parent_joint: None,
            visuals: Vec::new(),
            role: act_link[i].unwrap_or(LinkRole::Body),
            merged: Vec::new(),
        })
        .collect();
    for &i in &order {
        let target = &mut links[id_of(i)];
        if rep[i] != i {
            target.merged.push(desc.links[i].name.clone());
        }
        let v = &desc.links[i].visual;
        target.visuals.push(VisualShape { offset: x[i] * v.offset.transform(), geometry: v.geometry.clone() });
    }

    // Tree joints sorted by child ID, then closure pairs.
    let mut tree: Vec<(usize, Joint)> = Vec::new();
    for (i, j) in desc.joints.iter().enumerate() {
        if closure_of[i].is_some() || j.kind == JointKind::Fixed {
            continue;
        }
        let p = raw.id(&j.parent);
        let c = raw.id(&j.child);
        tree.push((
            id_of(c),
            Joint {
                name: j.name.clone(),
                kind: j.kind.joint_type(),
                parent: id_of(p),
                child: id_of(c),
                origin: x[p] * j.origin.transform(),
                axis: normalize(j.axis.unwrap()).unwrap(),
                closure_partner: None,
            },
        ));
    }
    tree.sort_by_key(|(c, _)| *c);
    let mut joints: Vec<Joint> = tree.into_iter().map(|(_, j)| j).collect();
    for (i, j) in desc.joints.iter().enumerate() {
        let Some(k) = closure_of[i] else { continue };
        if k < i {
            continue;
        }
        let (p, c) = (raw.id(&j.parent), raw.id(&j.child));
        if id_of(p) == id_of(c) {
            return Err(CompileError::DegenerateClosure(j.name.clone()));
        }
        let other = &desc.joints[k];
        let base_index = joints.len();
        joints.push(Joint {
            name: j.name.clone(),
            kind: JointType::Fixed,
            parent: id_of(p),
            child: id_of(c),
            origin: x[p] * j.origin.transform(),
            axis: [0.0; 3],
            closure_partner: Some(base_index + 1),
        });
        joints.push(Joint {
            name: other.name.clone(),
            kind: JointType::Fixed,
            parent: id_of(c),
            child: id_of(p),
            origin: x[c] * other.origin.transform(),
            axis: [0.0; 3],
            closure_partner: Some(base_index),
        });
    }
    for (ji, j) in joints.iter().enumerate() {
        if !j.is_closure() {
            links[j.child].parent_joint = Some(ji);
        }
    }

    let mut jm = vec![vec![0u8; nl]; nl];
    for j in &joints {
        jm[j.parent][j.child] = j.kind.code();
    }

    let na = desc.actuators.len();
    let act_index: BTreeMap<&str, usize> = desc.actuators.iter().enumerate().map(|(i, a)| (a.name.as_str(), i)).collect();
    let mut rd = vec![vec![0u8; na]; na];
    for (i, a) in desc.actuators.iter().enumerate() {
        rd[i][i] = 1;
        for r in &a.redundant {
            rd[i][act_index[r.as_str()]] = 1;
        }
    }
    let groups = redundancy_classes(&rd);
    let mut group_of = vec![0; na];
    for (g, members) in groups.iter().enumerate() {
        for &m in members {
            group_of[m] = g;
        }
    }

    let mut at = vec![vec![0u8; nl]; na];
    let mut ar = vec![vec![0u8; nl]; na];
    let mut actuators = Vec::with_capacity(na);
    for (i, a) in desc.actuators.iter().enumerate() {
        let tube = id_of(raw.id(&a.tube.link));
        let rod = id_of(raw.id(&a.rod.link));
        at[i][tube] = 1;
        ar[i][rod] = 1;
        actuators.push(Actuator {
            name: a.name.clone(),
            tube,
            rod,
            tube_parent: id_of(raw.id(&a.tube.parent)),
            rod_parent: id_of(raw.id(&a.rod.parent)),
            tube_joint: links[tube].parent_joint.unwrap(),
            rod_joint: links[rod].parent_joint.unwrap(),
            bounds: (a.bounds[0], a.bounds[1]),
            group: group_of[i],
        });
    }

    let mut depth = vec![0usize; nl];
    for &i in &order {
        if rep[i] == i {
            depth[id_of(i)] = depth_raw[i];
        }
    }

    Ok(Robot {
        name: desc.name.clone(),
        links,
        joints,
        actuators,
        base: id_of(base),
        groups,
        j: jm,
        at,
        ar,
        rd,
        depth,
    })
}

/// Connected components of the (symmetrised) redundancy relation.
pub fn redundancy_classes(rd: &[Vec<u8>]) -> Vec<Vec<usize>> {
    let n = rd.len();
    let mut comp = vec![usize::MAX; n];
    let mut groups = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let g = groups.len();
        let mut members = vec![s];
        comp[s] = g;
        let mut k = 0;
        while k < members.len() {
            let u = members[k];
            for v in 0..n {
                if comp[v] == usize::MAX && (rd[u][v] != 0 || rd[v][u] != 0) {
                    comp[v] = g;
                    members.push(v);
                }
            }
            k += 1;
        }
        members.sort_unstable();
        groups.push(members);
    }
    groups
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "ERROR",
            Severity::Warning => "WARNING",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
}

impl core::fmt::Display for Finding {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{} {} {}", self.severity.as_str(), self.code, self.message)
    }
}

/// Structural checks on a compiled model. An empty list means valid.
pub fn validate(robot: &Robot) -> Vec<Finding> {
    let mut out = Vec::new();
    let mut err = |code, message| out.push(Finding { severity: Severity::Error, code, message });

    for (i, row) in robot.j.iter().enumerate() {
        for (k, &c) in row.iter().enumerate() {
            if !matches!(c, 0..=3) {
                err("joint-type", format!("joint {} -> {} has type code {c}, expected R/P/F", robot.links[i].name, robot.links[k].name));
            }
        }
    }
    for j in &robot.joints {
        if j.kind == JointType::Generalized {
            err("joint-type", format!("joint {} is generalized; only R/P/F may be declared", j.name));
        }
    }
    for a in &robot.actuators {
        let (lo, hi) = a.bounds;
        if !(lo < hi) {
            err("bounds", format!("actuator {}: inverted bounds [{lo}, {hi}]", a.name));
        } else if lo < 0.0 {
            err("bounds", format!("actuator {}: negative lower bound {lo}", a.name));
        }
    }
    let na = robot.rd.len();
    for i in 0..na {
        if robot.rd[i][i] != 1 {
            err("redundancy-diagonal", format!("actuator {}: redundancy diagonal must be 1", robot.actuators[i].name));
        }
        for k in (i + 1)..na {
            if robot.rd[i][k] != robot.rd[k][i] {
                err(
                    "redundancy-symmetry",
                    format!("redundancy not symmetric between {} and {}", robot.actuators[i].name, robot.actuators[k].name),
                );
            }
        }
    }
    let mut seen = vec![0usize; na];
    for (g, members) in robot.groups.iter().enumerate() {
        if members.is_empty() {
            err("redundancy-class", format!("redundancy class {g} is empty"));
        }
        for &m in members {
            seen[m] += 1;
            for &o in members {
                if robot.rd[m][o] == 0 && robot.rd[o][m] == 0 {
                    err(
                        "redundancy-class",
                        format!("redundancy class {g} is not transitive ({} / {})", robot.actuators[m].name, robot.actuators[o].name),
                    );
                }
            }
        }
    }
    for (i, &count) in seen.iter().enumerate() {
        if count != 1 {
            err("redundancy-class", format!("actuator {} belongs to {count} redundancy classes", robot.actuators[i].name));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn link(name: &str) -> LinkSpec {
        LinkSpec { name: name.into(), transformation: Pose::default(), visual: Visual::unit_box() }
    }

    fn joint(name: &str, p: &str, c: &str, kind: JointKind, at: Vec3) -> JointSpec {
        let axis = (kind != JointKind::Fixed).then_some([0.0, 0.0, 1.0]);
        JointSpec { name: name.into(), parent: p.into(), child: c.into(), kind, origin: Pose::at(at), axis }
    }

    #[test]
    fn fixed_pair_merges() {
        let d = RobotDescription {
            name: "m".into(),
            links: vec![link("a"), link("b")],
            joints: vec![joint("f", "a", "b", JointKind::Fixed, [1.0, 0.0, 0.0])],
            actuators: vec![],
        };
        let r = compile(&d).unwrap();
        assert_eq!(r.links.len(), 1);
        assert_eq!(r.links[0].visuals.len(), 2);
        assert_eq!(r.links[0].visuals[1].offset.translation, [1.0, 0.0, 0.0]);
        assert_eq!(r.link_id("b"), Some(0));
    }

    #[test]
    fn two_bases_rejected() {
        let d = RobotDescription { name: "m".into(), links: vec![link("a"), link("b")], joints: vec![], actuators: vec![] };
        assert!(matches!(compile(&d), Err(CompileError::MultipleBases(_))));
    }

    #[test]
    fn fixed_ring_rejected() {
        let d = RobotDescription {
            name: "m".into(),
            links: vec![link("base"), link("a"), link("b"), link("c")],
            joints: vec![
                joint("ab", "a", "b", JointKind::Fixed, [0.0; 3]),
                joint("bc", "b", "c", JointKind::Fixed, [0.0; 3]),
                joint("ca", "c", "a", JointKind::Fixed, [0.0; 3]),
            ],
            actuators: vec![],
        };
        assert!(matches!(compile(&d), Err(CompileError::Cycle(_))));
    }

    #[test]
    fn unresolved_names_are_reported() {
        let d = RobotDescription {
            name: "m".into(),
            links: vec![link("a")],
            joints: vec![joint("j", "a", "armX", JointKind::Revolute, [0.0; 3])],
            actuators: vec![],
        };
        let e = d.check().unwrap_err();
        assert!(e.to_string().contains("armX"));
    }

    #[test]
    fn fixed_with_axis_rejected() {
        let mut j = joint("f", "a", "b", JointKind::Fixed, [0.0; 3]);
        j.axis = Some([1.0, 0.0, 0.0]);
        let d = RobotDescription { name: "m".into(), links: vec![link("a"), link("b")], joints: vec![j], actuators: vec![] };
        assert_eq!(d.check(), Err(DescriptionError::UnexpectedAxis("f".into())));
    }
}
