//! Four-bar detection and contraction, actuator locking, and extraction of
//! each redundancy group's independent path (ITEP).
//!
//! Joint matrices are `Vec<Vec<u8>>` with the codes of
//! [`JointType::code`](crate::geometry::JointType::code); 0 means no joint.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::geometry::JointType;
use crate::mrdf::{LinkRole, Robot};

pub type JointMatrix = Vec<Vec<u8>>;

const R: u8 = 1;
const P: u8 = 2;
const F: u8 = 3;
const G: u8 = 4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TopologyError {
    #[error("unsupported loop through {links:?}: {reason}")]
    UnsupportedLoop { links: Vec<String>, reason: String },
    #[error("joint graph still cyclic after four-bar contraction (links {0:?})")]
    CyclicAfterContraction(Vec<String>),
    #[error("actuator {0}: tube and rod parents are not connected in either direction")]
    Inconsistent(String),
    #[error("actuator {actuator}: path {path:?} matches no ITEP type ({reason})")]
    Incomplete { actuator: String, path: Vec<usize>, reason: String },
}

/// A planar four-bar `a → b → c → d` closed by the fixed pair `d ↔ a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FourBar {
    /// Ground first, then along the directed revolute chain.
    pub links: [usize; 4],
    pub j_ab: usize,
    pub j_bc: usize,
    pub j_cd: usize,
    /// Closure pair: `[d → a, a → d]`.
    pub closure: [usize; 2],
}

impl FourBar {
    pub fn ground(&self) -> usize {
        self.links[0]
    }

    pub fn members(&self) -> [usize; 3] {
        [self.links[1], self.links[2], self.links[3]]
    }

    /// The designated input joint.
    pub fn input(&self) -> usize {
        self.j_ab
    }
}

/// Target of a generalized edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneralizedEdge {
    pub four_bar: usize,
    pub member: usize,
    pub input_joint: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractedGraph {
    pub j: JointMatrix,
    pub registry: BTreeMap<(usize, usize), GeneralizedEdge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ItepKind {
    A,
    B,
    C,
    D,
}

impl ItepKind {
    pub fn letter(self) -> char {
        match self {
            ItepKind::A => 'A',
            ItepKind::B => 'B',
            ItepKind::C => 'C',
            ItepKind::D => 'D',
        }
    }
}

/// What the scalar FK problem of an ITEP actually moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Driver {
    /// Types A and B: one prismatic or revolute joint.
    Joint { joint: usize },
    /// Type C: a four-bar through its input joint.
    FourBar { four_bar: usize },
    /// Type D: the inner four-bar's input drives the loop; `joint` is the
    /// revolute edge re-solved so that `locked` keeps its length.
    Loop { four_bar: usize, joint: usize, locked: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Itep {
    /// Representative (smallest ID) of the redundancy group.
    pub actuator: usize,
    pub members: Vec<usize>,
    pub kind: ItepKind,
    /// Link path between the actuator parents; for D, the merged loop path.
    pub path: Vec<usize>,
    pub driver: Driver,
    /// For D: loop links with the locked tube/rod pair counted once.
    pub loop_links: Vec<usize>,
}

impl Itep {
    /// Planar Chebychev–Grübler–Kutzbach mobility of the local loop.
    pub fn loop_mobility(&self) -> Option<i64> {
        if self.loop_links.is_empty() {
            return None;
        }
        let n = self.loop_links.len() as i64;
        Some(3 * (n - 1) - 2 * n)
    }
}

/// Result of locking one actuator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lock {
    Direct { path: Vec<usize> },
    Indirect { path: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub four_bars: Vec<FourBar>,
    pub contracted: ContractedGraph,
    /// One per redundancy group, in group order.
    pub iteps: Vec<Itep>,
    /// Actuator ID → index into `iteps`.
    pub itep_of: Vec<usize>,
}

impl Topology {
    pub fn build(robot: &Robot) -> Result<Self, TopologyError> {
        let four_bars = find_four_bars(robot)?;
        let contracted = contract_four_bars(robot, &four_bars)?;
        let iteps = extract_iteps(robot, &contracted)?;
        let mut itep_of = vec![0; robot.actuators.len()];
        for (k, it) in iteps.iter().enumerate() {
            for &m in &it.members {
                itep_of[m] = k;
            }
        }
        Ok(Self { four_bars, contracted, iteps, itep_of })
    }

    pub fn itep(&self, actuator: usize) -> &Itep {
        &self.iteps[self.itep_of[actuator]]
    }

    /// Per-actuator type counts `[A, B, C, D]`.
    pub fn histogram(&self) -> [usize; 4] {
        let mut h = [0; 4];
        for &k in &self.itep_of {
            h[self.iteps[k].kind as usize] += 1;
        }
        h
    }

    /// DOT digraph over body links: contracted joints plus ACT edges.
    pub fn to_dot(&self, robot: &Robot) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph \"{}\" {{", robot.name);
        for (i, l) in robot.links.iter().enumerate() {
            if l.role == LinkRole::Body {
                let _ = writeln!(s, "  L{i} [label=\"L{i} {}\"];", l.name);
            }
        }
        for (p, row) in self.contracted.j.iter().enumerate() {
            for (c, &code) in row.iter().enumerate() {
                if code == 0 || robot.links[p].role != LinkRole::Body || robot.links[c].role != LinkRole::Body {
                    continue;
                }
                let label = JointType::from_code(code).map(|t| t.letter()).unwrap_or('?');
                let _ = writeln!(s, "  L{p} -> L{c} [label=\"{label}\"];");
            }
        }
        for (i, a) in robot.actuators.iter().enumerate() {
            let kind = self.itep(i).kind.letter();
            let _ = writeln!(
                s,
                "  L{} -> L{} [label=\"ACT {} ({kind})\", style=dashed];",
                a.tube_parent, a.rod_parent, a.name
            );
        }
        s.push_str("}\n");
        s
    }
}

// ---------------------------------------------------------------------------
// Step 1: strongly connected components
// ---------------------------------------------------------------------------

/// Tarjan's algorithm, iterative. Components come out in reverse
/// topological order; each is sorted ascending.
pub fn strongly_connected_components(j: &JointMatrix) -> Vec<Vec<usize>> {
    let n = j.len();
    let adj: Vec<Vec<usize>> = j.iter().map(|row| (0..n).filter(|&k| row[k] != 0).collect()).collect();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut next = 0;

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            if *edge < adj[v].len() {
                let w = adj[v][*edge];
                *edge += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                out.push(comp);
            }
        }
    }
    out
}

fn names(robot: &Robot, ids: &[usize]) -> Vec<String> {
    ids.iter().map(|&i| robot.links[i].name.clone()).collect()
}

/// Every 4-link SCC as a canonical [`FourBar`], ordered by ground then ID.
pub fn find_four_bars(robot: &Robot) -> Result<Vec<FourBar>, TopologyError> {
    let mut bars = Vec::new();
    for comp in strongly_connected_components(&robot.j) {
        match comp.len() {
            1 | 2 => continue,
            4 => bars.push(canonical_four_bar(robot, &comp)?),
            k => {
                return Err(TopologyError::UnsupportedLoop {
                    links: names(robot, &comp),
                    reason: format!("loop of {k} links; only four-bars are supported"),
                })
            }
        }
    }
    bars.sort_by_key(|b| b.links);
    Ok(bars)
}

fn canonical_four_bar(robot: &Robot, comp: &[usize]) -> Result<FourBar, TopologyError> {
    let unsupported = |reason: &str| TopologyError::UnsupportedLoop { links: names(robot, comp), reason: reason.into() };
    let a = *comp.iter().min_by_key(|&&i| (robot.depth[i], i)).unwrap();
    let mut chain = vec![a];
    let mut joints = Vec::new();
    while chain.len() < 4 {
        let cur = *chain.last().unwrap();
        let next: Vec<usize> = comp
            .iter()
            .copied()
            .filter(|&x| !chain.contains(&x) && robot.j[cur][x] == R)
            .collect();
        let [x] = next.as_slice() else {
            return Err(unsupported("members are not a single directed revolute chain from the ground"));
        };
        joints.push(robot.joint_between(cur, *x).unwrap());
        chain.push(*x);
    }
    let d = chain[3];
    let (Some(da), Some(ad)) = (robot.joint_between(d, a), robot.joint_between(a, d)) else {
        return Err(unsupported("no closure pair between the last member and the ground"));
    };
    if !(robot.joints[da].is_closure() && robot.joints[ad].is_closure()) {
        return Err(unsupported("closure between last member and ground must be a fixed pair"));
    }
    Ok(FourBar {
        links: [a, chain[1], chain[2], d],
        j_ab: joints[0],
        j_bc: joints[1],
        j_cd: joints[2],
        closure: [da, ad],
    })
}

// ---------------------------------------------------------------------------
// Step 2: contraction
// ---------------------------------------------------------------------------

pub fn contract_four_bars(robot: &Robot, bars: &[FourBar]) -> Result<ContractedGraph, TopologyError> {
    let mut j = robot.j.clone();
    let mut registry = BTreeMap::new();
    for (k, fb) in bars.iter().enumerate() {
        let [a, b, c, d] = fb.links;
        for (p, q) in [(a, b), (b, c), (c, d), (d, a), (a, d)] {
            j[p][q] = 0;
        }
        let members = fb.members();
        for x in members {
            let has_out = j[x].iter().any(|&code| code != 0);
            let is_parent = robot.actuators.iter().any(|act| act.tube_parent == x || act.rod_parent == x);
            if has_out || is_parent {
                j[a][x] = G;
                registry.insert((a, x), GeneralizedEdge { four_bar: k, member: x, input_joint: fb.j_ab });
            }
        }
        for act in &robot.actuators {
            let (u, v) = (act.tube_parent, act.rod_parent);
            if u != v && members.contains(&u) && members.contains(&v) {
                j[u][v] = G;
                registry.insert((u, v), GeneralizedEdge { four_bar: k, member: v, input_joint: fb.j_ab });
            }
        }
    }

    // Acyclicity over body links (tube/rod links are actuator plumbing).
    let body: Vec<usize> = (0..j.len()).filter(|&i| robot.links[i].role == LinkRole::Body).collect();
    let mut indeg = vec![0usize; j.len()];
    for &p in &body {
        for &c in &body {
            if j[p][c] != 0 {
                indeg[c] += 1;
            }
        }
    }
    let mut queue: VecDeque<usize> = body.iter().copied().filter(|&i| indeg[i] == 0).collect();
    let mut done = 0;
    while let Some(p) = queue.pop_front() {
        done += 1;
        for &c in &body {
            if j[p][c] != 0 {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
    }
    if done != body.len() {
        let stuck: Vec<usize> = body.iter().copied().filter(|&i| indeg[i] > 0).collect();
        return Err(TopologyError::CyclicAfterContraction(names(robot, &stuck)));
    }
    Ok(ContractedGraph { j, registry })
}

// ---------------------------------------------------------------------------
// Paths, locking, classification
// ---------------------------------------------------------------------------

/// Shortest directed path `from → to` (both included) by BFS with ascending
/// neighbour order; empty when unreachable.
pub fn topo_path(j: &JointMatrix, from: usize, to: usize) -> Vec<usize> {
    topo_path_masked(j, from, to, |_, _| true)
}

/// As [`topo_path`], traversing only edges for which `allow(p, c)` holds.
pub fn topo_path_masked(j: &JointMatrix, from: usize, to: usize, allow: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let n = j.len();
    if from >= n || to >= n {
        return Vec::new();
    }
    if from == to {
        return vec![from];
    }
    let mut prev = vec![usize::MAX; n];
    prev[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(p) = queue.pop_front() {
        for c in 0..n {
            if j[p][c] == 0 || prev[c] != usize::MAX || !allow(p, c) {
                continue;
            }
            prev[c] = p;
            if c == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return path;
            }
            queue.push_back(c);
        }
    }
    Vec::new()
}

/// Locks one actuator in the working graph `j`.
pub fn lock_actuator(j: &mut JointMatrix, robot: &Robot, actuator: usize) -> Result<Lock, TopologyError> {
    let act = &robot.actuators[actuator];
    let (pt, pr, t, r) = (act.tube_parent, act.rod_parent, act.tube, act.rod);
    let path = topo_path(j, pt, pr);
    if !path.is_empty() {
        if path.len() == 2 {
            j[pt][pr] = F;
            return Ok(Lock::Direct { path });
        }
        j[r][t] = F;
        j[t][pt] = R;
        j[pt][t] = 0;
        return Ok(Lock::Indirect { path });
    }
    let path = topo_path(j, pr, pt);
    if path.is_empty() {
        return Err(TopologyError::Inconsistent(act.name.clone()));
    }
    if path.len() == 2 {
        j[pr][pt] = F;
        return Ok(Lock::Direct { path });
    }
    j[t][r] = F;
    j[r][pr] = R;
    j[pr][r] = 0;
    Ok(Lock::Indirect { path })
}

/// Concatenates `a` (i..j) and `b` (j..i) into the loop `[i..j..i]`.
pub fn merge_paths(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = a.to_vec();
    out.extend_from_slice(b.get(1..).unwrap_or(&[]));
    out
}

/// One ITEP per redundancy group, in group order.
pub fn extract_iteps(robot: &Robot, contracted: &ContractedGraph) -> Result<Vec<Itep>, TopologyError> {
    let mut out = Vec::with_capacity(robot.groups.len());
    for (g, members) in robot.groups.iter().enumerate() {
        let i = members[0];
        let mut j = contracted.j.clone();
        let mut locks: Vec<(usize, Lock)> = Vec::new();
        for k in 0..robot.actuators.len() {
            if robot.actuators[k].group != g {
                locks.push((k, lock_actuator(&mut j, robot, k)?));
            }
        }
        let mut itep = classify_itep(robot, contracted, &j, i, &locks)?;
        itep.members = members.clone();
        out.push(itep);
    }
    Ok(out)
}

/// Classifies actuator `i` on the locked working graph `j`.
pub fn classify_itep(
    robot: &Robot,
    contracted: &ContractedGraph,
    j: &JointMatrix,
    i: usize,
    locks: &[(usize, Lock)],
) -> Result<Itep, TopologyError> {
    let act = &robot.actuators[i];
    let (pt, pr) = (act.tube_parent, act.rod_parent);
    let pa = topo_path(j, pt, pr);
    let pb = topo_path(j, pr, pt);
    let incomplete = |path: &[usize], reason: String| TopologyError::Incomplete {
        actuator: act.name.clone(),
        path: path.to_vec(),
        reason,
    };

    if !pa.is_empty() && !pb.is_empty() {
        let merged = merge_paths(&pa, &pb);
        let cycle = &merged[..merged.len() - 1];
        let locked = locks.iter().find_map(|(k, lock)| match lock {
            Lock::Indirect { path } => {
                let a = &robot.actuators[*k];
                cycle.iter().any(|&x| x == a.tube || x == a.rod).then(|| (*k, path.clone()))
            }
            Lock::Direct { .. } => None,
        });
        let Some((k, lpath)) = locked else {
            return Err(incomplete(&merged, "loop without an indirectly locked actuator".into()));
        };
        let ka = &robot.actuators[k];
        let mut loop_links: Vec<usize> = Vec::new();
        for &x in cycle {
            let x = if x == ka.rod { ka.tube } else { x };
            if !loop_links.contains(&x) {
                loop_links.push(x);
            }
        }
        let loop_err = |reason: String| TopologyError::UnsupportedLoop { links: names(robot, &loop_links), reason };
        if lpath.len() != 3 || loop_links.len() != 4 {
            return Err(loop_err(format!(
                "local loop has {} links (locked path length {}), expected 4 and 3",
                loop_links.len(),
                lpath.len()
            )));
        }
        let e1 = (lpath[0], lpath[1]);
        let e2 = (lpath[1], lpath[2]);
        let (ge, re) = match (j[e1.0][e1.1], j[e2.0][e2.1]) {
            (G, R) => (e1, e2),
            (R, G) => (e2, e1),
            (c1, c2) => {
                return Err(loop_err(format!("loop joints {}-{} unsupported; only G-R and R-G", code_letter(c1), code_letter(c2))))
            }
        };
        let four_bar = contracted.registry[&ge].four_bar;
        let joint = robot.joint_between(re.0, re.1).unwrap();
        return Ok(Itep {
            actuator: i,
            members: Vec::new(),
            kind: ItepKind::D,
            path: merged,
            driver: Driver::Loop { four_bar, joint, locked: k },
            loop_links,
        });
    }

    let path = if !pa.is_empty() { pa } else { pb };
    if path.is_empty() {
        return Err(TopologyError::Inconsistent(act.name.clone()));
    }
    let movable: Vec<(usize, usize)> = path.windows(2).map(|w| (w[0], w[1])).filter(|&(p, c)| j[p][c] != F).collect();
    let [(u, v)] = movable.as_slice() else {
        return Err(incomplete(&path, format!("{} movable joints on the path, expected 1", movable.len())));
    };
    let (kind, driver) = match j[*u][*v] {
        P => (ItepKind::A, Driver::Joint { joint: robot.joint_between(*u, *v).unwrap() }),
        R => (ItepKind::B, Driver::Joint { joint: robot.joint_between(*u, *v).unwrap() }),
        G => (ItepKind::C, Driver::FourBar { four_bar: contracted.registry[&(*u, *v)].four_bar }),
        c => return Err(incomplete(&path, format!("joint code {c} between parents"))),
    };
    Ok(Itep { actuator: i, members: Vec::new(), kind, path, driver, loop_links: Vec::new() })
}

fn code_letter(c: u8) -> char {
    JointType::from_code(c).map(|t| t.letter()).unwrap_or('0')
}
