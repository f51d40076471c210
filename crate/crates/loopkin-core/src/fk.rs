//! Forward kinematics: per-ITEP scalar root solves, four-bar closures,
//! the sequential solver and the look-at refinement.

use alloc::string::String;
use alloc::vec::Vec;

use crate::geometry::{
    cross, dot, joint_transform, norm, scale, sub, GeometryError, JointType, Transform, Vec3,
};
use crate::math::{abs, atan2};
use crate::mrdf::Robot;
use crate::topology::{Driver, FourBar, Itep, Topology};

/// Current joint parameters with cached link poses and actuator lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    /// One parameter per joint (radians or meters); zero for fixed joints.
    pub theta: Vec<f64>,
    /// World pose of every link.
    pub world: Vec<Transform>,
    /// Current length of every actuator.
    pub lengths: Vec<f64>,
}

impl Configuration {
    /// All joint parameters at zero, i.e. the modelled rest pose.
    pub fn rest(robot: &Robot) -> Self {
        Self::from_theta(robot, alloc::vec![0.0; robot.joints.len()])
    }

    pub fn from_theta(robot: &Robot, theta: Vec<f64>) -> Self {
        let mut c = Self { theta, world: Vec::new(), lengths: Vec::new() };
        c.refresh(robot);
        c
    }

    /// Recomputes cached poses and lengths from `theta`.
    pub fn refresh(&mut self, robot: &Robot) {
        self.world.clear();
        self.world.resize(robot.links.len(), Transform::IDENTITY);
        // Parents always carry smaller IDs than their children.
        for (i, link) in robot.links.iter().enumerate() {
            self.world[i] = match link.parent_joint {
                Some(ji) => self.world[robot.joints[ji].parent] * joint_rel(robot, &self.theta, ji),
                None => link.transform,
            };
        }
        self.lengths = (0..robot.actuators.len()).map(|a| actuator_length(robot, self, a)).collect();
    }

    pub fn link_pose(&self, link: usize) -> &Transform {
        &self.world[link]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FkOptions {
    /// Residual tolerance for every scalar and closure solve.
    pub tol: f64,
    pub max_iter: usize,
    /// Run the look-at refinement after all ITEPs are solved.
    pub look_at: bool,
}

impl Default for FkOptions {
    fn default() -> Self {
        Self { tol: 1e-6, max_iter: 50, look_at: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("no root found (best residual {residual:e})")]
    NoRoot { residual: f64 },
    #[error("loop closure did not converge (residual {residual:e}); configuration is singular or infeasible")]
    Singular { residual: f64 },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FkError {
    #[error("expected {expected} target lengths, got {got}")]
    LengthCount { expected: usize, got: usize },
    #[error("actuator {actuator}: target {target} is outside bounds [{lo}, {hi}]")]
    OutOfBounds { actuator: String, target: f64, lo: f64, hi: f64 },
    #[error("actuator {actuator}: target {target} disagrees with redundant peer {peer} ({other})")]
    PeerMismatch { actuator: String, target: f64, peer: String, other: f64 },
    #[error("actuator {actuator}: {reason}")]
    Solve { actuator: String, reason: SolveError },
}

// ---------------------------------------------------------------------------
// Pose evaluation straight from joint parameters
// ---------------------------------------------------------------------------

/// Transform from the parent link frame to the child link frame of a tree joint.
pub fn joint_rel(robot: &Robot, theta: &[f64], ji: usize) -> Transform {
    let j = &robot.joints[ji];
    let motion = joint_transform(j.kind, j.axis, theta[ji], &robot.links[j.child].transform)
        .unwrap_or_else(|e: GeometryError| panic!("compiled joint {}: {e}", j.name));
    j.origin * motion
}

/// World pose of `link` computed by walking up the tree.
pub fn pose_from_theta(robot: &Robot, theta: &[f64], link: usize) -> Transform {
    let mut t = Transform::IDENTITY;
    let mut cur = link;
    while let Some(ji) = robot.links[cur].parent_joint {
        t = joint_rel(robot, theta, ji) * t;
        cur = robot.joints[ji].parent;
    }
    robot.links[cur].transform * t
}

/// Pose of `link` in the frame of its tree ancestor `ancestor`.
fn relative_pose(robot: &Robot, theta: &[f64], ancestor: usize, link: usize) -> Transform {
    let mut t = Transform::IDENTITY;
    let mut cur = link;
    while cur != ancestor {
        let ji = robot.links[cur].parent_joint.expect("ancestor lies on the tree path");
        t = joint_rel(robot, theta, ji) * t;
        cur = robot.joints[ji].parent;
    }
    t
}

fn mount_origin(robot: &Robot, world_parent: &Transform, mount_joint: usize) -> Vec3 {
    world_parent.transform_point(robot.joints[mount_joint].origin.translation)
}

/// Distance between the tube and rod mount origins, from cached poses.
pub fn actuator_length(robot: &Robot, config: &Configuration, actuator: usize) -> f64 {
    let a = &robot.actuators[actuator];
    let t = mount_origin(robot, &config.world[a.tube_parent], a.tube_joint);
    let r = mount_origin(robot, &config.world[a.rod_parent], a.rod_joint);
    norm(sub(t, r))
}

pub fn length_from_theta(robot: &Robot, theta: &[f64], actuator: usize) -> f64 {
    let a = &robot.actuators[actuator];
    let t = mount_origin(robot, &pose_from_theta(robot, theta, a.tube_parent), a.tube_joint);
    let r = mount_origin(robot, &pose_from_theta(robot, theta, a.rod_parent), a.rod_joint);
    norm(sub(t, r))
}

/// Pin mismatch of a closure pair `d → a`, expressed in `a`'s frame when `a`
/// is a tree ancestor of `d`, else in the world frame.
pub fn closure_residual(robot: &Robot, theta: &[f64], closure_joint: usize) -> Vec3 {
    let j = &robot.joints[closure_joint];
    let partner = &robot.joints[j.closure_partner.expect("closure joint")];
    let (d, a) = (j.parent, j.child);
    if is_ancestor(robot, a, d) {
        let pin_d = relative_pose(robot, theta, a, d).transform_point(j.origin.translation);
        sub(pin_d, partner.origin.translation)
    } else {
        let pin_d = pose_from_theta(robot, theta, d).transform_point(j.origin.translation);
        let pin_a = pose_from_theta(robot, theta, a).transform_point(partner.origin.translation);
        sub(pin_d, pin_a)
    }
}

fn is_ancestor(robot: &Robot, ancestor: usize, link: usize) -> bool {
    let mut cur = link;
    loop {
        if cur == ancestor {
            return true;
        }
        match robot.links[cur].parent_joint {
            Some(ji) => cur = robot.joints[ji].parent,
            None => return false,
        }
    }
}

/// Norms of every closure pair's residual, one entry per pair.
pub fn closure_residuals(robot: &Robot, config: &Configuration) -> Vec<f64> {
    robot
        .joints
        .iter()
        .enumerate()
        .filter(|(i, j)| j.closure_partner.is_some_and(|p| p > *i))
        .map(|(i, _)| norm(closure_residual(robot, &config.theta, i)))
        .collect()
}

// ---------------------------------------------------------------------------
// Scalar root finding
// ---------------------------------------------------------------------------

/// One-dimensional root problem `f(θ) = 0` on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootProblem {
    pub theta0: f64,
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl RootProblem {
    pub fn new(theta0: f64, lo: f64, hi: f64) -> Self {
        Self { theta0, lo, hi, tol: 1e-6, max_iter: 50 }
    }

    /// Default bracket for a joint parameter: ±π for revolute joints,
    /// ±`span` for prismatic ones.
    pub fn around(theta0: f64, kind: JointType, span: f64) -> Self {
        let w = if kind == JointType::Prismatic { span } else { core::f64::consts::PI };
        Self::new(theta0, theta0 - w, theta0 + w)
    }
}

fn fd_step(theta: f64) -> f64 {
    1e-7 * theta.abs().max(1.0)
}

/// Damped Newton with central differences and a bisection fallback.
///
/// `f` returns `None` where the residual cannot be evaluated (e.g. an
/// unassemblable loop); such points are avoided.
pub fn solve_scalar_root(p: &RootProblem, mut f: impl FnMut(f64) -> Option<f64>) -> Result<f64, SolveError> {
    let mut best = f64::INFINITY;
    let mut x = p.theta0.clamp(p.lo, p.hi);
    if let Some(mut r) = f(x).filter(|r| r.is_finite()) {
        best = abs(r);
        let mut polish = 0;
        let (mut lo, mut hi) = (p.lo, p.hi);
        let mut slope = 0.0;
        for _ in 0..p.max_iter {
            let converged = abs(r) <= p.tol;
            if converged {
                if polish == 2 || r == 0.0 {
                    return Ok(x);
                }
                polish += 1;
            }
            // Polish steps are taken whole or not at all: at the noise floor
            // a line search only burns evaluations.
            let halvings = if converged { 0 } else { 30 };
            let Some((x1, r1, d)) = newton_step(&mut f, x, r, lo, hi, halvings) else { break };
            // A slope reversal means an extremum was stepped over, possibly
            // onto another branch; the scan picks the root nearest θ₀.
            if abs(r1) >= abs(r) || d * slope < 0.0 {
                break;
            }
            slope = d;
            if r1.signum() != r.signum() {
                (lo, hi) = if x < x1 { (x, x1) } else { (x1, x) };
            }
            x = x1;
            r = r1;
            best = best.min(abs(r));
        }
        if abs(r) <= p.tol {
            return Ok(x);
        }
    }
    bisection_scan(p, &mut f, &mut best).ok_or(SolveError::NoRoot { residual: best })
}

/// Damped Newton step inside `[lo, hi]` with up to `halvings` step
/// halvings; returns the new point, its residual and the slope used.
fn newton_step(
    f: &mut impl FnMut(f64) -> Option<f64>,
    x: f64,
    r: f64,
    lo: f64,
    hi: f64,
    halvings: usize,
) -> Option<(f64, f64, f64)> {
    let h = fd_step(x);
    let d = (f(x + h)? - f(x - h)?) / (2.0 * h);
    if !d.is_finite() || d == 0.0 {
        return None;
    }
    let mut step = -r / d;
    for _ in 0..=halvings {
        let x1 = x + step;
        if x1 >= lo && x1 <= hi {
            if let Some(r1) = f(x1).filter(|v| v.is_finite()) {
                if abs(r1) < abs(r) {
                    return Some((x1, r1, d));
                }
            }
        }
        step *= 0.5;
    }
    None
}

/// Scans outward from `theta0` for the nearest sign change, then bisects.
fn bisection_scan(p: &RootProblem, f: &mut impl FnMut(f64) -> Option<f64>, best: &mut f64) -> Option<f64> {
    const CELLS: usize = 128;
    let x0 = p.theta0.clamp(p.lo, p.hi);
    let dx = (p.hi - p.lo) / CELLS as f64;
    if !(dx > 0.0) {
        return None;
    }
    let mut sides = [(x0, f(x0)), (x0, f(x0))];
    for k in 1..=CELLS {
        for (s, dir) in [(0usize, 1.0), (1usize, -1.0)] {
            let (xa, fa) = sides[s];
            let xb = (x0 + dir * k as f64 * dx).clamp(p.lo, p.hi);
            if xb == xa {
                continue;
            }
            let fb = f(xb).filter(|v| v.is_finite());
            if let Some(v) = fb {
                *best = best.min(abs(v));
                if abs(v) <= p.tol {
                    return Some(xb);
                }
            }
            if let (Some(a), Some(b)) = (fa, fb) {
                if a.signum() != b.signum() {
                    if let Some(x) = bisect(p, f, xa, a, xb, best) {
                        return Some(x);
                    }
                }
            }
            sides[s] = (xb, fb);
        }
    }
    None
}

fn bisect(p: &RootProblem, f: &mut impl FnMut(f64) -> Option<f64>, mut a: f64, mut fa: f64, mut b: f64, best: &mut f64) -> Option<f64> {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m).filter(|v| v.is_finite())?;
        *best = best.min(abs(fm));
        if abs(fm) <= p.tol {
            // A couple of Newton steps remove bisection's residual noise.
            let mut x = m;
            let mut r = fm;
            for _ in 0..2 {
                match newton_step(f, x, r, a.min(b), a.max(b), 0) {
                    Some((x1, r1, _)) => {
                        x = x1;
                        r = r1;
                    }
                    None => break,
                }
            }
            return Some(x);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        if abs(b - a) < 1e-15 {
            return None;
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Four-bar closure
// ---------------------------------------------------------------------------

/// Solves the coupler and follower angles `(α, β)` of `fb` for the input
/// already stored in `theta`, warm-started from the stored values. Writes the
/// solution into `theta`.
pub fn solve_four_bar_closure(robot: &Robot, fb: &FourBar, theta: &mut [f64], tol: f64, max_iter: usize) -> Result<(f64, f64), SolveError> {
    let (ja, jb) = (fb.j_bc, fb.j_cd);
    let res = |th: &mut [f64], a: f64, b: f64| {
        th[ja] = a;
        th[jb] = b;
        closure_residual(robot, th, fb.closure[0])
    };
    let (mut a, mut b) = (theta[ja], theta[jb]);
    let mut r = res(theta, a, b);
    let mut polish = 0;
    for _ in 0..max_iter {
        let rn = norm(r);
        if !rn.is_finite() {
            break;
        }
        let converged = rn <= tol;
        if converged {
            if polish == 2 || rn == 0.0 {
                break;
            }
            polish += 1;
        }
        let (ha, hb) = (fd_step(a), fd_step(b));
        let ca = scale(sub(res(theta, a + ha, b), r), 1.0 / ha);
        let cb = scale(sub(res(theta, a, b + hb), r), 1.0 / hb);
        // Normal equations of the 3×2 Gauss–Newton step.
        let (aa, ab, bb) = (dot(ca, ca), dot(ca, cb), dot(cb, cb));
        let (ga, gb) = (dot(ca, r), dot(cb, r));
        let det = aa * bb - ab * ab;
        if !(abs(det) > 1e-18 * (aa * bb).max(1e-300)) {
            break;
        }
        let mut da = -(bb * ga - ab * gb) / det;
        let mut db = -(aa * gb - ab * ga) / det;
        let mut improved = false;
        for _ in 0..if converged { 1 } else { 20 } {
            let r1 = res(theta, a + da, b + db);
            if norm(r1) < rn {
                a += da;
                b += db;
                r = r1;
                improved = true;
                break;
            }
            da *= 0.5;
            db *= 0.5;
        }
        if !improved {
            break;
        }
    }
    theta[ja] = a;
    theta[jb] = b;
    let rn = norm(r);
    if rn <= tol {
        Ok((a, b))
    } else {
        Err(SolveError::Singular { residual: rn })
    }
}

// ---------------------------------------------------------------------------
// Per-ITEP solve
// ---------------------------------------------------------------------------

/// Drives the ITEP's representative actuator to `target`, mutating `theta`.
/// Only joints on the ITEP change.
pub fn solve_itep_theta(
    robot: &Robot,
    topo: &Topology,
    itep: &Itep,
    target: f64,
    theta: &mut [f64],
    opts: &FkOptions,
) -> Result<(), SolveError> {
    let i = itep.actuator;
    let span = {
        let (lo, hi) = robot.actuators[i].bounds;
        hi - lo
    };
    let inner_tol = opts.tol * 1e-4;
    match itep.driver {
        Driver::Joint { joint } => {
            let mut p = RootProblem::around(theta[joint], robot.joints[joint].kind, span);
            p.tol = opts.tol;
            p.max_iter = opts.max_iter;
            let x = solve_scalar_root(&p, |x| {
                theta[joint] = x;
                Some(length_from_theta(robot, theta, i) - target)
            });
            theta[joint] = x?;
            Ok(())
        }
        Driver::FourBar { four_bar } => {
            let fb = &topo.four_bars[four_bar];
            let input = fb.input();
            let mut p = RootProblem::around(theta[input], JointType::Revolute, span);
            p.tol = opts.tol;
            p.max_iter = opts.max_iter;
            let mut good = theta.to_vec();
            let x = solve_scalar_root(&p, |x| {
                theta.copy_from_slice(&good);
                theta[input] = x;
                solve_four_bar_closure(robot, fb, theta, inner_tol, opts.max_iter).ok()?;
                good.copy_from_slice(theta);
                Some(length_from_theta(robot, theta, i) - target)
            })?;
            theta.copy_from_slice(&good);
            theta[input] = x;
            solve_four_bar_closure(robot, fb, theta, inner_tol, opts.max_iter)?;
            Ok(())
        }
        Driver::Loop { four_bar, joint, locked } => {
            let fb = &topo.four_bars[four_bar];
            let input = fb.input();
            let held = length_from_theta(robot, theta, locked);
            let mut p = RootProblem::around(theta[input], JointType::Revolute, span);
            p.tol = opts.tol;
            p.max_iter = opts.max_iter;
            let mut good = theta.to_vec();
            let x = solve_scalar_root(&p, |x| {
                theta.copy_from_slice(&good);
                theta[input] = x;
                solve_loop(robot, fb, joint, locked, held, theta, inner_tol, opts.max_iter).ok()?;
                good.copy_from_slice(theta);
                Some(length_from_theta(robot, theta, i) - target)
            })?;
            theta.copy_from_slice(&good);
            theta[input] = x;
            solve_loop(robot, fb, joint, locked, held, theta, inner_tol, opts.max_iter)?;
            Ok(())
        }
    }
}

/// Inner closure first, then the revolute edge that keeps `locked` at `held`.
#[allow(clippy::too_many_arguments)]
fn solve_loop(
    robot: &Robot,
    fb: &FourBar,
    joint: usize,
    locked: usize,
    held: f64,
    theta: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<(), SolveError> {
    solve_four_bar_closure(robot, fb, theta, tol, max_iter)?;
    let mut p = RootProblem::around(theta[joint], JointType::Revolute, 0.0);
    p.tol = tol;
    p.max_iter = max_iter;
    let x = solve_scalar_root(&p, |x| {
        theta[joint] = x;
        Some(length_from_theta(robot, theta, locked) - held)
    })?;
    theta[joint] = x;
    Ok(())
}

/// Solves one ITEP on a configuration and refreshes its caches.
pub fn solve_itep(
    robot: &Robot,
    topo: &Topology,
    actuator: usize,
    target: f64,
    config: &mut Configuration,
    opts: &FkOptions,
) -> Result<(), FkError> {
    let act = &robot.actuators[actuator];
    check_bounds(robot, actuator, target)?;
    let itep = topo.itep(actuator);
    let mut theta = config.theta.clone();
    let mut driven = itep.clone();
    driven.actuator = actuator;
    solve_itep_theta(robot, topo, &driven, target, &mut theta, opts)
        .map_err(|reason| FkError::Solve { actuator: act.name.clone(), reason })?;
    config.theta = theta;
    config.refresh(robot);
    Ok(())
}

fn check_bounds(robot: &Robot, actuator: usize, target: f64) -> Result<(), FkError> {
    let act = &robot.actuators[actuator];
    let (lo, hi) = act.bounds;
    if !(target >= lo && target <= hi) {
        return Err(FkError::OutOfBounds { actuator: act.name.clone(), target, lo, hi });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Sequential solver
// ---------------------------------------------------------------------------

/// Drives every actuator to its target length, one ITEP at a time in
/// ascending actuator order. On error `config` is left untouched.
pub fn forward_kinematics(
    robot: &Robot,
    topo: &Topology,
    targets: &[f64],
    config: &mut Configuration,
    opts: &FkOptions,
) -> Result<(), FkError> {
    let mut theta = config.theta.clone();
    if forward_kinematics_theta(robot, topo, targets, &mut theta, opts)? {
        config.theta = theta;
        config.refresh(robot);
    }
    Ok(())
}

/// [`forward_kinematics`] on bare joint parameters; returns whether any
/// parameter changed. `theta` is only meaningful on `Ok`.
pub fn forward_kinematics_theta(
    robot: &Robot,
    topo: &Topology,
    targets: &[f64],
    theta: &mut [f64],
    opts: &FkOptions,
) -> Result<bool, FkError> {
    let n = robot.actuators.len();
    if targets.len() != n {
        return Err(FkError::LengthCount { expected: n, got: targets.len() });
    }
    for (i, &t) in targets.iter().enumerate() {
        check_bounds(robot, i, t)?;
        for &peer in robot.peers(i) {
            if abs(targets[peer] - t) > 1e-6 {
                return Err(FkError::PeerMismatch {
                    actuator: robot.actuators[i].name.clone(),
                    target: t,
                    peer: robot.actuators[peer].name.clone(),
                    other: targets[peer],
                });
            }
        }
    }
    let mut changed = false;
    for group in &robot.groups {
        let rep = group[0];
        let current = length_from_theta(robot, theta, rep);
        if abs(targets[rep] - current) <= 1e-12 {
            continue;
        }
        let itep = topo.itep(rep);
        solve_itep_theta(robot, topo, itep, targets[rep], theta, opts)
            .map_err(|reason| FkError::Solve { actuator: robot.actuators[rep].name.clone(), reason })?;
        changed = true;
    }
    if opts.look_at {
        changed |= look_at_theta(robot, theta);
    }
    Ok(changed)
}

/// Active-actuator counts `[A, B, C, D]` for a target vector, counted per
/// actuator like the type histogram.
pub fn activity(robot: &Robot, topo: &Topology, targets: &[f64], config: &Configuration) -> [usize; 4] {
    let mut h = [0; 4];
    for group in &robot.groups {
        let rep = group[0];
        if abs(targets[rep] - config.lengths[rep]) > 1e-12 {
            h[topo.itep(rep).kind as usize] += group.len();
        }
    }
    h
}

// ---------------------------------------------------------------------------
// Look-at refinement
// ---------------------------------------------------------------------------

/// Signed angle about `axis` taking `u` onto `w` after projecting both onto
/// the plane normal to `axis`; `None` when either projection vanishes.
pub fn signed_angle_about(axis: Vec3, u: Vec3, w: Vec3) -> Option<f64> {
    let up = sub(u, scale(axis, dot(axis, u)));
    let wp = sub(w, scale(axis, dot(axis, w)));
    if norm(up) < 1e-12 || norm(wp) < 1e-12 {
        return None;
    }
    Some(atan2(dot(axis, cross(up, wp)), dot(up, wp)))
}

/// Turns every tube and rod so its x-axis faces the opposite mount.
/// Returns whether any angle changed.
pub fn look_at_theta(robot: &Robot, theta: &mut [f64]) -> bool {
    let mut changed = false;
    for a in &robot.actuators {
        let wt = pose_from_theta(robot, theta, a.tube_parent);
        let wr = pose_from_theta(robot, theta, a.rod_parent);
        let pt = mount_origin(robot, &wt, a.tube_joint);
        let pr = mount_origin(robot, &wr, a.rod_joint);
        for (world, joint, link, dir) in [(wt, a.tube_joint, a.tube, sub(pr, pt)), (wr, a.rod_joint, a.rod, sub(pt, pr))] {
            let j = &robot.joints[joint];
            let frame = world * j.origin;
            let w = frame.inverse().rotate(dir);
            let u = robot.links[link].transform.rotate([1.0, 0.0, 0.0]);
            if let Some(angle) = signed_angle_about(j.axis, u, w) {
                if abs(theta[joint] - angle) > 1e-12 {
                    theta[joint] = angle;
                    changed = true;
                }
            }
        }
    }
    changed
}

/// Look-at refinement on a configuration.
pub fn look_at_refine(robot: &Robot, config: &mut Configuration) {
    if look_at_theta(robot, &mut config.theta) {
        config.refresh(robot);
    }
}

/// Largest `|l − l*|` over all actuators.
pub fn max_length_residual(config: &Configuration, targets: &[f64]) -> f64 {
    config.lengths.iter().zip(targets).map(|(l, t)| abs(l - t)).fold(0.0, f64::max)
}
