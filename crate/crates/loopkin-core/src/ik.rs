//! Bound-constrained inverse kinematics by coordinate descent over actuator
//! lengths, with pluggable one-dimensional minimizers.

use alloc::vec::Vec;

use crate::fk::{forward_kinematics_theta, pose_from_theta, Configuration, FkError, FkOptions};
use crate::geometry::{pose_distance, Transform};
use crate::math::{abs, sqrt};
use crate::mrdf::Robot;
use crate::topology::{topo_path, Topology};

/// One-dimensional minimizer used for each coordinate update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Solver1d {
    #[default]
    Gss,
    Brent,
    Newton,
    Secant,
}

impl Solver1d {
    pub const ALL: [Solver1d; 4] = [Solver1d::Gss, Solver1d::Brent, Solver1d::Newton, Solver1d::Secant];

    pub fn name(self) -> &'static str {
        match self {
            Solver1d::Gss => "gss",
            Solver1d::Brent => "brent",
            Solver1d::Newton => "newton",
            Solver1d::Secant => "secant",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IkOptions {
    /// Outer convergence threshold on `|Ψᵏ − Ψᵏ⁻¹|`.
    pub tol: f64,
    pub max_iter: usize,
    pub solver: Solver1d,
    /// Number of starts; the first is always the initial configuration.
    pub starts: usize,
    pub fk: FkOptions,
}

impl Default for IkOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 200,
            solver: Solver1d::Gss,
            starts: 1,
            fk: FkOptions { look_at: false, ..FkOptions::default() },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IkProblem {
    pub end_effector: usize,
    pub target: Transform,
    pub initial: Configuration,
    pub options: IkOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IkResult {
    pub lengths: Vec<f64>,
    pub psi: f64,
    /// Ψ after every outer sweep.
    pub trace: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub evaluations: usize,
    /// Configuration at `lengths`, look-at refined.
    pub configuration: Configuration,
}

/// Ψ: Lie-algebra distance between the end-effector pose reached at
/// `lengths` and `target`. Runs FK on a scratch copy of `config`.
pub fn objective(
    robot: &Robot,
    topo: &Topology,
    lengths: &[f64],
    target: &Transform,
    end_effector: usize,
    config: &Configuration,
    opts: &FkOptions,
) -> Result<f64, FkError> {
    let mut theta = config.theta.clone();
    forward_kinematics_theta(robot, topo, lengths, &mut theta, opts)?;
    Ok(pose_distance(&pose_from_theta(robot, &theta, end_effector), target))
}

/// One representative per redundancy group whose tube or rod parent reaches
/// the end-effector in the contracted graph. A four-bar member without a
/// generalized edge of its own moves with every link of its four-bar.
pub fn relevant_actuators(robot: &Robot, topo: &Topology, end_effector: usize) -> Vec<bool> {
    let j = &topo.contracted.j;
    let mut anchors = alloc::vec![end_effector];
    for fb in &topo.four_bars {
        if fb.members().contains(&end_effector) && j[fb.ground()][end_effector] == 0 {
            anchors.extend(fb.links);
        }
    }
    (0..robot.actuators.len())
        .map(|i| {
            let a = &robot.actuators[i];
            robot.representative(i) == i
                && anchors.iter().any(|&e| {
                    !topo_path(j, a.tube_parent, e).is_empty() || !topo_path(j, a.rod_parent, e).is_empty()
                })
        })
        .collect()
}

const PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search on `[a, b]`; returns the final bracket midpoint.
/// Ties shrink the bracket from both sides.
pub fn golden_section_search(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut c = b - PHI * (b - a);
    let mut d = a + PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - PHI * (b - a);
            fc = f(c);
        } else if fc > fd {
            a = c;
            c = d;
            fc = fd;
            d = a + PHI * (b - a);
            fd = f(d);
        } else {
            a = c;
            b = d;
            c = b - PHI * (b - a);
            d = a + PHI * (b - a);
            fc = f(c);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Bounded Brent minimization (parabolic steps guarded by golden sections).
pub fn brent_minimize(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, xtol: f64) -> f64 {
    let sqrt_eps = sqrt(f64::EPSILON);
    let golden = 0.5 * (3.0 - sqrt(5.0));
    let sign = |v: f64| if v > 0.0 { 1.0 } else if v < 0.0 { -1.0 } else { 0.0 };
    let mut fulc = a + golden * (b - a);
    let mut nfc = fulc;
    let mut xf = fulc;
    let (mut rat, mut e) = (0.0f64, 0.0f64);
    let mut fx = f(xf);
    let mut ffulc = fx;
    let mut fnfc = fx;
    let mut xm = 0.5 * (a + b);
    let mut tol1 = sqrt_eps * abs(xf) + xtol / 3.0;
    let mut tol2 = 2.0 * tol1;
    for _ in 0..500 {
        if abs(xf - xm) <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut use_golden = true;
        if abs(e) > tol1 {
            use_golden = false;
            let mut r = (xf - nfc) * (fx - ffulc);
            let mut q = (xf - fulc) * (fx - fnfc);
            let mut p = (xf - fulc) * q - (xf - nfc) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = abs(q);
            r = e;
            e = rat;
            if abs(p) < abs(0.5 * q * r) && p > q * (a - xf) && p < q * (b - xf) {
                rat = p / q;
                let x = xf + rat;
                if x - a < tol2 || b - x < tol2 {
                    let si = sign(xm - xf) + if xm == xf { 1.0 } else { 0.0 };
                    rat = tol1 * si;
                }
            } else {
                use_golden = true;
            }
        }
        if use_golden {
            e = if xf >= xm { a - xf } else { b - xf };
            rat = golden * e;
        }
        let si = sign(rat) + if rat == 0.0 { 1.0 } else { 0.0 };
        let x = xf + si * abs(rat).max(tol1);
        let fu = f(x);
        if fu <= fx {
            if x >= xf {
                a = xf;
            } else {
                b = xf;
            }
            fulc = nfc;
            ffulc = fnfc;
            nfc = xf;
            fnfc = fx;
            xf = x;
            fx = fu;
        } else {
            if x < xf {
                a = x;
            } else {
                b = x;
            }
            if fu <= fnfc || nfc == xf {
                fulc = nfc;
                ffulc = fnfc;
                nfc = x;
                fnfc = fu;
            } else if fu <= ffulc || fulc == xf || fulc == nfc {
                fulc = x;
                ffulc = fu;
            }
        }
        xm = 0.5 * (a + b);
        tol1 = sqrt_eps * abs(xf) + xtol / 3.0;
        tol2 = 2.0 * tol1;
    }
    xf
}

fn fd_derivatives(f: &mut impl FnMut(f64) -> f64, x: f64, fx: f64, h: f64, a: f64, b: f64) -> (f64, f64) {
    // Shift the stencil inside the bracket near the bounds.
    let c = x.clamp(a + h, b - h);
    let (fl, fm, fr) = (f(c - h), if c == x { fx } else { f(c) }, f(c + h));
    ((fr - fl) / (2.0 * h), (fr - 2.0 * fm + fl) / (h * h))
}

/// Newton on the finite-difference derivative; `None` on breakdown.
fn newton_minimize(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64, x0: f64, f0: f64) -> Option<f64> {
    let h = (1e-4 * (b - a)).max(1e-9);
    let (mut x, mut fx) = (x0, f0);
    for _ in 0..50 {
        let (g, hess) = fd_derivatives(f, x, fx, h, a, b);
        if !g.is_finite() || !hess.is_finite() || hess <= 0.0 {
            return None;
        }
        let mut step = -g / hess;
        let mut accepted = false;
        for _ in 0..30 {
            let x1 = (x + step).clamp(a, b);
            let f1 = f(x1);
            if f1 <= fx {
                let moved = abs(x1 - x);
                x = x1;
                fx = f1;
                accepted = true;
                if moved < tol {
                    return Some(x);
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return Some(x);
        }
    }
    Some(x)
}

/// Secant iteration on the finite-difference slope; `None` on breakdown.
fn secant_minimize(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64, x0: f64, f0: f64) -> Option<f64> {
    let h = (1e-4 * (b - a)).max(1e-9);
    let slope = |f: &mut dyn FnMut(f64) -> f64, x: f64| {
        let c = x.clamp(a + h, b - h);
        (f(c + h) - f(c - h)) / (2.0 * h)
    };
    let mut f = |x: f64| f(x);
    let (mut x_prev, mut g_prev) = (x0, slope(&mut f, x0));
    if !g_prev.is_finite() {
        return None;
    }
    let mut x = (x0 - 0.01 * (b - a) * g_prev.signum()).clamp(a, b);
    if x == x_prev {
        x = if x0 - a > b - x0 { x0 - 0.01 * (b - a) } else { x0 + 0.01 * (b - a) };
    }
    let (mut best_x, mut best_f) = (x0, f0);
    for _ in 0..50 {
        let fx = f(x);
        if fx < best_f {
            best_x = x;
            best_f = fx;
        }
        let g = slope(&mut f, x);
        if !g.is_finite() {
            return None;
        }
        let dg = g - g_prev;
        if dg == 0.0 {
            return if g == 0.0 { Some(best_x) } else { None };
        }
        let x1 = (x - g * (x - x_prev) / dg).clamp(a, b);
        if abs(x1 - x) < tol {
            let f1 = f(x1);
            return Some(if f1 < best_f { x1 } else { best_x });
        }
        x_prev = x;
        g_prev = g;
        x = x1;
    }
    Some(best_x)
}

/// Minimizes `f` on `[a, b]`. Returns `(x, f(x))`; the warm start is kept
/// unless the candidate strictly improves on `f(warm)`.
pub fn minimize_1d(
    kind: Solver1d,
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    warm: f64,
    f_warm: f64,
) -> (f64, f64) {
    let x = match kind {
        Solver1d::Gss => golden_section_search(&mut f, a, b, tol),
        Solver1d::Brent => brent_minimize(&mut f, a, b, tol),
        Solver1d::Newton => newton_minimize(&mut f, a, b, tol, warm, f_warm)
            .unwrap_or_else(|| golden_section_search(&mut f, a, b, tol)),
        Solver1d::Secant => secant_minimize(&mut f, a, b, tol, warm, f_warm)
            .unwrap_or_else(|| golden_section_search(&mut f, a, b, tol)),
    };
    let x = x.clamp(a, b);
    let fx = f(x);
    if fx < f_warm {
        (x, fx)
    } else {
        (warm, f_warm)
    }
}

/// Point `k` of a golden-ratio additive sequence in `[0, 1)`.
fn sequence(k: usize, dim: usize) -> f64 {
    let v = (k as f64) * PHI + (dim as f64 + 1.0) * 0.754_877_666_246_692_7;
    v - libm::floor(v)
}

/// Coordinate-descent IK. Never fails: non-convergence is reported on the
/// result.
pub fn solve_ik(robot: &Robot, topo: &Topology, problem: &IkProblem) -> IkResult {
    let opts = &problem.options;
    let relevant = relevant_actuators(robot, topo, problem.end_effector);
    let init = &problem.initial;
    let mut best = descend(robot, topo, problem, &relevant, init.lengths.clone(), init.theta.clone());
    let mut evaluations = best.evaluations;
    for s in 1..opts.starts.max(1) {
        let mut lengths = init.lengths.clone();
        for (i, _) in relevant.iter().enumerate().filter(|(_, &r)| r) {
            let (lo, hi) = robot.actuators[i].bounds;
            let x = lo + sequence(s, i) * (hi - lo);
            for &p in robot.peers(i) {
                lengths[p] = x;
            }
        }
        let mut theta = init.theta.clone();
        evaluations += 1;
        if forward_kinematics_theta(robot, topo, &lengths, &mut theta, &opts.fk).is_err() {
            continue;
        }
        let r = descend(robot, topo, problem, &relevant, lengths, theta);
        evaluations += r.evaluations;
        if r.psi < best.psi {
            best = r;
        }
    }
    best.evaluations = evaluations;
    best
}

fn descend(robot: &Robot, topo: &Topology, problem: &IkProblem, relevant: &[bool], mut lengths: Vec<f64>, theta: Vec<f64>) -> IkResult {
    let opts = &problem.options;
    let ee = problem.end_effector;
    let mut evaluations = 0usize;
    let mut theta_cur = theta;
    let eval = |lengths: &[f64], base: &[f64], evaluations: &mut usize| -> Option<(f64, Vec<f64>)> {
        *evaluations += 1;
        let mut th = base.to_vec();
        forward_kinematics_theta(robot, topo, lengths, &mut th, &opts.fk).ok()?;
        Some((pose_distance(&pose_from_theta(robot, &th, ee), &problem.target), th))
    };
    let mut psi = match eval(&lengths, &theta_cur, &mut evaluations) {
        Some((v, th)) => {
            theta_cur = th;
            v
        }
        None => f64::INFINITY,
    };
    let mut psi_prev = f64::INFINITY;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = opts.max_iter;
    // Derivative-based line searches see Ψ², which is smooth where Ψ = 0.
    let squared = matches!(opts.solver, Solver1d::Newton | Solver1d::Secant);
    let lift = |v: f64| if squared { v * v } else { v };
    for k in 0..opts.max_iter {
        for i in (0..robot.actuators.len()).filter(|&i| relevant[i]) {
            let (lo, hi) = robot.actuators[i].bounds;
            let peers = robot.peers(i);
            let mut scratch = lengths.clone();
            let base = theta_cur.clone();
            let (x, _) = minimize_1d(
                opts.solver,
                |x| {
                    for &p in peers {
                        scratch[p] = x;
                    }
                    eval(&scratch, &base, &mut evaluations).map_or(f64::INFINITY, |(v, _)| lift(v))
                },
                lo,
                hi,
                1e-6 * (hi - lo),
                lengths[i],
                lift(psi),
            );
            if x != lengths[i] {
                for &p in peers {
                    scratch[p] = x;
                }
                if let Some((v, th)) = eval(&scratch, &base, &mut evaluations) {
                    lengths = scratch;
                    theta_cur = th;
                    psi = v;
                }
            }
        }
        trace.push(psi);
        if abs(psi - psi_prev) < opts.tol {
            converged = true;
            iterations = k;
            break;
        }
        psi_prev = psi;
    }
    let mut configuration = Configuration::from_theta(robot, theta_cur);
    crate::fk::look_at_refine(robot, &mut configuration);
    IkResult { lengths, psi, trace, converged, iterations, evaluations, configuration }
}

/// Dense grid minimum of Ψ over one actuator's bounds, others held.
pub fn grid_minimum(
    robot: &Robot,
    topo: &Topology,
    actuator: usize,
    points: usize,
    target: &Transform,
    end_effector: usize,
    config: &Configuration,
) -> (f64, f64) {
    let (lo, hi) = robot.actuators[actuator].bounds;
    let mut lengths = config.lengths.clone();
    let mut best = (lo, f64::INFINITY);
    let mut theta = config.theta.clone();
    let opts = FkOptions { look_at: false, ..FkOptions::default() };
    for k in 0..points {
        let x = (lo + (hi - lo) * k as f64 / (points - 1) as f64).min(hi);
        for &p in robot.peers(actuator) {
            lengths[p] = x;
        }
        let mut th = theta.clone();
        if forward_kinematics_theta(robot, topo, &lengths, &mut th, &opts).is_ok() {
            let v = pose_distance(&pose_from_theta(robot, &th, end_effector), target);
            if v < best.1 {
                best = (x, v);
            }
            theta = th;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gss_quadratic_and_constant() {
        let x = golden_section_search(|x| (x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-8);
        assert!(abs(x - 0.3) < 1e-7);
        let m = golden_section_search(|_| 1.0, 0.0, 1.0, 1e-8);
        assert!(abs(m - 0.5) < 1e-12);
        let s = golden_section_search(|x| -libm::sin(x), 0.0, core::f64::consts::PI, 1e-8);
        assert!(abs(s - core::f64::consts::FRAC_PI_2) < 1e-6);
    }

    #[test]
    fn all_solvers_agree_on_quadratic() {
        let f = |x: f64| (x - 0.3) * (x - 0.3);
        for kind in Solver1d::ALL {
            let (x, _) = minimize_1d(kind, f, 0.0, 1.0, 1e-8, 0.9, f(0.9));
            assert!(abs(x - 0.3) < 1e-6, "{kind:?} gave {x}");
        }
    }

    #[test]
    fn brent_non_smooth() {
        let x = brent_minimize(|x| abs(x - 0.5), 0.0, 1.0, 1e-8);
        assert!(abs(x - 0.5) < 1e-7);
    }

    #[test]
    fn newton_clamps_to_boundary() {
        let f = |x: f64| x * x;
        let (x, _) = minimize_1d(Solver1d::Newton, f, 1.0, 2.0, 1e-9, 1.5, f(1.5));
        assert_eq!(x, 1.0);
    }

    #[test]
    fn warm_start_kept_without_improvement() {
        let (x, fx) = minimize_1d(Solver1d::Gss, |_| 2.0, 0.0, 1.0, 1e-6, 0.25, 2.0);
        assert_eq!((x, fx), (0.25, 2.0));
    }
}
