//! Randomized FK timing with a per-type linear cost fit, and IK trial
//! statistics.

use std::time::Instant;

use loopkin_core::fk::{activity, forward_kinematics, Configuration, FkOptions};
use loopkin_core::ik::{solve_ik, IkOptions, IkProblem};
use loopkin_core::mrdf::Robot;
use loopkin_core::Topology;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Uniform random in-bounds lengths, shared within each redundancy class.
pub fn random_lengths(robot: &Robot, rng: &mut impl Rng) -> Vec<f64> {
    let mut out = vec![0.0; robot.actuators.len()];
    for g in &robot.groups {
        let (lo, hi) = robot.actuators[g[0]].bounds;
        let x = rng.random_range(lo..=hi);
        for &a in g {
            out[a] = x;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FkSample {
    /// Active actuators per type `[A, B, C, D]`.
    pub active: [usize; 4],
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearFit {
    /// Seconds per active actuator of each type; zero for absent types.
    pub t_a: f64,
    pub t_b: f64,
    pub t_c: f64,
    pub t_d: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FkTiming {
    pub trials: usize,
    pub seed: u64,
    pub failures: usize,
    pub mean_seconds: f64,
    /// Mean active actuators per type over the trials.
    pub mean_active: [f64; 4],
    pub fit: LinearFit,
    pub samples: Vec<FkSample>,
}

/// Least squares `t ≈ Σ activeₖ·tₖ` without intercept; R² against the mean.
pub fn fit_activity(samples: &[FkSample]) -> LinearFit {
    let used: Vec<usize> = (0..4).filter(|&k| samples.iter().any(|s| s.active[k] > 0)).collect();
    let x = DMatrix::from_fn(samples.len(), used.len(), |r, c| samples[r].active[used[c]] as f64);
    let y = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.seconds));
    let mut coef = [0.0; 4];
    let mut r_squared = 0.0;
    if !used.is_empty() && samples.len() > used.len() {
        if let Ok(beta) = x.clone().svd(true, true).solve(&y, 1e-12) {
            for (c, &k) in used.iter().enumerate() {
                coef[k] = beta[c];
            }
            let residual = &y - &x * &beta;
            let mean = y.mean();
            let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
            let ss_res = residual.norm_squared();
            r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 0.0 };
        }
    }
    LinearFit { t_a: coef[0], t_b: coef[1], t_c: coef[2], t_d: coef[3], r_squared }
}

/// Times FK from `start` over random activity patterns: each redundancy
/// class is independently active with probability 1/2 (at least one), and
/// an active class gets a fresh random length. Each pattern is timed
/// `repeats` times and the fastest run kept.
pub fn fk_timing(
    robot: &Robot,
    topo: &Topology,
    start: &Configuration,
    trials: usize,
    repeats: usize,
    seed: u64,
) -> FkTiming {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = FkOptions::default();
    let mut samples = Vec::with_capacity(trials);
    let mut failures = 0;
    for _ in 0..trials {
        let fresh = random_lengths(robot, &mut rng);
        let mut targets = start.lengths.clone();
        let mut any = false;
        for g in &robot.groups {
            if rng.random_bool(0.5) {
                any = true;
                for &a in g {
                    targets[a] = fresh[a];
                }
            }
        }
        if !any {
            let g = &robot.groups[rng.random_range(0..robot.groups.len())];
            for &a in g {
                targets[a] = fresh[a];
            }
        }
        let active = activity(robot, topo, &targets, start);
        let mut best = f64::INFINITY;
        let mut ok = true;
        for _ in 0..repeats.max(1) {
            let mut cfg = start.clone();
            let t0 = Instant::now();
            ok &= forward_kinematics(robot, topo, &targets, &mut cfg, &opts).is_ok();
            best = best.min(t0.elapsed().as_secs_f64());
        }
        if ok {
            samples.push(FkSample { active, seconds: best });
        } else {
            failures += 1;
        }
    }
    let n = samples.len().max(1) as f64;
    let mean_seconds = samples.iter().map(|s| s.seconds).sum::<f64>() / n;
    let mean_active = std::array::from_fn(|k| samples.iter().map(|s| s.active[k] as f64).sum::<f64>() / n);
    let fit = fit_activity(&samples);
    FkTiming { trials, seed, failures, mean_seconds, mean_active, fit, samples }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IkStats {
    pub trials: usize,
    pub seed: u64,
    pub solver: &'static str,
    pub success_rate: f64,
    pub median_iterations: f64,
    pub median_seconds: f64,
    pub mean_seconds: f64,
    pub median_psi: f64,
    pub p95_psi: f64,
    #[serde(skip)]
    pub iterations: Vec<usize>,
    #[serde(skip)]
    pub max_length_error: f64,
}

/// Median of a sample (mean of the middle pair for even sizes).
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) }
}

/// Nearest-rank percentile, `p ∈ [0, 100]`.
pub fn percentile(values: &[f64], p: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = ((p / 100.0) * v.len() as f64).ceil().max(1.0) as usize;
    v[rank.min(v.len()) - 1]
}

/// Solves IK from `start` for targets produced by FK at random in-bounds
/// lengths. `max_length_error` compares recovered and generating lengths
/// on the actuators that move the end-effector.
pub fn ik_trials(
    robot: &Robot,
    topo: &Topology,
    start: &Configuration,
    end_effector: usize,
    options: IkOptions,
    trials: usize,
    seed: u64,
) -> IkStats {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let relevant = loopkin_core::ik::relevant_actuators(robot, topo, end_effector);
    let mut psi = Vec::with_capacity(trials);
    let mut secs = Vec::with_capacity(trials);
    let mut iterations = Vec::with_capacity(trials);
    let mut converged = 0;
    let mut max_length_error: f64 = 0.0;
    for _ in 0..trials {
        let lengths = random_lengths(robot, &mut rng);
        let mut cfg = start.clone();
        if forward_kinematics(robot, topo, &lengths, &mut cfg, &options.fk).is_err() {
            continue;
        }
        let problem = IkProblem { end_effector, target: cfg.world[end_effector], initial: start.clone(), options };
        let t0 = Instant::now();
        let r = solve_ik(robot, topo, &problem);
        secs.push(t0.elapsed().as_secs_f64());
        psi.push(r.psi);
        iterations.push(r.iterations);
        converged += usize::from(r.converged);
        for (i, (&got, &want)) in r.lengths.iter().zip(&lengths).enumerate() {
            if relevant[i] {
                max_length_error = max_length_error.max((got - want).abs());
            }
        }
    }
    let its: Vec<f64> = iterations.iter().map(|&k| k as f64).collect();
    IkStats {
        trials,
        seed,
        solver: options.solver.name(),
        success_rate: converged as f64 / trials.max(1) as f64,
        median_iterations: median(&its),
        median_seconds: median(&secs),
        mean_seconds: secs.iter().sum::<f64>() / secs.len().max(1) as f64,
        median_psi: median(&psi),
        p95_psi: percentile(&psi, 95.0),
        iterations,
        max_length_error,
    }
}
