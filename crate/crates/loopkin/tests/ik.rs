mod common;

use common::load;
use loopkin_core::apps::{
    generate_trajectory, interpolate, sample_workspace, AppError, Interpolation, TrajectorySpec, WorkspaceSpec,
};
use loopkin_core::geometry::pose_distance;
use loopkin_core::ik::{grid_minimum, relevant_actuators, solve_ik, IkOptions, IkProblem, Solver1d};
use loopkin_core::Transform;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn problem(m: &common::Loaded, target: Transform, solver: Solver1d) -> IkProblem {
    IkProblem {
        end_effector: m.ee,
        target,
        initial: m.rest.clone(),
        options: IkOptions { solver, ..IkOptions::default() },
    }
}

#[test]
fn one_dof_fixtures_recover_generator_lengths() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for name in ["A", "B", "C", "fourbar_parallelogram"] {
        let m = load(name);
        for solver in Solver1d::ALL {
            for _ in 0..20 {
                let (lengths, target) = m.reachable_target(&mut rng);
                let r = solve_ik(&m.robot, &m.topo, &problem(&m, target, solver));
                assert!(r.converged, "{name} {solver:?}");
                assert_eq!(r.iterations, 1, "{name} {solver:?}");
                assert!((r.lengths[0] - lengths[0]).abs() <= 1e-3, "{name} {solver:?}: {} vs {}", r.lengths[0], lengths[0]);
            }
        }
    }
}

#[test]
fn unreachable_target_matches_grid_minimum() {
    let m = load("B");
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..20 {
        let t: [f64; 3] = std::array::from_fn(|_| rng.random_range(-8.0..8.0));
        let target = Transform::from_rpy(t, [0.0, 0.0, rng.random_range(-1.0..1.0)]);
        let (_, grid) = grid_minimum(&m.robot, &m.topo, 0, 10_000, &target, m.ee, &m.rest);
        assert!(grid > 0.1, "target should be unreachable");
        for solver in Solver1d::ALL {
            let r = solve_ik(&m.robot, &m.topo, &problem(&m, target, solver));
            assert!(r.converged);
            assert!((r.psi - grid).abs() <= 1e-3, "{solver:?}: Ψ* {} vs grid {grid}", r.psi);
        }
    }
}

#[test]
fn coupled_robot_converges_to_reachable_targets() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let m = load("STHS");
    for _ in 0..5 {
        let (_, target) = m.reachable_target(&mut rng);
        let r = solve_ik(&m.robot, &m.topo, &problem(&m, target, Solver1d::Gss));
        assert!(r.converged);
        assert!(r.psi < 1e-3, "Ψ {}", r.psi);
        assert!((1..=30).contains(&r.iterations));
        let reached = pose_distance(&r.configuration.world[m.ee], &target);
        assert!((reached - r.psi).abs() < 1e-6);
        for (a, &l) in m.robot.actuators.iter().zip(&r.lengths) {
            assert!(l >= a.bounds.0 - 1e-12 && l <= a.bounds.1 + 1e-12);
        }
    }
}

#[test]
fn irrelevant_actuators_are_left_alone() {
    let m = load("TCCHS");
    let ee = m.robot.link_id("L4_canopy").unwrap();
    let relevant = relevant_actuators(&m.robot, &m.topo, ee);
    let idle: Vec<usize> = m.robot.groups.iter().filter(|g| !relevant[g[0]]).flatten().copied().collect();
    assert!(!idle.is_empty());
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let (_, target) = m.reachable_target(&mut rng);
    let r = solve_ik(&m.robot, &m.topo, &IkProblem { end_effector: ee, ..problem(&m, target, Solver1d::Gss) });
    for i in idle {
        assert_eq!(r.lengths[i], m.rest.lengths[i], "{}", m.robot.actuators[i].name);
    }
}

#[test]
fn four_bar_members_without_generalized_edges_are_driven() {
    for name in ["C", "fourbar_parallelogram"] {
        let m = load(name);
        assert_eq!(m.topo.contracted.j[0][m.ee], 0);
        assert_eq!(relevant_actuators(&m.robot, &m.topo, m.ee), vec![true]);
    }
}

#[test]
fn workspace_grid_order_and_cap() {
    let m = load("LHD");
    let n = relevant_actuators(&m.robot, &m.topo, m.ee).iter().filter(|r| **r).count();
    assert_eq!(n, 2);
    let spec = WorkspaceSpec { end_effector: m.ee, counts: vec![2, 3], cap: 1000 };
    let samples = sample_workspace(&m.robot, &m.topo, &m.rest, &spec).unwrap();
    assert_eq!(samples.len(), 6);
    let (lo0, hi0) = m.robot.actuators[0].bounds;
    let (lo1, hi1) = m.robot.actuators[1].bounds;
    assert_eq!(samples[0].lengths, vec![lo0, lo1]);
    assert_eq!(samples[2].lengths, vec![lo0, hi1]);
    assert_eq!(samples[3].lengths[0], hi0);
    assert_eq!(samples[5].lengths, vec![hi0, hi1]);
    for s in &samples {
        let cfg = m.fk(&s.lengths).unwrap();
        assert!(pose_distance(&cfg.world[m.ee], s.pose.as_ref().unwrap()) < 1e-9);
    }
    let too_big = WorkspaceSpec { counts: vec![100, 100], cap: 9999, ..spec.clone() };
    assert!(matches!(sample_workspace(&m.robot, &m.topo, &m.rest, &too_big), Err(AppError::GridTooLarge { .. })));
    let wrong = WorkspaceSpec { counts: vec![2], ..spec.clone() };
    assert!(matches!(sample_workspace(&m.robot, &m.topo, &m.rest, &wrong), Err(AppError::SampleCount { .. })));
    let single = WorkspaceSpec { counts: vec![1, 2], ..spec };
    assert!(matches!(sample_workspace(&m.robot, &m.topo, &m.rest, &single), Err(AppError::TooFewSamples)));
}

#[test]
fn interpolation_hits_via_points() {
    let via = [
        Transform::from_rpy([0.0, 0.0, 0.0], [0.0, 0.0, 0.0]),
        Transform::from_rpy([1.0, 0.0, 0.0], [0.0, 0.0, 0.5]),
        Transform::from_rpy([1.0, 1.0, 0.0], [0.0, 0.0, 1.0]),
    ];
    for kind in [Interpolation::Linear, Interpolation::CatmullRom] {
        assert!(pose_distance(&interpolate(&via, kind, 0.0), &via[0]) < 1e-12);
        assert!(pose_distance(&interpolate(&via, kind, 0.5), &via[1]) < 1e-12);
        assert!(pose_distance(&interpolate(&via, kind, 1.0), &via[2]) < 1e-12);
    }
    let mid = interpolate(&via, Interpolation::Linear, 0.25);
    assert!((mid.translation[0] - 0.5).abs() < 1e-12);
}

#[test]
fn trajectory_between_reachable_poses() {
    let m = load("DJ");
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let (_, a) = m.reachable_target(&mut rng);
    let (_, b) = m.reachable_target(&mut rng);
    let spec = TrajectorySpec {
        end_effector: m.ee,
        via: vec![a, b],
        samples: 8,
        interpolation: Interpolation::Linear,
        ik: IkOptions::default(),
    };
    let points = generate_trajectory(&m.robot, &m.topo, &m.rest, &spec).unwrap();
    assert_eq!(points.len(), 8);
    assert_eq!(points[0].t, 0.0);
    assert_eq!(points[7].t, 1.0);
    assert!(points[0].psi < 1e-3 && points[7].psi < 1e-3);
    assert!(points.iter().all(|p| p.converged));

    let still = TrajectorySpec { via: vec![a, a], ..spec.clone() };
    for p in generate_trajectory(&m.robot, &m.topo, &m.rest, &still).unwrap() {
        assert!(pose_distance(&p.target, &a) < 1e-12);
        assert!(p.psi < 1e-3);
    }
    let short = TrajectorySpec { via: vec![a], ..spec };
    assert!(matches!(generate_trajectory(&m.robot, &m.topo, &m.rest, &short), Err(AppError::TooFewVia)));
}
