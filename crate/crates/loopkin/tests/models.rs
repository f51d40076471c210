mod common;

use std::f64::consts::FRAC_PI_2;

use common::load;
use loopkin::models::{builtin_robot, lookup, Builder, ModelError, ModelParams, BUILTIN, UNIT_FIXTURES};
use loopkin_core::fk::{closure_residuals, max_length_residual};
use loopkin_core::mrdf::{compile, validate};
use loopkin_core::topology::Driver;
use loopkin_core::ItepKind;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name, (links, joints, actuators) and type histogram.
type Expected = (&'static str, (usize, usize, usize), [usize; 4]);

const EXPECTED: [Expected; 10] = [
    ("TCCHS", (11, 34, 11), [2, 4, 1, 4]),
    ("STHS", (8, 17, 4), [0, 0, 3, 1]),
    ("SSHS", (8, 22, 7), [2, 1, 0, 4]),
    ("RH", (7, 24, 9), [1, 8, 0, 0]),
    ("LHD", (5, 9, 2), [1, 0, 1, 0]),
    ("VD", (4, 6, 1), [0, 0, 1, 0]),
    ("DJ", (6, 12, 3), [1, 1, 1, 0]),
    ("SH", (4, 19, 8), [0, 8, 0, 0]),
    ("D", (5, 9, 2), [0, 0, 0, 2]),
    ("indirect_lock", (5, 9, 2), [0, 0, 1, 1]),
];

#[test]
fn counts_and_histograms() {
    for (name, (links, joints, actuators), hist) in EXPECTED {
        let m = load(name);
        let c = m.robot.counts();
        assert_eq!((c.links, c.joints, c.actuators), (links, joints, actuators), "{name} counts");
        assert_eq!(m.topo.histogram(), hist, "{name} histogram");
    }
}

#[test]
fn tcchs_topology() {
    let m = load("TCCHS");
    let bars: Vec<[usize; 4]> = m.topo.four_bars.iter().map(|b| b.links).collect();
    assert_eq!(bars, vec![[0, 1, 2, 3], [7, 8, 9, 10]]);
    assert_eq!(m.robot.groups.len(), 6);
}

#[test]
fn body_links_carry_their_id() {
    for name in BUILTIN {
        let m = load(name);
        for (i, l) in m.robot.links.iter().take(m.robot.body_link_count()).enumerate() {
            assert!(l.name == format!("L{i}") || l.name.starts_with(&format!("L{i}_")), "{name}: {} at {i}", l.name);
        }
    }
}

#[test]
fn every_model_validates_cleanly() {
    for name in BUILTIN.iter().chain(UNIT_FIXTURES.iter()) {
        let m = load(name);
        let errors: Vec<_> = validate(&m.robot).into_iter().filter(|f| f.severity == loopkin_core::mrdf::Severity::Error).collect();
        assert!(errors.is_empty(), "{name}: {errors:?}");
    }
}

#[test]
fn histograms_do_not_depend_on_scale() {
    for name in BUILTIN {
        let base = load(name).topo.histogram();
        let scaled = builtin_robot(name, ModelParams { scale: 2.5 }).unwrap();
        let robot = compile(&scaled.description).unwrap();
        let topo = loopkin_core::Topology::build(&robot).unwrap();
        assert_eq!(topo.histogram(), base, "{name}");
    }
}

#[test]
fn unknown_and_invalid_models() {
    assert!(matches!(lookup("nope"), Err(ModelError::Unknown(_))));
    assert!(matches!(builtin_robot("RH", ModelParams { scale: 0.0 }), Err(ModelError::BadScale(_))));
    assert_eq!(lookup("tcchs").unwrap(), lookup("TCCHS").unwrap());
    let mut b = Builder::new("flat", ModelParams::default()).unwrap();
    b.base("L0").four_bar("L0", [("L1", [0.0, 0.0]), ("L2", [1.0, 0.0]), ("L3", [2.0, 0.0])], [3.0, 0.0]);
    assert!(matches!(b.build(), Err(ModelError::DegenerateFourBar(_))));
}

#[test]
fn fk_residuals_on_random_targets() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for name in BUILTIN {
        let m = load(name);
        for _ in 0..50 {
            let lengths = loopkin::stats::random_lengths(&m.robot, &mut rng);
            let cfg = m.fk(&lengths).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(max_length_residual(&cfg, &lengths) <= 1e-6, "{name}");
            assert!(closure_residuals(&m.robot, &cfg).iter().all(|&r| r <= 1e-6), "{name}");
        }
    }
}

#[test]
fn out_of_bounds_targets_are_rejected() {
    let m = load("B");
    let mut lengths = m.rest.lengths.clone();
    lengths[0] = 5.0;
    assert!(matches!(m.fk(&lengths), Err(loopkin_core::FkError::OutOfBounds { .. })));
}

#[test]
fn type_a_oracle() {
    let m = load("A");
    let j = m.joint("L0", "L1");
    for k in 0..=100 {
        let l = 0.5 + 1.5 * k as f64 / 100.0;
        let cfg = m.fk(&[l]).unwrap();
        assert!((cfg.theta[j] - (l - 1.0)).abs() <= 1e-9, "l = {l}");
        assert!((cfg.world[m.ee].translation[0] - (l - 1.0)).abs() <= 1e-9);
    }
}

#[test]
fn type_b_oracle() {
    let m = load("B");
    let j = m.joint("L0", "L1");
    let (lo, hi) = m.robot.actuators[0].bounds;
    for k in 0..100 {
        // l² = 2 − 2 cos(π/2 + θ), on the branch through the rest pose
        let l = lo + (hi - lo) * k as f64 / 99.0;
        let theta = ((l * l - 2.0) / 2.0).asin();
        assert!((2.0 - 2.0 * (FRAC_PI_2 + theta).cos() - l * l).abs() < 1e-12);
        let cfg = m.fk(&[l]).unwrap();
        assert!((cfg.theta[j] - theta).abs() <= 1e-6, "l = {l}: θ {} vs {theta}", cfg.theta[j]);
    }
}

#[test]
fn parallelogram_oracle() {
    let m = load("fourbar_parallelogram");
    let (crank, coupler, rocker) = (m.joint("L0", "L1"), m.joint("L1", "L2"), m.joint("L2", "L3"));
    assert_eq!(m.topo.itep(0).kind, ItepKind::C);
    for k in 0..=100 {
        let l = 0.75 + 0.85 * k as f64 / 100.0;
        let cfg = m.fk(&[l]).unwrap();
        let theta = cfg.theta[crank];
        assert!((cfg.theta[coupler] + theta).abs() <= 1e-6, "α at l = {l}");
        assert!((cfg.theta[rocker] - theta).abs() <= 1e-6, "β at l = {l}");
    }
}

#[test]
fn indirect_locks_close_four_link_loops() {
    for name in BUILTIN.iter().chain(UNIT_FIXTURES.iter()) {
        let m = load(name);
        for itep in &m.topo.iteps {
            if itep.kind == ItepKind::D {
                assert!(matches!(itep.driver, Driver::Loop { .. }));
                assert_eq!(itep.loop_links.len(), 4, "{name}");
                assert_eq!(itep.loop_mobility(), Some(1), "{name}");
            } else {
                assert_eq!(itep.loop_mobility(), None);
            }
        }
    }
}
