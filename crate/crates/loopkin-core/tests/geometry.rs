use std::f64::consts::PI;

use loopkin_core::geometry::{
    joint_transform, mat_vec, pose_distance, rodrigues, se3_exp, se3_log, so3_log, GeometryError, Mat3, Transform,
};
use loopkin_core::JointType;
use proptest::prelude::*;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Rotation matrix of the unit quaternion `(cos θ/2, sin θ/2 · a)`.
fn quaternion_matrix(axis: [f64; 3], theta: f64) -> Mat3 {
    let (s, w) = ((theta / 2.0).sin(), (theta / 2.0).cos());
    let (x, y, z) = (axis[0] * s, axis[1] * s, axis[2] * s);
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

fn unit(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-3 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

fn max_diff(a: &Transform, b: &Transform) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            m = m.max((a.rotation[i][j] - b.rotation[i][j]).abs());
        }
        m = m.max((a.translation[i] - b.translation[i]).abs());
    }
    m
}

/// Angles spread over the whole range with extra mass near 0 and π.
fn angle(rng: &mut impl Rng, k: usize) -> f64 {
    match k % 5 {
        0 => PI - rng.random_range(0.0..1e-6),
        1 => PI - rng.random_range(0.0..1e-3),
        2 => rng.random_range(0.0..1e-5),
        _ => rng.random_range(0.0..PI),
    }
}

#[test]
fn rodrigues_matches_quaternion_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..10_000 {
        let a = unit(&mut rng);
        let theta = rng.random_range(-2.0 * PI..2.0 * PI) * if k % 7 == 0 { 1e-6 } else { 1.0 };
        let r = rodrigues(a, theta).unwrap();
        let q = quaternion_matrix(a, theta);
        for i in 0..3 {
            for j in 0..3 {
                assert!((r[i][j] - q[i][j]).abs() <= 1e-12, "axis {a:?} θ {theta}");
            }
        }
    }
}

#[test]
fn rodrigues_rejects_non_unit_axis() {
    assert!(matches!(rodrigues([0.0, 0.0, 2.0], 0.1), Err(GeometryError::NonUnitAxis(_))));
}

#[test]
fn exp_of_log_round_trips_including_near_pi() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for k in 0..10_000 {
        let r = rodrigues(unit(&mut rng), angle(&mut rng, k)).unwrap();
        let t: [f64; 3] = std::array::from_fn(|_| rng.random_range(-3.0..3.0));
        let tf = Transform::new(r, t);
        let back = se3_exp(se3_log(&tf));
        worst = worst.max(max_diff(&tf, &back));
    }
    assert!(worst <= 1e-8, "worst exp∘log error {worst:e}");
}

#[test]
fn log_of_exact_half_turn_has_angle_pi() {
    for axis in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.6, 0.0, 0.8]] {
        let w = so3_log(&rodrigues(axis, PI).unwrap());
        let n = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
        assert!((n - PI).abs() < 1e-12);
        let cross = [axis[1] * w[2] - axis[2] * w[1], axis[2] * w[0] - axis[0] * w[2], axis[0] * w[1] - axis[1] * w[0]];
        assert!(cross.iter().all(|c| c.abs() < 1e-9));
    }
}

#[test]
fn pose_distance_basics() {
    let a = Transform::from_rpy([0.3, -1.0, 2.0], [0.1, 0.2, 0.3]);
    assert!(pose_distance(&a, &a) < 1e-12);
    let b = a * Transform::from_translation([0.0, 0.0, 0.5]);
    assert!((pose_distance(&a, &b) - 0.5).abs() < 1e-12);
    let c = a * Transform::from_rotation(rodrigues([0.0, 1.0, 0.0], 0.25).unwrap());
    assert!((pose_distance(&a, &c) - 0.25).abs() < 1e-12);
}

#[test]
fn joint_transforms() {
    let x = Transform::from_translation([1.0, 0.0, 0.0]);
    let r = joint_transform(JointType::Revolute, [0.0, 0.0, 1.0], PI / 2.0, &x).unwrap();
    assert!((r.translation[1] - 1.0).abs() < 1e-15 && r.translation[0].abs() < 1e-15);
    let p = joint_transform(JointType::Prismatic, [0.0, 1.0, 0.0], 0.5, &x).unwrap();
    assert_eq!(p.translation, [1.0, 0.5, 0.0]);
    let f = joint_transform(JointType::Fixed, [0.0, 0.0, 1.0], 3.0, &x).unwrap();
    assert_eq!(f, x);
    assert!(matches!(
        joint_transform(JointType::Generalized, [0.0, 0.0, 1.0], 0.0, &x),
        Err(GeometryError::GeneralizedJoint)
    ));
}

#[test]
fn quaternion_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for k in 0..2_000 {
        let r = rodrigues(unit(&mut rng), angle(&mut rng, k)).unwrap();
        let t = Transform::new(r, [0.1, 0.2, 0.3]);
        let back = Transform::from_quaternion(t.quaternion(), t.translation);
        assert!(max_diff(&t, &back) < 1e-12);
    }
}

proptest! {
    #[test]
    fn log_of_exp_recovers_small_twists(
        w in prop::array::uniform3(-1.7f64..1.7),
        v in prop::array::uniform3(-5.0f64..5.0),
    ) {
        let xi = [w[0], w[1], w[2], v[0], v[1], v[2]];
        let back = se3_log(&se3_exp(xi));
        for k in 0..6 {
            prop_assert!((back[k] - xi[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn inverse_composes_to_identity(
        rpy in prop::array::uniform3(-3.0f64..3.0),
        t in prop::array::uniform3(-10.0f64..10.0),
        p in prop::array::uniform3(-10.0f64..10.0),
    ) {
        let a = Transform::from_rpy(t, rpy);
        let q = (a.inverse() * a).transform_point(p);
        for k in 0..3 {
            prop_assert!((q[k] - p[k]).abs() < 1e-9);
        }
        let r = mat_vec(&a.rotation, [1.0, 0.0, 0.0]);
        prop_assert!(((r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pose_distance_is_symmetric(
        r1 in prop::array::uniform3(-3.0f64..3.0), t1 in prop::array::uniform3(-2.0f64..2.0),
        r2 in prop::array::uniform3(-3.0f64..3.0), t2 in prop::array::uniform3(-2.0f64..2.0),
    ) {
        let a = Transform::from_rpy(t1, r1);
        let b = Transform::from_rpy(t2, r2);
        prop_assert!((pose_distance(&a, &b) - pose_distance(&b, &a)).abs() < 1e-9);
    }
}
