//! Rigid transforms, joint motion and the SE(3) logarithm.
//!
//! Column-vector convention throughout: `a * b` applies `b` first. Rotations
//! are stored row-major as `[[f64; 3]; 3]`.

use core::ops::Mul;

use crate::math::{abs, acos, atan2, clamp, cos, sin, sqrt};

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

pub const IDENTITY3: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

const AXIS_TOL: f64 = 1e-9;
const LOG_TAYLOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("axis is not unit length (norm {0})")]
    NonUnitAxis(f64),
    #[error("generalized joints have no closed-form transform")]
    GeneralizedJoint,
}

/// Joint type codes as stored in the joint matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JointType {
    Revolute,
    Prismatic,
    Fixed,
    Generalized,
}

impl JointType {
    pub fn code(self) -> u8 {
        match self {
            JointType::Revolute => 1,
            JointType::Prismatic => 2,
            JointType::Fixed => 3,
            JointType::Generalized => 4,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            1 => Some(JointType::Revolute),
            2 => Some(JointType::Prismatic),
            3 => Some(JointType::Fixed),
            4 => Some(JointType::Generalized),
            _ => None,
        }
    }

    pub fn letter(self) -> char {
        match self {
            JointType::Revolute => 'R',
            JointType::Prismatic => 'P',
            JointType::Fixed => 'F',
            JointType::Generalized => 'G',
        }
    }
}

#[inline]
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm(a: Vec3) -> f64 {
    sqrt(dot(a, a))
}

/// Unit vector along `a`, or `None` for a (near) zero vector.
pub fn normalize(a: Vec3) -> Option<Vec3> {
    let n = norm(a);
    if n > 1e-15 && n.is_finite() {
        Some(scale(a, 1.0 / n))
    } else {
        None
    }
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

pub fn mat_vec(a: &Mat3, v: Vec3) -> Vec3 {
    [dot(a[0], v), dot(a[1], v), dot(a[2], v)]
}

pub fn transpose(a: &Mat3) -> Mat3 {
    [
        [a[0][0], a[1][0], a[2][0]],
        [a[0][1], a[1][1], a[2][1]],
        [a[0][2], a[1][2], a[2][2]],
    ]
}

/// Skew-symmetric cross-product matrix `[a]×`.
pub fn skew(a: Vec3) -> Mat3 {
    [[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]]
}

fn mat_lin(terms: &[(f64, &Mat3)]) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (s, m) in terms {
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] += s * m[i][j];
            }
        }
    }
    out
}

/// `R = I + sinθ [a]× + (1 − cosθ) [a]×²` for a unit axis `a`.
pub fn rodrigues(axis: Vec3, theta: f64) -> Result<Mat3, GeometryError> {
    let n = norm(axis);
    if !(abs(n - 1.0) <= AXIS_TOL) {
        return Err(GeometryError::NonUnitAxis(n));
    }
    let k = skew(axis);
    let k2 = mat_mul(&k, &k);
    Ok(mat_lin(&[(1.0, &IDENTITY3), (sin(theta), &k), (1.0 - cos(theta), &k2)]))
}

/// `Rz(yaw) · Ry(pitch) · Rx(roll)`.
pub fn rpy_matrix(rpy: Vec3) -> Mat3 {
    let (sr, cr) = (sin(rpy[0]), cos(rpy[0]));
    let (sp, cp) = (sin(rpy[1]), cos(rpy[1]));
    let (sy, cy) = (sin(rpy[2]), cos(rpy[2]));
    [
        [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
        [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
        [-sp, cp * sr, cp * cr],
    ]
}

/// Rigid transform stored as rotation + translation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transform {
    pub rotation: Mat3,
    pub translation: Vec3,
}

impl Default for Transform {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Transform {
    pub const IDENTITY: Transform = Transform { rotation: IDENTITY3, translation: [0.0; 3] };

    pub fn new(rotation: Mat3, translation: Vec3) -> Self {
        Self { rotation, translation }
    }

    pub fn from_translation(translation: Vec3) -> Self {
        Self { rotation: IDENTITY3, translation }
    }

    pub fn from_rotation(rotation: Mat3) -> Self {
        Self { rotation, translation: [0.0; 3] }
    }

    pub fn from_rpy(translation: Vec3, rpy: Vec3) -> Self {
        Self { rotation: rpy_matrix(rpy), translation }
    }

    pub fn inverse(&self) -> Self {
        let rt = transpose(&self.rotation);
        let t = mat_vec(&rt, self.translation);
        Self { rotation: rt, translation: [-t[0], -t[1], -t[2]] }
    }

    pub fn transform_point(&self, p: Vec3) -> Vec3 {
        add(mat_vec(&self.rotation, p), self.translation)
    }

    pub fn rotate(&self, v: Vec3) -> Vec3 {
        mat_vec(&self.rotation, v)
    }

    /// Unit quaternion `[w, x, y, z]` of the rotation part, with `w ≥ 0`.
    pub fn quaternion(&self) -> [f64; 4] {
        let m = &self.rotation;
        let tr = m[0][0] + m[1][1] + m[2][2];
        let q = if tr > 0.0 {
            let s = sqrt(tr + 1.0) * 2.0;
            [0.25 * s, (m[2][1] - m[1][2]) / s, (m[0][2] - m[2][0]) / s, (m[1][0] - m[0][1]) / s]
        } else if m[0][0] > m[1][1] && m[0][0] > m[2][2] {
            let s = sqrt(1.0 + m[0][0] - m[1][1] - m[2][2]) * 2.0;
            [(m[2][1] - m[1][2]) / s, 0.25 * s, (m[0][1] + m[1][0]) / s, (m[0][2] + m[2][0]) / s]
        } else if m[1][1] > m[2][2] {
            let s = sqrt(1.0 + m[1][1] - m[0][0] - m[2][2]) * 2.0;
            [(m[0][2] - m[2][0]) / s, (m[0][1] + m[1][0]) / s, 0.25 * s, (m[1][2] + m[2][1]) / s]
        } else {
            let s = sqrt(1.0 + m[2][2] - m[0][0] - m[1][1]) * 2.0;
            [(m[1][0] - m[0][1]) / s, (m[0][2] + m[2][0]) / s, (m[1][2] + m[2][1]) / s, 0.25 * s]
        };
        let n = sqrt(q.iter().map(|c| c * c).sum::<f64>());
        let sign = if q[0] < 0.0 { -1.0 } else { 1.0 };
        [sign * q[0] / n, sign * q[1] / n, sign * q[2] / n, sign * q[3] / n]
    }

    /// Builds a transform from a quaternion `[w, x, y, z]` (normalized here).
    pub fn from_quaternion(q: [f64; 4], translation: Vec3) -> Self {
        let n = sqrt(q.iter().map(|c| c * c).sum::<f64>());
        let (w, x, y, z) = (q[0] / n, q[1] / n, q[2] / n, q[3] / n);
        let rotation = [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ];
        Self { rotation, translation }
    }

    pub fn is_finite(&self) -> bool {
        self.rotation.iter().flatten().chain(self.translation.iter()).all(|v| v.is_finite())
    }
}

impl Mul for Transform {
    type Output = Transform;

    fn mul(self, rhs: Transform) -> Transform {
        Transform {
            rotation: mat_mul(&self.rotation, &rhs.rotation),
            translation: add(mat_vec(&self.rotation, rhs.translation), self.translation),
        }
    }
}

impl Mul for &Transform {
    type Output = Transform;

    fn mul(self, rhs: &Transform) -> Transform {
        *self * *rhs
    }
}

/// Joint motion composed with a constant transform: `T(a, θ) · origin`.
///
/// Revolute joints rotate about `axis`, prismatic joints translate by
/// `θ·axis`, fixed joints return `origin` unchanged.
pub fn joint_transform(
    kind: JointType,
    axis: Vec3,
    theta: f64,
    origin: &Transform,
) -> Result<Transform, GeometryError> {
    match kind {
        JointType::Revolute => Ok(Transform::from_rotation(rodrigues(axis, theta)?) * *origin),
        JointType::Prismatic => {
            let n = norm(axis);
            if !(abs(n - 1.0) <= AXIS_TOL) {
                return Err(GeometryError::NonUnitAxis(n));
            }
            Ok(Transform::from_translation(scale(axis, theta)) * *origin)
        }
        JointType::Fixed => Ok(*origin),
        JointType::Generalized => Err(GeometryError::GeneralizedJoint),
    }
}

/// Left-to-right product of `transforms`; identity for an empty slice.
pub fn chain_transform(transforms: &[Transform]) -> Transform {
    transforms.iter().fold(Transform::IDENTITY, |acc, t| acc * *t)
}

/// Rotation vector `θ·a` of a rotation matrix.
pub fn so3_log(r: &Mat3) -> Vec3 {
    let w = [
        0.5 * (r[2][1] - r[1][2]),
        0.5 * (r[0][2] - r[2][0]),
        0.5 * (r[1][0] - r[0][1]),
    ];
    let s = norm(w);
    let c = clamp(0.5 * (r[0][0] + r[1][1] + r[2][2] - 1.0), -1.0, 1.0);
    let theta = atan2(s, c);
    if theta < LOG_TAYLOR {
        // sin θ ≈ θ, so w is already the rotation vector.
        return w;
    }
    if c > -0.5 {
        return scale(w, theta / s);
    }
    // Near π the antisymmetric part vanishes; read the axis off the
    // symmetric part instead: (R + Rᵀ)/2 − cosθ·I = (1 − cosθ)·a·aᵀ.
    let one_c = 1.0 - c;
    let diag = [
        (r[0][0] - c) / one_c,
        (r[1][1] - c) / one_c,
        (r[2][2] - c) / one_c,
    ];
    let k = if diag[0] >= diag[1] && diag[0] >= diag[2] {
        0
    } else if diag[1] >= diag[2] {
        1
    } else {
        2
    };
    let dk = sqrt(diag[k].max(0.0));
    let mut axis = [0.0; 3];
    for (j, a) in axis.iter_mut().enumerate() {
        *a = if j == k { dk } else { 0.5 * (r[j][k] + r[k][j]) / (one_c * dk) };
    }
    let axis = normalize(axis).unwrap_or([1.0, 0.0, 0.0]);
    let axis = if dot(axis, w) < 0.0 { scale(axis, -1.0) } else { axis };
    scale(axis, theta)
}

/// Twist `(ω, v)` with `exp([ω, v]^) = t`.
pub fn se3_log(t: &Transform) -> [f64; 6] {
    let omega = so3_log(&t.rotation);
    let theta = norm(omega);
    let k = skew(omega);
    let k2 = mat_mul(&k, &k);
    let coef = if theta < LOG_TAYLOR {
        1.0 / 12.0 + theta * theta / 720.0
    } else {
        let half = 0.5 * theta;
        // 1/θ² · (1 − (θ/2)·cot(θ/2))
        (1.0 - half * cos(half) / sin(half)) / (theta * theta)
    };
    let v_inv = mat_lin(&[(1.0, &IDENTITY3), (-0.5, &k), (coef, &k2)]);
    let v = mat_vec(&v_inv, t.translation);
    [omega[0], omega[1], omega[2], v[0], v[1], v[2]]
}

/// Inverse of [`se3_log`].
pub fn se3_exp(xi: [f64; 6]) -> Transform {
    let omega = [xi[0], xi[1], xi[2]];
    let theta = norm(omega);
    let k = skew(omega);
    let k2 = mat_mul(&k, &k);
    let t2 = theta * theta;
    let (a, b, c) = if theta < LOG_TAYLOR {
        (1.0 - t2 / 6.0, 0.5 - t2 / 24.0, 1.0 / 6.0 - t2 / 120.0)
    } else {
        (sin(theta) / theta, (1.0 - cos(theta)) / t2, (theta - sin(theta)) / (t2 * theta))
    };
    let rotation = mat_lin(&[(1.0, &IDENTITY3), (a, &k), (b, &k2)]);
    let v = mat_lin(&[(1.0, &IDENTITY3), (b, &k), (c, &k2)]);
    Transform { rotation, translation: mat_vec(&v, [xi[3], xi[4], xi[5]]) }
}

/// `‖log(a⁻¹ · b)‖₂`, mixing radians and meters unweighted.
pub fn pose_distance(a: &Transform, b: &Transform) -> f64 {
    let xi = se3_log(&(a.inverse() * *b));
    sqrt(xi.iter().map(|v| v * v).sum())
}

/// Spherical linear interpolation between unit quaternions `[w, x, y, z]`.
pub fn slerp_quaternion(q0: [f64; 4], q1: [f64; 4], t: f64) -> [f64; 4] {
    let mut d = q0.iter().zip(q1.iter()).map(|(a, b)| a * b).sum::<f64>();
    let mut q1 = q1;
    if d < 0.0 {
        d = -d;
        q1 = [-q1[0], -q1[1], -q1[2], -q1[3]];
    }
    let (s0, s1) = if d > 0.9995 {
        (1.0 - t, t)
    } else {
        let omega = acos(clamp(d, -1.0, 1.0));
        let so = sin(omega);
        (sin((1.0 - t) * omega) / so, sin(t * omega) / so)
    };
    let q = [
        s0 * q0[0] + s1 * q1[0],
        s0 * q0[1] + s1 * q1[1],
        s0 * q0[2] + s1 * q1[2],
        s0 * q0[3] + s1 * q1[3],
    ];
    let n = sqrt(q.iter().map(|c| c * c).sum::<f64>());
    [q[0] / n, q[1] / n, q[2] / n, q[3] / n]
}
