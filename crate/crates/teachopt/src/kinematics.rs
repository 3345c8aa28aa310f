//! Forward kinematics, geometric Jacobian and numerical inverse kinematics
//! for the 6R teaching arm.
//!
//! The arm is described by six Denavit-Hartenberg rows in the standard
//! (distal) convention: each joint transform is
//! `RotZ(q + theta_offset) * TransZ(d) * TransX(a) * RotX(alpha)`.
//! The end-effector frame coincides with the Joint-6 frame (`a6 = d6 = 0`).

use nalgebra::{Matrix4, Matrix6, Rotation3, Vector3, Vector6};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One Denavit-Hartenberg row (standard convention).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DhRow {
    /// Twist angle about the local x axis (rad).
    pub alpha: f64,
    /// Link length along the local x axis (m).
    pub a: f64,
    /// Offset along the local z axis (m).
    pub d: f64,
    /// Constant offset added to the joint angle (rad).
    pub theta_offset: f64,
}

impl DhRow {
    pub const fn new(alpha: f64, a: f64, d: f64) -> Self {
        DhRow { alpha, a, d, theta_offset: 0.0 }
    }
}

/// Joint angles of the 6R chain (rad).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointConfig(pub [f64; 6]);

impl JointConfig {
    pub const ZERO: JointConfig = JointConfig([0.0; 6]);

    /// Wrap every angle into (-pi, pi].
    pub fn normalized(&self) -> JointConfig {
        JointConfig(self.0.map(normalize_angle))
    }
}

/// Wrap an angle into (-pi, pi].
pub fn normalize_angle(q: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut r = q.rem_euclid(two_pi);
    if r > std::f64::consts::PI {
        r -= two_pi;
    }
    r
}

/// A rigid frame: rotation plus origin, expressed in the base frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub rotation: Rotation3<f64>,
    pub position: Vector3<f64>,
}

impl Frame {
    pub fn identity() -> Frame {
        Frame { rotation: Rotation3::identity(), position: Vector3::zeros() }
    }

    pub fn compose(&self, other: &Frame) -> Frame {
        Frame {
            rotation: self.rotation * other.rotation,
            position: self.position + self.rotation * other.position,
        }
    }

    pub fn homogeneous(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(self.rotation.matrix());
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.position);
        m
    }

    /// z axis of this frame expressed in the base frame.
    pub fn z_axis(&self) -> Vector3<f64> {
        self.rotation * Vector3::z()
    }
}

/// End-effector pose: position plus orthonormal rotation.
pub type Pose = Frame;

/// 6x6 geometric Jacobian, columns joint 1..6, rows (linear xyz, angular xyz),
/// base frame.
pub type Jacobian = Matrix6<f64>;

/// Transform contributed by one D-H row at joint angle `q`.
pub fn dh_transform(row: &DhRow, q: f64) -> Frame {
    let theta = q + row.theta_offset;
    let rot_z = Rotation3::from_axis_angle(&Vector3::z_axis(), theta);
    let rot_x = Rotation3::from_axis_angle(&Vector3::x_axis(), row.alpha);
    // RotZ * TransZ(d) * TransX(a) * RotX(alpha)
    Frame {
        rotation: rot_z * rot_x,
        position: Vector3::new(row.a * theta.cos(), row.a * theta.sin(), row.d),
    }
}

/// The serial chain: exactly six D-H rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kinematics {
    pub dh: [DhRow; 6],
}

impl Kinematics {
    pub fn new(dh: [DhRow; 6]) -> Self {
        Kinematics { dh }
    }

    /// End-effector pose plus the six cumulative frames (frame i = base to
    /// joint-i frame).
    pub fn forward_with_frames(&self, q: &JointConfig) -> (Pose, [Frame; 6]) {
        let mut frames = [Frame::identity(); 6];
        let mut acc = Frame::identity();
        for (i, row) in self.dh.iter().enumerate() {
            acc = acc.compose(&dh_transform(row, q.0[i]));
            frames[i] = acc;
        }
        (acc, frames)
    }

    pub fn forward(&self, q: &JointConfig) -> Pose {
        self.forward_with_frames(q).0
    }

    /// Geometric Jacobian: column i is `(z_{i-1} x (p_ee - p_{i-1}), z_{i-1})`
    /// with frame 0 the base frame.
    pub fn jacobian(&self, q: &JointConfig) -> Jacobian {
        let (ee, frames) = self.forward_with_frames(q);
        let mut j = Matrix6::zeros();
        for i in 0..6 {
            let (z, p) = if i == 0 {
                (Vector3::z(), Vector3::zeros())
            } else {
                (frames[i - 1].z_axis(), frames[i - 1].position)
            };
            let lin = z.cross(&(ee.position - p));
            j.fixed_view_mut::<3, 1>(0, i).copy_from(&lin);
            j.fixed_view_mut::<3, 1>(3, i).copy_from(&z);
        }
        j
    }

    /// Damped least-squares inverse kinematics.
    ///
    /// Iterates on the 6D pose-error twist (position error, axis-angle of the
    /// rotation error), seeded from `seed`. The damping factor doubles
    /// whenever a step fails to reduce the residual and relaxes back toward
    /// `IK_LAMBDA_0` on success.
    pub fn inverse(
        &self,
        target: &Pose,
        seed: &JointConfig,
        tol: f64,
        max_iter: usize,
    ) -> Result<JointConfig, IkError> {
        const IK_LAMBDA_0: f64 = 0.01;
        // Successful steps may relax the damping far below the starting
        // value; without this, ill-conditioned directions contract by only
        // ~lambda^2/sigma^2 per step and the residual plateaus above `tol`.
        const IK_LAMBDA_MIN: f64 = 1e-9;
        let mut q = *seed;
        let mut lambda = IK_LAMBDA_0;
        let mut err = pose_error(&self.forward(&q), target);
        for _ in 0..max_iter {
            let (pos_err, ang_err) = split_error(&err);
            if pos_err < tol && ang_err < tol {
                return Ok(q.normalized());
            }
            let j = self.jacobian(&q);
            let jjt = j * j.transpose();
            // dq = J^T (J J^T + lambda^2 I)^-1 e, retried with doubled damping
            // when the residual grows.
            let mut stepped = false;
            for _ in 0..40 {
                let damped = jjt + Matrix6::identity() * (lambda * lambda);
                let Some(inv_e) = damped.lu().solve(&err) else {
                    lambda *= 2.0;
                    continue;
                };
                let dq = j.transpose() * inv_e;
                let mut q_new = q;
                for k in 0..6 {
                    q_new.0[k] += dq[k];
                }
                let err_new = pose_error(&self.forward(&q_new), target);
                if err_new.norm() < err.norm() {
                    q = q_new;
                    err = err_new;
                    lambda = (lambda * 0.5).max(IK_LAMBDA_MIN);
                    stepped = true;
                    break;
                }
                lambda *= 2.0;
            }
            if !stepped {
                break;
            }
        }
        let (pos_err, ang_err) = split_error(&err);
        if pos_err < tol && ang_err < tol {
            Ok(q.normalized())
        } else {
            Err(IkError::NoConvergence { pos_err, ang_err })
        }
    }
}

fn split_error(err: &Vector6<f64>) -> (f64, f64) {
    let pos = err.fixed_rows::<3>(0).norm();
    let ang = err.fixed_rows::<3>(3).norm();
    (pos, ang)
}

/// 6D twist taking `current` to `target`: (p_t - p_c, log of R_t R_c^T).
fn pose_error(current: &Pose, target: &Pose) -> Vector6<f64> {
    let dp = target.position - current.position;
    let w = rotation_log(&(target.rotation * current.rotation.inverse()));
    let mut e = Vector6::zeros();
    e.fixed_rows_mut::<3>(0).copy_from(&dp);
    e.fixed_rows_mut::<3>(3).copy_from(&w);
    e
}

/// Axis-angle vector (`theta * axis`) of a rotation.
///
/// Numerically safe at the two trouble spots of the matrix logarithm: near
/// identity (where the skew part scales the result exactly) and near a
/// half-turn (where the skew part vanishes and the axis must come from the
/// symmetric part instead).
pub fn rotation_log(r: &Rotation3<f64>) -> Vector3<f64> {
    let m = r.matrix();
    let skew = Vector3::new(
        m[(2, 1)] - m[(1, 2)],
        m[(0, 2)] - m[(2, 0)],
        m[(1, 0)] - m[(0, 1)],
    );
    let cos = ((m.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let theta = cos.acos();
    if theta < 1e-12 {
        return skew * 0.5;
    }
    if theta < std::f64::consts::PI - 1e-6 {
        return skew * (theta / (2.0 * theta.sin()));
    }
    // Near pi: axis from the dominant diagonal of (R + I) / 2.
    let b = (m + nalgebra::Matrix3::identity()) * 0.5;
    let k = (0..3).max_by(|&i, &j| b[(i, i)].total_cmp(&b[(j, j)])).unwrap();
    let mut axis = Vector3::zeros();
    axis[k] = b[(k, k)].max(f64::MIN_POSITIVE).sqrt();
    for i in 0..3 {
        if i != k {
            axis[i] = b[(k, i)] / axis[k];
        }
    }
    let axis = axis.normalize();
    // The skew part still carries the sign of the (small) sine.
    let sign = if skew.dot(&axis) < 0.0 { -1.0 } else { 1.0 };
    axis * (theta * sign)
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum IkError {
    #[error("inverse kinematics did not converge (position residual {pos_err:.3e} m, orientation residual {ang_err:.3e} rad)")]
    NoConvergence { pos_err: f64, ang_err: f64 },
}
