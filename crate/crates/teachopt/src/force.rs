//! Operating-force model.
//!
//! The operator must overcome the friction-disk torques `(T1, T2, T3)` at the
//! first three joints. The end-effector wrench that produces exactly those
//! joint torques solves `J^T F = tau`; only the force part of `F` counts
//! toward the operating-force objectives.

use crate::balance::DesignVector;
use crate::constants::ManipulatorConstants;
use crate::kinematics::{Frame, IkError, Jacobian, JointConfig, Kinematics, Pose};
use nalgebra::{Rotation3, Vector3, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A wrench at the end effector, base frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialForce {
    pub force: Vector3<f64>,
    pub moment: Vector3<f64>,
}

impl SpatialForce {
    pub fn from_vector(v: &Vector6<f64>) -> Self {
        SpatialForce {
            force: Vector3::new(v[0], v[1], v[2]),
            moment: Vector3::new(v[3], v[4], v[5]),
        }
    }

    /// Magnitude of the force part only (N).
    pub fn force_magnitude(&self) -> f64 {
        self.force.norm()
    }
}

/// Parametrization of the evaluation trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySpec {
    pub t_start: f64,
    pub t_end: f64,
    /// Number of segments; the sweep evaluates `segments + 1` samples
    /// inclusive of both endpoints.
    pub segments: usize,
    /// End-effector Euler angles (rad); resolved to a rotation whose z axis
    /// points at the ground.
    pub euler: [f64; 3],
}

impl Default for TrajectorySpec {
    fn default() -> Self {
        TrajectorySpec {
            t_start: 0.0,
            t_end: std::f64::consts::PI,
            segments: 500,
            euler: [0.0, std::f64::consts::PI, std::f64::consts::PI],
        }
    }
}

impl TrajectorySpec {
    pub fn samples(&self) -> usize {
        self.segments + 1
    }

    pub fn parameter(&self, i: usize) -> f64 {
        self.t_start + (self.t_end - self.t_start) * i as f64 / self.segments as f64
    }
}

/// Resolve the end-effector Euler triple to a rotation matrix.
///
/// Tries intrinsic Z-Y-X first and falls back to Z-Y-Z; the winning
/// convention is whichever makes the tool z axis point along the base -z
/// ("at the ground"). The pointing check is the authority, not the
/// convention name.
pub fn resolve_trajectory_rotation(euler: &[f64; 3]) -> Result<Rotation3<f64>, ForceError> {
    let zyx = Rotation3::from_axis_angle(&Vector3::z_axis(), euler[0])
        * Rotation3::from_axis_angle(&Vector3::y_axis(), euler[1])
        * Rotation3::from_axis_angle(&Vector3::x_axis(), euler[2]);
    let points_down = |r: &Rotation3<f64>| (r * Vector3::z() + Vector3::z()).norm() < 1e-9;
    if points_down(&zyx) {
        return Ok(zyx);
    }
    let zyz = Rotation3::from_axis_angle(&Vector3::z_axis(), euler[0])
        * Rotation3::from_axis_angle(&Vector3::y_axis(), euler[1])
        * Rotation3::from_axis_angle(&Vector3::z_axis(), euler[2]);
    if points_down(&zyz) {
        Ok(zyz)
    } else {
        Err(ForceError::BadOrientation)
    }
}

/// End-effector pose at trajectory parameter `t`.
pub fn trajectory_point(t: f64, rotation: &Rotation3<f64>) -> Pose {
    Frame {
        rotation: *rotation,
        position: Vector3::new(
            1.5 - 0.25 * (1.0 - t.cos()),
            -0.25 + 0.5 * (1.0 - (t / 2.0).cos()),
            0.5 + 0.5 * ((t / 2.0).cos() - 1.0),
        ),
    }
}

/// Joint friction torques as a 6-vector: `(T1, T2, T3, 0, 0, 0)`.
pub fn friction_torque_vector(x: &DesignVector) -> Vector6<f64> {
    Vector6::new(x.t1, x.t2, x.t3, 0.0, 0.0, 0.0)
}

/// Reciprocal condition threshold below which a configuration is treated as
/// singular for the wrench solve.
pub const RCOND_SINGULAR: f64 = 1e-8;

/// Solve `J^T F = tau` by SVD. Rejects near-singular configurations instead
/// of returning a meaningless huge wrench.
pub fn operating_wrench(j: &Jacobian, tau: &Vector6<f64>) -> Result<(SpatialForce, f64), ForceError> {
    let svd = j.transpose().svd(true, true);
    let s_max = svd.singular_values.max();
    let s_min = svd.singular_values.min();
    let rcond = if s_max > 0.0 { s_min / s_max } else { 0.0 };
    if rcond < RCOND_SINGULAR {
        return Err(ForceError::SingularConfiguration { rcond });
    }
    let f = svd.solve(tau, 0.0).expect("svd solve with computed u/v factors");
    Ok((SpatialForce::from_vector(&f), rcond))
}

/// One sample of the swept trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub q: JointConfig,
    /// Reciprocal condition estimate of J^T at this configuration.
    pub rcond: f64,
    /// Force parts of the wrenches producing unit torque at Joints 1..3.
    /// The operating force for any design is `T1*b0 + T2*b1 + T3*b2`.
    pub force_basis: [[f64; 3]; 3],
}

/// Trajectory kinematics shared by every design evaluation: IK sweep,
/// Jacobians and the per-joint unit-torque force basis. The basis makes the
/// per-design force profile a cheap linear combination (the wrench solve is
/// linear in tau).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryTable {
    pub spec: TrajectorySpec,
    pub samples: Vec<TrajectorySample>,
}

impl TrajectoryTable {
    /// Sweep the trajectory once: IK at each sample (seeded by the previous
    /// solution for branch continuity) and the unit-torque force basis.
    pub fn build(
        kin: &Kinematics,
        spec: &TrajectorySpec,
    ) -> Result<TrajectoryTable, ForceError> {
        let rotation = resolve_trajectory_rotation(&spec.euler)?;
        let mut samples = Vec::with_capacity(spec.samples());
        let mut seed = initial_seed(kin, &trajectory_point(spec.parameter(0), &rotation))?;
        for i in 0..spec.samples() {
            let t = spec.parameter(i);
            let target = trajectory_point(t, &rotation);
            let q = kin
                .inverse(&target, &seed, 1e-8, 200)
                .map_err(|e| ForceError::Unreachable { t, source: e })?;
            seed = q;
            let j = kin.jacobian(&q);
            let mut basis = [[0.0; 3]; 3];
            let mut rcond = 0.0;
            for (axis, slot) in basis.iter_mut().enumerate() {
                let mut tau = Vector6::zeros();
                tau[axis] = 1.0;
                let (f, rc) = operating_wrench(&j, &tau)
                    .map_err(|e| e.at_parameter(t))?;
                *slot = [f.force.x, f.force.y, f.force.z];
                rcond = rc;
            }
            samples.push(TrajectorySample { t, q, rcond, force_basis: basis });
        }
        Ok(TrajectoryTable { spec: *spec, samples })
    }

    /// Operating-force magnitude at sample `i` for a design's friction
    /// torques.
    pub fn force_at(&self, i: usize, x: &DesignVector) -> f64 {
        let b = &self.samples[i].force_basis;
        let mut f = [0.0f64; 3];
        for k in 0..3 {
            f[k] = x.t1 * b[0][k] + x.t2 * b[1][k] + x.t3 * b[2][k];
        }
        (f[0] * f[0] + f[1] * f[1] + f[2] * f[2]).sqrt()
    }

    /// Per-design force profile from the precomputed basis.
    pub fn profile(&self, x: &DesignVector) -> ForceProfile {
        let fc: Vec<f64> = (0..self.samples.len()).map(|i| self.force_at(i, x)).collect();
        ForceProfile::from_samples(self, fc)
    }
}

/// Deterministic seed search for the first trajectory sample: a neutral
/// elbow-up guess followed by seeded random restarts.
fn initial_seed(kin: &Kinematics, target: &Pose) -> Result<JointConfig, ForceError> {
    let mut candidates = vec![JointConfig([0.0, -0.5, 0.5, 0.0, 0.5, 0.0])];
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e4c);
    for _ in 0..200 {
        candidates.push(JointConfig(std::array::from_fn(|_| {
            rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)
        })));
    }
    for seed in candidates {
        if let Ok(q) = kin.inverse(target, &seed, 1e-8, 400) {
            return Ok(q);
        }
    }
    Err(ForceError::Unreachable {
        t: 0.0,
        source: IkError::NoConvergence { pos_err: f64::NAN, ang_err: f64::NAN },
    })
}

/// Operating-force magnitudes along the trajectory plus summary statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceProfile {
    pub t: Vec<f64>,
    pub fc: Vec<f64>,
    pub q: Vec<JointConfig>,
    pub rcond: Vec<f64>,
    pub max: f64,
    pub min: f64,
}

impl ForceProfile {
    fn from_samples(table: &TrajectoryTable, fc: Vec<f64>) -> ForceProfile {
        let max = fc.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = fc.iter().copied().fold(f64::INFINITY, f64::min);
        ForceProfile {
            t: table.samples.iter().map(|s| s.t).collect(),
            fc,
            q: table.samples.iter().map(|s| s.q).collect(),
            rcond: table.samples.iter().map(|s| s.rcond).collect(),
            max,
            min,
        }
    }

    /// Maximal operating force along the trajectory (objective f2).
    pub fn f2(&self) -> f64 {
        self.max
    }

    /// Spread between maximal and minimal operating force (objective f3).
    pub fn f3(&self) -> f64 {
        self.max - self.min
    }

    /// CSV rows `t,Fc,q1..q6,rcond` with full double precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,Fc,q1,q2,q3,q4,q5,q6,rcond\n");
        for i in 0..self.fc.len() {
            let q = self.q[i].0;
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                self.t[i], self.fc[i], q[0], q[1], q[2], q[3], q[4], q[5], self.rcond[i]
            ));
        }
        out
    }
}

/// Full per-design trajectory sweep: IK, Jacobian and wrench solve at every
/// sample. `TrajectoryTable::profile` is the fast equivalent; this direct
/// route stays as its oracle.
pub fn trajectory_force_profile(
    x: &DesignVector,
    c: &ManipulatorConstants,
    spec: &TrajectorySpec,
) -> Result<ForceProfile, ForceError> {
    let kin = c.kinematics();
    let rotation = resolve_trajectory_rotation(&spec.euler)?;
    let tau = friction_torque_vector(x);
    let mut seed = initial_seed(&kin, &trajectory_point(spec.parameter(0), &rotation))?;
    let mut t_vals = Vec::with_capacity(spec.samples());
    let mut fc = Vec::with_capacity(spec.samples());
    let mut qs = Vec::with_capacity(spec.samples());
    let mut rconds = Vec::with_capacity(spec.samples());
    for i in 0..spec.samples() {
        let t = spec.parameter(i);
        let target = trajectory_point(t, &rotation);
        let q = kin
            .inverse(&target, &seed, 1e-8, 200)
            .map_err(|e| ForceError::Unreachable { t, source: e })?;
        seed = q;
        let j = kin.jacobian(&q);
        let (f, rcond) = operating_wrench(&j, &tau).map_err(|e| e.at_parameter(t))?;
        t_vals.push(t);
        fc.push(f.force_magnitude());
        qs.push(q);
        rconds.push(rcond);
    }
    let max = fc.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = fc.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ForceProfile { t: t_vals, fc, q: qs, rcond: rconds, max, min })
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum ForceError {
    #[error("near-singular configuration (rcond {rcond:.3e})")]
    SingularConfiguration { rcond: f64 },
    #[error("singular configuration at trajectory parameter t = {t}")]
    SingularAt { t: f64 },
    #[error("trajectory unreachable at t = {t}: {source}")]
    Unreachable { t: f64, source: IkError },
    #[error("no Euler convention makes the tool axis point at the ground")]
    BadOrientation,
}

impl ForceError {
    fn at_parameter(self, t: f64) -> ForceError {
        match self {
            ForceError::SingularConfiguration { .. } => ForceError::SingularAt { t },
            other => other,
        }
    }
}
