//! Static gravity-balance model.
//!
//! Each balance condition reduces to a position-independent closed form
//! because the gravitational moment and the countering moment at a joint
//! share the same trigonometric factor in the joint angle. The grid-based
//! profile functions here exist as oracles for those closed forms.

use crate::constants::ManipulatorConstants;
use serde::{Deserialize, Serialize};

/// The nine optimization variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignVector {
    /// Counterweight A mass (kg), balances the wrist at Joint 5.
    pub m_a: f64,
    /// Counterweight B mass (kg), balances Joint 3.
    pub m_b: f64,
    /// Counterweight A rod length (m).
    pub l_a: f64,
    /// Counterweight B rod length (m).
    pub l_b: f64,
    /// Balancer spring stiffness (N/m).
    pub k: f64,
    /// Vertical virtual-link length between the balancer lower attachment
    /// and the Joint 2 axis (m).
    pub h_b: f64,
    /// Friction-disk torques at Joints 1..3 (N*m).
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
}

impl DesignVector {
    /// The human-expert baseline design.
    pub const EXPERT: DesignVector = DesignVector {
        m_a: 1.6,
        m_b: 25.0,
        l_a: 0.185,
        l_b: 0.462,
        k: 3730.0,
        h_b: 0.15,
        t1: 75.7,
        t2: 75.7,
        t3: 75.7,
    };

    pub fn as_array(&self) -> [f64; 9] {
        [self.m_a, self.m_b, self.l_a, self.l_b, self.k, self.h_b, self.t1, self.t2, self.t3]
    }

    pub fn from_array(v: [f64; 9]) -> Self {
        DesignVector {
            m_a: v[0],
            m_b: v[1],
            l_a: v[2],
            l_b: v[3],
            k: v[4],
            h_b: v[5],
            t1: v[6],
            t2: v[7],
            t3: v[8],
        }
    }

    pub const NAMES: [&'static str; 9] =
        ["mA", "mB", "LA", "LB", "k", "Hb", "T1", "T2", "T3"];
}

/// Angle-independent moment coefficients at a joint: both sides of the
/// balance equation multiply the same cosine of the joint angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentCoefficients {
    /// Gravitational moment coefficient (N*m).
    pub gravity_coef: f64,
    /// Countering moment coefficient from counterweight plus rod (N*m).
    pub counter_coef: f64,
}

/// Joint 5 moment coefficients: wrist gravity vs counterweight A.
pub fn joint5_coefficients(x: &DesignVector, c: &ManipulatorConstants) -> MomentCoefficients {
    MomentCoefficients {
        gravity_coef: (c.joint_mass[5] + c.link_mass[4]) * c.g * c.l5,
        counter_coef: x.m_a * c.g * x.l_a + x.l_a * x.l_a * c.rho_a * c.g / 2.0,
    }
}

/// Joint 5 constraint residual: a 5% imbalance band is allowed.
pub fn joint5_violation(x: &DesignVector, c: &ManipulatorConstants) -> f64 {
    let m = joint5_coefficients(x, c);
    ((m.gravity_coef - m.counter_coef).abs() - 0.05 * m.gravity_coef).max(0.0)
}

/// Joint 3 moment coefficients: upper-arm gravity vs counterweight B.
pub fn joint3_coefficients(x: &DesignVector, c: &ManipulatorConstants) -> MomentCoefficients {
    let wrist = x.m_a
        + c.joint_mass[5]
        + c.link_mass[4]
        + c.joint_mass[4]
        + x.l_a * c.rho_a;
    let gravity = (wrist * (c.l3 + c.l4)
        + c.joint_mass[3] * c.l3
        + c.link_mass[2] * c.l3 / 2.0
        + (2.0 * c.l3 + c.l4) * c.link_mass[3] / 2.0)
        * c.g;
    MomentCoefficients {
        gravity_coef: gravity,
        counter_coef: x.m_b * c.g * x.l_b + x.l_b * x.l_b * c.rho_b * c.g / 2.0,
    }
}

/// Joint 3 constraint residual: residual imbalance beyond friction torque T3.
pub fn joint3_violation(x: &DesignVector, c: &ManipulatorConstants) -> f64 {
    let m = joint3_coefficients(x, c);
    ((m.gravity_coef - m.counter_coef).abs() - x.t3).max(0.0)
}

/// Balancer length from the triangle made by Link 2, the virtual link and
/// the balancer itself.
pub fn balancer_length(q2: f64, h_b: f64, l2: f64) -> f64 {
    let radicand =
        h_b * h_b + l2 * l2 - 2.0 * h_b * l2 * (std::f64::consts::FRAC_PI_2 - q2).cos();
    debug_assert!(radicand > -1e-12, "degenerate balancer triangle");
    radicand.max(0.0).sqrt()
}

/// Constant cylinder force that cancels the position-dependent term of the
/// balancer moment: b = k (L2 - Hb).
pub fn cylinder_preload(x: &DesignVector, c: &ManipulatorConstants) -> f64 {
    x.k * (c.l2 - x.h_b)
}

/// Equivalent mass loading Link 2 at its tip.
pub fn equivalent_mass(x: &DesignVector, c: &ManipulatorConstants) -> f64 {
    c.joint_mass[2..6].iter().sum::<f64>()
        + x.m_a
        + x.m_b
        + x.l_a * c.rho_a
        + x.l_b * c.rho_b
        + c.link_mass[2]
        + c.link_mass[3]
        + c.link_mass[4]
        + c.link_mass[1] / 2.0
}

/// Pointwise |G2 - P2| over a grid of q2 values, keeping the full
/// square-root term. Oracle for the closed-form `joint2_violation`.
pub fn imbalance_profile_joint2(
    x: &DesignVector,
    c: &ManipulatorConstants,
    q2_grid: &[f64],
) -> Vec<f64> {
    let b = cylinder_preload(x, c);
    let me = equivalent_mass(x, c);
    q2_grid
        .iter()
        .map(|&q2| {
            let lk = balancer_length(q2, x.h_b, c.l2);
            let mut m = (me * c.g - x.k * x.h_b) * c.l2 * q2.cos();
            if lk > 0.0 {
                m += (x.k * (x.h_b - c.l2) + b) * x.h_b * c.l2 * q2.cos() / lk;
            }
            m.abs()
        })
        .collect()
}

/// Joint 2 constraint residual in closed form: with the cylinder preload set
/// by `cylinder_preload` the balancer term cancels and the worst case sits
/// at |cos q2| = 1.
pub fn joint2_violation(x: &DesignVector, c: &ManipulatorConstants) -> f64 {
    let me = equivalent_mass(x, c);
    ((me * c.g - x.k * x.h_b).abs() * c.l2 - x.t2).max(0.0)
}

/// Total device mass (kg): structure plus counterweights and rods.
pub fn total_mass(x: &DesignVector, c: &ManipulatorConstants) -> f64 {
    c.structure_mass() + x.m_a + x.m_b + x.l_a * c.rho_a + x.l_b * c.rho_b
}
