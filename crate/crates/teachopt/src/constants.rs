//! Fixed physical parameters of the manipulator.

use crate::kinematics::{DhRow, Kinematics};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// Fixed masses, link lengths, rod densities and the D-H table.
///
/// `l5` has no catalogued value; the shipped default of 0.25 m is a modeling
/// assumption and is echoed as a warning in reports. `l3` and `l4` are tied
/// to the D-H entries `a3` and `d4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManipulatorConstants {
    /// Joint masses m1..m6 (kg).
    pub joint_mass: [f64; 6],
    /// Link masses mL1..mL5 (kg).
    pub link_mass: [f64; 5],
    /// Link 2 length (m).
    pub l2: f64,
    /// Link 3 length (m), tied to D-H a3.
    pub l3: f64,
    /// Link 4 length (m), tied to D-H d4.
    pub l4: f64,
    /// Link 5 length (m). No catalogued value; default is an assumption.
    pub l5: f64,
    /// Linear density of counterweight rod A (kg/m).
    pub rho_a: f64,
    /// Linear density of counterweight rod B (kg/m).
    pub rho_b: f64,
    /// Gravitational acceleration (m/s^2).
    pub g: f64,
    /// D-H table, joints 1..6.
    pub dh: [DhRow; 6],
}

/// Default value of `l5`; flagged in reports because it is an assumption,
/// not a catalogued length.
pub const DEFAULT_L5: f64 = 0.25;

impl Default for ManipulatorConstants {
    fn default() -> Self {
        ManipulatorConstants {
            joint_mass: [4.136, 8.225, 9.665, 1.249, 4.185, 2.013],
            link_mass: [0.631, 2.071, 1.816, 0.340, 0.358],
            l2: 0.79,
            l3: 0.155,
            l4: 0.995,
            l5: DEFAULT_L5,
            rho_a: 1.8,
            rho_b: 3.7,
            g: 9.8,
            dh: [
                DhRow::new(FRAC_PI_2, 0.160, 0.0),
                DhRow::new(0.0, 0.790, 0.0),
                DhRow::new(FRAC_PI_2, 0.155, 0.0),
                DhRow::new(-FRAC_PI_2, 0.0, 0.995),
                DhRow::new(FRAC_PI_2, 0.0, 0.0),
                DhRow::new(0.0, 0.0, 0.0),
            ],
        }
    }
}

impl ManipulatorConstants {
    pub fn kinematics(&self) -> Kinematics {
        Kinematics::new(self.dh)
    }

    /// Sum of the fixed joint and link masses (kg).
    pub fn structure_mass(&self) -> f64 {
        self.joint_mass.iter().sum::<f64>() + self.link_mass.iter().sum::<f64>()
    }
}
