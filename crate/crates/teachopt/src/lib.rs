//! Modeling and multi-objective design optimization for a passive 6-DOF
//! teaching manipulator.
//!
//! The device is an actuator-free arm an operator moves by hand to record
//! trajectories. Its design couples three concerns: keeping the arm
//! gravity-balanced everywhere in the workspace (counterweights, a pneumatic
//! spring balancer, friction disks), keeping the hand force needed to move
//! it small and even along a trajectory, and keeping the whole device light.
//! This crate models all three, poses them as a three-objective constrained
//! optimization over nine design variables, solves it with NSGA-II under
//! constraint domination, and mines the resulting Pareto front for reusable
//! design rules.
//!
//! Module map:
//! - [`kinematics`]: D-H forward kinematics, geometric Jacobian, damped
//!   least-squares inverse kinematics.
//! - [`balance`]: closed-form gravity-balance residuals at Joints 2, 3, 5
//!   and the total-mass model.
//! - [`force`]: operating-force profile along the evaluation trajectory via
//!   the Jacobian-transpose wrench solve.
//! - [`problem`]: objectives, constraints, bounds and design evaluation.
//! - [`moea`]: NSGA-II with constraint domination.
//! - [`innovization`]: piecewise-linear rule mining over the Pareto front.
//! - [`config`], [`archive`], [`cli`]: configuration, run archives with
//!   resume, and the command-line surface.
//!
//! The narrative guide lives in `book/`; its code snippets double as
//! doctests below so the book cannot drift from the library.

pub mod archive;
pub mod balance;
pub mod cli;
pub mod config;
pub mod constants;
pub mod force;
pub mod innovization;
pub mod kinematics;
pub mod moea;
pub mod problem;

// Book chapters with runnable snippets, compiled as doctests.
#[doc = include_str!("../../../book/src/kinematics.md")]
mod book_kinematics {}
#[doc = include_str!("../../../book/src/balance.md")]
mod book_balance {}
#[doc = include_str!("../../../book/src/operating-force.md")]
mod book_operating_force {}
#[doc = include_str!("../../../book/src/optimization.md")]
mod book_optimization {}
#[doc = include_str!("../../../book/src/innovization.md")]
mod book_innovization {}
