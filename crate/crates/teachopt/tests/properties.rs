//! Property tests for the invariants the rest of the crate leans on.

use proptest::prelude::*;
use teachopt::balance::{
    equivalent_mass, imbalance_profile_joint2, joint2_violation, total_mass, DesignVector,
};
use teachopt::constants::ManipulatorConstants;
use teachopt::innovization::{detect_breakpoint, linear_fit, segmented_fit};
use teachopt::kinematics::{normalize_angle, JointConfig, Kinematics};
use teachopt::moea::{cdp_compare, sbx_crossover, polynomial_mutation, CdpOrdering, Individual};
use teachopt::problem::{clamp, Bounds, Evaluation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arm() -> Kinematics {
    ManipulatorConstants::default().kinematics()
}

fn angle() -> impl Strategy<Value = f64> {
    -30.0..30.0f64
}

fn joint_config() -> impl Strategy<Value = JointConfig> {
    [angle(), angle(), angle(), angle(), angle(), angle()].prop_map(JointConfig)
}

fn in_bounds_design() -> impl Strategy<Value = DesignVector> {
    let b = Bounds::default();
    let each: Vec<_> = (0..9).map(|i| b.low[i]..=b.high[i]).collect();
    [
        each[0].clone(),
        each[1].clone(),
        each[2].clone(),
        each[3].clone(),
        each[4].clone(),
        each[5].clone(),
        each[6].clone(),
        each[7].clone(),
        each[8].clone(),
    ]
    .prop_map(DesignVector::from_array)
}

fn individual() -> impl Strategy<Value = Individual> {
    (
        [0.0..1.0f64, 0.0..1.0, 0.0..1.0],
        any::<bool>(),
        0.0..10.0f64,
    )
        .prop_map(|(f, feasible, cv)| Individual {
            x: DesignVector::EXPERT,
            eval: Evaluation {
                f,
                g: [0.0; 3],
                cv: if feasible { 0.0 } else { cv.max(1e-6) },
                feasible,
                failure: None,
            },
            rank: 0,
            crowding: 0.0,
        })
}

proptest! {
    #[test]
    fn normalize_angle_lands_in_half_open_pi_interval(q in -1e3..1e3f64) {
        let r = normalize_angle(q);
        prop_assert!(r > -std::f64::consts::PI && r <= std::f64::consts::PI);
        // Idempotent, and 2*pi-periodic up to rounding.
        prop_assert_eq!(normalize_angle(r), r);
        let shifted = normalize_angle(q + 2.0 * std::f64::consts::PI);
        prop_assert!((shifted - r).abs() < 1e-9 || (shifted - r).abs() > 6.28);
    }

    #[test]
    fn forward_kinematics_invariant_under_normalization(q in joint_config()) {
        let kin = arm();
        let a = kin.forward(&q);
        let b = kin.forward(&q.normalized());
        prop_assert!((a.position - b.position).norm() < 1e-9);
        prop_assert!((a.rotation.matrix() - b.rotation.matrix()).norm() < 1e-9);
    }

    #[test]
    fn forward_rotation_stays_orthonormal(q in joint_config()) {
        let r = arm().forward(&q).rotation;
        let gram = r.matrix().transpose() * r.matrix();
        prop_assert!((gram - nalgebra::Matrix3::identity()).norm() < 1e-12);
    }

    #[test]
    fn jacobian_last_column_moves_nothing(q in joint_config()) {
        // Joint 6 rotates the end-effector frame in place: a6 = d6 = 0.
        let j = arm().jacobian(&q);
        prop_assert!(j.fixed_view::<3, 1>(0, 5).norm() < 1e-12);
    }

    #[test]
    fn cdp_comparison_is_antisymmetric(a in individual(), b in individual()) {
        let ab = cdp_compare(&a, &b);
        let ba = cdp_compare(&b, &a);
        let expected = match ab {
            CdpOrdering::ABetter => CdpOrdering::BBetter,
            CdpOrdering::BBetter => CdpOrdering::ABetter,
            CdpOrdering::Incomparable => CdpOrdering::Incomparable,
        };
        prop_assert_eq!(ba, expected);
        prop_assert_eq!(cdp_compare(&a, &a), CdpOrdering::Incomparable);
    }

    #[test]
    fn variation_operators_respect_bounds(
        p1 in in_bounds_design(),
        p2 in in_bounds_design(),
        seed in any::<u64>(),
    ) {
        let bounds = Bounds::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c1, c2) = sbx_crossover(&p1, &p2, &bounds, 1.0, 20.0, &mut rng);
        prop_assert!(bounds.contains(&c1) && bounds.contains(&c2));
        let mut m = c1;
        polynomial_mutation(&mut m, &bounds, 1.0, 20.0, &mut rng);
        prop_assert!(bounds.contains(&m));
    }

    #[test]
    fn clamp_is_a_projection(v in prop::array::uniform9(-1e4..1e4f64)) {
        let bounds = Bounds::default();
        let x = clamp(&DesignVector::from_array(v), &bounds);
        prop_assert!(bounds.contains(&x));
        prop_assert_eq!(clamp(&x, &bounds), x);
    }

    #[test]
    fn joint2_closed_form_bounds_the_profile(x in in_bounds_design()) {
        // The closed form is the exact maximum of the angle-dependent
        // imbalance, so no grid point may exceed it.
        let c = ManipulatorConstants::default();
        let mut x = x;
        x.t2 = 0.0;
        let grid: Vec<f64> = (0..500).map(|i| i as f64 * 0.0126).collect();
        let closed = joint2_violation(&x, &c);
        for v in imbalance_profile_joint2(&x, &c, &grid) {
            prop_assert!(v <= closed + 1e-9);
        }
    }

    #[test]
    fn masses_grow_with_counterweights(x in in_bounds_design(), dm in 0.01..5.0f64) {
        let c = ManipulatorConstants::default();
        let mut heavier = x;
        heavier.m_b += dm;
        prop_assert!((total_mass(&heavier, &c) - total_mass(&x, &c) - dm).abs() < 1e-9);
        prop_assert!((equivalent_mass(&heavier, &c) - equivalent_mass(&x, &c) - dm).abs() < 1e-9);
    }

    #[test]
    fn least_squares_is_optimal_among_lines(
        ys in prop::collection::vec(-10.0..10.0f64, 12..60),
        ds in -1.0..1.0f64,
        di in -1.0..1.0f64,
    ) {
        let xs: Vec<f64> = (0..ys.len()).map(|i| i as f64).collect();
        let fit = linear_fit(&xs, &ys).unwrap();
        prop_assert!((-1e-9..=1.0 + 1e-9).contains(&fit.r2));
        let sse = |s: f64, b: f64| -> f64 {
            xs.iter().zip(&ys).map(|(&x, &y)| (y - s * x - b).powi(2)).sum()
        };
        let best = sse(fit.slope, fit.intercept);
        prop_assert!(best <= sse(fit.slope + ds, fit.intercept + di) + 1e-9);
    }

    #[test]
    fn breakpoint_lies_in_the_data_and_never_hurts(
        ys in prop::collection::vec(-5.0..5.0f64, 25..80),
    ) {
        let xs: Vec<f64> = (0..ys.len()).map(|i| i as f64 * 0.5).collect();
        let bp = detect_breakpoint(&xs, &ys, 10).unwrap();
        prop_assert!(bp > xs[0] && bp < *xs.last().unwrap());
        let seg = segmented_fit("x", "y", &xs, &ys, 10).unwrap();
        prop_assert!(seg.sse_gain >= -1e-12);
    }
}
