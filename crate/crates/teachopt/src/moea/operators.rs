//! Real-coded variation operators: simulated binary crossover, polynomial
//! mutation and binary tournament selection.

use super::sorting::{cdp_compare, CdpOrdering};
use super::Individual;
use crate::balance::DesignVector;
use crate::problem::{clamp, Bounds};
use rand::Rng;

/// Simulated binary crossover with distribution index `eta`. Applied
/// per-coordinate with probability 0.5 once the pair is selected for
/// crossover (probability `p_c`); children are clamped to bounds.
pub fn sbx_crossover(
    p1: &DesignVector,
    p2: &DesignVector,
    bounds: &Bounds,
    eta: f64,
    p_c: f64,
    rng: &mut impl Rng,
) -> (DesignVector, DesignVector) {
    let a = p1.as_array();
    let b = p2.as_array();
    let mut c1 = a;
    let mut c2 = b;
    if rng.gen::<f64>() <= p_c {
        for i in 0..9 {
            if rng.gen::<f64>() > 0.5 || (a[i] - b[i]).abs() < 1e-14 {
                continue;
            }
            let u: f64 = rng.gen();
            let beta = if u <= 0.5 {
                (2.0 * u).powf(1.0 / (eta + 1.0))
            } else {
                (1.0 / (2.0 * (1.0 - u))).powf(1.0 / (eta + 1.0))
            };
            let mean = 0.5 * (a[i] + b[i]);
            let half_spread = 0.5 * beta * (a[i] - b[i]).abs();
            c1[i] = mean - half_spread;
            c2[i] = mean + half_spread;
            if rng.gen::<f64>() <= 0.5 {
                std::mem::swap(&mut c1[i], &mut c2[i]);
            }
        }
    }
    (
        clamp(&DesignVector::from_array(c1), bounds),
        clamp(&DesignVector::from_array(c2), bounds),
    )
}

/// Polynomial mutation with distribution index `eta`; each coordinate
/// mutates with probability `p_m` and stays inside its bounds (the
/// perturbation polynomial is bound-aware, not clamp-based).
pub fn polynomial_mutation(
    x: &DesignVector,
    bounds: &Bounds,
    eta: f64,
    p_m: f64,
    rng: &mut impl Rng,
) -> DesignVector {
    let mut v = x.as_array();
    for i in 0..9 {
        if rng.gen::<f64>() > p_m {
            continue;
        }
        let (lo, hi) = (bounds.low[i], bounds.high[i]);
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        let u: f64 = rng.gen();
        let delta1 = (v[i] - lo) / span;
        let delta2 = (hi - v[i]) / span;
        let pow = 1.0 / (eta + 1.0);
        let deltaq = if u < 0.5 {
            let xy = 1.0 - delta1;
            (2.0 * u + (1.0 - 2.0 * u) * xy.powf(eta + 1.0)).powf(pow) - 1.0
        } else {
            let xy = 1.0 - delta2;
            1.0 - (2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy.powf(eta + 1.0)).powf(pow)
        };
        v[i] = (v[i] + deltaq * span).clamp(lo, hi);
    }
    DesignVector::from_array(v)
}

/// Binary tournament under constraint-domination with crowding-distance
/// tiebreak. Returns the index of the winner.
pub fn tournament(pop: &[Individual], rng: &mut impl Rng) -> usize {
    let i = rng.gen_range(0..pop.len());
    let j = rng.gen_range(0..pop.len());
    match cdp_compare(&pop[i], &pop[j]) {
        CdpOrdering::ABetter => i,
        CdpOrdering::BBetter => j,
        CdpOrdering::Incomparable => {
            if pop[i].rank != pop[j].rank {
                if pop[i].rank < pop[j].rank {
                    i
                } else {
                    j
                }
            } else if pop[i].crowding > pop[j].crowding {
                i
            } else {
                j
            }
        }
    }
}
