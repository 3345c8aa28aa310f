//! Constraint-domination comparison, fast non-dominated sorting and
//! crowding distance.

use super::Individual;
use std::cmp::Ordering;

/// Outcome of a constraint-domination comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdpOrdering {
    ABetter,
    BBetter,
    Incomparable,
}

/// Pareto dominance on raw objectives: `a` dominates `b` iff no worse in
/// every objective and strictly better in at least one.
pub fn pareto_dominates(a: &[f64; 3], b: &[f64; 3]) -> bool {
    let mut strictly = false;
    for i in 0..3 {
        if a[i] > b[i] {
            return false;
        }
        if a[i] < b[i] {
            strictly = true;
        }
    }
    strictly
}

/// Constraint-domination: feasible beats infeasible; two feasible solutions
/// compare by Pareto dominance; two infeasible ones by aggregate violation.
pub fn cdp_compare(a: &Individual, b: &Individual) -> CdpOrdering {
    match (a.eval.feasible, b.eval.feasible) {
        (true, true) => {
            if pareto_dominates(&a.eval.f, &b.eval.f) {
                CdpOrdering::ABetter
            } else if pareto_dominates(&b.eval.f, &a.eval.f) {
                CdpOrdering::BBetter
            } else {
                CdpOrdering::Incomparable
            }
        }
        (true, false) => CdpOrdering::ABetter,
        (false, true) => CdpOrdering::BBetter,
        (false, false) => match a.eval.cv.partial_cmp(&b.eval.cv) {
            Some(Ordering::Less) => CdpOrdering::ABetter,
            Some(Ordering::Greater) => CdpOrdering::BBetter,
            _ => CdpOrdering::Incomparable,
        },
    }
}

/// Fast non-dominated sort under constraint-domination. Returns fronts as
/// index sets; front 0 is the non-dominated set.
pub fn fast_nondominated_sort(pop: &[Individual]) -> Vec<Vec<usize>> {
    let n = pop.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            match cdp_compare(&pop[i], &pop[j]) {
                CdpOrdering::ABetter => {
                    dominated_by[i].push(j);
                    domination_count[j] += 1;
                }
                CdpOrdering::BBetter => {
                    dominated_by[j].push(i);
                    domination_count[i] += 1;
                }
                CdpOrdering::Incomparable => {}
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::take(&mut current));
        current = next;
    }
    fronts
}

/// Crowding distance over all three objectives for one front. Boundary
/// members per objective get +inf; interior members accumulate normalized
/// neighbor gaps.
pub fn crowding_distance(front: &[usize], pop: &[Individual]) -> Vec<f64> {
    let n = front.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut dist = vec![0.0f64; n];
    for obj in 0..3 {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            pop[front[a]].eval.f[obj]
                .partial_cmp(&pop[front[b]].eval.f[obj])
                .unwrap_or(Ordering::Equal)
        });
        let lo = pop[front[order[0]]].eval.f[obj];
        let hi = pop[front[order[n - 1]]].eval.f[obj];
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for w in 1..n - 1 {
            let gap = pop[front[order[w + 1]]].eval.f[obj] - pop[front[order[w - 1]]].eval.f[obj];
            dist[order[w]] += gap / range;
        }
    }
    dist
}
