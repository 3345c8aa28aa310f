//! NSGA-II with the constraint-domination principle.
//!
//! The generational loop is sequential; offspring evaluation fans out over a
//! worker pool and results are gathered by offspring index, so runs with the
//! same seed are bit-identical regardless of thread count. All RNG draws for
//! variation happen on the main loop.

pub mod operators;
pub mod sorting;

use crate::balance::DesignVector;
use crate::problem::{random_design, Evaluation, Problem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use operators::{polynomial_mutation, sbx_crossover, tournament};
pub use sorting::{cdp_compare, crowding_distance, fast_nondominated_sort, CdpOrdering};

/// One population member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub x: DesignVector,
    pub eval: Evaluation,
    pub rank: usize,
    /// Crowding distance; boundary members carry `f64::INFINITY`.
    #[serde(with = "serde_inf")]
    pub crowding: f64,
}

/// JSON has no infinity literal (serde_json writes `null`), but boundary
/// crowding distances and empty-set minima are infinite, so encode
/// non-finite values as strings.
mod serde_inf {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(de::Error::custom(format!("bad float value {other:?}"))),
            },
        }
    }

    pub mod array3 {
        use serde::ser::SerializeTuple;
        use serde::{Deserialize, Deserializer, Serializer};

        #[derive(serde::Serialize, Deserialize)]
        struct Wrap(#[serde(with = "super")] f64);

        pub fn serialize<S: Serializer>(v: &[f64; 3], s: S) -> Result<S::Ok, S::Error> {
            let mut t = s.serialize_tuple(3)?;
            for &x in v {
                t.serialize_element(&Wrap(x))?;
            }
            t.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[f64; 3], D::Error> {
            let v = <[Wrap; 3]>::deserialize(d)?;
            Ok([v[0].0, v[1].0, v[2].0])
        }
    }
}

/// Algorithm parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub pop_size: usize,
    pub generations: usize,
    pub p_crossover: f64,
    /// Per-coordinate mutation probability; defaults to 1/9.
    pub p_mutation: f64,
    pub eta_sbx: f64,
    pub eta_pm: f64,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            pop_size: 300,
            generations: 5000,
            p_crossover: 0.9,
            p_mutation: 1.0 / 9.0,
            eta_sbx: 20.0,
            eta_pm: 20.0,
            seed: 1,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), MoeaError> {
        if self.pop_size < 4 || self.pop_size % 2 != 0 {
            return Err(MoeaError::Config(format!(
                "population size must be even and >= 4, got {}",
                self.pop_size
            )));
        }
        for (name, p) in [("crossover", self.p_crossover), ("mutation", self.p_mutation)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(MoeaError::Config(format!(
                    "{name} probability must be in [0, 1], got {p}"
                )));
            }
        }
        Ok(())
    }
}

/// Complete optimizer state; serializable so an interrupted run can resume
/// with the exact RNG stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptState {
    pub generation: usize,
    pub population: Vec<Individual>,
    pub rng: ChaCha8Rng,
}

/// Per-generation summary statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenStats {
    pub generation: usize,
    pub feasible_fraction: f64,
    /// Per-objective minimum over feasible members; infinite when the
    /// generation has none.
    #[serde(with = "serde_inf::array3")]
    pub best_f: [f64; 3],
    pub median_cv: f64,
    /// Hypervolume of the feasible front-0 set against the reference point.
    pub hypervolume: f64,
}

/// Final outcome of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoArchive {
    pub config: RunConfig,
    pub stats: Vec<GenStats>,
    /// Feasible, mutually non-dominated members of the final population.
    pub front: Vec<Individual>,
}

#[derive(Debug, Error, PartialEq)]
pub enum MoeaError {
    #[error("invalid run configuration: {0}")]
    Config(String),
}

fn evaluate_all(problem: &Problem, designs: &[DesignVector]) -> Vec<Evaluation> {
    designs.par_iter().map(|x| problem.evaluate(x)).collect()
}

fn assign_ranks(pop: &mut [Individual]) {
    let fronts = fast_nondominated_sort(pop);
    for (rank, front) in fronts.iter().enumerate() {
        let dist = crowding_distance(front, pop);
        for (&i, &d) in front.iter().zip(&dist) {
            pop[i].rank = rank;
            pop[i].crowding = d;
        }
    }
}

/// Initial state: uniform random population, evaluated and ranked.
pub fn init_state(config: &RunConfig, problem: &Problem) -> Result<OptState, MoeaError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let designs: Vec<DesignVector> = (0..config.pop_size)
        .map(|_| random_design(&problem.bounds, &mut rng))
        .collect();
    let evals = evaluate_all(problem, &designs);
    let mut population: Vec<Individual> = designs
        .into_iter()
        .zip(evals)
        .map(|(x, eval)| Individual { x, eval, rank: 0, crowding: 0.0 })
        .collect();
    assign_ranks(&mut population);
    Ok(OptState { generation: 0, population, rng })
}

/// One generation: variation, offspring evaluation, merge and environmental
/// selection.
pub fn step(state: &mut OptState, config: &RunConfig, problem: &Problem) {
    let n = config.pop_size;
    let mut offspring_x = Vec::with_capacity(n);
    while offspring_x.len() < n {
        let p1 = tournament(&state.population, &mut state.rng);
        let p2 = tournament(&state.population, &mut state.rng);
        let (c1, c2) = sbx_crossover(
            &state.population[p1].x,
            &state.population[p2].x,
            &problem.bounds,
            config.eta_sbx,
            config.p_crossover,
            &mut state.rng,
        );
        for c in [c1, c2] {
            if offspring_x.len() < n {
                offspring_x.push(polynomial_mutation(
                    &c,
                    &problem.bounds,
                    config.eta_pm,
                    config.p_mutation,
                    &mut state.rng,
                ));
            }
        }
    }
    let evals = evaluate_all(problem, &offspring_x);
    let mut merged = state.population.clone();
    merged.extend(
        offspring_x
            .into_iter()
            .zip(evals)
            .map(|(x, eval)| Individual { x, eval, rank: 0, crowding: 0.0 }),
    );
    // Environmental selection: fill front by front, truncate the split front
    // by descending crowding distance.
    let fronts = fast_nondominated_sort(&merged);
    let mut next: Vec<Individual> = Vec::with_capacity(n);
    for (rank, front) in fronts.iter().enumerate() {
        let dist = crowding_distance(front, &merged);
        let mut members: Vec<(usize, f64)> =
            front.iter().copied().zip(dist.iter().copied()).collect();
        if next.len() + members.len() > n {
            members.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
            members.truncate(n - next.len());
        }
        for (idx, d) in members {
            let mut ind = merged[idx].clone();
            ind.rank = rank;
            ind.crowding = d;
            next.push(ind);
        }
        if next.len() == n {
            break;
        }
    }
    // Re-rank within the surviving population so tournament pressure next
    // generation reflects the new front structure.
    assign_ranks(&mut next);
    state.population = next;
    state.generation += 1;
}

/// Feasible non-dominated subset of the population.
pub fn final_front(population: &[Individual]) -> Vec<Individual> {
    let fronts = fast_nondominated_sort(population);
    let Some(first) = fronts.first() else { return Vec::new() };
    first
        .iter()
        .map(|&i| population[i].clone())
        .filter(|ind| ind.eval.feasible)
        .collect()
}

/// Summary statistics for one generation against a reference point.
pub fn generation_stats(state: &OptState, reference: &[f64; 3]) -> GenStats {
    let pop = &state.population;
    let feasible: Vec<&Individual> = pop.iter().filter(|i| i.eval.feasible).collect();
    let mut best = [f64::INFINITY; 3];
    for ind in &feasible {
        for k in 0..3 {
            best[k] = best[k].min(ind.eval.f[k]);
        }
    }
    let mut cvs: Vec<f64> = pop.iter().map(|i| i.eval.cv).collect();
    cvs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let front = final_front(pop);
    let points: Vec<[f64; 3]> = front.iter().map(|i| i.eval.f).collect();
    GenStats {
        generation: state.generation,
        feasible_fraction: feasible.len() as f64 / pop.len() as f64,
        best_f: best,
        median_cv: cvs[cvs.len() / 2],
        hypervolume: hypervolume_3d(&points, reference),
    }
}

/// Full run from scratch. `on_generation` fires after every generation
/// (including generation 0 initialization).
pub fn run(
    config: &RunConfig,
    problem: &Problem,
    reference: &[f64; 3],
    mut on_generation: impl FnMut(&OptState, &GenStats),
) -> Result<ParetoArchive, MoeaError> {
    let mut state = init_state(config, problem)?;
    let mut stats = vec![generation_stats(&state, reference)];
    on_generation(&state, &stats[0]);
    while state.generation < config.generations {
        step(&mut state, config, problem);
        let s = generation_stats(&state, reference);
        on_generation(&state, &s);
        stats.push(s);
    }
    Ok(ParetoArchive { config: *config, stats, front: final_front(&state.population) })
}

/// Exact hypervolume of a 3D minimization front against `reference`.
/// Points not strictly below the reference in every objective contribute
/// nothing. Sweeps distinct z levels, accumulating 2D dominated area.
pub fn hypervolume_3d(points: &[[f64; 3]], reference: &[f64; 3]) -> f64 {
    let pts: Vec<[f64; 3]> = points
        .iter()
        .copied()
        .filter(|p| p.iter().zip(reference).all(|(a, r)| a < r))
        .collect();
    if pts.is_empty() {
        return 0.0;
    }
    let mut zs: Vec<f64> = pts.iter().map(|p| p[2]).collect();
    zs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    zs.dedup();
    let mut hv = 0.0;
    for (i, &z) in zs.iter().enumerate() {
        let z_next = if i + 1 < zs.len() { zs[i + 1] } else { reference[2] };
        let slab: Vec<[f64; 2]> = pts
            .iter()
            .filter(|p| p[2] <= z)
            .map(|p| [p[0], p[1]])
            .collect();
        hv += area_2d(&slab, &[reference[0], reference[1]]) * (z_next - z);
    }
    hv
}

/// Area dominated by a 2D minimization set inside the box below `reference`.
fn area_2d(points: &[[f64; 2]], reference: &[f64; 2]) -> f64 {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap());
    let mut area = 0.0;
    let mut best_y = reference[1];
    let mut i = 0;
    while i < pts.len() {
        let x = pts[i][0];
        let mut y_min = f64::INFINITY;
        while i < pts.len() && pts[i][0] == x {
            y_min = y_min.min(pts[i][1]);
            i += 1;
        }
        let x_next = if i < pts.len() { pts[i][0] } else { reference[0] };
        if y_min < best_y {
            best_y = y_min;
        }
        area += (x_next - x) * (reference[1] - best_y);
    }
    area
}
