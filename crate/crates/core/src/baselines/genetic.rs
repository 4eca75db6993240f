use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Assignment, BenefitMatrix, Instance, TaskSpec};
use crate::objective::{objective, ObjectiveBreakdown};
use crate::scalar::Scalar;

/// Genetic algorithm settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaParams {
    /// Probability that an offspring gets one swap mutation.
    pub mutation_prob: f64,
    pub population: usize,
    pub generations: usize,
    /// Best chromosomes copied unchanged into the next generation.
    pub elitism: usize,
    pub team_count: usize,
    pub seed: u64,
}

impl GaParams {
    /// Mutation 0.1, population 200, 300 generations, elitism 1.
    pub fn standard(team_count: usize, seed: u64) -> Self {
        Self {
            mutation_prob: 0.1,
            population: 200,
            generations: 300,
            elitism: 1,
            team_count,
            seed,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.population < 2 {
            return Err(Error::Parameter {
                name: "population",
                reason: format!("must be >= 2, got {}", self.population),
            });
        }
        if !(0.0..=1.0).contains(&self.mutation_prob) {
            return Err(Error::Parameter {
                name: "mutation_prob",
                reason: format!("must be in [0, 1], got {}", self.mutation_prob),
            });
        }
        if self.elitism > self.population {
            return Err(Error::Parameter {
                name: "elitism",
                reason: "cannot exceed the population size".into(),
            });
        }
        if self.team_count == 0 || self.team_count > n {
            return Err(Error::TeamCount {
                teams: self.team_count,
                students: n,
            });
        }
        Ok(())
    }
}

/// One candidate solution: a team id per student.
#[derive(Debug, Clone, PartialEq)]
pub struct Chromosome<T> {
    pub genes: Vec<usize>,
    /// Objective of the compacted assignment.
    pub fitness: T,
}

#[derive(Debug, Clone)]
pub struct GaOutcome<T> {
    pub assignment: Assignment,
    pub objective: ObjectiveBreakdown<T>,
    /// Best fitness after each generation (index 0 is the initial population).
    pub best_history: Vec<T>,
}

struct Fitness<'a, T> {
    instance: &'a Instance<T>,
    spec: &'a TaskSpec<T>,
    benefit: &'a BenefitMatrix,
}

impl<T: Scalar> Fitness<'_, T> {
    fn score(&self, genes: &[usize]) -> T {
        objective(
            self.instance,
            &Assignment::compact(genes),
            self.spec,
            self.benefit,
        )
        .f
    }

    fn population(&self, genes: Vec<Vec<usize>>) -> Vec<Chromosome<T>> {
        genes
            .into_par_iter()
            .map(|g| Chromosome {
                fitness: self.score(&g),
                genes: g,
            })
            .collect()
    }
}

fn rank<T: Scalar>(pop: &[Chromosome<T>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pop.len()).collect();
    order.sort_by(|&a, &b| {
        pop[a]
            .fitness
            .partial_cmp(&pop[b].fitness)
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

fn tournament<T: Scalar>(pop: &[Chromosome<T>], rng: &mut ChaCha8Rng) -> usize {
    let (a, b) = (
        rng.random_range(0..pop.len()),
        rng.random_range(0..pop.len()),
    );
    if pop[b].fitness < pop[a].fitness {
        b
    } else {
        a
    }
}

/// Genetic algorithm minimizing the objective, starting from uniformly
/// random chromosomes.
pub fn genetic_algorithm<T: Scalar>(
    instance: &Instance<T>,
    spec: &TaskSpec<T>,
    benefit: &BenefitMatrix,
    params: &GaParams,
) -> Result<GaOutcome<T>> {
    params.validate(instance.n())?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let initial = (0..params.population)
        .map(|_| {
            (0..instance.n())
                .map(|_| rng.random_range(0..params.team_count))
                .collect()
        })
        .collect();
    evolve_with(instance, spec, benefit, params, initial, rng)
}

/// Genetic algorithm from a given initial population.
pub fn evolve<T: Scalar>(
    instance: &Instance<T>,
    spec: &TaskSpec<T>,
    benefit: &BenefitMatrix,
    params: &GaParams,
    initial: Vec<Vec<usize>>,
) -> Result<GaOutcome<T>> {
    params.validate(instance.n())?;
    let rng = ChaCha8Rng::seed_from_u64(params.seed);
    evolve_with(instance, spec, benefit, params, initial, rng)
}

fn evolve_with<T: Scalar>(
    instance: &Instance<T>,
    spec: &TaskSpec<T>,
    benefit: &BenefitMatrix,
    params: &GaParams,
    initial: Vec<Vec<usize>>,
    mut rng: ChaCha8Rng,
) -> Result<GaOutcome<T>> {
    let n = instance.n();
    if initial.len() != params.population {
        return Err(Error::Length {
            what: "initial population",
            got: initial.len(),
            expected: params.population,
        });
    }
    if let Some(bad) = initial
        .iter()
        .find(|g| g.len() != n || g.iter().any(|&t| t >= params.team_count))
    {
        return Err(Error::Parameter {
            name: "initial population",
            reason: format!(
                "chromosome {bad:?} is not {n} genes below {}",
                params.team_count
            ),
        });
    }
    let fitness = Fitness {
        instance,
        spec,
        benefit,
    };
    let mut pop = fitness.population(initial);
    let mut best_history = vec![pop[rank(&pop)[0]].fitness];
    for _ in 0..params.generations {
        let order = rank(&pop);
        let mut next: Vec<Vec<usize>> = order[..params.elitism]
            .iter()
            .map(|&i| pop[i].genes.clone())
            .collect();
        while next.len() < params.population {
            let (pa, pb) = (tournament(&pop, &mut rng), tournament(&pop, &mut rng));
            let mut child: Vec<usize> = pop[pa]
                .genes
                .iter()
                .zip(&pop[pb].genes)
                .map(|(&a, &b)| if rng.random_bool(0.5) { a } else { b })
                .collect();
            if n >= 2 && rng.random::<f64>() < params.mutation_prob {
                let i = rng.random_range(0..n);
                let j = (i + rng.random_range(1..n)) % n;
                child.swap(i, j);
            }
            next.push(child);
        }
        pop = fitness.population(next);
        best_history.push(pop[rank(&pop)[0]].fitness);
    }
    let best = &pop[rank(&pop)[0]];
    let assignment = Assignment::compact(&best.genes);
    Ok(GaOutcome {
        objective: objective(instance, &assignment, spec, benefit),
        assignment,
        best_history,
    })
}
