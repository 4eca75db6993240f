//! Starting assignments for refinement.
//!
//! The greedy builders create one team at a time and close it as soon as its
//! skill sums reach every requirement. Ties between equally scored candidates
//! always go to the lowest student index.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Assignment, BenefitMatrix, Instance, TaskSpec};
use crate::objective::{meets_requirements, population_variance, ratio};
use crate::scalar::Scalar;

/// Strategy for the initial assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMethod {
    /// Global most-benefit first.
    Gmbf,
    /// Local most-benefit first.
    Lmbf,
    /// Local most-benefit fair first.
    Lmbff,
    /// Balanced random teams.
    Random { team_count: usize, seed: u64 },
}

impl InitMethod {
    pub fn build<T: Scalar>(
        self,
        instance: &Instance<T>,
        spec: &TaskSpec<T>,
        benefit: &BenefitMatrix,
    ) -> Result<Assignment> {
        match self {
            InitMethod::Gmbf => Ok(gmbf(instance, spec, benefit)),
            InitMethod::Lmbf => Ok(lmbf(instance, spec, benefit)),
            InitMethod::Lmbff => Ok(lmbff(instance, spec, benefit)),
            InitMethod::Random { team_count, seed } => random_init(instance.n(), team_count, seed),
        }
    }
}

/// Collects students into teams in a fixed order, closing a team once it
/// meets every requirement.
struct TeamBuilder<'a, T> {
    instance: &'a Instance<T>,
    requirements: &'a [T],
    labels: Vec<usize>,
    placed: Vec<bool>,
    remaining: usize,
    team: Vec<usize>,
    sums: Vec<T>,
    team_id: usize,
}

impl<'a, T: Scalar> TeamBuilder<'a, T> {
    fn new(instance: &'a Instance<T>, requirements: &'a [T]) -> Self {
        Self {
            instance,
            requirements,
            labels: vec![usize::MAX; instance.n()],
            placed: vec![false; instance.n()],
            remaining: instance.n(),
            team: Vec::new(),
            sums: vec![T::zero(); instance.k()],
            team_id: 0,
        }
    }

    /// Adds `student` to the open team; returns true if that closed it.
    fn add(&mut self, student: usize) -> bool {
        debug_assert!(!self.placed[student]);
        self.placed[student] = true;
        self.remaining -= 1;
        self.labels[student] = self.team_id;
        self.team.push(student);
        for (acc, &v) in self.sums.iter_mut().zip(self.instance.skill(student)) {
            *acc += v;
        }
        if meets_requirements(&self.sums, self.requirements) {
            self.team.clear();
            self.sums.iter_mut().for_each(|s| *s = T::zero());
            self.team_id += 1;
            true
        } else {
            false
        }
    }

    fn unplaced(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.placed.len()).filter(|&i| !self.placed[i])
    }

    fn finish(self) -> Assignment {
        Assignment::new(self.labels).expect("greedy builders use consecutive team ids")
    }
}

/// Global most-benefit first: students are taken in decreasing order of how
/// many classmates they benefit from overall.
pub fn gmbf<T: Scalar>(
    instance: &Instance<T>,
    spec: &TaskSpec<T>,
    benefit: &BenefitMatrix,
) -> Assignment {
    let mut order: Vec<usize> = (0..instance.n()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(benefit.row_sum(i)), i));
    let mut builder = TeamBuilder::new(instance, &spec.requirements);
    for i in order {
        builder.add(i);
    }
    builder.finish()
}

/// Unplaced student with the fewest global benefit opportunities.
fn lowest_global_benefit<T: Scalar>(b: &TeamBuilder<'_, T>, benefit: &BenefitMatrix) -> usize {
    b.unplaced()
        .min_by_key(|&i| (benefit.row_sum(i), i))
        .expect("called with students remaining")
}

/// Local most-benefit first: each team is seeded with the unplaced student of
/// lowest global benefit, then grows by the candidate who benefits from the
/// largest share of the current team.
pub fn lmbf<T: Scalar>(
    instance: &Instance<T>,
    spec: &TaskSpec<T>,
    benefit: &BenefitMatrix,
) -> Assignment {
    let mut builder = TeamBuilder::new(instance, &spec.requirements);
    while builder.remaining > 0 {
        let seed = lowest_global_benefit(&builder, benefit);
        if builder.add(seed) {
            continue;
        }
        while builder.remaining > 0 {
            let mut best = None;
            for c in builder.unplaced() {
                let score = builder.team.iter().filter(|&&j| benefit.get(c, j)).count();
                if best.is_none_or(|(_, s)| score > s) {
                    best = Some((c, score));
                }
            }
            let (c, _) = best.expect("students remaining");
            if builder.add(c) {
                break;
            }
        }
    }
    builder.finish()
}

/// Running aggregates of individual benefit over the students placed so far.
struct PlacedBenefit<T> {
    ind: Vec<T>,
    total: T,
    count: usize,
    group_total: Vec<T>,
    group_count: Vec<usize>,
}

impl<T: Scalar> PlacedBenefit<T> {
    fn new(n: usize, m: usize) -> Self {
        Self {
            ind: vec![T::zero(); n],
            total: T::zero(),
            count: 0,
            group_total: vec![T::zero(); m],
            group_count: vec![0; m],
        }
    }

    fn y(&self) -> T {
        ratio_t(self.total, self.count)
    }

    /// Variance of the group benefits over groups with at least one placed member.
    fn z_with(&self, extra: Option<(usize, T)>) -> T {
        let gben: Vec<T> = (0..self.group_total.len())
            .filter_map(|q| {
                let (mut sum, mut cnt) = (self.group_total[q], self.group_count[q]);
                if let Some((g, v)) = extra {
                    if g == q {
                        sum += v;
                        cnt += 1;
                    }
                }
                (cnt > 0).then(|| sum / T::of_usize(cnt))
            })
            .collect();
        population_variance(&gben)
    }

    fn set(&mut self, student: usize, group: usize, value: T, fresh: bool) {
        let old = self.ind[student];
        self.ind[student] = value;
        self.total += value - old;
        self.group_total[group] += value - old;
        if fresh {
            self.count += 1;
            self.group_count[group] += 1;
        }
    }
}

fn ratio_t<T: Scalar>(sum: T, count: usize) -> T {
    if count == 0 {
        T::zero()
    } else {
        sum / T::of_usize(count)
    }
}

/// Local most-benefit fair first: like [`lmbf`], but the next member minimizes
/// `-gamma * dY + delta * dZ`, with `Y` and `Z` evaluated over the students
/// placed so far and the candidate contributing its benefit from the
/// current team.
pub fn lmbff<T: Scalar>(
    instance: &Instance<T>,
    spec: &TaskSpec<T>,
    benefit: &BenefitMatrix,
) -> Assignment {
    let mut builder = TeamBuilder::new(instance, &spec.requirements);
    let mut agg = PlacedBenefit::new(instance.n(), instance.m());

    // Refreshes the open team's benefits after `student` joined it.
    let place = |builder: &mut TeamBuilder<'_, T>, agg: &mut PlacedBenefit<T>, student: usize| {
        let mut team = builder.team.clone();
        team.push(student);
        let closed = builder.add(student);
        for &i in &team {
            let gains = team.iter().filter(|&&j| benefit.get(i, j)).count();
            agg.set(
                i,
                instance.group_of(i),
                ratio(gains, team.len() - 1),
                i == student,
            );
        }
        closed
    };

    while builder.remaining > 0 {
        let seed = lowest_global_benefit(&builder, benefit);
        if place(&mut builder, &mut agg, seed) {
            continue;
        }
        while builder.remaining > 0 {
            let (y0, z0) = (agg.y(), agg.z_with(None));
            let size = builder.team.len();
            let mut best: Option<(usize, T)> = None;
            for c in builder.unplaced() {
                let gains = builder.team.iter().filter(|&&j| benefit.get(c, j)).count();
                let ind: T = ratio(gains, size);
                let y1 = (agg.total + ind) / T::of_usize(agg.count + 1);
                let z1 = agg.z_with(Some((instance.group_of(c), ind)));
                let score = spec.delta * (z1 - z0) - spec.gamma * (y1 - y0);
                if best.is_none_or(|(_, s)| score < s) {
                    best = Some((c, score));
                }
            }
            let (c, _) = best.expect("students remaining");
            if place(&mut builder, &mut agg, c) {
                break;
            }
        }
    }
    builder.finish()
}

/// Shuffles students with a seeded RNG and deals them into `team_count`
/// teams; the first `n % team_count` teams get one extra student.
pub fn random_init(n: usize, team_count: usize, seed: u64) -> Result<Assignment> {
    if team_count == 0 || team_count > n {
        return Err(Error::TeamCount {
            teams: team_count,
            students: n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let (base, extra) = (n / team_count, n % team_count);
    let mut labels = vec![0; n];
    let mut pos = 0;
    for team in 0..team_count {
        let size = base + usize::from(team < extra);
        for &i in &order[pos..pos + size] {
            labels[i] = team;
        }
        pos += size;
    }
    Assignment::new(labels)
}
