//! Exact evaluation of the team-formation objective.
//!
//! `F = X - gamma * Y + delta * Z` where `X` is the mean squared skill
//! shortfall of the teams, `Y` the mean individual benefit and `Z` the
//! population variance of the per-group mean benefit. `Y`, `Z` and group
//! benefits are on the fraction scale.

use crate::error::{Error, Result};
use crate::model::{Assignment, BenefitMatrix, Instance, TaskSpec};
use crate::scalar::Scalar;

/// The three objective terms and their weighted combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveBreakdown<T> {
    /// Average skill deficiency.
    pub x: T,
    /// Average individual benefit.
    pub y: T,
    /// Variance of group benefit.
    pub z: T,
    /// Combined value, `x - gamma * y + delta * z`.
    pub f: T,
}

impl<T: Scalar> ObjectiveBreakdown<T> {
    pub fn combine(x: T, y: T, z: T, gamma: T, delta: T) -> Self {
        Self {
            x,
            y,
            z,
            f: x - gamma * y + delta * z,
        }
    }
}

/// Squared shortfall of one team's skill sums below the requirements.
#[inline]
pub fn team_shortfall<T: Scalar>(sums: &[T], requirements: &[T]) -> T {
    sums.iter()
        .zip(requirements)
        .map(|(&s, &r)| {
            let gap = r - r.min(s);
            gap * gap
        })
        .sum()
}

/// Whether a team's skill sums meet every requirement.
#[inline]
pub fn meets_requirements<T: Scalar>(sums: &[T], requirements: &[T]) -> bool {
    sums.iter().zip(requirements).all(|(&s, &r)| s >= r)
}

/// Per-team skill sums, `[team][skill]`.
pub fn team_skill_sums<T: Scalar>(instance: &Instance<T>, assignment: &Assignment) -> Vec<Vec<T>> {
    let mut sums = vec![vec![T::zero(); instance.k()]; assignment.team_count()];
    for i in 0..instance.n() {
        for (acc, &v) in sums[assignment.team_of(i)]
            .iter_mut()
            .zip(instance.skill(i))
        {
            *acc += v;
        }
    }
    sums
}

/// Fraction of `student`'s teammates that `student` benefits from; 0 when
/// the student is alone.
pub fn individual_benefit<T: Scalar>(
    benefit: &BenefitMatrix,
    assignment: &Assignment,
    student: usize,
) -> T {
    let team = assignment.team_of(student);
    let (mut mates, mut gains) = (0usize, 0usize);
    for j in 0..assignment.n() {
        if j != student && assignment.team_of(j) == team {
            mates += 1;
            gains += usize::from(benefit.get(student, j));
        }
    }
    ratio(gains, mates)
}

#[inline]
pub(crate) fn ratio<T: Scalar>(num: usize, den: usize) -> T {
    if den == 0 {
        T::zero()
    } else {
        T::of_usize(num) / T::of_usize(den)
    }
}

/// Individual benefit of every student, computed team by team.
pub fn individual_benefits<T: Scalar>(benefit: &BenefitMatrix, assignment: &Assignment) -> Vec<T> {
    let mut out = vec![T::zero(); assignment.n()];
    for team in assignment.teams() {
        let mates = team.len() - 1;
        for &i in &team {
            let gains = team.iter().filter(|&&j| benefit.get(i, j)).count();
            out[i] = ratio(gains, mates);
        }
    }
    out
}

/// Mean individual benefit of the members of each protected group.
pub fn group_benefits<T: Scalar>(
    benefit: &BenefitMatrix,
    assignment: &Assignment,
    instance: &Instance<T>,
) -> Vec<T> {
    let ind = individual_benefits::<T>(benefit, assignment);
    (0..instance.m())
        .map(|q| mean_over(&ind, instance.group_members(q)))
        .collect()
}

fn mean_over<T: Scalar>(values: &[T], members: &[usize]) -> T {
    let total: T = members.iter().map(|&i| values[i]).sum();
    total / T::of_usize(members.len())
}

/// Group benefit of protected group `group`.
pub fn group_benefit<T: Scalar>(
    benefit: &BenefitMatrix,
    assignment: &Assignment,
    instance: &Instance<T>,
    group: usize,
) -> Result<T> {
    if group >= instance.m() {
        return Err(Error::Parameter {
            name: "group",
            reason: format!("group {group} does not exist (m = {})", instance.m()),
        });
    }
    let members = instance.group_members(group);
    if members.is_empty() {
        return Err(Error::EmptyGroup(group));
    }
    let ind = individual_benefits::<T>(benefit, assignment);
    Ok(mean_over(&ind, members))
}

/// Average skill deficiency over teams and skills.
pub fn skill_deficiency<T: Scalar>(
    instance: &Instance<T>,
    assignment: &Assignment,
    requirements: &[T],
) -> T {
    let total: T = team_skill_sums(instance, assignment)
        .iter()
        .map(|sums| team_shortfall(sums, requirements))
        .sum();
    total / T::of_usize(assignment.team_count() * instance.k())
}

/// Mean individual benefit over all students.
pub fn avg_individual_benefit<T: Scalar>(benefit: &BenefitMatrix, assignment: &Assignment) -> T {
    let ind = individual_benefits::<T>(benefit, assignment);
    let total: T = ind.iter().copied().sum();
    total / T::of_usize(ind.len())
}

/// Population variance of a slice.
pub fn population_variance<T: Scalar>(values: &[T]) -> T {
    if values.is_empty() {
        return T::zero();
    }
    let n = T::of_usize(values.len());
    let mean = values.iter().copied().sum::<T>() / n;
    values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n
}

/// Variance of the group benefits across protected groups.
pub fn group_benefit_variance<T: Scalar>(
    benefit: &BenefitMatrix,
    assignment: &Assignment,
    instance: &Instance<T>,
) -> T {
    population_variance(&group_benefits(benefit, assignment, instance))
}

/// All objective terms for `assignment`.
pub fn objective<T: Scalar>(
    instance: &Instance<T>,
    assignment: &Assignment,
    spec: &TaskSpec<T>,
    benefit: &BenefitMatrix,
) -> ObjectiveBreakdown<T> {
    let ind = individual_benefits::<T>(benefit, assignment);
    let n = T::of_usize(instance.n());
    let y = ind.iter().copied().sum::<T>() / n;
    let gben: Vec<T> = (0..instance.m())
        .map(|q| mean_over(&ind, instance.group_members(q)))
        .collect();
    let z = population_variance(&gben);
    let x = skill_deficiency(instance, assignment, &spec.requirements);
    ObjectiveBreakdown::combine(x, y, z, spec.gamma, spec.delta)
}
