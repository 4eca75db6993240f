//! Test oracles written from the definitions, without touching the library's
//! objective code.

#![allow(dead_code)]

use fairteams::{Instance, TaskSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TOL: f64 = 1e-9;

/// Plain-data copy of an instance and task.
#[derive(Debug, Clone)]
pub struct Problem {
    pub skills: Vec<Vec<f64>>,
    pub groups: Vec<usize>,
    pub m: usize,
    pub req: Vec<f64>,
    pub eps: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl Problem {
    pub fn n(&self) -> usize {
        self.skills.len()
    }

    pub fn k(&self) -> usize {
        self.req.len()
    }

    pub fn instance(&self) -> Instance {
        Instance::from_rows(self.skills.clone(), self.groups.clone()).unwrap()
    }

    pub fn spec(&self) -> TaskSpec {
        TaskSpec::new(self.req.clone(), self.eps, self.gamma, self.delta).unwrap()
    }

    pub fn benefits(&self, i: usize, j: usize) -> bool {
        i != j && (0..self.k()).any(|p| self.skills[j][p] - self.skills[i][p] > self.eps)
    }
}

/// (x, y, z, f) for any labelling; only labels that occur count as teams.
pub fn naive_objective(p: &Problem, labels: &[usize]) -> (f64, f64, f64, f64) {
    let n = p.n();
    let mut team_ids: Vec<usize> = labels.to_vec();
    team_ids.sort_unstable();
    team_ids.dedup();

    let mut x = 0.0;
    for &t in &team_ids {
        for d in 0..p.k() {
            let sum: f64 = (0..n)
                .filter(|&i| labels[i] == t)
                .map(|i| p.skills[i][d])
                .sum();
            let short = p.req[d] - sum.min(p.req[d]);
            x += short * short;
        }
    }
    x /= (team_ids.len() * p.k()) as f64;

    let ind: Vec<f64> = (0..n)
        .map(|i| {
            let mates: Vec<usize> = (0..n)
                .filter(|&j| j != i && labels[j] == labels[i])
                .collect();
            if mates.is_empty() {
                0.0
            } else {
                mates.iter().filter(|&&j| p.benefits(i, j)).count() as f64 / mates.len() as f64
            }
        })
        .collect();
    let y = ind.iter().sum::<f64>() / n as f64;

    let gben: Vec<f64> = (0..p.m)
        .map(|q| {
            let members: Vec<usize> = (0..n).filter(|&i| p.groups[i] == q).collect();
            members.iter().map(|&i| ind[i]).sum::<f64>() / members.len() as f64
        })
        .collect();
    let mean = gben.iter().sum::<f64>() / p.m as f64;
    let z = gben.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / p.m as f64;

    (x, y, z, x - p.gamma * y + p.delta * z)
}

pub fn naive_f(p: &Problem, labels: &[usize]) -> f64 {
    naive_objective(p, labels).3
}

/// Random problem with every group populated and skills in [0,1].
pub fn random_problem(rng: &mut ChaCha8Rng, n: usize, k: usize, m: usize) -> Problem {
    let skills = (0..n)
        .map(|_| (0..k).map(|_| rng.random_range(0.0..=1.0)).collect())
        .collect();
    let mut groups: Vec<usize> = (0..n)
        .map(|i| if i < m { i } else { rng.random_range(0..m) })
        .collect();
    for i in (1..n).rev() {
        groups.swap(i, rng.random_range(0..=i));
    }
    Problem {
        skills,
        groups,
        m,
        req: (0..k).map(|_| rng.random_range(0.5..2.5)).collect(),
        eps: if rng.random_bool(0.5) {
            0.0
        } else {
            rng.random_range(0.0..0.2)
        },
        gamma: rng.random_range(0.0..2.0),
        delta: rng.random_range(0.0..2.0),
    }
}

pub fn seeded_problem(seed: u64, n: usize, k: usize, m: usize) -> Problem {
    random_problem(&mut ChaCha8Rng::seed_from_u64(seed), n, k, m)
}

/// Random labelling of `n` students over `teams` labels, every label used.
pub fn random_labels(rng: &mut ChaCha8Rng, n: usize, teams: usize) -> Vec<usize> {
    let mut labels: Vec<usize> = (0..n)
        .map(|i| {
            if i < teams {
                i
            } else {
                rng.random_range(0..teams)
            }
        })
        .collect();
    for i in (1..n).rev() {
        labels.swap(i, rng.random_range(0..=i));
    }
    labels
}

/// Best single-student move gain over every (student, other existing team).
pub fn best_single_move_gain(p: &Problem, labels: &[usize]) -> f64 {
    let before = naive_f(p, labels);
    let mut teams: Vec<usize> = labels.to_vec();
    teams.sort_unstable();
    teams.dedup();
    let mut best = f64::NEG_INFINITY;
    let mut trial = labels.to_vec();
    for i in 0..p.n() {
        for &t in &teams {
            if t == labels[i] {
                continue;
            }
            trial[i] = t;
            best = best.max(before - naive_f(p, &trial));
            trial[i] = labels[i];
        }
    }
    best
}

/// Calls `visit` with every partition of `n` items into at most `max_teams`
/// blocks, as restricted-growth label strings.
pub fn for_each_partition(n: usize, max_teams: usize, visit: &mut impl FnMut(&[usize])) {
    fn rec(
        labels: &mut Vec<usize>,
        n: usize,
        used: usize,
        max: usize,
        visit: &mut impl FnMut(&[usize]),
    ) {
        if labels.len() == n {
            visit(labels);
            return;
        }
        for t in 0..(used + 1).min(max) {
            labels.push(t);
            rec(labels, n, used.max(t + 1), max, visit);
            labels.pop();
        }
    }
    rec(&mut Vec::with_capacity(n), n, 0, max_teams, visit);
}

/// Checks that every label in `0..team_count` is used and nothing else is.
pub fn assert_total(labels: &[usize], team_count: usize) {
    let mut sizes = vec![0usize; team_count];
    for &t in labels {
        assert!(t < team_count, "label {t} out of range {team_count}");
        sizes[t] += 1;
    }
    assert!(sizes.iter().all(|&s| s > 0), "empty team in {labels:?}");
}
