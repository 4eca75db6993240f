//! Domain types: students, the task, the benefit relation and team assignments.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A cohort of students: skill vectors in `[0, 1]` and protected-group labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<T> {
    /// Row-major `n x k` skill matrix.
    skills: Vec<T>,
    dims: usize,
    groups: Vec<usize>,
    group_members: Vec<Vec<usize>>,
    student_ids: Vec<String>,
    group_labels: Vec<String>,
}

impl<T: Scalar> Instance<T> {
    /// Builds a validated instance.
    ///
    /// `groups[i]` is an index into `group_labels`; every label must have at
    /// least one member.
    pub fn new(
        skills: Vec<Vec<T>>,
        groups: Vec<usize>,
        student_ids: Vec<String>,
        group_labels: Vec<String>,
    ) -> Result<Self> {
        let n = skills.len();
        if n < 2 {
            return Err(Error::TooFewStudents(n));
        }
        let dims = skills[0].len();
        if dims == 0 {
            return Err(Error::NoSkills);
        }
        for (what, got) in [("groups", groups.len()), ("student_ids", student_ids.len())] {
            if got != n {
                return Err(Error::Length {
                    what,
                    got,
                    expected: n,
                });
            }
        }
        let m = group_labels.len();
        if m == 0 {
            return Err(Error::Parameter {
                name: "group_labels",
                reason: "at least one protected group is required".into(),
            });
        }
        let mut flat = Vec::with_capacity(n * dims);
        for (i, row) in skills.iter().enumerate() {
            if row.len() != dims {
                return Err(Error::SkillArity {
                    student: i,
                    got: row.len(),
                    expected: dims,
                });
            }
            for (p, &v) in row.iter().enumerate() {
                if !(v >= T::zero() && v <= T::one()) {
                    return Err(Error::SkillRange {
                        student: i,
                        dim: p,
                        value: v.as_f64(),
                    });
                }
                flat.push(v);
            }
        }
        let mut group_members = vec![Vec::new(); m];
        for (i, &g) in groups.iter().enumerate() {
            if g >= m {
                return Err(Error::GroupId {
                    student: i,
                    group: g,
                    groups: m,
                });
            }
            group_members[g].push(i);
        }
        if let Some(q) = group_members.iter().position(Vec::is_empty) {
            return Err(Error::EmptyGroup(q));
        }
        Ok(Self {
            skills: flat,
            dims,
            groups,
            group_members,
            student_ids,
            group_labels,
        })
    }

    /// Instance with generated ids `s0, s1, ...` and group labels `g0, g1, ...`.
    pub fn from_rows(skills: Vec<Vec<T>>, groups: Vec<usize>) -> Result<Self> {
        let ids = (0..skills.len()).map(|i| format!("s{i}")).collect();
        let m = groups.iter().copied().max().map_or(0, |g| g + 1);
        let labels = (0..m).map(|q| format!("g{q}")).collect();
        Self::new(skills, groups, ids, labels)
    }

    pub fn n(&self) -> usize {
        self.groups.len()
    }

    pub fn k(&self) -> usize {
        self.dims
    }

    pub fn m(&self) -> usize {
        self.group_members.len()
    }

    #[inline]
    pub fn skill(&self, student: usize) -> &[T] {
        &self.skills[student * self.dims..(student + 1) * self.dims]
    }

    #[inline]
    pub fn group_of(&self, student: usize) -> usize {
        self.groups[student]
    }

    pub fn groups(&self) -> &[usize] {
        &self.groups
    }

    pub fn group_members(&self, group: usize) -> &[usize] {
        &self.group_members[group]
    }

    pub fn student_ids(&self) -> &[String] {
        &self.student_ids
    }

    pub fn group_labels(&self) -> &[String] {
        &self.group_labels
    }

    /// Copy of the skill matrix as rows.
    pub fn skill_rows(&self) -> Vec<Vec<T>> {
        self.skills.chunks(self.dims).map(<[T]>::to_vec).collect()
    }
}

/// Skill requirements of the target task and the objective weights.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec<T> {
    pub requirements: Vec<T>,
    /// Minimum skill excess (exclusive) for one student to benefit from another.
    pub benefit_epsilon: T,
    /// Weight of the average individual benefit.
    pub gamma: T,
    /// Weight of the group-benefit variance.
    pub delta: T,
}

impl<T: Scalar> TaskSpec<T> {
    pub fn new(requirements: Vec<T>, benefit_epsilon: T, gamma: T, delta: T) -> Result<Self> {
        let spec = Self {
            requirements,
            benefit_epsilon,
            gamma,
            delta,
        };
        spec.check()?;
        Ok(spec)
    }

    /// `k` skills each requiring 2.0, no benefit threshold, `gamma = delta = 1`.
    pub fn standard(k: usize) -> Self {
        Self {
            requirements: vec![T::of_f64(2.0); k],
            benefit_epsilon: T::zero(),
            gamma: T::one(),
            delta: T::one(),
        }
    }

    fn check(&self) -> Result<()> {
        if self
            .requirements
            .iter()
            .any(|&r| r.is_nan() || r < T::zero())
        {
            return Err(Error::Parameter {
                name: "requirements",
                reason: "every requirement must be a non-negative number".into(),
            });
        }
        for (name, v) in [
            ("benefit_epsilon", self.benefit_epsilon),
            ("gamma", self.gamma),
            ("delta", self.delta),
        ] {
            if !v.is_finite() || v < T::zero() {
                return Err(Error::Parameter {
                    name,
                    reason: format!("must be finite and >= 0, got {v}"),
                });
            }
        }
        Ok(())
    }

    /// Checks that the spec fits `instance` (one requirement per skill).
    pub fn validate_for(&self, instance: &Instance<T>) -> Result<()> {
        self.check()?;
        if self.requirements.len() != instance.k() {
            return Err(Error::Length {
                what: "requirements",
                got: self.requirements.len(),
                expected: instance.k(),
            });
        }
        Ok(())
    }
}

/// Binary "student `i` benefits from student `j`" relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenefitMatrix {
    n: usize,
    bits: Vec<bool>,
    row_sums: Vec<usize>,
}

impl BenefitMatrix {
    /// `B[i][j] = 1` iff some skill of `j` exceeds that of `i` by strictly more
    /// than `epsilon`. The diagonal is always 0.
    pub fn compute<T: Scalar>(instance: &Instance<T>, epsilon: T) -> Self {
        let n = instance.n();
        let mut bits = vec![false; n * n];
        for i in 0..n {
            let si = instance.skill(i);
            for j in 0..n {
                if i != j {
                    let sj = instance.skill(j);
                    bits[i * n + j] = si.iter().zip(sj).any(|(&a, &b)| b - a > epsilon);
                }
            }
        }
        Self::from_bits(n, bits)
    }

    /// Builds the relation from raw rows; the diagonal is forced to 0.
    pub fn from_rows(rows: &[Vec<bool>]) -> Self {
        let n = rows.len();
        let mut bits = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "benefit matrix must be square");
            bits.extend(row.iter().enumerate().map(|(j, &b)| b && i != j));
        }
        Self::from_bits(n, bits)
    }

    fn from_bits(n: usize, bits: Vec<bool>) -> Self {
        let row_sums = bits
            .chunks(n.max(1))
            .map(|r| r.iter().filter(|&&b| b).count())
            .collect();
        Self { n, bits, row_sums }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }

    /// Number of students `i` would benefit from if everyone were in one team.
    #[inline]
    pub fn row_sum(&self, i: usize) -> usize {
        self.row_sums[i]
    }
}

/// A partition of all students into `L` non-empty teams with ids `0..L`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    team_of: Vec<usize>,
    team_count: usize,
}

impl Assignment {
    /// Accepts team ids that are exactly `0..L` with every id used.
    pub fn new(team_of: Vec<usize>) -> Result<Self> {
        let team_count = team_of.iter().copied().max().map_or(0, |t| t + 1);
        let mut used = vec![false; team_count];
        for &t in &team_of {
            used[t] = true;
        }
        if let Some(t) = used.iter().position(|&u| !u) {
            return Err(Error::EmptyTeam(t));
        }
        Ok(Self {
            team_of,
            team_count,
        })
    }

    /// Renumbers arbitrary team labels to `0..L`, keeping their relative order.
    pub fn compact(labels: &[usize]) -> Self {
        let mut remap = BTreeMap::new();
        for &t in labels {
            remap.insert(t, 0);
        }
        for (new, slot) in remap.values_mut().enumerate() {
            *slot = new;
        }
        let team_count = remap.len();
        Self {
            team_of: labels.iter().map(|t| remap[t]).collect(),
            team_count,
        }
    }

    pub fn n(&self) -> usize {
        self.team_of.len()
    }

    pub fn team_count(&self) -> usize {
        self.team_count
    }

    #[inline]
    pub fn team_of(&self, student: usize) -> usize {
        self.team_of[student]
    }

    pub fn labels(&self) -> &[usize] {
        &self.team_of
    }

    /// Members of each team, in student order.
    pub fn teams(&self) -> Vec<Vec<usize>> {
        let mut teams = vec![Vec::new(); self.team_count];
        for (i, &t) in self.team_of.iter().enumerate() {
            teams[t].push(i);
        }
        teams
    }

    pub fn team_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.team_count];
        for &t in &self.team_of {
            sizes[t] += 1;
        }
        sizes
    }

    pub fn singleton_count(&self) -> usize {
        self.team_sizes().iter().filter(|&&s| s == 1).count()
    }
}
