//! Assignment plus the cached aggregates needed to price moves in `O(m + k)`.

use crate::error::{Error, Result};
use crate::model::{Assignment, BenefitMatrix, Instance, TaskSpec};
use crate::objective::{team_shortfall, ObjectiveBreakdown};
use crate::refine::queue::Move;
use crate::scalar::Scalar;

/// Mutable refinement state over a fixed set of team slots.
///
/// Slots keep their ids for the lifetime of the state; a slot emptied by a
/// move is dead and never receives students again.
#[derive(Debug, Clone)]
pub struct SolverState<'a, T> {
    instance: &'a Instance<T>,
    spec: &'a TaskSpec<T>,
    benefit: &'a BenefitMatrix,
    slots: usize,
    team_of: Vec<usize>,
    members: Vec<Vec<usize>>,
    live: usize,
    /// `[slot][skill]` skill sums.
    sums: Vec<T>,
    shortfall: Vec<T>,
    shortfall_total: T,
    /// `[student][slot]`: members of the slot (other than the student) the
    /// student benefits from.
    benefit_from: Vec<u32>,
    /// `[student][slot][group]`: members of the slot in the group (other than
    /// the student) who benefit from the student.
    benefited_by: Vec<u32>,
    /// `[slot][group]`: sum of `benefit_from` over the slot's members of the group.
    team_group_gain: Vec<u64>,
    /// Sum of individual benefits per group.
    group_sum: Vec<T>,
    current: ObjectiveBreakdown<T>,
}

impl<'a, T: Scalar> SolverState<'a, T> {
    pub fn new(
        instance: &'a Instance<T>,
        spec: &'a TaskSpec<T>,
        benefit: &'a BenefitMatrix,
        assignment: &Assignment,
    ) -> Result<Self> {
        spec.validate_for(instance)?;
        let n = instance.n();
        for (what, got) in [
            ("assignment", assignment.n()),
            ("benefit matrix", benefit.n()),
        ] {
            if got != n {
                return Err(Error::Length {
                    what,
                    got,
                    expected: n,
                });
            }
        }
        let (k, m, slots) = (instance.k(), instance.m(), assignment.team_count());
        let mut state = Self {
            instance,
            spec,
            benefit,
            slots,
            team_of: assignment.labels().to_vec(),
            members: assignment.teams(),
            live: slots,
            sums: vec![T::zero(); slots * k],
            shortfall: vec![T::zero(); slots],
            shortfall_total: T::zero(),
            benefit_from: vec![0; n * slots],
            benefited_by: vec![0; n * slots * m],
            team_group_gain: vec![0; slots * m],
            group_sum: vec![T::zero(); m],
            current: ObjectiveBreakdown::combine(
                T::zero(),
                T::zero(),
                T::zero(),
                T::zero(),
                T::zero(),
            ),
        };
        for i in 0..n {
            for j in 0..n {
                if i != j && benefit.get(i, j) {
                    state.benefit_from[i * slots + state.team_of[j]] += 1;
                    let at = state.bb_index(j, state.team_of[i], instance.group_of(i));
                    state.benefited_by[at] += 1;
                }
            }
        }
        for t in 0..slots {
            state.refresh_slot(t);
        }
        state.refresh_totals();
        Ok(state)
    }

    #[inline]
    fn bb_index(&self, student: usize, slot: usize, group: usize) -> usize {
        (student * self.slots + slot) * self.instance.m() + group
    }

    pub fn instance(&self) -> &'a Instance<T> {
        self.instance
    }

    pub fn spec(&self) -> &'a TaskSpec<T> {
        self.spec
    }

    pub fn benefit(&self) -> &'a BenefitMatrix {
        self.benefit
    }

    /// Number of team slots, live or dead.
    pub fn slots(&self) -> usize {
        self.slots
    }

    /// Number of non-empty teams.
    pub fn live_teams(&self) -> usize {
        self.live
    }

    #[inline]
    pub fn is_live(&self, slot: usize) -> bool {
        !self.members[slot].is_empty()
    }

    #[inline]
    pub fn team_of(&self, student: usize) -> usize {
        self.team_of[student]
    }

    pub fn team_size(&self, slot: usize) -> usize {
        self.members[slot].len()
    }

    pub fn objective(&self) -> ObjectiveBreakdown<T> {
        self.current
    }

    /// Current partition with dead slots dropped and ids compacted.
    pub fn assignment(&self) -> Assignment {
        Assignment::compact(&self.team_of)
    }

    /// Raw slot labels (may reference non-contiguous ids).
    pub fn labels(&self) -> &[usize] {
        &self.team_of
    }

    /// Recomputes skill sums, shortfall and per-group gain counts of a slot
    /// from its members.
    fn refresh_slot(&mut self, slot: usize) {
        let (k, m) = (self.instance.k(), self.instance.m());
        let sums = &mut self.sums[slot * k..(slot + 1) * k];
        sums.iter_mut().for_each(|s| *s = T::zero());
        for &i in &self.members[slot] {
            for (acc, &v) in sums.iter_mut().zip(self.instance.skill(i)) {
                *acc += v;
            }
        }
        self.shortfall[slot] = if self.members[slot].is_empty() {
            T::zero()
        } else {
            team_shortfall(sums, &self.spec.requirements)
        };
        let gains = &mut self.team_group_gain[slot * m..(slot + 1) * m];
        gains.iter_mut().for_each(|g| *g = 0);
        for &i in &self.members[slot] {
            gains[self.instance.group_of(i)] += u64::from(self.benefit_from[i * self.slots + slot]);
        }
    }

    fn refresh_totals(&mut self) {
        let m = self.instance.m();
        self.live = self.members.iter().filter(|t| !t.is_empty()).count();
        self.shortfall_total = self.shortfall.iter().copied().sum();
        self.group_sum.iter_mut().for_each(|g| *g = T::zero());
        for slot in 0..self.slots {
            let mates = self.members[slot].len().saturating_sub(1);
            if mates == 0 {
                continue;
            }
            let den = T::of_usize(mates);
            for q in 0..m {
                self.group_sum[q] += T::of_usize(self.team_group_gain[slot * m + q] as usize) / den;
            }
        }
        self.current = self.evaluate(self.shortfall_total, self.live, |q| self.group_sum[q]);
    }

    fn evaluate(
        &self,
        shortfall_total: T,
        live: usize,
        group_sum: impl Fn(usize) -> T,
    ) -> ObjectiveBreakdown<T> {
        let inst = self.instance;
        let m = inst.m();
        let x = shortfall_total / T::of_usize(live * inst.k());
        let y = (0..m).map(&group_sum).sum::<T>() / T::of_usize(inst.n());
        let gben = |q: usize| group_sum(q) / T::of_usize(inst.group_members(q).len());
        let mean = (0..m).map(gben).sum::<T>() / T::of_usize(m);
        let z = (0..m)
            .map(|q| {
                let d = gben(q) - mean;
                d * d
            })
            .sum::<T>()
            / T::of_usize(m);
        ObjectiveBreakdown::combine(x, y, z, self.spec.gamma, self.spec.delta)
    }

    /// Move of `student` to `dest`, validated against the current state.
    pub fn make_move(&self, student: usize, dest: usize) -> Result<Move> {
        let source = self.team_of[student];
        if dest >= self.slots || !self.is_live(dest) {
            return Err(Error::InvalidMove(format!(
                "team {dest} is not a live team"
            )));
        }
        if dest == source {
            return Err(Error::InvalidMove(format!(
                "student {student} is already in team {dest}"
            )));
        }
        Ok(Move {
            student,
            source,
            dest,
        })
    }

    fn check(&self, mv: Move) -> Result<()> {
        if mv.student >= self.team_of.len() || self.team_of[mv.student] != mv.source {
            return Err(Error::InvalidMove(format!(
                "student {} is not in team {}",
                mv.student, mv.source
            )));
        }
        self.make_move(mv.student, mv.dest).map(|_| ())
    }

    /// Objective terms after `mv`, without applying it.
    pub fn objective_after(&self, mv: Move) -> Result<ObjectiveBreakdown<T>> {
        self.check(mv)?;
        Ok(self.objective_after_unchecked(mv))
    }

    fn objective_after_unchecked(&self, mv: Move) -> ObjectiveBreakdown<T> {
        let inst = self.instance;
        let (k, m) = (inst.k(), inst.m());
        let Move {
            student: x,
            source: s,
            dest: d,
        } = mv;
        let skill = inst.skill(x);
        let req = &self.spec.requirements;
        let size_s = self.members[s].len();
        let size_d = self.members[d].len();

        let gap = |r: T, v: T| {
            let g = r - r.min(v);
            g * g
        };
        let new_sf_s = if size_s == 1 {
            T::zero()
        } else {
            (0..k)
                .map(|p| gap(req[p], self.sums[s * k + p] - skill[p]))
                .sum()
        };
        let new_sf_d: T = (0..k)
            .map(|p| gap(req[p], self.sums[d * k + p] + skill[p]))
            .sum();
        let shortfall_total =
            self.shortfall_total - self.shortfall[s] - self.shortfall[d] + new_sf_s + new_sf_d;
        let live = self.live - usize::from(size_s == 1);

        let gx = inst.group_of(x);
        let bf_s = self.benefit_from[x * self.slots + s] as u64;
        let bf_d = self.benefit_from[x * self.slots + d] as u64;
        let share = |count: u64, mates: usize| {
            if mates == 0 {
                T::zero()
            } else {
                T::of_usize(count as usize) / T::of_usize(mates)
            }
        };
        let group_sum = |q: usize| {
            let own = u64::from(q == gx);
            let c_s = self.team_group_gain[s * m + q];
            let c_d = self.team_group_gain[d * m + q];
            let c_s_new = c_s - own * bf_s - u64::from(self.benefited_by[self.bb_index(x, s, q)]);
            let c_d_new = c_d + own * bf_d + u64::from(self.benefited_by[self.bb_index(x, d, q)]);
            self.group_sum[q] - share(c_s, size_s - 1) - share(c_d, size_d - 1)
                + share(c_s_new, size_s.saturating_sub(2))
                + share(c_d_new, size_d)
        };
        self.evaluate(shortfall_total, live, group_sum)
    }

    /// Objective decrease produced by `mv`; positive is an improvement.
    pub fn move_gain(&self, mv: Move) -> Result<T> {
        self.check(mv)?;
        Ok(self.gain_unchecked(mv))
    }

    #[inline]
    pub(crate) fn gain_unchecked(&self, mv: Move) -> T {
        self.current.f - self.objective_after_unchecked(mv).f
    }

    /// Applies `mv` and updates every cache.
    pub fn apply(&mut self, mv: Move) -> Result<()> {
        self.check(mv)?;
        self.apply_unchecked(mv);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&mut self, mv: Move) {
        let Move {
            student: x,
            source: s,
            dest: d,
        } = mv;
        let n = self.instance.n();
        let gx = self.instance.group_of(x);
        let at = self.members[s]
            .iter()
            .position(|&i| i == x)
            .expect("student in source");
        self.members[s].swap_remove(at);
        self.members[d].push(x);
        self.team_of[x] = d;
        for i in 0..n {
            if i == x {
                continue;
            }
            if self.benefit.get(i, x) {
                self.benefit_from[i * self.slots + s] -= 1;
                self.benefit_from[i * self.slots + d] += 1;
            }
            if self.benefit.get(x, i) {
                let from = self.bb_index(i, s, gx);
                let to = self.bb_index(i, d, gx);
                self.benefited_by[from] -= 1;
                self.benefited_by[to] += 1;
            }
        }
        self.refresh_slot(s);
        self.refresh_slot(d);
        self.refresh_totals();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::objective;

    fn instance() -> (Instance<f64>, TaskSpec<f64>, BenefitMatrix) {
        let inst = Instance::from_rows(
            vec![
                vec![0.9, 0.1],
                vec![0.2, 0.8],
                vec![0.5, 0.5],
                vec![0.3, 0.3],
                vec![0.7, 0.6],
            ],
            vec![0, 1, 0, 1, 1],
        )
        .unwrap();
        let spec = TaskSpec::new(vec![1.2, 1.0], 0.0, 1.0, 2.0).unwrap();
        let b = BenefitMatrix::compute(&inst, 0.0);
        (inst, spec, b)
    }

    #[test]
    fn cached_objective_matches_direct_evaluation() {
        let (inst, spec, b) = instance();
        let a = Assignment::new(vec![0, 0, 1, 1, 2]).unwrap();
        let st = SolverState::new(&inst, &spec, &b, &a).unwrap();
        let direct = objective(&inst, &a, &spec, &b);
        assert!((st.objective().f - direct.f).abs() < 1e-12);
    }

    #[test]
    fn gain_matches_apply_and_reverse_cancels() {
        let (inst, spec, b) = instance();
        let a = Assignment::new(vec![0, 0, 1, 1, 2]).unwrap();
        let mut st = SolverState::new(&inst, &spec, &b, &a).unwrap();
        let mv = st.make_move(2, 0).unwrap();
        let gain = st.move_gain(mv).unwrap();
        let before = st.objective().f;
        st.apply(mv).unwrap();
        assert!((before - st.objective().f - gain).abs() < 1e-12);
        let back = st.make_move(2, 1).unwrap();
        let undo = st.move_gain(back).unwrap();
        assert!((gain + undo).abs() < 1e-12);
    }

    #[test]
    fn emptying_a_team_shrinks_the_normalizer() {
        let (inst, spec, b) = instance();
        let a = Assignment::new(vec![0, 0, 1, 1, 2]).unwrap();
        let mut st = SolverState::new(&inst, &spec, &b, &a).unwrap();
        let mv = st.make_move(4, 0).unwrap();
        let gain = st.move_gain(mv).unwrap();
        let after = Assignment::new(vec![0, 0, 1, 1, 0]).unwrap();
        let expected = objective(&inst, &a, &spec, &b).f - objective(&inst, &after, &spec, &b).f;
        assert!((gain - expected).abs() < 1e-12);
        st.apply(mv).unwrap();
        assert_eq!(st.live_teams(), 2);
        assert!(!st.is_live(2));
        assert!(st.make_move(0, 2).is_err());
    }

    #[test]
    fn rejects_self_moves() {
        let (inst, spec, b) = instance();
        let a = Assignment::new(vec![0, 0, 1, 1, 2]).unwrap();
        let st = SolverState::new(&inst, &spec, &b, &a).unwrap();
        assert!(st.make_move(0, 0).is_err());
        let bogus = Move {
            student: 0,
            source: 0,
            dest: 0,
        };
        assert!(st.move_gain(bogus).is_err());
        let wrong_source = Move {
            student: 0,
            source: 1,
            dest: 2,
        };
        assert!(st.move_gain(wrong_source).is_err());
    }
}
