//! Hill-climbing refinement of an initial assignment.
//!
//! Both refiners price every `student -> other live team` move, keep the
//! moves in a [`MoveQueue`] and reprice all live entries after each applied
//! move. Teams may empty during refinement; [`postprocess`] then folds
//! singleton teams into their best neighbour.

mod postprocess;
mod queue;
mod state;

pub use postprocess::postprocess;
pub use queue::{GainEntry, Move, MoveQueue, QueueStats};
pub use state::SolverState;

use crate::error::{Error, Result};
use crate::model::{Assignment, BenefitMatrix, Instance, TaskSpec};
use crate::objective::{objective, ObjectiveBreakdown};
use crate::scalar::Scalar;

/// Refinement algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refiner {
    /// Steepest-ascent hill climbing.
    Sahc,
    /// Pass-based refinement with locking and best-prefix commit.
    Fmhc,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineConfig<T> {
    /// A pass is committed only if its best prefix gain exceeds this.
    pub gain_epsilon: T,
    /// Upper bound on passes (FMHC) or applied moves (SAHC).
    pub max_passes: Option<usize>,
}

impl<T: Scalar> Default for RefineConfig<T> {
    fn default() -> Self {
        Self {
            gain_epsilon: T::of_f64(1e-4),
            max_passes: None,
        }
    }
}

impl<T: Scalar> RefineConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.gain_epsilon.is_nan() || self.gain_epsilon <= T::zero() {
            return Err(Error::Parameter {
                name: "gain_epsilon",
                reason: format!("must be > 0, got {}", self.gain_epsilon),
            });
        }
        Ok(())
    }
}

/// Result of a refinement run.
#[derive(Debug, Clone)]
pub struct RefineOutcome<T> {
    pub assignment: Assignment,
    pub objective: ObjectiveBreakdown<T>,
    /// Moves applied (SAHC) or committed (FMHC).
    pub moves: usize,
    /// FMHC passes started, including the final rejected one.
    pub passes: usize,
    pub queue_stats: QueueStats,
    /// Largest number of queue operations spent on a single applied move.
    pub max_queue_ops_per_move: u64,
    /// Objective before refinement, then after every applied move (SAHC) or
    /// committed pass (FMHC). Post-processing is not included.
    pub trace: Vec<T>,
}

/// Gains below this are treated as float noise by SAHC.
fn noise_floor<T: Scalar>() -> T {
    T::epsilon() * T::of_f64(1024.0)
}

/// Reprices every live move of unlocked students and drops stale entries.
pub(crate) fn refresh_queue<T: Scalar>(
    state: &SolverState<'_, T>,
    queue: &mut MoveQueue<T>,
    locked: Option<&[bool]>,
) {
    for student in 0..state.instance().n() {
        if locked.is_some_and(|l| l[student]) {
            continue;
        }
        let source = state.team_of(student);
        for dest in 0..state.slots() {
            if dest == source || !state.is_live(dest) {
                queue.remove(student, dest);
            } else {
                let mv = Move {
                    student,
                    source,
                    dest,
                };
                queue.upsert(GainEntry {
                    mv,
                    gain: state.gain_unchecked(mv),
                });
            }
        }
    }
}

fn fresh_queue<T: Scalar>(state: &SolverState<'_, T>) -> MoveQueue<T> {
    let mut queue = MoveQueue::new(state.instance().n(), state.slots());
    refresh_queue(state, &mut queue, None);
    queue
}

/// Steepest-ascent hill climbing: applies the best move while its gain is
/// strictly positive, then post-processes.
pub fn sahc<T: Scalar>(
    instance: &Instance<T>,
    spec: &TaskSpec<T>,
    benefit: &BenefitMatrix,
    initial: &Assignment,
    config: &RefineConfig<T>,
) -> Result<RefineOutcome<T>> {
    config.validate()?;
    let mut state = SolverState::new(instance, spec, benefit, initial)?;
    let mut queue = fresh_queue(&state);
    let mut moves = 0;
    let mut max_ops = 0;
    let mut trace = vec![state.objective().f];
    while config.max_passes.is_none_or(|cap| moves < cap) {
        let ops_before = queue.stats().total();
        let Some(best) = queue.pop() else { break };
        if best.gain <= noise_floor() {
            break;
        }
        state.apply_unchecked(best.mv);
        refresh_queue(&state, &mut queue, None);
        moves += 1;
        max_ops = max_ops.max(queue.stats().total() - ops_before);
        trace.push(state.objective().f);
    }
    let stats = queue.stats();
    Ok(finish(
        instance, spec, benefit, &state, moves, 0, stats, max_ops, trace,
    ))
}

/// Pass-based hill climbing with uphill moves.
///
/// Each pass repeatedly applies the best move of an unlocked student (even
/// when its gain is negative) and locks that student, until no move is left.
/// The prefix of the pass with the largest cumulative gain is committed if
/// that gain exceeds `config.gain_epsilon`; otherwise refinement stops at the
/// pre-pass assignment.
pub fn fmhc<T: Scalar>(
    instance: &Instance<T>,
    spec: &TaskSpec<T>,
    benefit: &BenefitMatrix,
    initial: &Assignment,
    config: &RefineConfig<T>,
) -> Result<RefineOutcome<T>> {
    config.validate()?;
    let n = instance.n();
    let mut state = SolverState::new(instance, spec, benefit, initial)?;
    let mut stats = QueueStats::default();
    let (mut committed, mut passes, mut max_ops) = (0, 0, 0);
    let mut trace = vec![state.objective().f];
    while config.max_passes.is_none_or(|cap| passes < cap) {
        passes += 1;
        let mut trial = state.clone();
        let mut queue = fresh_queue(&trial);
        let mut locked = vec![false; n];
        let mut pass: Vec<GainEntry<T>> = Vec::with_capacity(n);
        loop {
            let ops_before = queue.stats().total();
            let Some(best) = queue.pop() else { break };
            locked[best.mv.student] = true;
            queue.remove_student(best.mv.student);
            trial.apply_unchecked(best.mv);
            refresh_queue(&trial, &mut queue, Some(&locked));
            pass.push(best);
            max_ops = max_ops.max(queue.stats().total() - ops_before);
        }
        accumulate(&mut stats, queue.stats());

        let (prefix, gain_max) = best_prefix(&pass);
        if prefix == 0 || gain_max <= config.gain_epsilon {
            break;
        }
        for entry in &pass[..prefix] {
            state.apply_unchecked(entry.mv);
        }
        committed += prefix;
        trace.push(state.objective().f);
    }
    Ok(finish(
        instance, spec, benefit, &state, committed, passes, stats, max_ops, trace,
    ))
}

/// Shortest prefix length with maximal cumulative gain, and that gain.
fn best_prefix<T: Scalar>(pass: &[GainEntry<T>]) -> (usize, T) {
    let (mut best_len, mut best) = (0, T::neg_infinity());
    let mut running = T::zero();
    for (i, entry) in pass.iter().enumerate() {
        running += entry.gain;
        if running > best {
            best = running;
            best_len = i + 1;
        }
    }
    (best_len, best)
}

fn accumulate(total: &mut QueueStats, pass: QueueStats) {
    total.inserts += pass.inserts;
    total.updates += pass.updates;
    total.removals += pass.removals;
    total.pops += pass.pops;
}

#[allow(clippy::too_many_arguments)]
fn finish<T: Scalar>(
    instance: &Instance<T>,
    spec: &TaskSpec<T>,
    benefit: &BenefitMatrix,
    state: &SolverState<'_, T>,
    moves: usize,
    passes: usize,
    queue_stats: QueueStats,
    max_queue_ops_per_move: u64,
    trace: Vec<T>,
) -> RefineOutcome<T> {
    let assignment = postprocess(instance, spec, benefit, state.labels());
    RefineOutcome {
        objective: objective(instance, &assignment, spec, benefit),
        assignment,
        moves,
        passes,
        queue_stats,
        max_queue_ops_per_move,
        trace,
    }
}

impl Refiner {
    pub fn run<T: Scalar>(
        self,
        instance: &Instance<T>,
        spec: &TaskSpec<T>,
        benefit: &BenefitMatrix,
        initial: &Assignment,
        config: &RefineConfig<T>,
    ) -> Result<RefineOutcome<T>> {
        match self {
            Refiner::Sahc => sahc(instance, spec, benefit, initial, config),
            Refiner::Fmhc => fmhc(instance, spec, benefit, initial, config),
        }
    }
}
