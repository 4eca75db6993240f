//! Addressable max-heap of candidate moves keyed on gain.

use std::cmp::Ordering;

use crate::scalar::Scalar;

/// Relocation of one student from its current team to another team.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub student: usize,
    pub source: usize,
    pub dest: usize,
}

/// A move together with the objective decrease it would yield.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainEntry<T> {
    pub mv: Move,
    pub gain: T,
}

impl<T: Scalar> GainEntry<T> {
    /// Higher gain first; ties go to the lower student, then the lower destination.
    fn outranks(&self, other: &Self) -> bool {
        match self
            .gain
            .partial_cmp(&other.gain)
            .unwrap_or(Ordering::Equal)
        {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => (self.mv.student, self.mv.dest) < (other.mv.student, other.mv.dest),
        }
    }
}

/// Counters of heap operations, for complexity checks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueueStats {
    pub inserts: u64,
    pub updates: u64,
    pub removals: u64,
    pub pops: u64,
}

impl QueueStats {
    pub fn total(&self) -> u64 {
        self.inserts + self.updates + self.removals + self.pops
    }
}

const ABSENT: usize = usize::MAX;

/// Max-priority queue over `(student, destination team)` moves.
#[derive(Debug, Clone)]
pub struct MoveQueue<T> {
    teams: usize,
    heap: Vec<GainEntry<T>>,
    pos: Vec<usize>,
    stats: QueueStats,
}

impl<T: Scalar> MoveQueue<T> {
    /// Empty queue able to address `students x teams` moves.
    pub fn new(students: usize, teams: usize) -> Self {
        Self {
            teams,
            heap: Vec::new(),
            pos: vec![ABSENT; students * teams],
            stats: QueueStats::default(),
        }
    }

    #[inline]
    fn key(&self, student: usize, dest: usize) -> usize {
        student * self.teams + dest
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn stats(&self) -> QueueStats {
        self.stats
    }

    pub fn contains(&self, student: usize, dest: usize) -> bool {
        self.pos[self.key(student, dest)] != ABSENT
    }

    pub fn get(&self, student: usize, dest: usize) -> Option<&GainEntry<T>> {
        match self.pos[self.key(student, dest)] {
            ABSENT => None,
            p => Some(&self.heap[p]),
        }
    }

    pub fn peek(&self) -> Option<&GainEntry<T>> {
        self.heap.first()
    }

    /// All entries in heap order.
    pub fn entries(&self) -> &[GainEntry<T>] {
        &self.heap
    }

    /// Inserts the move or replaces the stored entry for the same
    /// `(student, dest)` pair.
    pub fn upsert(&mut self, entry: GainEntry<T>) {
        let key = self.key(entry.mv.student, entry.mv.dest);
        match self.pos[key] {
            ABSENT => {
                self.stats.inserts += 1;
                self.heap.push(entry);
                let at = self.heap.len() - 1;
                self.pos[key] = at;
                self.sift_up(at);
            }
            at => {
                self.stats.updates += 1;
                let old = std::mem::replace(&mut self.heap[at], entry);
                if entry.outranks(&old) {
                    self.sift_up(at);
                } else {
                    self.sift_down(at);
                }
            }
        }
    }

    pub fn remove(&mut self, student: usize, dest: usize) -> Option<GainEntry<T>> {
        let key = self.key(student, dest);
        let at = self.pos[key];
        if at == ABSENT {
            return None;
        }
        self.stats.removals += 1;
        Some(self.take(at))
    }

    /// Drops every entry of `student`.
    pub fn remove_student(&mut self, student: usize) {
        for dest in 0..self.teams {
            self.remove(student, dest);
        }
    }

    pub fn pop(&mut self) -> Option<GainEntry<T>> {
        if self.heap.is_empty() {
            return None;
        }
        self.stats.pops += 1;
        Some(self.take(0))
    }

    fn take(&mut self, at: usize) -> GainEntry<T> {
        let last = self.heap.len() - 1;
        self.swap(at, last);
        let entry = self.heap.pop().expect("non-empty");
        let key = self.key(entry.mv.student, entry.mv.dest);
        self.pos[key] = ABSENT;
        if at < self.heap.len() {
            self.sift_up(at);
            self.sift_down(at);
        }
        entry
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.heap.swap(a, b);
        for at in [a, b] {
            if at < self.heap.len() {
                let mv = self.heap[at].mv;
                let key = self.key(mv.student, mv.dest);
                self.pos[key] = at;
            }
        }
    }

    fn sift_up(&mut self, mut at: usize) {
        while at > 0 {
            let parent = (at - 1) / 2;
            if self.heap[at].outranks(&self.heap[parent]) {
                self.swap(at, parent);
                at = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut at: usize) {
        loop {
            let (l, r) = (2 * at + 1, 2 * at + 2);
            let mut best = at;
            if l < self.heap.len() && self.heap[l].outranks(&self.heap[best]) {
                best = l;
            }
            if r < self.heap.len() && self.heap[r].outranks(&self.heap[best]) {
                best = r;
            }
            if best == at {
                break;
            }
            self.swap(at, best);
            at = best;
        }
    }
}
