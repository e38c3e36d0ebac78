//! Giffler-Thompson construction of active schedules.
//!
//! Each step looks at the next unscheduled operation of every job, finds the
//! one with the earliest possible completion `t`, and forms the conflict set:
//! the candidates on that machine that could start before `t`. A
//! [`ConflictRule`] decides which member is dispatched next.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{Instance, OpId, Time};
use crate::schedule::Schedule;

/// Picks one operation out of a non-empty conflict set (sorted by job index).
pub trait ConflictRule {
    fn pick(&mut self, inst: &Instance, conflict: &[OpId]) -> OpId;
}

impl<F> ConflictRule for F
where
    F: FnMut(&Instance, &[OpId]) -> OpId,
{
    fn pick(&mut self, inst: &Instance, conflict: &[OpId]) -> OpId {
        self(inst, conflict)
    }
}

/// Shortest processing time first, ties to the lowest job.
#[derive(Debug, Clone, Copy, Default)]
pub struct ShortestProcessingTime;

impl ConflictRule for ShortestProcessingTime {
    fn pick(&mut self, inst: &Instance, conflict: &[OpId]) -> OpId {
        *conflict
            .iter()
            .min_by_key(|&&o| (inst.op(o).duration, inst.op(o).job))
            .expect("conflict set is never empty")
    }
}

/// Uniform choice driven by a seeded generator.
#[derive(Debug, Clone)]
pub struct SeededRandom(ChaCha8Rng);

impl SeededRandom {
    pub fn new(seed: u64) -> Self {
        SeededRandom(ChaCha8Rng::seed_from_u64(seed))
    }
}

impl ConflictRule for SeededRandom {
    fn pick(&mut self, _inst: &Instance, conflict: &[OpId]) -> OpId {
        conflict[self.0.gen_range(0..conflict.len())]
    }
}

/// Operation-based chromosome priority: the operation whose gene comes first
/// in the permutation wins. The k-th occurrence of job `j` stands for
/// operation `(j, k)`.
#[derive(Debug, Clone)]
pub struct PermutationPriority {
    rank: Vec<usize>,
}

impl PermutationPriority {
    /// `genes` must be a permutation of the instance's job multiset.
    pub fn new(inst: &Instance, genes: &[usize]) -> Self {
        let mut seen = vec![0usize; inst.num_jobs()];
        let mut rank = vec![usize::MAX; inst.num_ops()];
        for (i, &job) in genes.iter().enumerate() {
            rank[inst.op_id(job, seen[job])] = i;
            seen[job] += 1;
        }
        PermutationPriority { rank }
    }
}

impl ConflictRule for PermutationPriority {
    fn pick(&mut self, _inst: &Instance, conflict: &[OpId]) -> OpId {
        *conflict
            .iter()
            .min_by_key(|&&o| self.rank[o])
            .expect("conflict set is never empty")
    }
}

/// Partial schedule state of the construction loop. Cloneable so that
/// search procedures can branch on conflict sets.
#[derive(Debug, Clone)]
pub struct GtState<'a> {
    inst: &'a Instance,
    next: Vec<usize>,
    job_ready: Vec<Time>,
    machine_ready: Vec<Time>,
    start: Vec<Time>,
    dispatched: Vec<OpId>,
}

impl<'a> GtState<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        GtState {
            inst,
            next: vec![0; inst.num_jobs()],
            job_ready: vec![0; inst.num_jobs()],
            machine_ready: vec![0; inst.num_machines()],
            start: vec![0; inst.num_ops()],
            dispatched: Vec::with_capacity(inst.num_ops()),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.dispatched.len() == self.inst.num_ops()
    }

    /// Earliest start of an operation at the head of its job.
    pub fn earliest_start(&self, op: OpId) -> Time {
        let o = self.inst.op(op);
        self.job_ready[o.job].max(self.machine_ready[o.machine])
    }

    /// Current conflict set, sorted by job index; empty once complete.
    pub fn conflict_set(&self) -> Vec<OpId> {
        let candidates: Vec<OpId> = (0..self.inst.num_jobs())
            .filter(|&j| self.next[j] < self.inst.routing(j).len())
            .map(|j| self.inst.op_id(j, self.next[j]))
            .collect();
        // Ties on earliest completion go to the lowest job.
        let Some((horizon, pivot)) = candidates
            .iter()
            .map(|&o| (self.earliest_start(o) + self.inst.op(o).duration, o))
            .min()
        else {
            return Vec::new();
        };
        let machine = self.inst.op(pivot).machine;
        candidates
            .into_iter()
            .filter(|&o| self.inst.op(o).machine == machine && self.earliest_start(o) < horizon)
            .collect()
    }

    /// Places `op` (which must head its job) at its earliest start.
    pub fn dispatch(&mut self, op: OpId) {
        let o = *self.inst.op(op);
        debug_assert_eq!(self.next[o.job], o.pos);
        let s = self.earliest_start(op);
        let end = s + o.duration;
        self.start[op] = s;
        self.job_ready[o.job] = end;
        self.machine_ready[o.machine] = end;
        self.next[o.job] += 1;
        self.dispatched.push(op);
    }

    pub fn start_times(&self) -> &[Time] {
        &self.start
    }

    pub fn job_ready(&self) -> &[Time] {
        &self.job_ready
    }

    pub fn machine_ready(&self) -> &[Time] {
        &self.machine_ready
    }

    /// Position of the next unscheduled operation of each job.
    pub fn next_positions(&self) -> &[usize] {
        &self.next
    }

    pub fn dispatched(&self) -> &[OpId] {
        &self.dispatched
    }

    /// Largest completion time placed so far.
    pub fn partial_makespan(&self) -> Time {
        self.job_ready.iter().copied().max().unwrap_or(0)
    }

    /// Machine orders implied by the dispatch sequence.
    pub fn machine_orders(&self) -> Vec<Vec<OpId>> {
        let mut orders = vec![Vec::new(); self.inst.num_machines()];
        for &op in &self.dispatched {
            orders[self.inst.op(op).machine].push(op);
        }
        orders
    }

    /// Converts a complete state into a schedule.
    pub fn into_schedule(self) -> Schedule<'a> {
        assert!(self.is_complete(), "schedule construction not finished");
        let orders = self.machine_orders();
        let s = Schedule::from_machine_orders(self.inst, orders)
            .expect("dispatch order is always acyclic");
        debug_assert_eq!(s.start_times(), &self.start[..]);
        s
    }
}

/// Builds an active schedule, resolving conflicts with `rule`.
pub fn build_active_schedule<'a, R: ConflictRule + ?Sized>(inst: &'a Instance, rule: &mut R) -> Schedule<'a> {
    build_with_dispatch_order(inst, rule).0
}

/// Like [`build_active_schedule`], also returning the order operations were
/// dispatched in. Feeding that order's job sequence back through
/// [`PermutationPriority`] reproduces the same schedule.
pub fn build_with_dispatch_order<'a, R: ConflictRule + ?Sized>(
    inst: &'a Instance,
    rule: &mut R,
) -> (Schedule<'a>, Vec<OpId>) {
    let mut state = GtState::new(inst);
    loop {
        let conflict = state.conflict_set();
        if conflict.is_empty() {
            break;
        }
        let chosen = rule.pick(inst, &conflict);
        debug_assert!(conflict.contains(&chosen), "rule picked outside the conflict set");
        state.dispatch(chosen);
    }
    let order = state.dispatched().to_vec();
    (state.into_schedule(), order)
}
