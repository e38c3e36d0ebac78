//! Tabu search over machine orders.
//!
//! Neighbourhood: swap two operations that are adjacent on a machine and
//! joined by a critical machine arc. Such a swap always yields a feasible
//! (acyclic) orientation.
//!
//! Memory: a dense table of time stamps over ordered operation pairs. Taking a
//! move stamps the arc it creates with the current clock and advances the
//! clock; a move is tabu when the arc it would break was stamped fewer than
//! `tenure` clock ticks ago. Tabu moves are still admitted when they beat the
//! best makespan seen so far.

use thiserror::Error;

use crate::instance::{Instance, OpId, Time};
use crate::schedule::Schedule;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TabuError {
    #[error("tenure must be at least 1")]
    ZeroTenure,
    #[error("idle limit must be at least 1")]
    ZeroIdleLimit,
    #[error("move {0:?} does not swap adjacent operations of this schedule")]
    NotApplicable(Move),
}

/// Swap of `first` and `second`, currently adjacent on `machine` in that order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub machine: usize,
    pub first: OpId,
    pub second: OpId,
}

impl Move {
    /// The move that undoes this one.
    pub fn reversed(self) -> Move {
        Move {
            machine: self.machine,
            first: self.second,
            second: self.first,
        }
    }
}

/// The tabu predicate: `clock - stamp < tenure`, evaluated over signed integers.
pub fn within_tenure(clock: u64, stamp: u64, tenure: u64) -> bool {
    (clock as i128) - (stamp as i128) < tenure as i128
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TabuList {
    num_ops: usize,
    stamp: Vec<Option<u64>>,
    tenure: u64,
    clock: u64,
}

impl TabuList {
    pub fn new(num_ops: usize, tenure: u64) -> Self {
        TabuList {
            num_ops,
            stamp: vec![None; num_ops * num_ops],
            tenure,
            clock: 0,
        }
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn tenure(&self) -> u64 {
        self.tenure
    }

    /// Changes the tenure; stored stamps are reinterpreted, not rewritten.
    pub fn set_tenure(&mut self, tenure: u64) {
        self.tenure = tenure;
    }

    pub fn set_clock(&mut self, clock: u64) {
        self.clock = clock;
    }

    pub fn stamp(&self, from: OpId, to: OpId) -> Option<u64> {
        self.stamp[from * self.num_ops + to]
    }

    pub fn set_stamp(&mut self, from: OpId, to: OpId, value: u64) {
        self.stamp[from * self.num_ops + to] = Some(value);
    }

    /// Whether the arc `(mv.first, mv.second)`, which the move would break,
    /// is still inside its tenure.
    pub fn is_tabu(&self, mv: &Move) -> bool {
        self.stamp(mv.first, mv.second)
            .is_some_and(|s| within_tenure(self.clock, s, self.tenure))
    }

    /// Stamps the arc `(mv.second, mv.first)` created by the move, then
    /// advances the clock.
    pub fn record(&mut self, mv: &Move) {
        self.set_stamp(mv.second, mv.first, self.clock);
        self.clock += 1;
    }
}

/// Latest finishing path from each operation's start to the sink, including
/// the operation itself.
fn tails(s: &Schedule<'_>) -> Vec<Time> {
    let inst = s.instance();
    let mut order: Vec<OpId> = (0..inst.num_ops()).collect();
    // Successors always start strictly later, so descending start is a
    // reverse topological order.
    order.sort_by_key(|&o| std::cmp::Reverse(s.start(o)));
    let mut tail = vec![0; inst.num_ops()];
    for op in order {
        let after = [inst.job_succ(op), s.machine_succ(op)]
            .into_iter()
            .flatten()
            .map(|n| tail[n])
            .max()
            .unwrap_or(0);
        tail[op] = inst.op(op).duration + after;
    }
    tail
}

/// Swaps of machine-adjacent pairs from different jobs whose machine arc lies
/// on some critical path, ordered by `(machine, job of first, position of first)`.
pub fn neighborhood_moves(s: &Schedule<'_>) -> Vec<Move> {
    let inst = s.instance();
    let makespan = s.makespan();
    let tail = tails(s);
    let mut moves = Vec::new();
    for (machine, order) in s.machine_orders().iter().enumerate() {
        for pair in order.windows(2) {
            let (u, v) = (pair[0], pair[1]);
            if inst.op(u).job == inst.op(v).job {
                continue;
            }
            let tight = s.end(u) == s.start(v);
            // start(u) is the head of u in a semi-active schedule.
            let critical = s.end(u) + tail[v] == makespan && s.start(u) + tail[u] == makespan;
            if tight && critical {
                moves.push(Move {
                    machine,
                    first: u,
                    second: v,
                });
            }
        }
    }
    moves.sort_by_key(|m| (m.machine, inst.op(m.first).job, inst.op(m.first).pos));
    moves
}

/// Swaps the operations of `mv` and recomputes start times.
pub fn apply_move<'a>(s: &Schedule<'a>, mv: &Move) -> Result<Schedule<'a>, TabuError> {
    let inst = s.instance();
    let adjacent = inst.op(mv.first).machine == mv.machine
        && s.machine_succ(mv.first) == Some(mv.second)
        && inst.op(mv.first).job != inst.op(mv.second).job;
    if !adjacent {
        return Err(TabuError::NotApplicable(*mv));
    }
    s.with_adjacent_swap(mv.machine, mv.first)
        .map_err(|_| TabuError::NotApplicable(*mv))
}

/// How a taken move got past the tabu filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admission {
    /// Not tabu.
    Free,
    /// Tabu, but its makespan beats the best so far.
    Aspiration,
    /// Every move was tabu without aspiration; the oldest tabu one was taken.
    Escape,
}

#[derive(Debug, Clone)]
pub struct TakenMove {
    pub mv: Move,
    pub admission: Admission,
    pub makespan: Time,
}

#[derive(Debug, Clone)]
pub struct TsStep<'a> {
    pub current: Schedule<'a>,
    pub best: Schedule<'a>,
    /// `None` when the neighbourhood is empty (fixed point); schedules are
    /// then returned unchanged.
    pub taken: Option<TakenMove>,
    pub improved: bool,
}

/// One tabu-search iteration. Records the taken move in `tabu`.
pub fn ts_step<'a>(current: &Schedule<'a>, tabu: &mut TabuList, best: &Schedule<'a>) -> TsStep<'a> {
    let moves = neighborhood_moves(current);
    if moves.is_empty() {
        return TsStep {
            current: current.clone(),
            best: best.clone(),
            taken: None,
            improved: false,
        };
    }
    let best_makespan = best.makespan();
    let mut chosen: Option<(Time, usize, Schedule<'a>, Admission)> = None;
    let mut oldest_tabu: Option<(u64, usize)> = None;
    for (idx, mv) in moves.iter().enumerate() {
        let next = apply_move(current, mv).expect("critical swaps are always applicable");
        let makespan = next.makespan();
        let admission = if !tabu.is_tabu(mv) {
            Admission::Free
        } else if makespan < best_makespan {
            Admission::Aspiration
        } else {
            let stamp = tabu.stamp(mv.first, mv.second).unwrap_or(0);
            if oldest_tabu.is_none_or(|(s, _)| stamp < s) {
                oldest_tabu = Some((stamp, idx));
            }
            continue;
        };
        // Strict comparison keeps the first (lexicographically smallest) move on ties.
        if chosen.as_ref().is_none_or(|(m, ..)| makespan < *m) {
            chosen = Some((makespan, idx, next, admission));
        }
    }
    let (makespan, idx, next, admission) = match chosen {
        Some(c) => c,
        None => {
            let (_, idx) = oldest_tabu.expect("non-empty neighbourhood");
            let next = apply_move(current, &moves[idx]).expect("critical swaps are always applicable");
            (next.makespan(), idx, next, Admission::Escape)
        }
    };
    let mv = moves[idx];
    tabu.record(&mv);
    let improved = makespan < best_makespan;
    let best = if improved { next.clone() } else { best.clone() };
    TsStep {
        current: next,
        best,
        taken: Some(TakenMove {
            mv,
            admission,
            makespan,
        }),
        improved,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TsConfig {
    /// Upper bound on the tenure; the effective value is clamped to half the
    /// operation count (at least 1).
    pub tenure: u64,
    pub max_iterations: usize,
    /// Consecutive non-improving iterations after which the search counts as
    /// converged.
    pub idle_limit: usize,
    /// Carried for reproducibility records; the search itself has no random
    /// choices.
    pub seed: u64,
}

impl Default for TsConfig {
    fn default() -> Self {
        TsConfig {
            tenure: 7,
            max_iterations: 1000,
            idle_limit: 50,
            seed: 0,
        }
    }
}

impl TsConfig {
    pub fn validate(&self) -> Result<(), TabuError> {
        if self.tenure == 0 {
            return Err(TabuError::ZeroTenure);
        }
        if self.idle_limit == 0 {
            return Err(TabuError::ZeroIdleLimit);
        }
        Ok(())
    }

    pub fn effective_tenure(&self, inst: &Instance) -> u64 {
        let half = (inst.num_ops() as u64 / 2).max(1);
        self.tenure.clamp(1, half)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsStop {
    MaxIterations,
    FixedPoint,
    Idle,
    Cancelled,
}

#[derive(Debug, Clone)]
pub struct TsRun<'a> {
    pub best: Schedule<'a>,
    pub iterations: usize,
    /// Idle limit reached or fixed point.
    pub converged: bool,
    pub stop: TsStop,
    /// Best-so-far makespan, starting with the initial schedule and then one
    /// entry per iteration.
    pub best_trace: Vec<Time>,
    /// Makespan of the current schedule after each iteration.
    pub current_trace: Vec<Time>,
    pub admissions: Vec<Admission>,
}

/// Runs tabu search from `initial`.
pub fn run_ts<'a>(inst: &'a Instance, initial: &Schedule<'a>, cfg: &TsConfig) -> Result<TsRun<'a>, TabuError> {
    run_ts_cancellable(inst, initial, cfg, &mut || false)
}

/// [`run_ts`] that polls `cancelled` before every iteration and, when it
/// returns true, stops with the best schedule found so far.
pub fn run_ts_cancellable<'a>(
    inst: &'a Instance,
    initial: &Schedule<'a>,
    cfg: &TsConfig,
    cancelled: &mut dyn FnMut() -> bool,
) -> Result<TsRun<'a>, TabuError> {
    cfg.validate()?;
    // Normalise to the semi-active timing of the given orders.
    let mut current = Schedule::from_machine_orders(inst, initial.machine_orders().to_vec())
        .expect("initial schedule is feasible");
    let mut best = current.clone();
    let mut tabu = TabuList::new(inst.num_ops(), cfg.effective_tenure(inst));
    let mut best_trace = vec![best.makespan()];
    let mut current_trace = Vec::new();
    let mut admissions = Vec::new();
    let mut iterations = 0;
    let mut idle = 0;
    let stop = loop {
        if iterations >= cfg.max_iterations {
            break TsStop::MaxIterations;
        }
        if cancelled() {
            break TsStop::Cancelled;
        }
        let step = ts_step(&current, &mut tabu, &best);
        let Some(taken) = step.taken else {
            break TsStop::FixedPoint;
        };
        iterations += 1;
        idle = if step.improved { 0 } else { idle + 1 };
        current = step.current;
        best = step.best;
        best_trace.push(best.makespan());
        current_trace.push(taken.makespan);
        admissions.push(taken.admission);
        if idle >= cfg.idle_limit {
            break TsStop::Idle;
        }
    };
    Ok(TsRun {
        best,
        iterations,
        converged: matches!(stop, TsStop::FixedPoint | TsStop::Idle),
        stop,
        best_trace,
        current_trace,
        admissions,
    })
}
