//! Exact makespan by depth-first branch and bound over Giffler-Thompson
//! conflict sets. Active schedules contain an optimum, so branching on every
//! member of every conflict set is complete.

use thiserror::Error;

use crate::active::{build_active_schedule, GtState, ShortestProcessingTime};
use crate::instance::{Instance, Time};
use crate::schedule::Schedule;

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone)]
pub enum ExactResult<'a> {
    Optimal {
        makespan: Time,
        schedule: Schedule<'a>,
        nodes: u64,
    },
    /// Budget ran out; `incumbent` is the best schedule found and
    /// `lower_bound` a proven bound on the optimum.
    Unproven {
        incumbent: Schedule<'a>,
        lower_bound: Time,
        nodes: u64,
    },
}

impl<'a> ExactResult<'a> {
    pub fn optimal(&self) -> Option<(Time, &Schedule<'a>)> {
        match self {
            ExactResult::Optimal { makespan, schedule, .. } => Some((*makespan, schedule)),
            ExactResult::Unproven { .. } => None,
        }
    }

    pub fn nodes(&self) -> u64 {
        match self {
            ExactResult::Optimal { nodes, .. } | ExactResult::Unproven { nodes, .. } => *nodes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("node budget exhausted after {nodes} nodes (incumbent {incumbent}, lower bound {lower_bound})")]
pub struct BudgetExhausted {
    pub nodes: u64,
    pub incumbent: Time,
    pub lower_bound: Time,
}

/// Minimum makespan over all feasible schedules.
pub fn exact_makespan(inst: &Instance, node_budget: u64) -> ExactResult<'_> {
    let mut search = Search::new(inst, node_budget, None);
    let root = GtState::new(inst);
    let root_bound = lower_bound(inst, &root);
    let complete = search.descend(root);
    if complete {
        ExactResult::Optimal {
            makespan: search.incumbent.makespan(),
            schedule: search.incumbent,
            nodes: search.nodes,
        }
    } else {
        ExactResult::Unproven {
            lower_bound: root_bound.min(search.incumbent.makespan()),
            incumbent: search.incumbent,
            nodes: search.nodes,
        }
    }
}

/// Decision variant: is there a schedule with makespan at most `bound`?
pub fn feasible_within(inst: &Instance, bound: Time, node_budget: u64) -> Result<bool, BudgetExhausted> {
    let root = GtState::new(inst);
    let root_bound = lower_bound(inst, &root);
    if root_bound > bound {
        return Ok(false);
    }
    let mut search = Search::new(inst, node_budget, Some(bound));
    if search.incumbent.makespan() <= bound {
        return Ok(true);
    }
    let complete = search.descend(root);
    let incumbent = search.incumbent.makespan();
    if incumbent <= bound {
        Ok(true)
    } else if complete {
        Ok(false)
    } else {
        Err(BudgetExhausted {
            nodes: search.nodes,
            incumbent,
            lower_bound: root_bound,
        })
    }
}

struct Search<'a> {
    inst: &'a Instance,
    incumbent: Schedule<'a>,
    nodes: u64,
    budget: u64,
    target: Option<Time>,
    /// Remaining processing in each job from position k onwards.
    job_rest: Vec<Vec<Time>>,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, budget: u64, target: Option<Time>) -> Self {
        let incumbent = build_active_schedule(inst, &mut ShortestProcessingTime);
        Search {
            inst,
            incumbent,
            nodes: 0,
            budget,
            target,
            job_rest: suffix_sums(inst),
        }
    }

    fn done(&self) -> bool {
        self.target.is_some_and(|t| self.incumbent.makespan() <= t)
    }

    /// Explores the subtree; returns false if the budget ran out inside it.
    fn descend(&mut self, state: GtState<'a>) -> bool {
        if state.is_complete() {
            if state.partial_makespan() < self.incumbent.makespan() {
                self.incumbent = state.into_schedule();
            }
            return true;
        }
        let incumbent = self.incumbent.makespan();
        let cutoff = self.target.map_or(incumbent, |t| incumbent.min(t + 1));
        if bound_with(self.inst, &state, &self.job_rest) >= cutoff {
            return true;
        }
        let mut conflict = state.conflict_set();
        conflict.sort_by_key(|&o| (self.inst.op(o).duration, self.inst.op(o).job));
        for op in conflict {
            if self.nodes >= self.budget {
                return false;
            }
            self.nodes += 1;
            let mut child = state.clone();
            child.dispatch(op);
            if !self.descend(child) {
                return false;
            }
            if self.done() {
                return true;
            }
        }
        true
    }
}

fn suffix_sums(inst: &Instance) -> Vec<Vec<Time>> {
    inst.routings()
        .iter()
        .map(|r| {
            let mut rest = vec![0; r.len() + 1];
            for k in (0..r.len()).rev() {
                rest[k] = rest[k + 1] + r[k].duration;
            }
            rest
        })
        .collect()
}

/// Lower bound on any completion of the partial schedule `state`.
pub fn lower_bound(inst: &Instance, state: &GtState<'_>) -> Time {
    bound_with(inst, state, &suffix_sums(inst))
}

fn bound_with(inst: &Instance, state: &GtState<'_>, job_rest: &[Vec<Time>]) -> Time {
    let next = state.next_positions();
    let mut bound = state.partial_makespan();
    // Job chains: the next operation cannot start before its earliest start.
    for (j, &k) in next.iter().enumerate() {
        if k < inst.routing(j).len() {
            let head = state.earliest_start(inst.op_id(j, k));
            bound = bound.max(head + job_rest[j][k]);
        }
    }
    // One-machine relaxation: earliest release + total remaining load + shortest tail.
    let m = inst.num_machines();
    let mut release = vec![Time::MAX; m];
    let mut load = vec![0; m];
    let mut tail = vec![Time::MAX; m];
    for (j, &k) in next.iter().enumerate() {
        let routing = inst.routing(j);
        let mut head = state.job_ready()[j];
        for pos in k..routing.len() {
            let op = &routing[pos];
            release[op.machine] = release[op.machine].min(head);
            load[op.machine] += op.duration;
            tail[op.machine] = tail[op.machine].min(job_rest[j][pos + 1]);
            head += op.duration;
        }
    }
    for mach in 0..m {
        if load[mach] > 0 {
            let start = release[mach].max(state.machine_ready()[mach]);
            bound = bound.max(start + load[mach] + tail[mach]);
        }
    }
    bound
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::builtin_instance;
    use crate::schedule::check_start_times;

    fn optimum(inst: &Instance) -> Time {
        exact_makespan(inst, DEFAULT_NODE_BUDGET).optimal().unwrap().0
    }

    #[test]
    fn small_optima() {
        let chain = Instance::new("chain", 4, vec![vec![(0, 3), (1, 3), (2, 3), (3, 2)]]);
        assert_eq!(optimum(&chain), 11);
        assert_eq!(optimum(&builtin_instance("tiny2x2").unwrap()), 7);
        let par = Instance::new("par", 2, vec![vec![(0, 5)], vec![(1, 3)]]);
        assert_eq!(optimum(&par), 5);
    }

    #[test]
    fn returned_schedule_is_feasible_and_optimal() {
        let inst = builtin_instance("paper4x4").unwrap();
        let result = exact_makespan(&inst, DEFAULT_NODE_BUDGET);
        let (makespan, schedule) = result.optimal().unwrap();
        assert_eq!(schedule.makespan(), makespan);
        assert!(check_start_times(&inst, schedule.start_times()).is_empty());
    }

    #[test]
    fn decision_variant() {
        let inst = builtin_instance("tiny2x2").unwrap();
        assert_eq!(feasible_within(&inst, 7, DEFAULT_NODE_BUDGET), Ok(true));
        assert_eq!(feasible_within(&inst, 6, DEFAULT_NODE_BUDGET), Ok(false));
        let paper = builtin_instance("paper4x4").unwrap();
        assert_eq!(feasible_within(&paper, paper.total_duration(), DEFAULT_NODE_BUDGET), Ok(true));
        let opt = optimum(&paper);
        assert_eq!(feasible_within(&paper, opt, DEFAULT_NODE_BUDGET), Ok(true));
        assert_eq!(feasible_within(&paper, opt - 1, DEFAULT_NODE_BUDGET), Ok(false));
    }

    #[test]
    fn exhausted_budget_is_reported() {
        let inst = builtin_instance("paper4x4").unwrap();
        match exact_makespan(&inst, 3) {
            ExactResult::Unproven {
                incumbent,
                lower_bound,
                nodes,
            } => {
                assert!(nodes <= 3);
                assert!(lower_bound <= incumbent.makespan());
                assert!(lower_bound <= optimum(&inst));
            }
            ExactResult::Optimal { .. } => panic!("three nodes cannot prove paper4x4"),
        }
    }

    #[test]
    fn root_bound_is_valid() {
        let inst = builtin_instance("paper4x4").unwrap();
        let lb = lower_bound(&inst, &GtState::new(&inst));
        assert!(lb <= optimum(&inst));
        // Machine 0 alone carries 3 + 4 + 4 + 2 units.
        assert!(lb >= 13);
    }
}
