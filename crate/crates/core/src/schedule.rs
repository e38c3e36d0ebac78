//! Schedules: per-machine processing orders with cached start times.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::instance::{Instance, OpId, Time};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("expected orders for {expected} machines, got {found}")]
    MachineCount { expected: usize, found: usize },
    #[error("machine {machine}: order is not a permutation of its operations")]
    WrongOperations { machine: usize },
    #[error("machine orders contradict job precedence (cyclic orientation)")]
    Cyclic,
    #[error("expected {expected} start times, got {found}")]
    StartCount { expected: usize, found: usize },
    #[error("infeasible start times: {0}")]
    Infeasible(ScheduleViolation),
}

/// A broken schedule invariant, as found by [`check_start_times`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleViolation {
    Precedence { before: OpId, after: OpId },
    Overlap { machine: usize, first: OpId, second: OpId },
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleViolation::Precedence { before, after } => {
                write!(f, "operation {after} starts before job predecessor {before} ends")
            }
            ScheduleViolation::Overlap {
                machine,
                first,
                second,
            } => write!(f, "operations {first} and {second} overlap on machine {machine}"),
        }
    }
}

/// Checks both schedule invariants directly on start times, interval by
/// interval. Does not look at any machine order.
pub fn check_start_times(inst: &Instance, start: &[Time]) -> Vec<ScheduleViolation> {
    let mut out = Vec::new();
    for id in 0..inst.num_ops() {
        if let Some(pred) = inst.job_pred(id) {
            if start[id] < start[pred] + inst.op(pred).duration {
                out.push(ScheduleViolation::Precedence {
                    before: pred,
                    after: id,
                });
            }
        }
    }
    for machine in 0..inst.num_machines() {
        let ops: Vec<OpId> = inst.ops_on_machine(machine).collect();
        for (i, &a) in ops.iter().enumerate() {
            for &b in &ops[i + 1..] {
                let (sa, ea) = (start[a], start[a] + inst.op(a).duration);
                let (sb, eb) = (start[b], start[b] + inst.op(b).duration);
                if sa < eb && sb < ea {
                    out.push(ScheduleViolation::Overlap {
                        machine,
                        first: a,
                        second: b,
                    });
                }
            }
        }
    }
    out
}

/// Global left-shift test. Returns an operation together with an earlier
/// start it could take without breaking job precedence or overlapping any
/// other operation on its machine, or `None` when the schedule is active.
pub fn left_shift_witness(inst: &Instance, start: &[Time]) -> Option<(OpId, Time)> {
    for (id, op) in inst.ops().iter().enumerate() {
        let ready = inst
            .job_pred(id)
            .map_or(0, |p| start[p] + inst.op(p).duration);
        let mut others: Vec<(Time, Time)> = inst
            .ops_on_machine(op.machine)
            .filter(|&o| o != id)
            .map(|o| (start[o], start[o] + inst.op(o).duration))
            .collect();
        others.sort_unstable();
        let mut gap_start = 0;
        for &(s, e) in others.iter().chain(std::iter::once(&(Time::MAX, Time::MAX))) {
            let t = gap_start.max(ready);
            if t < start[id] && t.saturating_add(op.duration) <= s {
                return Some((id, t));
            }
            gap_start = gap_start.max(e);
        }
    }
    None
}

/// Entry of a Gantt row: one operation occupying `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GanttEntry {
    pub op: OpId,
    pub start: Time,
    pub end: Time,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GanttRow {
    pub machine: usize,
    pub entries: Vec<GanttEntry>,
}

/// A complete, feasible schedule for one instance.
///
/// Machine orders are the canonical representation. Start times are a cache,
/// normally produced by forward relaxation over the orders; [`Schedule::from_start_times`]
/// keeps caller-supplied (checked) times instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule<'a> {
    inst: &'a Instance,
    start: Vec<Time>,
    machine_order: Vec<Vec<OpId>>,
    machine_pos: Vec<usize>,
}

impl<'a> Schedule<'a> {
    /// Builds the semi-active schedule (every operation as early as its job
    /// and machine predecessors allow) for the given machine orders.
    pub fn from_machine_orders(
        inst: &'a Instance,
        machine_order: Vec<Vec<OpId>>,
    ) -> Result<Self, ScheduleError> {
        let machine_pos = positions(inst, &machine_order)?;
        let start = relax(inst, &machine_order, &machine_pos).ok_or(ScheduleError::Cyclic)?;
        Ok(Schedule {
            inst,
            start,
            machine_order,
            machine_pos,
        })
    }

    /// Wraps explicit start times after checking both schedule invariants.
    pub fn from_start_times(inst: &'a Instance, start: Vec<Time>) -> Result<Self, ScheduleError> {
        if start.len() != inst.num_ops() {
            return Err(ScheduleError::StartCount {
                expected: inst.num_ops(),
                found: start.len(),
            });
        }
        if let Some(v) = check_start_times(inst, &start).into_iter().next() {
            return Err(ScheduleError::Infeasible(v));
        }
        let machine_order: Vec<Vec<OpId>> = (0..inst.num_machines())
            .map(|m| {
                let mut ops: Vec<OpId> = inst.ops_on_machine(m).collect();
                ops.sort_by_key(|&o| (start[o], o));
                ops
            })
            .collect();
        let machine_pos = positions(inst, &machine_order)?;
        Ok(Schedule {
            inst,
            start,
            machine_order,
            machine_pos,
        })
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    pub fn start(&self, op: OpId) -> Time {
        self.start[op]
    }

    pub fn end(&self, op: OpId) -> Time {
        self.start[op] + self.inst.op(op).duration
    }

    pub fn start_times(&self) -> &[Time] {
        &self.start
    }

    pub fn machine_orders(&self) -> &[Vec<OpId>] {
        &self.machine_order
    }

    pub fn machine_order(&self, machine: usize) -> &[OpId] {
        &self.machine_order[machine]
    }

    /// Operation processed just before `op` on its machine.
    pub fn machine_pred(&self, op: OpId) -> Option<OpId> {
        let m = self.inst.op(op).machine;
        let pos = self.machine_pos[op];
        (pos > 0).then(|| self.machine_order[m][pos - 1])
    }

    pub fn machine_succ(&self, op: OpId) -> Option<OpId> {
        let m = self.inst.op(op).machine;
        self.machine_order[m].get(self.machine_pos[op] + 1).copied()
    }

    /// Index of `op` within its machine's order.
    pub fn machine_position(&self, op: OpId) -> usize {
        self.machine_pos[op]
    }

    pub fn makespan(&self) -> Time {
        (0..self.inst.num_ops()).map(|o| self.end(o)).max().unwrap_or(0)
    }

    /// A tight chain from time zero to the makespan. The last operation is the
    /// lowest-job one finishing at the makespan; going backwards, a machine
    /// predecessor ending exactly at the current start is preferred over the
    /// job predecessor.
    pub fn critical_path(&self) -> Vec<OpId> {
        let makespan = self.makespan();
        let Some(mut current) = (0..self.inst.num_ops())
            .filter(|&o| self.end(o) == makespan)
            .min_by_key(|&o| (self.inst.op(o).job, o))
        else {
            return Vec::new();
        };
        let mut path = vec![current];
        loop {
            let s = self.start(current);
            let tight = |p: &OpId| self.end(*p) == s;
            let next = self
                .machine_pred(current)
                .filter(tight)
                .or_else(|| self.inst.job_pred(current).filter(tight));
            match next {
                Some(p) => {
                    path.push(p);
                    current = p;
                }
                None => break,
            }
        }
        path.reverse();
        path
    }

    /// One row per machine (unused machines included), entries by start time.
    pub fn gantt_rows(&self) -> Vec<GanttRow> {
        self.machine_order
            .iter()
            .enumerate()
            .map(|(machine, order)| {
                let mut entries: Vec<GanttEntry> = order
                    .iter()
                    .map(|&op| GanttEntry {
                        op,
                        start: self.start(op),
                        end: self.end(op),
                    })
                    .collect();
                entries.sort_by_key(|e| e.start);
                GanttRow { machine, entries }
            })
            .collect()
    }

    /// Swaps two operations that are adjacent on `machine` and recomputes
    /// start times. Fails if the operations are not adjacent there or the
    /// result would be cyclic.
    pub fn with_adjacent_swap(&self, machine: usize, first: OpId) -> Result<Self, ScheduleError> {
        let pos = self.machine_pos[first];
        let mut orders = self.machine_order.clone();
        if self.inst.op(first).machine != machine || pos + 1 >= orders[machine].len() {
            return Err(ScheduleError::WrongOperations { machine });
        }
        orders[machine].swap(pos, pos + 1);
        Schedule::from_machine_orders(self.inst, orders)
    }
}

fn positions(inst: &Instance, orders: &[Vec<OpId>]) -> Result<Vec<usize>, ScheduleError> {
    if orders.len() != inst.num_machines() {
        return Err(ScheduleError::MachineCount {
            expected: inst.num_machines(),
            found: orders.len(),
        });
    }
    let mut pos = vec![usize::MAX; inst.num_ops()];
    let mut seen = 0;
    for (m, order) in orders.iter().enumerate() {
        for (i, &op) in order.iter().enumerate() {
            if op >= inst.num_ops() || inst.op(op).machine != m || pos[op] != usize::MAX {
                return Err(ScheduleError::WrongOperations { machine: m });
            }
            pos[op] = i;
            seen += 1;
        }
    }
    if seen != inst.num_ops() {
        let machine = (0..inst.num_ops())
            .find(|&o| pos[o] == usize::MAX)
            .map_or(0, |o| inst.op(o).machine);
        return Err(ScheduleError::WrongOperations { machine });
    }
    Ok(pos)
}

/// Forward relaxation in topological order; `None` if the orders are cyclic.
fn relax(inst: &Instance, orders: &[Vec<OpId>], machine_pos: &[usize]) -> Option<Vec<Time>> {
    let n = inst.num_ops();
    let machine_succ = |op: OpId| {
        let m = inst.op(op).machine;
        orders[m].get(machine_pos[op] + 1).copied()
    };
    let mut pending: Vec<u8> = (0..n)
        .map(|o| u8::from(inst.job_pred(o).is_some()) + u8::from(machine_pos[o] > 0))
        .collect();
    let mut start = vec![0; n];
    let mut queue: VecDeque<OpId> = (0..n).filter(|&o| pending[o] == 0).collect();
    let mut done = 0;
    while let Some(op) = queue.pop_front() {
        done += 1;
        let end = start[op] + inst.op(op).duration;
        for succ in [inst.job_succ(op), machine_succ(op)].into_iter().flatten() {
            start[succ] = start[succ].max(end);
            pending[succ] -= 1;
            if pending[succ] == 0 {
                queue.push_back(succ);
            }
        }
    }
    (done == n).then_some(start)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::builtin_instance;

    // tiny2x2 ids: 0 = J1O1 (M0,2), 1 = J1O2 (M1,3), 2 = J2O1 (M1,4), 3 = J2O2 (M0,1)
    fn tiny() -> Instance {
        builtin_instance("tiny2x2").unwrap()
    }

    #[test]
    fn optimal_tiny_schedule() {
        let inst = tiny();
        let s = Schedule::from_machine_orders(&inst, vec![vec![0, 3], vec![2, 1]]).unwrap();
        assert_eq!(s.start_times(), &[0, 4, 0, 4]);
        assert_eq!(s.makespan(), 7);
        assert_eq!(s.critical_path(), vec![2, 1]);
        let rows = s.gantt_rows();
        let spans = |r: &GanttRow| -> Vec<(OpId, Time, Time)> {
            r.entries.iter().map(|e| (e.op, e.start, e.end)).collect()
        };
        assert_eq!(spans(&rows[0]), vec![(0, 0, 2), (3, 4, 5)]);
        assert_eq!(spans(&rows[1]), vec![(2, 0, 4), (1, 4, 7)]);
    }

    #[test]
    fn worse_tiny_schedule_critical_path() {
        let inst = tiny();
        let s = Schedule::from_machine_orders(&inst, vec![vec![0, 3], vec![1, 2]]).unwrap();
        assert_eq!(s.makespan(), 10);
        let path = s.critical_path();
        assert_eq!(path, vec![0, 1, 2, 3]);
        let len: Time = path.iter().map(|&o| inst.op(o).duration).sum();
        assert_eq!(len, 10);
    }

    #[test]
    fn cyclic_orders_rejected() {
        let inst = tiny();
        // M0: J2O2 before J1O1, M1: J1O2 before J2O1 -> J2O2 waits for J2O1 waits for J1O2 waits for J1O1.
        let err = Schedule::from_machine_orders(&inst, vec![vec![3, 0], vec![1, 2]]).unwrap_err();
        assert_eq!(err, ScheduleError::Cyclic);
        let err = Schedule::from_machine_orders(&inst, vec![vec![0], vec![1, 2]]).unwrap_err();
        assert!(matches!(err, ScheduleError::WrongOperations { .. }));
        let err = Schedule::from_machine_orders(&inst, vec![vec![0, 3]]).unwrap_err();
        assert!(matches!(err, ScheduleError::MachineCount { .. }));
    }

    #[test]
    fn single_job_chain() {
        let inst = Instance::new("chain", 4, vec![vec![(0, 3), (1, 3), (2, 3), (3, 2)]]);
        let s = Schedule::from_machine_orders(&inst, vec![vec![0], vec![1], vec![2], vec![3]]).unwrap();
        assert_eq!(s.makespan(), 11);
        assert_eq!(s.critical_path(), vec![0, 1, 2, 3]);
        assert!(s.gantt_rows().iter().all(|r| r.entries.len() == 1));
    }

    #[test]
    fn parallel_jobs_makespan_is_max() {
        let inst = Instance::new("par", 2, vec![vec![(0, 5)], vec![(1, 3)]]);
        let s = Schedule::from_machine_orders(&inst, vec![vec![0], vec![1]]).unwrap();
        assert_eq!(s.makespan(), 5);
    }

    #[test]
    fn unused_machine_has_empty_row() {
        let inst = Instance::new("gap", 3, vec![vec![(0, 2), (2, 1)]]);
        let s = Schedule::from_machine_orders(&inst, vec![vec![0], vec![], vec![1]]).unwrap();
        let rows = s.gantt_rows();
        assert_eq!(rows.len(), 3);
        assert!(rows[1].entries.is_empty());
    }

    #[test]
    fn start_time_checks() {
        let inst = tiny();
        assert!(check_start_times(&inst, &[0, 4, 0, 4]).is_empty());
        assert_eq!(
            check_start_times(&inst, &[0, 1, 0, 4]),
            vec![
                ScheduleViolation::Precedence { before: 0, after: 1 },
                ScheduleViolation::Overlap {
                    machine: 1,
                    first: 1,
                    second: 2
                }
            ]
        );
        assert!(Schedule::from_start_times(&inst, vec![0, 1, 0, 4]).is_err());
        let s = Schedule::from_start_times(&inst, vec![0, 4, 0, 6]).unwrap();
        assert_eq!(s.machine_order(0), &[0, 3]);
        assert_eq!(s.makespan(), 7);
    }

    #[test]
    fn left_shift_detects_idle_slot() {
        let inst = tiny();
        assert_eq!(left_shift_witness(&inst, &[0, 4, 0, 4]), None);
        // J2O2 could start at 4 instead of 6.
        assert_eq!(left_shift_witness(&inst, &[0, 4, 0, 6]), Some((3, 4)));
        // J1O2 could be moved before J2O1? No: they would overlap. The makespan-10
        // semi-active schedule is still active.
        assert_eq!(left_shift_witness(&inst, &[0, 2, 5, 9]), None);
    }

    #[test]
    fn adjacent_swap_round_trip() {
        let inst = tiny();
        let s = Schedule::from_machine_orders(&inst, vec![vec![0, 3], vec![1, 2]]).unwrap();
        let t = s.with_adjacent_swap(1, 1).unwrap();
        assert_eq!(t.makespan(), 7);
        let back = t.with_adjacent_swap(1, 2).unwrap();
        assert_eq!(back.machine_orders(), s.machine_orders());
        assert!(s.with_adjacent_swap(1, 2).is_err());
    }
}
