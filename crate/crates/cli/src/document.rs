//! JSON result document written by `jss solve` and read back by `jss gantt`.

use anyhow::{bail, ensure, Result};
use jobshop::instance::{Instance, Time};
use jobshop::schedule::Schedule;
use serde::{Deserialize, Serialize};

/// Solver parameters that produced a result. Only the ones relevant to the
/// algorithm are filled in.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pop: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ga_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutation_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tenure: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idle_limit: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_budget: Option<u64>,
    #[serde(default)]
    pub serial: bool,
}

/// `[job, pos, machine, start, end]`, all 0-based.
pub type StartRow = [u64; 5];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub instance: String,
    pub algo: String,
    pub seed: u64,
    pub makespan: Time,
    pub starts: Vec<StartRow>,
    /// `[job, pos]` pairs from time zero to the makespan.
    pub critical_path: Vec<[u64; 2]>,
    /// Solver wall time; `null` in `--serial` runs so documents are reproducible.
    pub wall_seconds: Option<f64>,
    pub params: Params,
}

impl ResultDocument {
    pub fn new(
        schedule: &Schedule<'_>,
        algo: &str,
        seed: u64,
        wall_seconds: Option<f64>,
        params: Params,
    ) -> Self {
        let inst = schedule.instance();
        let starts = inst
            .ops()
            .iter()
            .enumerate()
            .map(|(id, op)| {
                [
                    op.job as u64,
                    op.pos as u64,
                    op.machine as u64,
                    schedule.start(id),
                    schedule.end(id),
                ]
            })
            .collect();
        let critical_path = schedule
            .critical_path()
            .into_iter()
            .map(|id| [inst.op(id).job as u64, inst.op(id).pos as u64])
            .collect();
        ResultDocument {
            instance: inst.name().to_string(),
            algo: algo.to_string(),
            seed,
            makespan: schedule.makespan(),
            starts,
            critical_path,
            wall_seconds,
            params,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Rebuilds the schedule against `inst`, checking that every operation
    /// appears once with the instance's machine and duration, that the
    /// timing is feasible, and that the stated makespan is the real one.
    pub fn to_schedule<'a>(&self, inst: &'a Instance) -> Result<Schedule<'a>> {
        let mut start: Vec<Option<Time>> = vec![None; inst.num_ops()];
        for &[job, pos, machine, s, e] in &self.starts {
            let (job, pos) = (job as usize, pos as usize);
            ensure!(
                job < inst.num_jobs() && pos < inst.routing(job).len(),
                "operation ({job}, {pos}) does not exist in instance {}",
                inst.name()
            );
            let id = inst.op_id(job, pos);
            let op = inst.op(id);
            ensure!(op.machine as u64 == machine, "operation ({job}, {pos}) listed on machine {machine}, instance says {}", op.machine);
            ensure!(e >= s && e - s == op.duration, "operation ({job}, {pos}) spans {} units, duration is {}", e.saturating_sub(s), op.duration);
            ensure!(start[id].is_none(), "operation ({job}, {pos}) listed twice");
            start[id] = Some(s);
        }
        let Some(start) = start.into_iter().collect::<Option<Vec<Time>>>() else {
            bail!("incomplete document: not every operation has a start time");
        };
        let schedule = Schedule::from_start_times(inst, start)?;
        ensure!(
            schedule.makespan() == self.makespan,
            "document claims makespan {}, start times give {}",
            self.makespan,
            schedule.makespan()
        );
        Ok(schedule)
    }
}
