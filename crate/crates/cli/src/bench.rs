//! Benchmark records and their table, JSON and CSV renderings.

use std::fmt::Write;

use jobshop::instance::{Instance, Time};
use serde::{Deserialize, Serialize};

use crate::document::Params;
use crate::run::{solve, Algo, Outcome, SolverArgs};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    /// `NxM`.
    pub size: String,
    pub algo: String,
    /// `null` when the run failed or under `--serial`.
    pub wall_seconds: Option<f64>,
    pub cost: Option<Time>,
    pub seed: u64,
    pub params: Params,
    pub error: Option<String>,
    /// Time shown in the text table even under `--serial`.
    #[serde(skip)]
    pub measured_seconds: Option<f64>,
}

impl RunRecord {
    pub fn succeeded(&self) -> bool {
        self.error.is_none()
    }
}

pub fn size_of(inst: &Instance) -> String {
    format!("{}x{}", inst.num_jobs(), inst.num_machines())
}

pub fn run_one(inst: &Instance, algo: Algo, args: &SolverArgs) -> RunRecord {
    let mut record = RunRecord {
        instance: inst.name().to_string(),
        size: size_of(inst),
        algo: algo.name().to_string(),
        wall_seconds: None,
        cost: None,
        seed: args.seed,
        params: args.params(algo),
        error: None,
        measured_seconds: None,
    };
    match solve(inst, algo, args) {
        Ok(timed) => {
            record.measured_seconds = Some(timed.wall_seconds);
            match timed.outcome {
                Outcome::Solved(s) => {
                    record.cost = Some(s.makespan());
                    if !args.serial {
                        record.wall_seconds = Some(timed.wall_seconds);
                    }
                }
                Outcome::Unproven {
                    incumbent,
                    lower_bound,
                    nodes,
                } => {
                    record.error = Some(format!(
                        "node budget exhausted after {nodes} nodes (incumbent {incumbent}, lower bound {lower_bound})"
                    ));
                }
            }
        }
        Err(e) => record.error = Some(format!("{e:#}")),
    }
    record
}

/// Two header rows (algorithm names, then `Time (s)` / `Cost` pairs) and one
/// row per instance. Failed cells read `error`; the messages follow the table.
pub fn render_table(records: &[RunRecord], algos: &[Algo]) -> String {
    let mut instances: Vec<(&str, &str)> = Vec::new();
    for r in records {
        if !instances.contains(&(r.instance.as_str(), r.size.as_str())) {
            instances.push((&r.instance, &r.size));
        }
    }
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut head1 = vec![String::new()];
    let mut head2 = vec!["Problem size".to_string()];
    for a in algos {
        head1.push(a.name().to_uppercase());
        head1.push(String::new());
        head2.push("Time (s)".to_string());
        head2.push("Cost".to_string());
    }
    rows.push(head1);
    rows.push(head2);
    let mut notes = Vec::new();
    for &(name, size) in &instances {
        let mut row = vec![format!("{size} {name}")];
        for a in algos {
            let rec = records
                .iter()
                .find(|r| r.instance == name && r.size == size && r.algo == a.name());
            match rec {
                Some(r) if r.succeeded() => {
                    row.push(r.measured_seconds.map_or("-".to_string(), |t| format!("{t:.4}")));
                    row.push(r.cost.map_or("-".to_string(), |c| c.to_string()));
                }
                Some(r) => {
                    row.push("error".to_string());
                    row.push("error".to_string());
                    notes.push(format!(
                        "{name} {}: {}",
                        r.algo,
                        r.error.as_deref().unwrap_or_default()
                    ));
                }
                None => {
                    row.push("-".to_string());
                    row.push("-".to_string());
                }
            }
        }
        rows.push(row);
    }
    let columns = rows[0].len();
    let widths: Vec<usize> = (0..columns)
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                line.push_str(if c % 2 == 1 { " | " } else { "  " });
            }
            let _ = write!(line, "{cell:<w$}", w = widths[c]);
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    for n in notes {
        let _ = writeln!(out, "error: {n}");
    }
    out
}

pub fn render_json(records: &[RunRecord]) -> String {
    serde_json::to_string_pretty(records).expect("records serialize")
}

pub fn render_csv(records: &[RunRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["instance", "size", "algo", "wall_seconds", "cost", "seed", "params", "error"])
        .expect("in-memory write");
    for r in records {
        let params = serde_json::to_string(&r.params).expect("params serialize");
        w.write_record([
            r.instance.clone(),
            r.size.clone(),
            r.algo.clone(),
            r.wall_seconds.map(|t| t.to_string()).unwrap_or_default(),
            r.cost.map(|c| c.to_string()).unwrap_or_default(),
            r.seed.to_string(),
            params,
            r.error.clone().unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}
