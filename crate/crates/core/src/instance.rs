//! Job-shop instances: the data model, the text file format, validation and
//! the built-in fixtures.
//!
//! The file format is the usual community one:
//!
//! ```text
//! # optional comment lines
//! <jobs> <machines>
//! <machine> <duration> <machine> <duration> ...   (one line per job)
//! ```
//!
//! Machines are 0-based. A job may visit the same machine more than once.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Integer time unit used for durations, start times and makespans.
pub type Time = u64;

/// Flat operation index: `instance.op_id(job, pos)`.
pub type OpId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Operation {
    pub job: usize,
    pub pos: usize,
    pub machine: usize,
    pub duration: Time,
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "J{}O{}", self.job + 1, self.pos + 1)
    }
}

/// A job-shop problem: `num_jobs` ordered routings over `num_machines` machines.
///
/// Construction does not validate; use [`validate_instance`] or go through
/// [`parse_instance`], which rejects anything the validator would flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    name: String,
    num_machines: usize,
    jobs: Vec<Vec<Operation>>,
    ops: Vec<Operation>,
    offsets: Vec<usize>,
}

impl Instance {
    /// Builds an instance from per-job `(machine, duration)` routings.
    pub fn new(
        name: impl Into<String>,
        num_machines: usize,
        routings: Vec<Vec<(usize, Time)>>,
    ) -> Self {
        let jobs: Vec<Vec<Operation>> = routings
            .into_iter()
            .enumerate()
            .map(|(job, steps)| {
                steps
                    .into_iter()
                    .enumerate()
                    .map(|(pos, (machine, duration))| Operation {
                        job,
                        pos,
                        machine,
                        duration,
                    })
                    .collect()
            })
            .collect();
        let mut offsets = Vec::with_capacity(jobs.len() + 1);
        let mut ops = Vec::new();
        for job in &jobs {
            offsets.push(ops.len());
            ops.extend_from_slice(job);
        }
        offsets.push(ops.len());
        Instance {
            name: name.into(),
            num_machines,
            jobs,
            ops,
            offsets,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn num_jobs(&self) -> usize {
        self.jobs.len()
    }

    pub fn num_machines(&self) -> usize {
        self.num_machines
    }

    pub fn num_ops(&self) -> usize {
        self.ops.len()
    }

    pub fn routing(&self, job: usize) -> &[Operation] {
        &self.jobs[job]
    }

    pub fn routings(&self) -> &[Vec<Operation>] {
        &self.jobs
    }

    /// All operations, job-major.
    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn op(&self, id: OpId) -> &Operation {
        &self.ops[id]
    }

    pub fn op_id(&self, job: usize, pos: usize) -> OpId {
        debug_assert!(pos < self.jobs[job].len());
        self.offsets[job] + pos
    }

    /// Job predecessor of an operation, if any.
    pub fn job_pred(&self, id: OpId) -> Option<OpId> {
        (self.ops[id].pos > 0).then(|| id - 1)
    }

    /// Job successor of an operation, if any.
    pub fn job_succ(&self, id: OpId) -> Option<OpId> {
        let op = &self.ops[id];
        (op.pos + 1 < self.jobs[op.job].len()).then(|| id + 1)
    }

    pub fn total_duration(&self) -> Time {
        self.ops.iter().map(|o| o.duration).sum()
    }

    /// Operations processed by `machine`, in flat-id order.
    pub fn ops_on_machine(&self, machine: usize) -> impl Iterator<Item = OpId> + '_ {
        self.ops
            .iter()
            .enumerate()
            .filter(move |(_, o)| o.machine == machine)
            .map(|(id, _)| id)
    }

    /// Serializes to the text format accepted by [`parse_instance`].
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.num_jobs(), self.num_machines);
        for job in &self.jobs {
            let line: Vec<String> = job
                .iter()
                .map(|o| format!("{} {}", o.machine, o.duration))
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoJobs,
    NoMachines,
    EmptyJob { job: usize },
    NonPositiveDuration { job: usize, pos: usize },
    MachineOutOfRange { job: usize, pos: usize, machine: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoJobs => write!(f, "instance has no jobs"),
            Violation::NoMachines => write!(f, "instance has no machines"),
            Violation::EmptyJob { job } => write!(f, "job {job}: no operations"),
            Violation::NonPositiveDuration { job, pos } => {
                write!(f, "job {job} op {pos}: non-positive duration")
            }
            Violation::MachineOutOfRange { job, pos, machine } => {
                write!(f, "job {job} op {pos}: machine {machine} out of range")
            }
        }
    }
}

/// Lists every invariant violation; an empty list means the instance is valid.
pub fn validate_instance(inst: &Instance) -> Vec<Violation> {
    let mut report = Vec::new();
    if inst.num_jobs() == 0 {
        report.push(Violation::NoJobs);
    }
    if inst.num_machines() == 0 {
        report.push(Violation::NoMachines);
    }
    for (job, routing) in inst.routings().iter().enumerate() {
        if routing.is_empty() {
            report.push(Violation::EmptyJob { job });
        }
        for op in routing {
            if op.duration < 1 {
                report.push(Violation::NonPositiveDuration { job, pos: op.pos });
            }
            if op.machine >= inst.num_machines() {
                report.push(Violation::MachineOutOfRange {
                    job,
                    pos: op.pos,
                    machine: op.machine,
                });
            }
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty input: no header line")]
    Empty,
    #[error("line {line}: malformed header, expected \"<jobs> <machines>\"")]
    MalformedHeader { line: usize },
    #[error("line {line}: invalid integer {token:?}")]
    InvalidToken { line: usize, token: String },
    #[error("line {line}: odd token count")]
    OddTokenCount { line: usize },
    #[error("line {line}: machine {machine} out of range (instance has {num_machines} machines)")]
    MachineOutOfRange {
        line: usize,
        machine: usize,
        num_machines: usize,
    },
    #[error("line {line}: non-positive duration")]
    NonPositiveDuration { line: usize },
    #[error("line {line}: job line has no operations")]
    EmptyJob { line: usize },
    #[error("expected {expected} job lines, found {found}")]
    MissingJobs { expected: usize, found: usize },
    #[error("line {line}: unexpected data after the last job")]
    TrailingData { line: usize },
    #[error("header declares no jobs or no machines")]
    ZeroSize,
}

/// Parses and validates an instance. The name is left empty; callers label it.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    parse(text, true)
}

/// Syntax-only parse: integer layout is checked, semantic invariants are not.
/// Pair with [`validate_instance`] to report every violation at once.
pub fn parse_instance_lenient(text: &str) -> Result<Instance, ParseError> {
    parse(text, false)
}

fn parse(text: &str, strict: bool) -> Result<Instance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r').trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or(ParseError::Empty)?;
    let dims = parse_ints(header_line, header)
        .map_err(|_| ParseError::MalformedHeader { line: header_line })?;
    let [num_jobs, num_machines] = dims[..] else {
        return Err(ParseError::MalformedHeader { line: header_line });
    };
    let (num_jobs, num_machines) = (num_jobs as usize, num_machines as usize);
    if strict && (num_jobs == 0 || num_machines == 0) {
        return Err(ParseError::ZeroSize);
    }

    let mut routings = Vec::with_capacity(num_jobs);
    for (line, content) in lines {
        if routings.len() == num_jobs {
            return Err(ParseError::TrailingData { line });
        }
        let tokens = parse_ints(line, content)?;
        if tokens.len() % 2 != 0 {
            return Err(ParseError::OddTokenCount { line });
        }
        if strict && tokens.is_empty() {
            return Err(ParseError::EmptyJob { line });
        }
        let mut routing = Vec::with_capacity(tokens.len() / 2);
        for pair in tokens.chunks_exact(2) {
            let (machine, duration) = (pair[0] as usize, pair[1]);
            if strict && machine >= num_machines {
                return Err(ParseError::MachineOutOfRange {
                    line,
                    machine,
                    num_machines,
                });
            }
            if strict && duration < 1 {
                return Err(ParseError::NonPositiveDuration { line });
            }
            routing.push((machine, duration));
        }
        routings.push(routing);
    }
    if routings.len() < num_jobs {
        return Err(ParseError::MissingJobs {
            expected: num_jobs,
            found: routings.len(),
        });
    }
    Ok(Instance::new("", num_machines, routings))
}

fn parse_ints(line: usize, content: &str) -> Result<Vec<u64>, ParseError> {
    content
        .split_whitespace()
        .map(|tok| {
            tok.parse::<u64>().map_err(|_| ParseError::InvalidToken {
                line,
                token: tok.to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown builtin instance {0:?} (known: {known})", known = BUILTIN_NAMES.join(", "))]
pub struct UnknownBuiltin(pub String);

pub const BUILTIN_NAMES: &[&str] = &["paper4x4", "tiny2x2"];

/// Returns one of the fixture instances listed in [`BUILTIN_NAMES`].
pub fn builtin_instance(name: &str) -> Result<Instance, UnknownBuiltin> {
    match name {
        // Four jobs, four machines, with recirculation in jobs 2-4.
        "paper4x4" => Ok(Instance::new(
            "paper4x4",
            4,
            vec![
                vec![(0, 3), (1, 3), (2, 3), (3, 2)],
                vec![(2, 2), (2, 3), (0, 4), (1, 3)],
                vec![(1, 3), (3, 2), (1, 2), (0, 4)],
                vec![(3, 3), (0, 2), (3, 2), (2, 4)],
            ],
        )),
        "tiny2x2" => Ok(Instance::new(
            "tiny2x2",
            2,
            vec![vec![(0, 2), (1, 3)], vec![(1, 4), (0, 1)]],
        )),
        other => Err(UnknownBuiltin(other.to_string())),
    }
}

/// Random instance where every job visits all `machines` machines once in a
/// shuffled order, with durations uniform in `1..=10`.
pub fn random_instance(jobs: usize, machines: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_instance_with(jobs, machines, &mut rng)
        .with_name(format!("gen{jobs}x{machines}-s{seed}"))
}

pub fn random_instance_with<R: Rng + ?Sized>(jobs: usize, machines: usize, rng: &mut R) -> Instance {
    let routings = (0..jobs)
        .map(|_| {
            let mut order: Vec<usize> = (0..machines).collect();
            order.shuffle(rng);
            order
                .into_iter()
                .map(|m| (m, rng.gen_range(1..=10)))
                .collect()
        })
        .collect();
    Instance::new(format!("rand{jobs}x{machines}"), machines, routings)
}
