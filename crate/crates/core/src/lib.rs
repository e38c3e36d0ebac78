//! Job-shop scheduling toolkit.
//!
//! * [`instance`]: problem data, the text format and fixtures.
//! * [`schedule`], [`active`], [`graph`]: schedules, Giffler-Thompson
//!   active-schedule construction and the disjunctive graph.
//! * [`genetic`]: steady-state GA over operation-based permutations.
//! * [`tabu`]: tabu search over critical-arc swaps.
//! * [`hybrid`]: GA elites refined by concurrent tabu-search workers.
//! * [`oracle`]: exact branch and bound for small instances.
//!
//! ```
//! use jobshop::prelude::*;
//!
//! let inst = builtin_instance("tiny2x2").unwrap();
//! let cfg = GtaConfig { mode: ExecutionMode::Serial, ..GtaConfig::default() };
//! let run = run_gta(&inst, &cfg).unwrap();
//! assert_eq!(run.best.makespan(), 7);
//! ```

pub mod active;
pub mod genetic;
pub mod graph;
pub mod hybrid;
pub mod instance;
pub mod oracle;
pub mod schedule;
pub mod tabu;

pub mod prelude {
    pub use crate::active::{build_active_schedule, ConflictRule, PermutationPriority, SeededRandom, ShortestProcessingTime};
    pub use crate::genetic::{decode_permutation, run_ga, Chromosome, GaConfig};
    pub use crate::graph::DisjunctiveGraph;
    pub use crate::hybrid::{run_gta, ExecutionMode, GtaConfig};
    pub use crate::instance::{builtin_instance, parse_instance, validate_instance, Instance, OpId, Time};
    pub use crate::oracle::{exact_makespan, feasible_within, ExactResult, DEFAULT_NODE_BUDGET};
    pub use crate::schedule::Schedule;
    pub use crate::tabu::{run_ts, TsConfig};
}
