//! Shared solver options and the single-run driver used by `solve`, `bench`
//! and `gantt`.

use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use jobshop::active::{build_active_schedule, ShortestProcessingTime};
use jobshop::genetic::{decode_permutation, run_ga, Chromosome, GaConfig};
use jobshop::hybrid::{run_gta, ExecutionMode, GtaConfig};
use jobshop::instance::{builtin_instance, parse_instance, random_instance, Instance, Time};
use jobshop::oracle::{exact_makespan, ExactResult, DEFAULT_NODE_BUDGET};
use jobshop::schedule::Schedule;
use jobshop::tabu::{run_ts, TsConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::document::Params;

/// Largest operation count for which `--init worst` enumerates permutations.
const WORST_INIT_MAX_OPS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Ga,
    Ts,
    Gta,
    Exact,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Ga => "ga",
            Algo::Ts => "ts",
            Algo::Gta => "gta",
            Algo::Exact => "exact",
        }
    }

    pub fn parse(s: &str) -> Option<Algo> {
        <Algo as ValueEnum>::from_str(s, true).ok()
    }
}

/// Initial schedule for `--algo ts`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Init {
    Spt,
    Random,
    Sequential,
    /// Worst decoded permutation; only for tiny instances.
    Worst,
}

impl Init {
    fn name(self) -> &'static str {
        match self {
            Init::Spt => "spt",
            Init::Random => "random",
            Init::Sequential => "sequential",
            Init::Worst => "worst",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Seed for the GA and for `--init random`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run GTA workers one after another; also omits wall time from documents.
    #[arg(long)]
    pub serial: bool,
    #[arg(long, default_value_t = 20)]
    pub pop: usize,
    #[arg(long, default_value_t = 200)]
    pub ga_iters: usize,
    #[arg(long, default_value_t = 0.2)]
    pub mutation_rate: f64,
    #[arg(long, default_value_t = 7)]
    pub tenure: u64,
    #[arg(long, default_value_t = 50)]
    pub idle_limit: usize,
    /// Tabu search iteration cap.
    #[arg(long, default_value_t = 1000)]
    pub max_iters: usize,
    /// Number of GTA tabu workers.
    #[arg(long, default_value_t = 2)]
    pub workers: usize,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub node_budget: u64,
    #[arg(long, value_enum, default_value = "spt")]
    pub init: Init,
}

impl SolverArgs {
    fn ga_config(&self) -> GaConfig {
        GaConfig {
            population_size: self.pop,
            iterations: self.ga_iters,
            seed: self.seed,
            mutation_rate: self.mutation_rate,
            ..GaConfig::default()
        }
    }

    fn ts_config(&self) -> TsConfig {
        TsConfig {
            tenure: self.tenure,
            max_iterations: self.max_iters,
            idle_limit: self.idle_limit,
            seed: self.seed,
        }
    }

    pub fn params(&self, algo: Algo) -> Params {
        let mut p = Params {
            serial: self.serial,
            ..Params::default()
        };
        if matches!(algo, Algo::Ga | Algo::Gta) {
            p.pop = Some(self.pop);
            p.ga_iters = Some(self.ga_iters);
            p.mutation_rate = Some(self.mutation_rate);
        }
        if matches!(algo, Algo::Ts | Algo::Gta) {
            p.tenure = Some(self.tenure);
            p.idle_limit = Some(self.idle_limit);
            p.max_iters = Some(self.max_iters);
        }
        match algo {
            Algo::Ts => p.init = Some(self.init.name().to_string()),
            Algo::Gta => p.workers = Some(self.workers),
            Algo::Exact => p.node_budget = Some(self.node_budget),
            Algo::Ga => {}
        }
        p
    }
}

/// Where an instance comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    File(String),
    Builtin(String),
    Generated { jobs: usize, machines: usize, seed: u64 },
}

/// Parses `NxM` (either case of the separator).
pub fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (n, m) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NxM, got {s:?}"))?;
    let n: usize = n.trim().parse().map_err(|_| format!("bad job count in {s:?}"))?;
    let m: usize = m.trim().parse().map_err(|_| format!("bad machine count in {s:?}"))?;
    if n == 0 || m == 0 {
        return Err(format!("size must be positive, got {s:?}"));
    }
    Ok((n, m))
}

pub fn load(source: &Source) -> Result<Instance> {
    match source {
        Source::File(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {path}"))?;
            let inst = parse_instance(&text).with_context(|| format!("invalid instance {path}"))?;
            let stem = std::path::Path::new(path)
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.clone());
            Ok(inst.with_name(stem))
        }
        Source::Builtin(name) => Ok(builtin_instance(name)?),
        Source::Generated { jobs, machines, seed } => Ok(random_instance(*jobs, *machines, *seed)),
    }
}

#[derive(Debug)]
pub enum Outcome<'a> {
    Solved(Schedule<'a>),
    /// The oracle ran out of nodes before proving optimality.
    Unproven { incumbent: Time, lower_bound: Time, nodes: u64 },
}

#[derive(Debug)]
pub struct Timed<'a> {
    pub outcome: Outcome<'a>,
    /// Measured around the solver call only.
    pub wall_seconds: f64,
}

fn initial_schedule<'a>(inst: &'a Instance, args: &SolverArgs) -> Result<Schedule<'a>> {
    Ok(match args.init {
        Init::Spt => build_active_schedule(inst, &mut ShortestProcessingTime),
        Init::Sequential => decode_permutation(inst, &Chromosome::sequential(inst))?,
        Init::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            decode_permutation(inst, &Chromosome::random(inst, &mut rng))?
        }
        Init::Worst => {
            if inst.num_ops() > WORST_INIT_MAX_OPS {
                bail!(
                    "--init worst enumerates every permutation; refusing for {} operations (limit {WORST_INIT_MAX_OPS})",
                    inst.num_ops()
                );
            }
            let mut worst: Option<Schedule<'a>> = None;
            for c in Chromosome::distinct_permutations(inst) {
                let s = decode_permutation(inst, &c)?;
                if worst.as_ref().is_none_or(|w| s.makespan() > w.makespan()) {
                    worst = Some(s);
                }
            }
            worst.expect("at least one permutation")
        }
    })
}

pub fn solve<'a>(inst: &'a Instance, algo: Algo, args: &SolverArgs) -> Result<Timed<'a>> {
    let initial = match algo {
        Algo::Ts => Some(initial_schedule(inst, args)?),
        _ => None,
    };
    let clock = Instant::now();
    let outcome = match algo {
        Algo::Ga => {
            let run = run_ga(inst, &args.ga_config())?;
            Outcome::Solved(decode_permutation(inst, &run.population.best().chromosome)?)
        }
        Algo::Ts => {
            let run = run_ts(inst, initial.as_ref().expect("initial schedule"), &args.ts_config())?;
            Outcome::Solved(run.best)
        }
        Algo::Gta => {
            let cfg = GtaConfig {
                ga: args.ga_config(),
                ts: args.ts_config(),
                workers: args.workers,
                mode: if args.serial {
                    ExecutionMode::Serial
                } else {
                    ExecutionMode::Concurrent
                },
            };
            Outcome::Solved(run_gta(inst, &cfg)?.best)
        }
        Algo::Exact => match exact_makespan(inst, args.node_budget) {
            ExactResult::Optimal { schedule, .. } => Outcome::Solved(schedule),
            ExactResult::Unproven {
                incumbent,
                lower_bound,
                nodes,
            } => Outcome::Unproven {
                incumbent: incumbent.makespan(),
                lower_bound,
                nodes,
            },
        },
    };
    Ok(Timed {
        outcome,
        wall_seconds: clock.elapsed().as_secs_f64(),
    })
}
