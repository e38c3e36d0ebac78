//! Genetic-tabu hybrid: a genetic phase on the coordinator produces elites,
//! one tabu-search worker refines each elite, and the first worker to report
//! convergence stops the others.
//!
//! Workers share only the immutable instance. The coordinator hands each
//! worker its seed schedule when spawning it, receives reports over a
//! channel, and sends cancellation messages; nothing else is shared.

use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::genetic::{decode_permutation, run_ga, select_elites, GaConfig, GaRun, GeneticError, Member};
use crate::instance::{Instance, Time};
use crate::schedule::Schedule;
use crate::tabu::{run_ts_cancellable, TabuError, TsConfig, TsStop};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HybridError {
    #[error(transparent)]
    Genetic(#[from] GeneticError),
    #[error(transparent)]
    Tabu(#[from] TabuError),
    #[error("need between 1 and {population} workers, got {workers}")]
    WorkerCount { workers: usize, population: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecutionMode {
    /// Workers run one after another in id order, each to completion.
    Serial,
    /// One thread per worker.
    #[default]
    Concurrent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GtaConfig {
    pub ga: GaConfig,
    pub ts: TsConfig,
    pub workers: usize,
    pub mode: ExecutionMode,
}

impl Default for GtaConfig {
    fn default() -> Self {
        GtaConfig {
            ga: GaConfig::default(),
            ts: TsConfig::default(),
            workers: 2,
            mode: ExecutionMode::default(),
        }
    }
}

impl GtaConfig {
    pub fn validate(&self) -> Result<(), HybridError> {
        self.ga.validate()?;
        self.ts.validate()?;
        if self.workers == 0 || self.workers > self.ga.population_size {
            return Err(HybridError::WorkerCount {
                workers: self.workers,
                population: self.ga.population_size,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct WorkerReport<'a> {
    pub worker: usize,
    pub seed: u64,
    pub elite_makespan: Time,
    pub best: Schedule<'a>,
    pub iterations: usize,
    pub converged: bool,
    pub stop: TsStop,
    /// Best-so-far trace of the worker's search.
    pub best_trace: Vec<Time>,
}

/// True iff the worker stopped on its idle limit or at a fixed point.
pub fn worker_converged(report: &WorkerReport<'_>) -> bool {
    report.converged
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PhaseTimings {
    pub ga: Duration,
    pub ts: Duration,
}

#[derive(Debug, Clone)]
pub struct GtaRun<'a> {
    pub best: Schedule<'a>,
    /// Sorted by worker id.
    pub reports: Vec<WorkerReport<'a>>,
    /// Worker whose converged report stopped the run, if any converged.
    pub winner: Option<usize>,
    pub ga: GaRun,
    pub elites: Vec<Member>,
    pub timings: PhaseTimings,
}

impl GtaRun<'_> {
    pub fn min_elite_makespan(&self) -> Time {
        self.elites.iter().map(|e| e.fitness).min().unwrap_or(Time::MAX)
    }
}

pub fn run_gta<'a>(inst: &'a Instance, cfg: &GtaConfig) -> Result<GtaRun<'a>, HybridError> {
    cfg.validate()?;
    let ga_clock = Instant::now();
    let ga = run_ga(inst, &cfg.ga)?;
    let elites = select_elites(&ga.population, cfg.workers)?;
    let ga_elapsed = ga_clock.elapsed();

    let seeds: Vec<Schedule<'a>> = elites
        .iter()
        .map(|e| decode_permutation(inst, &e.chromosome).expect("population members are valid"))
        .collect();

    let ts_clock = Instant::now();
    let (mut reports, winner) = match cfg.mode {
        ExecutionMode::Serial => run_serial(inst, &cfg.ts, seeds)?,
        ExecutionMode::Concurrent => run_concurrent(inst, &cfg.ts, seeds)?,
    };
    let ts_elapsed = ts_clock.elapsed();
    reports.sort_by_key(|r| r.worker);

    let mut best = seeds_best(inst, &ga);
    for r in &reports {
        if r.best.makespan() < best.makespan() {
            best = r.best.clone();
        }
    }
    Ok(GtaRun {
        best,
        reports,
        winner,
        ga,
        elites,
        timings: PhaseTimings {
            ga: ga_elapsed,
            ts: ts_elapsed,
        },
    })
}

fn seeds_best<'a>(inst: &'a Instance, ga: &GaRun) -> Schedule<'a> {
    decode_permutation(inst, &ga.population.best().chromosome).expect("population members are valid")
}

fn worker_config(base: &TsConfig, worker: usize) -> TsConfig {
    TsConfig {
        seed: base.seed.wrapping_add(worker as u64),
        ..base.clone()
    }
}

fn run_worker<'a>(
    inst: &'a Instance,
    worker: usize,
    seed_schedule: Schedule<'a>,
    base: &TsConfig,
    cancelled: &mut dyn FnMut() -> bool,
) -> Result<WorkerReport<'a>, TabuError> {
    let cfg = worker_config(base, worker);
    let run = run_ts_cancellable(inst, &seed_schedule, &cfg, cancelled)?;
    Ok(WorkerReport {
        worker,
        seed: cfg.seed,
        elite_makespan: seed_schedule.makespan(),
        best: run.best,
        iterations: run.iterations,
        converged: run.converged,
        stop: run.stop,
        best_trace: run.best_trace,
    })
}

type WorkerResults<'a> = (Vec<WorkerReport<'a>>, Option<usize>);

fn run_serial<'a>(inst: &'a Instance, ts: &TsConfig, seeds: Vec<Schedule<'a>>) -> Result<WorkerResults<'a>, HybridError> {
    let mut reports = Vec::with_capacity(seeds.len());
    for (worker, seed) in seeds.into_iter().enumerate() {
        reports.push(run_worker(inst, worker, seed, ts, &mut || false)?);
    }
    let winner = reports.iter().find(|r| worker_converged(r)).map(|r| r.worker);
    Ok((reports, winner))
}

fn run_concurrent<'a>(
    inst: &'a Instance,
    ts: &TsConfig,
    seeds: Vec<Schedule<'a>>,
) -> Result<WorkerResults<'a>, HybridError> {
    let workers = seeds.len();
    let (report_tx, report_rx) = mpsc::channel::<Result<WorkerReport<'a>, TabuError>>();
    thread::scope(|scope| {
        let mut cancel_tx = Vec::with_capacity(workers);
        for (worker, seed) in seeds.into_iter().enumerate() {
            let (tx, rx) = mpsc::channel::<()>();
            cancel_tx.push(tx);
            let report_tx = report_tx.clone();
            scope.spawn(move || {
                let mut cancelled = || !matches!(rx.try_recv(), Err(mpsc::TryRecvError::Empty));
                // The receiver outlives every worker inside this scope.
                let _ = report_tx.send(run_worker(inst, worker, seed, ts, &mut cancelled));
            });
        }
        drop(report_tx);

        let mut reports = Vec::with_capacity(workers);
        let mut winner = None;
        for received in report_rx.iter() {
            let report = received?;
            if winner.is_none() && worker_converged(&report) {
                winner = Some(report.worker);
                for (id, tx) in cancel_tx.iter().enumerate() {
                    if id != report.worker {
                        // A worker that already finished has dropped its receiver.
                        let _ = tx.send(());
                    }
                }
            }
            reports.push(report);
        }
        Ok((reports, winner))
    })
}
