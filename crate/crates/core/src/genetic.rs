//! Steady-state genetic algorithm over operation-based chromosomes.
//!
//! A chromosome is a sequence of job indices in which job `j` occurs once per
//! operation; the k-th occurrence of `j` names operation `(j, k)`. Chromosomes
//! are decoded with the Giffler-Thompson builder using the permutation as the
//! conflict priority, so every individual is a feasible active schedule.
//!
//! Each step picks two distinct parents, produces two children by one-point
//! order-preserving crossover and gene-swap mutation, and writes the best two
//! of the four back into the parents' slots.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::active::{build_active_schedule, build_with_dispatch_order, PermutationPriority, ShortestProcessingTime};
use crate::instance::{Instance, Time};
use crate::schedule::Schedule;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneticError {
    #[error("chromosome is not a permutation of the instance's job multiset")]
    MultisetMismatch,
    #[error("parents encode different job multisets")]
    ParentMismatch,
    #[error("crossover point {cut} beyond chromosome length {len}")]
    CutOutOfRange { cut: usize, len: usize },
    #[error("population size must be at least 2, got {0}")]
    PopulationTooSmall(usize),
    #[error("mutation rate {0} outside [0, 1]")]
    MutationRate(f64),
    #[error("cannot select {requested} elites from a population of {size}")]
    EliteCount { requested: usize, size: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chromosome(Vec<usize>);

impl Chromosome {
    pub fn new(genes: Vec<usize>) -> Self {
        Chromosome(genes)
    }

    /// Jobs in order, each repeated once per operation: `[0, 0, 1, 1, ...]`.
    pub fn sequential(inst: &Instance) -> Self {
        Chromosome(
            inst.routings()
                .iter()
                .enumerate()
                .flat_map(|(j, r)| std::iter::repeat_n(j, r.len()))
                .collect(),
        )
    }

    pub fn random<R: Rng + ?Sized>(inst: &Instance, rng: &mut R) -> Self {
        let mut c = Self::sequential(inst);
        c.0.shuffle(rng);
        c
    }

    pub fn genes(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_valid_for(&self, inst: &Instance) -> bool {
        let mut counts = vec![0usize; inst.num_jobs()];
        for &g in &self.0 {
            match counts.get_mut(g) {
                Some(c) => *c += 1,
                None => return false,
            }
        }
        counts
            .iter()
            .zip(inst.routings())
            .all(|(&c, r)| c == r.len())
    }

    fn job_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.0.iter().max().map_or(0, |m| m + 1)];
        for &g in &self.0 {
            counts[g] += 1;
        }
        counts
    }

    /// All distinct permutations of the instance's job multiset, in
    /// lexicographic order.
    pub fn distinct_permutations(inst: &Instance) -> DistinctPermutations {
        DistinctPermutations {
            next: Some(Self::sequential(inst).0),
        }
    }
}

pub struct DistinctPermutations {
    next: Option<Vec<usize>>,
}

impl Iterator for DistinctPermutations {
    type Item = Chromosome;

    fn next(&mut self) -> Option<Chromosome> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_permutation(&mut succ) {
            self.next = Some(succ);
        }
        Some(Chromosome(current))
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Decodes a chromosome into its active schedule.
pub fn decode_permutation<'a>(inst: &'a Instance, chrom: &Chromosome) -> Result<Schedule<'a>, GeneticError> {
    if !chrom.is_valid_for(inst) {
        return Err(GeneticError::MultisetMismatch);
    }
    let mut rule = PermutationPriority::new(inst, chrom.genes());
    Ok(build_active_schedule(inst, &mut rule))
}

fn fitness(inst: &Instance, chrom: &Chromosome) -> Time {
    decode_permutation(inst, chrom)
        .expect("operators preserve the job multiset")
        .makespan()
}

/// One-point order-preserving crossover. Child one keeps `a[..cut]` and fills
/// the remaining gene quota in the order the jobs appear in `b`; child two is
/// the mirror image.
pub fn crossover(a: &Chromosome, b: &Chromosome, cut: usize) -> Result<(Chromosome, Chromosome), GeneticError> {
    if a.len() != b.len() || a.job_counts() != b.job_counts() {
        return Err(GeneticError::ParentMismatch);
    }
    if cut > a.len() {
        return Err(GeneticError::CutOutOfRange { cut, len: a.len() });
    }
    Ok((order_fill(a, b, cut), order_fill(b, a, cut)))
}

fn order_fill(prefix_from: &Chromosome, fill_from: &Chromosome, cut: usize) -> Chromosome {
    let mut quota = prefix_from.job_counts();
    let mut genes = Vec::with_capacity(prefix_from.len());
    for &g in &prefix_from.0[..cut] {
        quota[g] -= 1;
        genes.push(g);
    }
    for &g in &fill_from.0 {
        if quota[g] > 0 {
            quota[g] -= 1;
            genes.push(g);
        }
    }
    Chromosome(genes)
}

/// Swaps the genes at `i` and `j`.
pub fn mutate(c: &Chromosome, i: usize, j: usize) -> Chromosome {
    let mut genes = c.0.clone();
    genes.swap(i, j);
    Chromosome(genes)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub population_size: usize,
    /// Number of steady-state steps.
    pub iterations: usize,
    pub seed: u64,
    pub mutation_rate: f64,
    /// Stop after this many steps without improving the population best.
    pub stall_limit: Option<usize>,
    /// Stop once the population best reaches this makespan.
    pub target: Option<Time>,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 20,
            iterations: 200,
            seed: 0,
            mutation_rate: 0.2,
            stall_limit: None,
            target: None,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), GeneticError> {
        if self.population_size < 2 {
            return Err(GeneticError::PopulationTooSmall(self.population_size));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(GeneticError::MutationRate(self.mutation_rate));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Member {
    pub chromosome: Chromosome,
    pub fitness: Time,
}

impl Member {
    pub fn evaluate(inst: &Instance, chromosome: Chromosome) -> Self {
        let fitness = fitness(inst, &chromosome);
        Member { chromosome, fitness }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Population {
    pub members: Vec<Member>,
}

impl Population {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn best(&self) -> &Member {
        self.members
            .iter()
            .min_by_key(|m| m.fitness)
            .expect("population is never empty")
    }

    pub fn best_fitness(&self) -> Time {
        self.best().fitness
    }

    /// True when every member carries the same chromosome.
    pub fn is_converged(&self) -> bool {
        self.members
            .windows(2)
            .all(|w| w[0].chromosome == w[1].chromosome)
    }
}

/// Initial population: member 0 is the job sequence of the SPT-rule active
/// schedule, the rest are uniform random permutations.
pub fn init_population(inst: &Instance, cfg: &GaConfig) -> Result<Population, GeneticError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok(init_with(inst, cfg.population_size, &mut rng))
}

fn init_with<R: Rng + ?Sized>(inst: &Instance, size: usize, rng: &mut R) -> Population {
    let (_, order) = build_with_dispatch_order(inst, &mut ShortestProcessingTime);
    let spt = Chromosome(order.iter().map(|&o| inst.op(o).job).collect());
    let mut members = Vec::with_capacity(size);
    members.push(Member::evaluate(inst, spt));
    while members.len() < size {
        members.push(Member::evaluate(inst, Chromosome::random(inst, rng)));
    }
    Population { members }
}

/// Writes the best two of `{parents[0], parents[1], children[0], children[1]}`
/// into the parent slots. Ties prefer children, then the lower index; the
/// better survivor takes the lower slot.
pub fn replace_best_two(pop: &Population, parents: (usize, usize), children: [Member; 2]) -> Population {
    let (p, q) = parents;
    let [c1, c2] = children;
    let mut pool = [c1, c2, pop.members[p.min(q)].clone(), pop.members[p.max(q)].clone()];
    // Stable: equal fitness keeps the pool order above.
    pool.sort_by_key(|m| m.fitness);
    let [first, second, _, _] = pool;
    let mut next = pop.clone();
    next.members[p.min(q)] = first;
    next.members[p.max(q)] = second;
    next
}

/// One steady-state step.
pub fn ga_step<R: Rng + ?Sized>(inst: &Instance, pop: &Population, mutation_rate: f64, rng: &mut R) -> Population {
    let size = pop.len();
    let p = rng.gen_range(0..size);
    let mut q = rng.gen_range(0..size - 1);
    if q >= p {
        q += 1;
    }
    let a = &pop.members[p].chromosome;
    let b = &pop.members[q].chromosome;
    let cut = rng.gen_range(0..=a.len());
    let (mut c1, mut c2) = crossover(a, b, cut).expect("population members share one multiset");
    for child in [&mut c1, &mut c2] {
        if !child.is_empty() && rng.gen_bool(mutation_rate) {
            let i = rng.gen_range(0..child.len());
            let j = rng.gen_range(0..child.len());
            *child = mutate(child, i, j);
        }
    }
    let children = [Member::evaluate(inst, c1), Member::evaluate(inst, c2)];
    replace_best_two(pop, (p, q), children)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaStop {
    Iterations,
    Converged,
    Stalled,
    TargetReached,
}

#[derive(Debug, Clone)]
pub struct GaRun {
    pub population: Population,
    pub iterations: usize,
    /// Population best before the first step and after every step.
    pub best_trace: Vec<Time>,
    pub stop: GaStop,
}

/// Runs up to `cfg.iterations` steps, stopping early when every chromosome is
/// identical or an optional stall/target criterion fires.
pub fn run_ga(inst: &Instance, cfg: &GaConfig) -> Result<GaRun, GeneticError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pop = init_with(inst, cfg.population_size, &mut rng);
    let mut best_trace = vec![pop.best_fitness()];
    let mut stalled = 0;
    let mut iterations = 0;
    let stop = loop {
        if cfg.target.is_some_and(|t| pop.best_fitness() <= t) {
            break GaStop::TargetReached;
        }
        if cfg.stall_limit.is_some_and(|l| stalled >= l) {
            break GaStop::Stalled;
        }
        if iterations >= cfg.iterations {
            break GaStop::Iterations;
        }
        if pop.is_converged() {
            break GaStop::Converged;
        }
        let before = pop.best_fitness();
        pop = ga_step(inst, &pop, cfg.mutation_rate, &mut rng);
        iterations += 1;
        let after = pop.best_fitness();
        stalled = if after < before { 0 } else { stalled + 1 };
        best_trace.push(after);
    };
    Ok(GaRun {
        population: pop,
        iterations,
        best_trace,
        stop,
    })
}

/// The `m` lowest-makespan members, ascending, ties by member index.
pub fn select_elites(pop: &Population, m: usize) -> Result<Vec<Member>, GeneticError> {
    if m == 0 || m > pop.len() {
        return Err(GeneticError::EliteCount {
            requested: m,
            size: pop.len(),
        });
    }
    let mut ranked: Vec<&Member> = pop.members.iter().collect();
    ranked.sort_by_key(|mem| mem.fitness);
    Ok(ranked.into_iter().take(m).cloned().collect())
}
