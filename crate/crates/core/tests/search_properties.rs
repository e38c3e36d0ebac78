mod common;

use jobshop::genetic::{crossover, decode_permutation, mutate, run_ga, Chromosome, GaConfig};
use jobshop::hybrid::{run_gta, ExecutionMode, GtaConfig};
use jobshop::instance::{builtin_instance, random_instance, Instance, Time};
use jobshop::oracle::{exact_makespan, DEFAULT_NODE_BUDGET};
use jobshop::schedule::{check_start_times, Schedule};
use jobshop::tabu::{neighborhood_moves, apply_move, run_ts, ts_step, Admission, TabuList, TsConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn optimum(inst: &Instance) -> Time {
    exact_makespan(inst, DEFAULT_NODE_BUDGET).optimal().unwrap().0
}

fn worst_decode(inst: &Instance) -> Schedule<'_> {
    Chromosome::distinct_permutations(inst)
        .map(|c| decode_permutation(inst, &c).unwrap())
        .max_by_key(|s| s.makespan())
        .unwrap()
}

proptest! {
    #[test]
    fn operators_preserve_multiset(seed in any::<u64>(), steps in 1usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = common::random_small(5, 5, &mut rng);
        let mut a = Chromosome::random(&inst, &mut rng);
        let mut b = Chromosome::random(&inst, &mut rng);
        for _ in 0..steps {
            let cut = rng.gen_range(0..=a.len());
            let (c1, c2) = crossover(&a, &b, cut).unwrap();
            let i = rng.gen_range(0..c1.len());
            let j = rng.gen_range(0..c1.len());
            a = mutate(&c1, i, j);
            b = c2;
            prop_assert!(a.is_valid_for(&inst));
            prop_assert!(b.is_valid_for(&inst));
        }
    }

    #[test]
    fn neighbourhood_moves_stay_feasible(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = common::random_small(6, 6, &mut rng);
        let s = decode_permutation(&inst, &Chromosome::random(&inst, &mut rng)).unwrap();
        for mv in neighborhood_moves(&s) {
            let next = apply_move(&s, &mv).unwrap();
            prop_assert!(check_start_times(&inst, next.start_times()).is_empty());
            let back = apply_move(&next, &mv.reversed()).unwrap();
            prop_assert_eq!(back.machine_orders(), s.machine_orders());
        }
    }
}

#[test]
fn a_thousand_neighbourhood_moves_are_feasible() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    while checked < 1000 {
        let inst = common::random_small(6, 6, &mut rng);
        let s = decode_permutation(&inst, &Chromosome::random(&inst, &mut rng)).unwrap();
        for mv in neighborhood_moves(&s) {
            let next = apply_move(&s, &mv).unwrap();
            assert!(check_start_times(&inst, next.start_times()).is_empty());
            checked += 1;
        }
    }
}

#[test]
fn tabu_predicate_matches_inequality() {
    use jobshop::tabu::{within_tenure, Move};
    let mv = Move {
        machine: 0,
        first: 0,
        second: 1,
    };
    for tenure in 1..=10u64 {
        let mut tl = TabuList::new(2, tenure);
        for clock in 0..=50u64 {
            for stamp in 0..=50u64 {
                tl.set_clock(clock);
                tl.set_stamp(0, 1, stamp);
                let literal = (clock as i64) - (stamp as i64) < tenure as i64;
                assert_eq!(tl.is_tabu(&mv), literal);
                assert_eq!(within_tenure(clock, stamp, tenure), literal);
            }
        }
    }
}

/// Replays a search step by step, checking every intermediate schedule.
#[test]
fn ts_trajectories_are_feasible_and_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..40 {
        let inst = common::random_small(5, 5, &mut rng);
        let mut current = decode_permutation(&inst, &Chromosome::random(&inst, &mut rng)).unwrap();
        let mut best = current.clone();
        let mut tl = TabuList::new(inst.num_ops(), 3);
        for _ in 0..60 {
            let previous_best = best.makespan();
            let step = ts_step(&current, &mut tl, &best);
            let Some(taken) = step.taken else { break };
            assert!(check_start_times(&inst, step.current.start_times()).is_empty());
            assert!(step.best.makespan() <= previous_best);
            if taken.admission == Admission::Aspiration {
                assert!(taken.makespan < previous_best);
            }
            current = step.current;
            best = step.best;
        }
    }
}

#[test]
fn run_ts_is_deterministic_and_monotone() {
    let inst = random_instance(6, 6, 5);
    let start = decode_permutation(&inst, &Chromosome::sequential(&inst)).unwrap();
    let cfg = TsConfig::default();
    let a = run_ts(&inst, &start, &cfg).unwrap();
    let b = run_ts(&inst, &start, &cfg).unwrap();
    assert_eq!(a.best, b.best);
    assert_eq!(a.current_trace, b.current_trace);
    assert!(a.best_trace.windows(2).all(|w| w[1] <= w[0]));
    assert!(a.best.makespan() <= start.makespan());
}

#[test]
fn ts_from_worst_decode_reaches_optimum() {
    let cfg = TsConfig {
        max_iterations: 200,
        idle_limit: 200,
        ..TsConfig::default()
    };
    for inst in common::corpus(30, 3, 3, 23) {
        let start = worst_decode(&inst);
        let run = run_ts(&inst, &start, &cfg).unwrap();
        assert_eq!(run.best.makespan(), optimum(&inst), "{inst:?}");
    }
}

#[test]
fn ga_reaches_optimum_on_small_instances() {
    let mut hits = 0;
    let corpus = common::corpus(50, 3, 3, 24);
    for (seed, inst) in corpus.iter().enumerate() {
        let cfg = GaConfig {
            seed: seed as u64,
            ..GaConfig::default()
        };
        let run = run_ga(inst, &cfg).unwrap();
        assert!(run.best_trace.windows(2).all(|w| w[1] <= w[0]));
        let opt = optimum(inst);
        assert!(run.population.best_fitness() >= opt);
        if run.population.best_fitness() == opt {
            hits += 1;
        }
    }
    assert!(hits * 10 >= corpus.len() * 9, "GA optimum hits {hits}/{}", corpus.len());
}

#[test]
fn ga_runs_are_reproducible() {
    let inst = random_instance(5, 5, 1);
    let cfg = GaConfig {
        seed: 99,
        ..GaConfig::default()
    };
    assert_eq!(run_ga(&inst, &cfg).unwrap().population, run_ga(&inst, &cfg).unwrap().population);
}

#[test]
fn gta_dominates_elites_and_respects_optimum() {
    for (seed, inst) in common::corpus(20, 3, 3, 25).iter().enumerate() {
        let mut cfg = GtaConfig::default();
        cfg.ga.seed = seed as u64;
        cfg.mode = if seed % 2 == 0 {
            ExecutionMode::Serial
        } else {
            ExecutionMode::Concurrent
        };
        let run = run_gta(inst, &cfg).unwrap();
        assert!(run.best.makespan() <= run.min_elite_makespan());
        assert!(run.best.makespan() >= optimum(inst));
        for r in &run.reports {
            assert!(check_start_times(inst, r.best.start_times()).is_empty());
        }
    }
}

#[test]
fn oracle_is_invariant_under_relabelling() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for _ in 0..20 {
        let inst = common::random_small(4, 3, &mut rng);
        let opt = optimum(&inst);
        let mut job_perm: Vec<usize> = (0..inst.num_jobs()).collect();
        let mut machine_perm: Vec<usize> = (0..inst.num_machines()).collect();
        use rand::seq::SliceRandom;
        job_perm.shuffle(&mut rng);
        machine_perm.shuffle(&mut rng);
        let routings = job_perm
            .iter()
            .map(|&j| {
                inst.routing(j)
                    .iter()
                    .map(|o| (machine_perm[o.machine], o.duration))
                    .collect()
            })
            .collect();
        let relabelled = Instance::new("relabelled", inst.num_machines(), routings);
        assert_eq!(optimum(&relabelled), opt);
    }
}

#[test]
fn oracle_never_exceeds_metaheuristics() {
    let inst = builtin_instance("paper4x4").unwrap();
    let opt = optimum(&inst);
    let ga = run_ga(&inst, &GaConfig::default()).unwrap();
    assert!(opt <= ga.population.best_fitness());
    let gta = run_gta(&inst, &GtaConfig::default()).unwrap();
    assert!(opt <= gta.best.makespan());
}

#[test]
fn ft06_instance_has_known_optimum() {
    let inst = jobshop::instance::parse_instance(include_str!("../../../instances/ft06.txt")).unwrap();
    let result = exact_makespan(&inst, 50_000_000);
    assert_eq!(result.optimal().map(|(m, _)| m), Some(55), "nodes {}", result.nodes());
}
