mod common;

use jobshop::active::{build_active_schedule, SeededRandom, ShortestProcessingTime};
use jobshop::genetic::{decode_permutation, Chromosome};
use jobshop::graph::DisjunctiveGraph;
use jobshop::instance::{parse_instance, parse_instance_lenient, validate_instance, Instance};
use jobshop::oracle::{exact_makespan, DEFAULT_NODE_BUDGET};
use jobshop::schedule::{check_start_times, left_shift_witness};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance_strategy() -> impl Strategy<Value = Instance> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(jobs, machines)| {
        prop::collection::vec(
            prop::collection::vec((0..machines, 1u64..=20), 1..=machines),
            jobs,
        )
        .prop_map(move |routings| Instance::new("prop", machines, routings))
    })
}

proptest! {
    #[test]
    fn text_round_trip(inst in instance_strategy()) {
        let text = inst.to_text();
        let parsed = parse_instance(&text).unwrap();
        prop_assert_eq!(parsed.routings(), inst.routings());
        prop_assert_eq!(parse_instance(&parsed.to_text()).unwrap(), parsed);
    }

    #[test]
    fn strict_parse_agrees_with_validator(
        machines in 1usize..4,
        tokens in prop::collection::vec(prop::collection::vec(0u64..5, 2..7), 1..4),
    ) {
        let mut text = format!("{} {}\n", tokens.len(), machines);
        for line in &tokens {
            let words: Vec<String> = line.iter().map(|t| t.to_string()).collect();
            text.push_str(&words.join(" "));
            text.push('\n');
        }
        if let Ok(inst) = parse_instance(&text) {
            prop_assert!(validate_instance(&inst).is_empty());
        }
        if let Ok(lenient) = parse_instance_lenient(&text) {
            prop_assert_eq!(parse_instance(&text).is_ok(), validate_instance(&lenient).is_empty());
        }
    }

    #[test]
    fn decode_is_feasible_and_deterministic(inst in instance_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chrom = Chromosome::random(&inst, &mut rng);
        let s = decode_permutation(&inst, &chrom).unwrap();
        prop_assert!(check_start_times(&inst, s.start_times()).is_empty());
        prop_assert_eq!(&s, &decode_permutation(&inst, &chrom).unwrap());
        let path = s.critical_path();
        let length: u64 = path.iter().map(|&o| inst.op(o).duration).sum();
        prop_assert_eq!(length, s.makespan());
        prop_assert_eq!(s.start(path[0]), 0);
    }
}

#[test]
fn feasibility_of_a_thousand_decodes() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let inst = common::random_small(6, 6, &mut rng);
        let chrom = Chromosome::random(&inst, &mut rng);
        let s = decode_permutation(&inst, &chrom).unwrap();
        assert_eq!(check_start_times(&inst, s.start_times()), vec![]);
    }
}

#[test]
fn gt_schedules_are_active() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for seed in 0..200u64 {
        let inst = common::random_small(6, 6, &mut rng);
        let s = if seed % 4 == 0 {
            build_active_schedule(&inst, &mut ShortestProcessingTime)
        } else {
            build_active_schedule(&inst, &mut SeededRandom::new(seed))
        };
        assert_eq!(left_shift_witness(&inst, s.start_times()), None, "instance {inst:?}");
    }
}

#[test]
fn longest_path_matches_makespan() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let inst = common::random_small(6, 6, &mut rng);
        let s = decode_permutation(&inst, &Chromosome::random(&inst, &mut rng)).unwrap();
        let graph = DisjunctiveGraph::new(&inst);
        assert_eq!(graph.oriented_longest_path(&inst, s.machine_orders()), Some(s.makespan()));
        assert_eq!(common::bellman_ford_makespan(&inst, s.machine_orders()), s.makespan());
    }
}

#[test]
fn graph_counts_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..50 {
        let inst = common::random_small(5, 5, &mut rng);
        let g = DisjunctiveGraph::new(&inst);
        assert_eq!(g.vertex_count(), inst.num_ops() + 2);
        assert_eq!(g.conjunctive_arcs().len(), inst.num_ops() + inst.num_jobs());
        let mut pairs = 0;
        for a in 0..inst.num_ops() {
            for b in a + 1..inst.num_ops() {
                let (oa, ob) = (inst.op(a), inst.op(b));
                if oa.machine == ob.machine && oa.job != ob.job {
                    pairs += 1;
                }
            }
        }
        assert_eq!(g.disjunctive_edges().len(), pairs);
    }
}

#[test]
fn some_permutation_decodes_to_the_optimum() {
    for inst in common::corpus(30, 3, 3, 11) {
        let brute = common::brute_force_optimum(&inst);
        let best_decode = Chromosome::distinct_permutations(&inst)
            .map(|c| decode_permutation(&inst, &c).unwrap().makespan())
            .min()
            .unwrap();
        let exact = exact_makespan(&inst, DEFAULT_NODE_BUDGET).optimal().unwrap().0;
        assert_eq!(best_decode, brute, "{inst:?}");
        assert_eq!(exact, brute, "{inst:?}");
    }
}

#[test]
fn tiny_active_makespans_are_seven_and_ten() {
    let inst = jobshop::instance::builtin_instance("tiny2x2").unwrap();
    let mut seen: Vec<u64> = Chromosome::distinct_permutations(&inst)
        .map(|c| decode_permutation(&inst, &c).unwrap().makespan())
        .collect();
    seen.sort_unstable();
    seen.dedup();
    assert_eq!(seen, vec![7, 10]);
    assert_eq!(common::brute_force_optimum(&inst), 7);
}
