#![allow(dead_code)]

use jobshop::instance::{random_instance_with, Instance, OpId, Time};
use jobshop::schedule::Schedule;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random instance with 1..=max_jobs jobs of 1..=max_machines operations on
/// arbitrary machines (recirculation allowed), durations 1..=10.
pub fn random_small(max_jobs: usize, max_machines: usize, rng: &mut ChaCha8Rng) -> Instance {
    let machines = rng.gen_range(1..=max_machines);
    let jobs = rng.gen_range(1..=max_jobs);
    let routings = (0..jobs)
        .map(|_| {
            let len = rng.gen_range(1..=max_machines);
            (0..len)
                .map(|_| (rng.gen_range(0..machines), rng.gen_range(1..=10)))
                .collect()
        })
        .collect();
    Instance::new("small", machines, routings)
}

/// Mixed corpus of small instances: half with full machine routings, half
/// with arbitrary (possibly recirculating) routings.
pub fn corpus(count: usize, max_jobs: usize, max_machines: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            if i % 2 == 0 {
                let n = rng.gen_range(1..=max_jobs);
                let m = rng.gen_range(1..=max_machines);
                random_instance_with(n, m, &mut rng)
            } else {
                random_small(max_jobs, max_machines, &mut rng)
            }
        })
        .collect()
}

fn permutations(items: &[OpId]) -> Vec<Vec<OpId>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// True optimum by enumerating every combination of machine orders and
/// discarding cyclic ones. Independent of the Giffler-Thompson machinery.
pub fn brute_force_optimum(inst: &Instance) -> Time {
    let per_machine: Vec<Vec<Vec<OpId>>> = (0..inst.num_machines())
        .map(|m| permutations(&inst.ops_on_machine(m).collect::<Vec<_>>()))
        .collect();
    let mut best = Time::MAX;
    let mut idx = vec![0usize; per_machine.len()];
    loop {
        let orders: Vec<Vec<OpId>> = idx.iter().zip(&per_machine).map(|(&i, p)| p[i].clone()).collect();
        if let Ok(s) = Schedule::from_machine_orders(inst, orders) {
            best = best.min(s.makespan());
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return best;
            }
            idx[k] += 1;
            if idx[k] < per_machine[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Longest path by repeated relaxation over an explicit arc list
/// (Bellman-Ford style, no topological order).
pub fn bellman_ford_makespan(inst: &Instance, orders: &[Vec<OpId>]) -> Time {
    let mut arcs: Vec<(OpId, OpId)> = Vec::new();
    for id in 0..inst.num_ops() {
        if let Some(s) = inst.job_succ(id) {
            arcs.push((id, s));
        }
    }
    for order in orders {
        for w in order.windows(2) {
            arcs.push((w[0], w[1]));
        }
    }
    let mut head = vec![0; inst.num_ops()];
    for _ in 0..=inst.num_ops() {
        let mut changed = false;
        for &(a, b) in &arcs {
            let cand = head[a] + inst.op(a).duration;
            if cand > head[b] {
                head[b] = cand;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (0..inst.num_ops()).map(|o| head[o] + inst.op(o).duration).max().unwrap_or(0)
}
