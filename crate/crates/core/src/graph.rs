//! Disjunctive graph model of an instance.

use std::collections::VecDeque;

use crate::instance::{Instance, OpId, Time};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    Source,
    Op(OpId),
    Sink,
}

/// Directed arc weighted by the duration of its tail (zero out of the source).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub from: Vertex,
    pub to: Vertex,
    pub weight: Time,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjunctiveGraph {
    num_ops: usize,
    conjunctive: Vec<Arc>,
    disjunctive: Vec<(OpId, OpId)>,
}

impl DisjunctiveGraph {
    /// Conjunctive arcs follow job order (with source and sink arcs);
    /// disjunctive edges join every cross-job pair sharing a machine.
    pub fn new(inst: &Instance) -> Self {
        let mut conjunctive = Vec::with_capacity(inst.num_ops() + inst.num_jobs());
        for routing in inst.routings() {
            let Some(first) = routing.first() else { continue };
            conjunctive.push(Arc {
                from: Vertex::Source,
                to: Vertex::Op(inst.op_id(first.job, 0)),
                weight: 0,
            });
            for op in routing {
                let id = inst.op_id(op.job, op.pos);
                let to = inst.job_succ(id).map_or(Vertex::Sink, Vertex::Op);
                conjunctive.push(Arc {
                    from: Vertex::Op(id),
                    to,
                    weight: op.duration,
                });
            }
        }
        let mut disjunctive = Vec::new();
        for m in 0..inst.num_machines() {
            let ops: Vec<OpId> = inst.ops_on_machine(m).collect();
            for (i, &a) in ops.iter().enumerate() {
                for &b in &ops[i + 1..] {
                    if inst.op(a).job != inst.op(b).job {
                        disjunctive.push((a, b));
                    }
                }
            }
        }
        DisjunctiveGraph {
            num_ops: inst.num_ops(),
            conjunctive,
            disjunctive,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.num_ops + 2
    }

    pub fn conjunctive_arcs(&self) -> &[Arc] {
        &self.conjunctive
    }

    pub fn disjunctive_edges(&self) -> &[(OpId, OpId)] {
        &self.disjunctive
    }

    /// Orients every disjunctive edge by the given machine orders and returns
    /// the arc set of the resulting digraph.
    pub fn orient(&self, inst: &Instance, machine_orders: &[Vec<OpId>]) -> Vec<Arc> {
        let mut rank = vec![0usize; self.num_ops];
        for order in machine_orders {
            for (i, &op) in order.iter().enumerate() {
                rank[op] = i;
            }
        }
        let mut arcs = self.conjunctive.clone();
        arcs.extend(self.disjunctive.iter().map(|&(a, b)| {
            let (from, to) = if rank[a] < rank[b] { (a, b) } else { (b, a) };
            Arc {
                from: Vertex::Op(from),
                to: Vertex::Op(to),
                weight: inst.op(from).duration,
            }
        }));
        arcs
    }

    /// Longest source-to-sink path length of the oriented graph, or `None`
    /// if the orientation has a cycle.
    pub fn oriented_longest_path(&self, inst: &Instance, machine_orders: &[Vec<OpId>]) -> Option<Time> {
        let arcs = self.orient(inst, machine_orders);
        let index = |v: Vertex| match v {
            Vertex::Source => self.num_ops,
            Vertex::Sink => self.num_ops + 1,
            Vertex::Op(o) => o,
        };
        let n = self.vertex_count();
        let mut out: Vec<Vec<(usize, Time)>> = vec![Vec::new(); n];
        let mut indegree = vec![0usize; n];
        for a in &arcs {
            out[index(a.from)].push((index(a.to), a.weight));
            indegree[index(a.to)] += 1;
        }
        let mut dist = vec![0; n];
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut visited = 0;
        while let Some(v) = queue.pop_front() {
            visited += 1;
            for &(w, weight) in &out[v] {
                dist[w] = dist[w].max(dist[v] + weight);
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        (visited == n).then(|| dist[index(Vertex::Sink)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::builtin_instance;

    #[test]
    fn tiny_graph_counts() {
        let inst = builtin_instance("tiny2x2").unwrap();
        let g = DisjunctiveGraph::new(&inst);
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.conjunctive_arcs().len(), 6);
        assert_eq!(g.disjunctive_edges(), &[(0, 3), (1, 2)]);
        let source_arcs = g
            .conjunctive_arcs()
            .iter()
            .filter(|a| a.from == Vertex::Source)
            .count();
        assert_eq!(source_arcs, 2);
        assert!(g
            .conjunctive_arcs()
            .iter()
            .filter(|a| a.from == Vertex::Source)
            .all(|a| a.weight == 0));
    }

    #[test]
    fn paper_graph_excludes_same_job_pairs() {
        let inst = builtin_instance("paper4x4").unwrap();
        let g = DisjunctiveGraph::new(&inst);
        assert_eq!(g.vertex_count(), 18);
        assert_eq!(g.conjunctive_arcs().len(), 20);
        assert_eq!(g.disjunctive_edges().len(), 21);
        assert!(g
            .disjunctive_edges()
            .iter()
            .all(|&(a, b)| inst.op(a).job != inst.op(b).job));
    }

    #[test]
    fn single_job_has_no_edges() {
        let inst = Instance::new("one", 2, vec![vec![(0, 1), (1, 2), (0, 3)]]);
        assert!(DisjunctiveGraph::new(&inst).disjunctive_edges().is_empty());
    }

    #[test]
    fn longest_path_of_tiny_orientations() {
        let inst = builtin_instance("tiny2x2").unwrap();
        let g = DisjunctiveGraph::new(&inst);
        assert_eq!(g.oriented_longest_path(&inst, &[vec![0, 3], vec![2, 1]]), Some(7));
        assert_eq!(g.oriented_longest_path(&inst, &[vec![0, 3], vec![1, 2]]), Some(10));
        assert_eq!(g.oriented_longest_path(&inst, &[vec![3, 0], vec![1, 2]]), None);
    }
}
