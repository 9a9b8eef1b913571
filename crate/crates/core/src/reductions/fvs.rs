use std::collections::VecDeque;

use serde::Serialize;

use super::vc::{cover_vars, vertex_set};
use crate::error::{input, Result};
use crate::formulas::BooleanCircuit;
use crate::instance::{BinCsp, Value};

/// A circuit whose weight-`k` satisfying inputs are the valid assignments
/// of `W`; input `i` is named `names[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CircuitEncoding {
    pub circuit: BooleanCircuit,
    pub k: usize,
    pub names: Vec<String>,
}

/// BinCSP with feedback vertex set `W` to weighted circuit satisfiability
/// with weight `|W|`.
///
/// Each tree of `G - W` is rooted at its lowest vertex. Gate `y[v][c]`
/// says that `v = c` agrees with the chosen `W` values and extends to the
/// subtree of `v`; it is built once and shared by the parent's gates.
pub fn bincsp_fvs_to_circuit(inst: &BinCsp, w: &[usize]) -> Result<CircuitEncoding> {
    let w = vertex_set(inst, w)?;
    let g = inst.graph();
    if !g.is_feedback_vertex_set(&w) {
        return input("W is not a feedback vertex set");
    }
    let x = cover_vars(inst, &w);
    let mut c = BooleanCircuit::new(x.len());
    let xs: Vec<usize> = (0..x.len()).map(|i| c.input(i)).collect();
    let gate = |u: usize, a: Value| xs[x.get(u, a)];

    let mut top = Vec::new();
    for &u in &w {
        let dom = inst.domain(u);
        let any = dom.iter().map(|&a| gate(u, a)).collect();
        top.push(c.or(any));
        for (i, &a) in dom.iter().enumerate() {
            for &b in &dom[i + 1..] {
                let both = c.and(vec![gate(u, a), gate(u, b)]);
                top.push(c.not(both));
            }
        }
    }
    for (i, &u) in w.iter().enumerate() {
        for &v in &w[i + 1..] {
            if g.has_edge(u, v) {
                let pairs: Vec<usize> =
                    inst.allowed_pairs(u, v).iter().map(|&(a, b)| c.and(vec![gate(u, a), gate(v, b)])).collect();
                top.push(c.or(pairs));
            }
        }
    }

    let in_w = |v: usize| w.binary_search(&v).is_ok();
    let mut parent = vec![None; g.n()];
    let mut seen = vec![false; g.n()];
    let mut order = Vec::new();
    let mut roots = Vec::new();
    for r in 0..g.n() {
        if in_w(r) || seen[r] {
            continue;
        }
        roots.push(r);
        seen[r] = true;
        let mut queue = VecDeque::from([r]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &u in g.neighbors(v) {
                if !in_w(u) && !seen[u] {
                    seen[u] = true;
                    parent[u] = Some(v);
                    queue.push_back(u);
                }
            }
        }
    }
    let mut y: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for &v in order.iter().rev() {
        let kids: Vec<usize> = g.neighbors(v).iter().copied().filter(|&u| parent[u] == Some(v)).collect();
        for &a in inst.domain(v) {
            let mut ins = Vec::new();
            for &u in g.neighbors(v) {
                if in_w(u) {
                    let ok = inst.domain(u).iter().filter(|&&b| inst.allows(v, u, a, b)).map(|&b| gate(u, b)).collect();
                    ins.push(c.or(ok));
                }
            }
            for &u in &kids {
                let ok = inst
                    .domain(u)
                    .iter()
                    .enumerate()
                    .filter(|&(_, &b)| inst.allows(v, u, a, b))
                    .map(|(j, _)| y[u][j])
                    .collect();
                ins.push(c.or(ok));
            }
            let gate_va = c.and(ins);
            y[v].push(gate_va);
        }
    }
    for &r in &roots {
        let any = y[r].clone();
        top.push(c.or(any));
    }
    c.output = c.and(top);
    Ok(CircuitEncoding { circuit: c, k: w.len(), names: x.names })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{eval_circuit, weighted_circuit_sat_bruteforce};
    use crate::instance::random_instance_with;
    use crate::solvers::solve_bruteforce;
    use crate::structure::feedback_vertex_set_exact;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_edge_without_modulator() {
        let mut inst = BinCsp::new(vec![vec![0, 1], vec![0, 1]]);
        inst.constrain(0, 1, |a, b| a != b).unwrap();
        let e = bincsp_fvs_to_circuit(&inst, &[]).unwrap();
        assert!(eval_circuit(&e.circuit, &[]).unwrap());
        inst.forbid(0, 1, 0, 1);
        inst.forbid(0, 1, 1, 0);
        let e = bincsp_fvs_to_circuit(&inst, &[]).unwrap();
        assert!(!eval_circuit(&e.circuit, &[]).unwrap());
    }

    #[test]
    fn rejects_non_fvs() {
        let mut inst = BinCsp::new(vec![vec![0]; 3]);
        for (u, v) in [(0, 1), (1, 2), (0, 2)] {
            inst.constrain(u, v, |_, _| true).unwrap();
        }
        assert!(bincsp_fvs_to_circuit(&inst, &[]).is_err());
        assert!(bincsp_fvs_to_circuit(&inst, &[1]).is_ok());
    }

    #[test]
    fn agrees_with_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..80 {
            let n = rng.gen_range(1..=6);
            let inst = random_instance_with(&mut rng, n, 3, 0.5, 0.6);
            let w = feedback_vertex_set_exact(inst.graph(), n).unwrap().unwrap();
            let e = bincsp_fvs_to_circuit(&inst, &w).unwrap();
            assert!(e.circuit.is_acyclic());
            let got = weighted_circuit_sat_bruteforce(&e.circuit, e.k).unwrap().is_some();
            assert_eq!(got, solve_bruteforce(&inst).unwrap().is_some());
        }
    }
}
