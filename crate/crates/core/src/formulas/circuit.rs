use serde::Serialize;

use super::formula::{Node, NormalizedFormula, WSAT_CAP};
use super::{binomial, first_k_subset};
use crate::error::{input, resource, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Gate {
    Input(usize),
    And(Vec<usize>),
    Or(Vec<usize>),
    Not(usize),
}

/// Boolean circuit over inputs `0..n`; gates refer to each other by index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BooleanCircuit {
    pub n: usize,
    pub gates: Vec<Gate>,
    pub output: usize,
}

impl BooleanCircuit {
    pub fn new(n: usize) -> Self {
        BooleanCircuit { n, gates: Vec::new(), output: 0 }
    }

    pub fn push(&mut self, g: Gate) -> usize {
        self.gates.push(g);
        self.gates.len() - 1
    }

    pub fn input(&mut self, var: usize) -> usize {
        self.push(Gate::Input(var))
    }

    pub fn and(&mut self, ins: Vec<usize>) -> usize {
        self.push(Gate::And(ins))
    }

    pub fn or(&mut self, ins: Vec<usize>) -> usize {
        self.push(Gate::Or(ins))
    }

    pub fn not(&mut self, g: usize) -> usize {
        self.push(Gate::Not(g))
    }

    fn inputs_of(&self, g: usize) -> &[usize] {
        match &self.gates[g] {
            Gate::Input(_) => &[],
            Gate::And(ins) | Gate::Or(ins) => ins,
            Gate::Not(x) => std::slice::from_ref(x),
        }
    }

    /// Gates in an order where every gate follows its inputs; errors on
    /// dangling references or cycles.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let m = self.gates.len();
        if self.output >= m {
            return input("output gate does not exist");
        }
        for g in 0..m {
            if self.inputs_of(g).iter().any(|&x| x >= m) {
                return input(format!("gate {g} reads a missing gate"));
            }
            if let Gate::Input(v) = self.gates[g] {
                if v >= self.n {
                    return input(format!("gate {g} reads input {v} but n = {}", self.n));
                }
            }
        }
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; m];
        let mut order = Vec::with_capacity(m);
        for start in 0..m {
            if state[start] != 0 {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            state[start] = 1;
            while let Some(top) = stack.last_mut() {
                let g = top.0;
                if let Some(&x) = self.inputs_of(g).get(top.1) {
                    top.1 += 1;
                    match state[x] {
                        0 => {
                            state[x] = 1;
                            stack.push((x, 0));
                        }
                        1 => return input(format!("cycle through gate {x}")),
                        _ => {}
                    }
                } else {
                    state[g] = 2;
                    order.push(g);
                    stack.pop();
                }
            }
        }
        Ok(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_ok()
    }

    fn eval_with(&self, order: &[usize], truth: &[bool], val: &mut [bool]) -> bool {
        for &g in order {
            val[g] = match &self.gates[g] {
                Gate::Input(v) => truth[*v],
                Gate::And(ins) => ins.iter().all(|&x| val[x]),
                Gate::Or(ins) => ins.iter().any(|&x| val[x]),
                Gate::Not(x) => !val[*x],
            };
        }
        val[self.output]
    }

    /// Transliteration of a formula, one gate per node and literal.
    pub fn from_formula(f: &NormalizedFormula) -> Self {
        fn rec(c: &mut BooleanCircuit, node: &Node) -> usize {
            match node {
                Node::Lit(l) => {
                    let x = c.input(l.var);
                    if l.positive {
                        x
                    } else {
                        c.not(x)
                    }
                }
                Node::And(cs) => {
                    let ins = cs.iter().map(|n| rec(c, n)).collect();
                    c.and(ins)
                }
                Node::Or(cs) => {
                    let ins = cs.iter().map(|n| rec(c, n)).collect();
                    c.or(ins)
                }
            }
        }
        let mut c = BooleanCircuit::new(f.n);
        c.output = rec(&mut c, &f.root);
        c
    }
}

pub fn eval_circuit(c: &BooleanCircuit, truth: &[usize]) -> Result<bool> {
    let order = c.topological_order()?;
    let mut t = vec![false; c.n];
    for &v in truth {
        if v >= c.n {
            return input(format!("true variable {v} out of range"));
        }
        t[v] = true;
    }
    let mut val = vec![false; c.gates.len()];
    Ok(c.eval_with(&order, &t, &mut val))
}

/// First accepting input with exactly `k` ones, in colexicographic order.
pub fn weighted_circuit_sat_bruteforce(c: &BooleanCircuit, k: usize) -> Result<Option<Vec<usize>>> {
    let count = binomial(c.n, k);
    if count > WSAT_CAP {
        return resource(format!("binom({}, {k}) = {count} subsets", c.n));
    }
    let order = c.topological_order()?;
    let mut val = vec![false; c.gates.len()];
    Ok(first_k_subset(c.n, k, |t| c.eval_with(&order, t, &mut val)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_examples() {
        let mut c = BooleanCircuit::new(1);
        c.output = c.input(0);
        assert!(eval_circuit(&c, &[0]).unwrap());

        let mut c = BooleanCircuit::new(1);
        let x = c.input(0);
        c.output = c.not(x);
        assert!(eval_circuit(&c, &[]).unwrap());
        assert_eq!(weighted_circuit_sat_bruteforce(&c, 1).unwrap(), None);

        let mut c = BooleanCircuit::new(3);
        let (x0, x1, x2) = (c.input(0), c.input(1), c.input(2));
        let o = c.or(vec![x0, x1]);
        let n = c.not(x2);
        c.output = c.and(vec![o, n]);
        assert!(eval_circuit(&c, &[1]).unwrap());
    }

    #[test]
    fn brute_force_examples() {
        let mut c = BooleanCircuit::new(3);
        c.output = c.and(vec![]);
        assert_eq!(weighted_circuit_sat_bruteforce(&c, 2).unwrap(), Some(vec![0, 1]));
        let mut c = BooleanCircuit::new(2);
        c.output = c.input(0);
        assert_eq!(weighted_circuit_sat_bruteforce(&c, 1).unwrap(), Some(vec![0]));
    }

    #[test]
    fn cycles_are_errors() {
        let c = BooleanCircuit {
            n: 1,
            gates: vec![Gate::And(vec![1]), Gate::Or(vec![0])],
            output: 0,
        };
        assert!(eval_circuit(&c, &[]).is_err());
        let dangling = BooleanCircuit { n: 1, gates: vec![Gate::Not(4)], output: 0 };
        assert!(!dangling.is_acyclic());
    }
}
