use serde::Serialize;

use super::{binomial, first_k_subset};
use crate::error::{input, resource, Result};

/// Default cap on the number of `k`-subsets the brute-force oracles visit.
pub const WSAT_CAP: u128 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Node {
    And(Vec<Node>),
    Or(Vec<Node>),
    Lit(Literal),
}

pub fn and(children: Vec<Node>) -> Node {
    Node::And(children)
}

pub fn or(children: Vec<Node>) -> Node {
    Node::Or(children)
}

pub fn lit(var: usize, positive: bool) -> Node {
    Node::Lit(Literal { var, positive })
}

pub fn pos(var: usize) -> Node {
    lit(var, true)
}

pub fn neg(var: usize) -> Node {
    lit(var, false)
}

impl Node {
    pub fn eval(&self, truth: &[bool]) -> bool {
        match self {
            Node::And(cs) => cs.iter().all(|c| c.eval(truth)),
            Node::Or(cs) => cs.iter().any(|c| c.eval(truth)),
            Node::Lit(l) => truth[l.var] == l.positive,
        }
    }

    pub fn children(&self) -> &[Node] {
        match self {
            Node::And(cs) | Node::Or(cs) => cs,
            Node::Lit(_) => &[],
        }
    }

    pub fn for_each_literal(&self, f: &mut impl FnMut(Literal)) {
        match self {
            Node::Lit(l) => f(*l),
            _ => self.children().iter().for_each(|c| c.for_each_literal(f)),
        }
    }

    /// Node count.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(Node::size).sum::<usize>()
    }
}

/// Formula over variables `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalizedFormula {
    pub n: usize,
    pub root: Node,
}

impl NormalizedFormula {
    pub fn new(n: usize, root: Node) -> Result<Self> {
        let mut bad = None;
        root.for_each_literal(&mut |l| {
            if l.var >= n {
                bad = Some(l.var);
            }
        });
        if let Some(v) = bad {
            return input(format!("literal on variable {v} but n = {n}"));
        }
        Ok(NormalizedFormula { n, root })
    }
}

/// Satisfy the formula by setting exactly `k` variables to true.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightedSatInstance {
    pub formula: NormalizedFormula,
    pub k: usize,
}

pub fn eval_formula(f: &NormalizedFormula, truth: &[usize]) -> bool {
    let mut t = vec![false; f.n];
    for &v in truth {
        t[v] = true;
    }
    f.root.eval(&t)
}

struct Shape {
    literal_depths: Vec<usize>,
    max_gate_depth: usize,
}

fn shape(f: &NormalizedFormula) -> Result<Shape> {
    fn walk(node: &Node, depth: usize, under_and: Option<bool>, s: &mut Shape) -> Result<()> {
        match node {
            Node::Lit(_) => {
                if under_and.is_none() {
                    return input("formula root must be a conjunction");
                }
                s.literal_depths.push(depth);
            }
            Node::And(cs) | Node::Or(cs) => {
                let is_and = matches!(node, Node::And(_));
                match under_and {
                    None if !is_and => return input("formula root must be a conjunction"),
                    Some(parent_and) if parent_and == is_and => {
                        return input(format!("non-alternating gates at depth {depth}"))
                    }
                    _ => {}
                }
                s.max_gate_depth = s.max_gate_depth.max(depth);
                for c in cs {
                    walk(c, depth + 1, Some(is_and), s)?;
                }
            }
        }
        Ok(())
    }
    let mut s = Shape { literal_depths: Vec::new(), max_gate_depth: 0 };
    walk(&f.root, 1, None, &mut s)?;
    Ok(s)
}

/// Smallest `t >= 2` such that the formula is `t`-normalized: alternating
/// gates from an AND root with every literal directly below level `t`.
/// Literal-free formulas take the depth of their deepest gate.
pub fn normalization_level(f: &NormalizedFormula) -> Result<usize> {
    let s = shape(f)?;
    match s.literal_depths.first() {
        None => Ok(s.max_gate_depth.max(2)),
        Some(&d) => {
            if s.literal_depths.iter().any(|&e| e != d) {
                return input("literals occur at different depths");
            }
            Ok((d - 1).max(2))
        }
    }
}

/// True iff the formula is `t`-normalized, allowing singleton and empty
/// gates as padding.
pub fn is_t_normalized(f: &NormalizedFormula, t: usize) -> bool {
    match shape(f) {
        Err(_) => false,
        Ok(s) => {
            s.max_gate_depth <= t && s.literal_depths.iter().all(|&d| d == t + 1)
        }
    }
}

pub fn is_antimonotone(f: &NormalizedFormula) -> bool {
    let mut ok = true;
    f.root.for_each_literal(&mut |l| ok &= !l.positive);
    ok
}

pub fn is_monotone(f: &NormalizedFormula) -> bool {
    let mut ok = true;
    f.root.for_each_literal(&mut |l| ok &= l.positive);
    ok
}

/// First satisfying `k`-subset in colexicographic order.
pub fn weighted_sat_bruteforce(w: &WeightedSatInstance) -> Result<Option<Vec<usize>>> {
    weighted_sat_bruteforce_capped(w, WSAT_CAP)
}

pub fn weighted_sat_bruteforce_capped(w: &WeightedSatInstance, cap: u128) -> Result<Option<Vec<usize>>> {
    let count = binomial(w.formula.n, w.k);
    if count > cap {
        return resource(format!("binom({}, {}) = {count} subsets", w.formula.n, w.k));
    }
    Ok(first_k_subset(w.formula.n, w.k, |t| w.formula.root.eval(t)))
}
