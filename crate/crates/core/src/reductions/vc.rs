use serde::Serialize;

use super::{pad_literals, VarTable, WsatEncoding};
use crate::error::{input, Result};
use crate::formulas::{
    and, is_antimonotone, is_t_normalized, neg, or, pos, Node, NormalizedFormula, WeightedSatInstance,
};
use crate::instance::{BinCsp, Value};
use crate::structure::EliminationForest;

/// A CSP produced by a hardness construction, with its modulator `W` and an
/// elimination forest of `G - W` indexed by position outside `W`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HardInstance {
    pub inst: BinCsp,
    pub w: Vec<usize>,
    pub forest: EliminationForest,
}

impl HardInstance {
    pub(crate) fn degenerate() -> Self {
        HardInstance { inst: BinCsp::unsatisfiable(), w: Vec::new(), forest: EliminationForest::flat(1) }
    }
}

/// Weighted 3-normalized antimonotone satisfiability to BinCSP with a
/// vertex cover of size `k`.
///
/// `W = 0..k` takes variable indices as values and is pairwise distinct, so
/// it picks `k` distinct true variables. Vertex `k + i` picks a term of the
/// `i`-th disjunction (values `1..=t_i`), and term `j` is compatible with
/// `w = x` unless `¬x` occurs in it.
pub fn wsat3am_to_bincsp_vc(f: &NormalizedFormula, k: usize) -> Result<HardInstance> {
    if !is_antimonotone(f) {
        return input("formula is not antimonotone");
    }
    if !is_t_normalized(f, 3) {
        return input("formula is not 3-normalized");
    }
    if f.n < k {
        return Ok(HardInstance::degenerate());
    }
    let disjunctions = f.root.children();
    let mut domains = vec![(0..f.n as Value).collect::<Vec<_>>(); k];
    for d in disjunctions {
        domains.push((1..=d.children().len() as Value).collect());
    }
    let mut inst = BinCsp::new(domains);
    for a in 0..k {
        for b in a + 1..k {
            inst.constrain(a, b, |x, y| x != y)?;
        }
    }
    for (i, d) in disjunctions.iter().enumerate() {
        let v = k + i;
        let terms: Vec<Vec<usize>> = d.children().iter().map(negated_vars).collect();
        for w in 0..k {
            inst.constrain(v, w, |j, x| !terms[j as usize - 1].contains(&(x as usize)))?;
        }
    }
    Ok(HardInstance { inst, w: (0..k).collect(), forest: EliminationForest::flat(disjunctions.len()) })
}

pub(crate) fn negated_vars(term: &Node) -> Vec<usize> {
    let mut out = Vec::new();
    term.for_each_literal(&mut |l| out.push(l.var));
    out
}

/// Checks that `w` is a duplicate-free vertex set of `inst` and returns it
/// sorted.
pub(crate) fn vertex_set(inst: &BinCsp, w: &[usize]) -> Result<Vec<usize>> {
    let mut s = w.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.len() != w.len() || s.last().is_some_and(|&v| v >= inst.n()) {
        return input("modulator must list distinct vertices of the instance");
    }
    Ok(s)
}

/// Variables `x_{w,c}` for `w` in `W` ascending, then `c` ascending.
pub(crate) fn cover_vars(inst: &BinCsp, w: &[usize]) -> VarTable {
    let mut t = VarTable::new();
    for &u in w {
        for &c in inst.domain(u) {
            t.add(u, c, format!("x[{u}={c}]"));
        }
    }
    t
}

/// `F1 ∧ F2`: every `w` takes a value and the values respect the
/// constraints inside `W`. Each conjunct is a disjunction at level 2.
pub(crate) fn cover_clauses(inst: &BinCsp, w: &[usize], x: &VarTable) -> Vec<Node> {
    let mut parts: Vec<Node> = w.iter().map(|&u| or(inst.domain(u).iter().map(|&c| pos(x.get(u, c))).collect())).collect();
    for (i, &u) in w.iter().enumerate() {
        for &v in &w[i + 1..] {
            if inst.graph().has_edge(u, v) {
                let pairs = inst.allowed_pairs(u, v);
                parts.push(or(pairs.iter().map(|&(a, b)| and(vec![pos(x.get(u, a)), pos(x.get(v, b))])).collect()));
            }
        }
    }
    parts
}

/// Literals `¬x_{w,c}` ruling out every `W`-neighbour value that clashes
/// with `v = a`.
pub(crate) fn clash_literals(inst: &BinCsp, w: &[usize], x: &VarTable, v: usize, a: Value) -> Vec<Node> {
    let mut out = Vec::new();
    for &u in inst.graph().neighbors(v) {
        if w.binary_search(&u).is_ok() {
            for &c in inst.domain(u) {
                if !inst.allows(v, u, a, c) {
                    out.push(neg(x.get(u, c)));
                }
            }
        }
    }
    out
}

/// BinCSP with vertex cover `W` to weighted 3-normalized satisfiability
/// with weight `|W|`.
pub fn bincsp_vc_to_wsat3(inst: &BinCsp, w: &[usize]) -> Result<WsatEncoding> {
    let w = vertex_set(inst, w)?;
    if !inst.graph().is_vertex_cover(&w) {
        return input("W is not a vertex cover");
    }
    let x = cover_vars(inst, &w);
    let mut parts = cover_clauses(inst, &w, &x);
    for v in inst.graph().complement_of(&w) {
        parts.push(or(inst.domain(v).iter().map(|&a| and(clash_literals(inst, &w, &x, v, a))).collect()));
    }
    let root = pad_literals(and(parts), 1, 3);
    let formula = NormalizedFormula::new(x.len(), root)?;
    Ok(WsatEncoding { wsat: WeightedSatInstance { formula, k: w.len() }, names: x.names })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{normalization_level, random_normalized, weighted_sat_bruteforce};
    use crate::instance::random_instance_with;
    use crate::solvers::solve_bruteforce;
    use crate::structure::vertex_cover_exact;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_formula() {
        let f = NormalizedFormula::new(2, and(vec![or(vec![and(vec![neg(0)]), and(vec![neg(1)])])])).unwrap();
        let h = wsat3am_to_bincsp_vc(&f, 1).unwrap();
        assert_eq!(h.inst.n(), 2);
        assert_eq!(h.inst.domain(1), &[1, 2]);
        assert!(solve_bruteforce(&h.inst).unwrap().is_some());
        assert!(h.inst.graph().is_vertex_cover(&h.w));
    }

    #[test]
    fn empty_formula_and_small_n() {
        let f = NormalizedFormula::new(3, and(vec![])).unwrap();
        let h = wsat3am_to_bincsp_vc(&f, 3).unwrap();
        assert!(solve_bruteforce(&h.inst).unwrap().is_some());
        let h = wsat3am_to_bincsp_vc(&f, 4).unwrap();
        assert!(solve_bruteforce(&h.inst).unwrap().is_none());
    }

    #[test]
    fn rejects_positive_literals() {
        let f = NormalizedFormula::new(1, and(vec![or(vec![and(vec![pos(0)])])])).unwrap();
        assert!(wsat3am_to_bincsp_vc(&f, 1).is_err());
    }

    #[test]
    fn trivial_cover_encodings() {
        let inst = BinCsp::new(vec![vec![4]]);
        let e = bincsp_vc_to_wsat3(&inst, &[0]).unwrap();
        assert!(weighted_sat_bruteforce(&e.wsat).unwrap().is_some());

        let mut inst = BinCsp::new(vec![vec![0, 1], vec![0, 1]]);
        inst.add_edge(0, 1).unwrap();
        let e = bincsp_vc_to_wsat3(&inst, &[0, 1]).unwrap();
        assert!(weighted_sat_bruteforce(&e.wsat).unwrap().is_none());
        assert!(bincsp_vc_to_wsat3(&inst, &[]).is_err());
    }

    #[test]
    fn round_trips_agree_with_oracles() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..60 {
            let n = rng.gen_range(1..=6);
            let f = random_normalized(&mut rng, n, 3, 3, true);
            let k = rng.gen_range(0..=3);
            let h = wsat3am_to_bincsp_vc(&f, k).unwrap();
            let want = weighted_sat_bruteforce(&WeightedSatInstance { formula: f, k }).unwrap().is_some();
            assert_eq!(solve_bruteforce(&h.inst).unwrap().is_some(), want);
        }
        for _ in 0..60 {
            let n = rng.gen_range(1..=5);
            let inst = random_instance_with(&mut rng, n, 3, 0.5, 0.6);
            let w = vertex_cover_exact(inst.graph(), n).unwrap();
            let e = bincsp_vc_to_wsat3(&inst, &w).unwrap();
            assert_eq!(normalization_level(&e.wsat.formula).unwrap(), 3);
            let got = weighted_sat_bruteforce(&e.wsat).unwrap().is_some();
            assert_eq!(got, solve_bruteforce(&inst).unwrap().is_some());
        }
    }
}
