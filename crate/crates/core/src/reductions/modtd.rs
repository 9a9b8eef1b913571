use super::vc::{clash_literals, cover_clauses, cover_vars, vertex_set, HardInstance};
use super::{pad_literals, VarTable, WsatEncoding, INACTIVE};
use crate::error::{input, resource, Result};
use crate::formulas::{
    and, is_antimonotone, is_t_normalized, normalization_level, or, Node, NormalizedFormula,
    WeightedSatInstance,
};
use crate::instance::{BinCsp, Value};
use crate::structure::{validate_elimination_forest, EliminationForest};

/// Cap on the number of ancestor assignments materialized while encoding a
/// forest modulator.
pub const FAMILY_CAP: usize = 200_000;

/// The disjunctions of a formula arranged as a forest: every disjunction
/// hangs below the disjunction two levels up, remembering through which of
/// its terms. Literals of leaf terms are kept as variable lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaForest {
    /// `(parent, term)` with terms numbered from 1.
    pub parent: Vec<Option<(usize, usize)>>,
    pub children: Vec<Vec<usize>>,
    /// Per node and term, the variables occurring (negated) in that term.
    pub terms: Vec<Vec<Vec<usize>>>,
}

impl FormulaForest {
    pub fn of(f: &NormalizedFormula) -> Self {
        let mut ff = FormulaForest { parent: Vec::new(), children: Vec::new(), terms: Vec::new() };
        for d in f.root.children() {
            ff.visit(d, None);
        }
        ff
    }

    fn visit(&mut self, disj: &Node, parent: Option<(usize, usize)>) {
        let id = self.parent.len();
        self.parent.push(parent);
        self.children.push(Vec::new());
        self.terms.push(vec![Vec::new(); disj.children().len()]);
        if let Some((p, _)) = parent {
            self.children[p].push(id);
        }
        for (i, term) in disj.children().iter().enumerate() {
            for g in term.children() {
                match g {
                    Node::Lit(l) => self.terms[id][i].push(l.var),
                    _ => self.visit(g, Some((id, i + 1))),
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn forest(&self) -> EliminationForest {
        EliminationForest::new(self.parent.iter().map(|p| p.map(|(q, _)| q)).collect()).expect("tree order")
    }
}

/// Clique `W = 0..k` over variable indices; node `v` of the formula forest
/// becomes vertex `k + v` choosing a term, with `0` meaning inactive below
/// the roots.
fn forest_construction(f: &NormalizedFormula, k: usize) -> Result<HardInstance> {
    if f.n < k {
        return Ok(HardInstance::degenerate());
    }
    let ff = FormulaForest::of(f);
    let mut domains = vec![(0..f.n as Value).collect::<Vec<_>>(); k];
    for v in 0..ff.len() {
        let t = ff.terms[v].len() as Value;
        let low = if ff.parent[v].is_some() { INACTIVE } else { 1 };
        domains.push((low..=t).collect());
    }
    let mut inst = BinCsp::new(domains);
    for a in 0..k {
        for b in a + 1..k {
            inst.constrain(a, b, |x, y| x != y)?;
        }
    }
    for v in 0..ff.len() {
        if let Some((p, via)) = ff.parent[v] {
            let parent_is_root = ff.parent[p].is_none();
            inst.constrain(k + p, k + v, |i, j| {
                if i == INACTIVE {
                    !parent_is_root && j == INACTIVE
                } else if i as usize == via {
                    j != INACTIVE
                } else {
                    j == INACTIVE
                }
            })?;
        }
        if ff.children[v].is_empty() {
            for w in 0..k {
                inst.constrain(k + v, w, |i, x| i == INACTIVE || !ff.terms[v][i as usize - 1].contains(&(x as usize)))?;
            }
        }
    }
    Ok(HardInstance { inst, w: (0..k).collect(), forest: ff.forest() })
}

/// Weighted antimonotone `(2d+1)`-normalized satisfiability to BinCSP with a
/// modulator of size `k` to a forest of depth `d`.
pub fn wsat2d1am_to_bincsp_forest_modulator(f: &NormalizedFormula, k: usize, d: usize) -> Result<HardInstance> {
    if d == 0 {
        return input("depth must be at least 1");
    }
    if !is_antimonotone(f) {
        return input("formula is not antimonotone");
    }
    if !is_t_normalized(f, 2 * d + 1) {
        return input(format!("formula is not {}-normalized", 2 * d + 1));
    }
    forest_construction(f, k)
}

/// The same construction for any odd level: `W` is then a feedback vertex
/// set of size `k`.
pub fn wsatam_to_bincsp_fvs(f: &NormalizedFormula, k: usize) -> Result<HardInstance> {
    if !is_antimonotone(f) {
        return input("formula is not antimonotone");
    }
    let t = normalization_level(f)?;
    if t < 3 || t % 2 == 0 {
        return input(format!("normalization level {t} is not odd and at least 3"));
    }
    forest_construction(f, k)
}

struct Encoder<'a> {
    inst: &'a BinCsp,
    w: &'a [usize],
    x: &'a VarTable,
    /// Host vertex of each forest position.
    host: &'a [usize],
    children: Vec<Vec<usize>>,
    made: usize,
}

impl Encoder<'_> {
    /// `f` assigns the path from the root down to `v`, `v` last.
    fn term(&mut self, v: usize, path: &mut Vec<usize>, f: &mut Vec<Value>) -> Result<Node> {
        self.made += 1;
        if self.made > FAMILY_CAP {
            return resource(format!("more than {FAMILY_CAP} ancestor assignments"));
        }
        let mut parts = Vec::new();
        for (&p, &a) in path.iter().zip(f.iter()) {
            parts.extend(clash_literals(self.inst, self.w, self.x, self.host[p], a));
        }
        for y in self.children[v].clone() {
            let mut options = Vec::new();
            for &c in self.inst.domain(self.host[y]) {
                if self.consistent(path, f, y, c) {
                    path.push(y);
                    f.push(c);
                    let t = self.term(y, path, f);
                    path.pop();
                    f.pop();
                    options.push(t?);
                }
            }
            parts.push(or(options));
        }
        Ok(and(parts))
    }

    fn consistent(&self, path: &[usize], f: &[Value], y: usize, c: Value) -> bool {
        let hy = self.host[y];
        path.iter().zip(f).all(|(&p, &a)| self.inst.allows(self.host[p], hy, a, c))
    }
}

/// BinCSP with a modulator `W` and an elimination forest of `G - W` (indexed
/// by position outside `W`) to weighted `(2d+1)`-normalized satisfiability,
/// `d` the forest depth (at least 1), weight `|W|`.
///
/// Below each root, a conjunction per conflict-free assignment of the
/// root-to-`v` path lists the forbidden `W` values and, per child, the
/// disjunction over the child's extensions.
pub fn bincsp_modtd_to_wsat2d1(inst: &BinCsp, w: &[usize], forest: &EliminationForest) -> Result<WsatEncoding> {
    let w = vertex_set(inst, w)?;
    let host = inst.graph().complement_of(&w);
    let (sub, _) = inst.induced(&host);
    if !validate_elimination_forest(sub.graph(), forest)? {
        return input("not an elimination forest of G - W");
    }
    let d = forest.depth().max(1);
    let x = cover_vars(inst, &w);
    let mut parts = cover_clauses(inst, &w, &x);
    let mut enc = Encoder { inst, w: &w, x: &x, host: &host, children: forest.children(), made: 0 };
    for r in forest.roots() {
        let mut options = Vec::new();
        for &c in inst.domain(host[r]) {
            options.push(enc.term(r, &mut vec![r], &mut vec![c])?);
        }
        parts.push(or(options));
    }
    let root = pad_literals(and(parts), 1, 2 * d + 1);
    let formula = NormalizedFormula::new(x.len(), root)?;
    Ok(WsatEncoding { wsat: WeightedSatInstance { formula, k: w.len() }, names: x.names })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{neg, random_normalized, weighted_sat_bruteforce};
    use crate::instance::random_instance_with;
    use crate::reductions::{bincsp_vc_to_wsat3, wsat3am_to_bincsp_vc};
    use crate::solvers::solve_bruteforce;
    use crate::structure::modulator_to_treedepth;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sat(f: &NormalizedFormula, k: usize) -> bool {
        weighted_sat_bruteforce(&WeightedSatInstance { formula: f.clone(), k }).unwrap().is_some()
    }

    #[test]
    fn chain_example() {
        let f = NormalizedFormula::new(2, and(vec![or(vec![and(vec![or(vec![and(vec![neg(0)])])])])])).unwrap();
        let h = wsat2d1am_to_bincsp_forest_modulator(&f, 1, 2).unwrap();
        assert_eq!(h.forest.depth(), 2);
        let a = solve_bruteforce(&h.inst).unwrap().unwrap();
        assert_eq!(a[0], 1);
    }

    #[test]
    fn depth_one_matches_cover_construction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let f = random_normalized(&mut rng, 4, 3, 3, true);
            let k = rng.gen_range(0..=3);
            let a = wsat2d1am_to_bincsp_forest_modulator(&f, k, 1).unwrap();
            let b = wsat3am_to_bincsp_vc(&f, k).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn hardness_agrees_with_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for trial in 0..60 {
            let d = 1 + trial % 3;
            let n = rng.gen_range(1..=5);
            let f = random_normalized(&mut rng, n, 2 * d + 1, 2, true);
            let k = rng.gen_range(0..=3);
            let h = wsat2d1am_to_bincsp_forest_modulator(&f, k, d).unwrap();
            let g = h.inst.graph();
            let (sub, _) = g.induced(&g.complement_of(&h.w));
            assert!(validate_elimination_forest(&sub, &h.forest).unwrap());
            assert!(h.forest.depth() <= d && sub.is_forest());
            assert_eq!(solve_bruteforce(&h.inst).unwrap().is_some(), sat(&f, k));
            if let Ok(g) = wsatam_to_bincsp_fvs(&f, k) {
                assert_eq!(g, h);
            }
        }
    }

    #[test]
    fn membership_agrees_with_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for trial in 0..80 {
            let d = 1 + trial % 2;
            let n = rng.gen_range(1..=6);
            let inst = random_instance_with(&mut rng, n, 3, 0.5, 0.6);
            let m = modulator_to_treedepth(inst.graph(), d, n).unwrap().unwrap();
            let e = bincsp_modtd_to_wsat2d1(&inst, &m.set, &m.forest).unwrap();
            assert!(is_t_normalized(&e.wsat.formula, 2 * d.max(m.forest.depth()) + 1));
            let got = weighted_sat_bruteforce(&e.wsat).unwrap().is_some();
            assert_eq!(got, solve_bruteforce(&inst).unwrap().is_some());
        }
    }

    #[test]
    fn depth_one_forest_mirrors_cover_encoding() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..20 {
            let inst = random_instance_with(&mut rng, 5, 3, 0.5, 0.6);
            let w = crate::structure::vertex_cover_exact(inst.graph(), 5).unwrap();
            let rest = inst.graph().complement_of(&w);
            let a = bincsp_modtd_to_wsat2d1(&inst, &w, &EliminationForest::flat(rest.len())).unwrap();
            let b = bincsp_vc_to_wsat3(&inst, &w).unwrap();
            assert_eq!(a, b);
        }
    }
}
