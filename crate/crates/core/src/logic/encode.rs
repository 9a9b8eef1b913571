use super::{Fo, GuidedSentence, PrenexSentence, Quantifier, RelationalStructure};
use crate::error::{input, Result};
use crate::instance::BinCsp;
use crate::structure::{validate_elimination_forest, validate_fat_tree, EliminationForest, FatEliminationTree};

/// Value elements of a padded instance: `first[u] + i` is the `i`th value
/// of variable `u`, numbered after `offset` other elements.
struct Values {
    first: Vec<usize>,
    total: usize,
}

impl Values {
    fn new(inst: &BinCsp, dummies: usize, offset: usize) -> Self {
        let mut first = Vec::with_capacity(inst.n() + dummies);
        let mut next = offset;
        for u in 0..inst.n() + dummies {
            first.push(next);
            next += if u < inst.n() { inst.domain(u).len() } else { 1 };
        }
        Values { first, total: next - offset }
    }

    fn of(&self, inst: &BinCsp, u: usize) -> std::ops::Range<usize> {
        let len = if u < inst.n() { inst.domain(u).len() } else { 1 };
        self.first[u]..self.first[u] + len
    }
}

fn add_values(a: &mut RelationalStructure, inst: &BinCsp, vals: &Values, var_elem: impl Fn(usize) -> usize) -> Result<()> {
    a.declare("domain", 2)?;
    a.declare("forbidden", 2)?;
    for u in 0..vals.first.len() {
        for e in vals.of(inst, u) {
            a.insert("domain", &[var_elem(u), e])?;
        }
    }
    for (u, v) in inst.graph().edges() {
        let (du, dv) = (inst.domain(u), inst.domain(v));
        for (i, &x) in du.iter().enumerate() {
            for (j, &y) in dv.iter().enumerate() {
                if !inst.allows(u, v, x, y) {
                    let (ex, ey) = (vals.first[u] + i, vals.first[v] + j);
                    a.insert("forbidden", &[ex, ey])?;
                    a.insert("forbidden", &[ey, ex])?;
                }
            }
        }
    }
    Ok(())
}

/// Extends every root path of the forest to exactly `depth` vertices with
/// fresh dummy vertices; returns the padded parent map.
fn pad_forest(parent: &[Option<usize>], depth: usize) -> Vec<Option<usize>> {
    let n = parent.len();
    let f = EliminationForest::new(parent.to_vec()).expect("validated forest");
    let children = f.children();
    let mut out = parent.to_vec();
    for v in 0..n {
        if children[v].is_empty() {
            let mut last = v;
            for _ in f.depth_of(v)..depth {
                out.push(Some(last));
                last = out.len() - 1;
            }
        }
    }
    out
}

/// The structure on `V(G)` plus values, with the forest given by `forest`
/// and every value an extra root, and the guided sentence whose matrix
/// checks domains and forbidden pairs along a branch.
///
/// Leaves are padded with dummy variables (one value, no constraints) so
/// every branch has `k = max(2, depth)` vertices; shorter branches would
/// satisfy the guard vacuously, and with `k = 1` the value roots would
/// falsify it.
pub fn bincsp_td_to_structure(inst: &BinCsp, forest: &EliminationForest) -> Result<(RelationalStructure, GuidedSentence)> {
    if !validate_elimination_forest(inst.graph(), forest)? {
        return input("not an elimination forest of the instance");
    }
    let k = forest.depth().max(2);
    let parent = pad_forest(forest.parents(), k);
    let nv = parent.len();
    let vals = Values::new(inst, nv - inst.n(), nv);
    let mut a = RelationalStructure::new(nv + vals.total);
    for (name, arity) in [("forest", 1), ("parent", 2), ("root", 1)] {
        a.declare(name, arity)?;
    }
    for (v, p) in parent.iter().enumerate() {
        a.insert("forest", &[v])?;
        match p {
            Some(p) => a.insert("parent", &[*p, v])?,
            None => a.insert("root", &[v])?,
        }
    }
    for e in nv..a.universe {
        a.insert("root", &[e])?;
    }
    add_values(&mut a, inst, &vals, |u| u)?;

    let x = GuidedSentence::x;
    let y = GuidedSentence::y;
    let mut psi = vec![Fo::atom("forest", &[x(1)])];
    psi.extend((1..=k).map(|i| Fo::atom("domain", &[x(i), y(i)])));
    for i in 1..=k {
        for j in i + 1..=k {
            psi.push(Fo::not(Fo::atom("forbidden", &[y(i), y(j)])));
        }
    }
    Ok((a, GuidedSentence { k, matrix: Fo::And(psi) }))
}

/// The structure on tree nodes, variables and values with `bag` tying
/// nodes to their variables, and a Sigma_{2d-1} sentence choosing, per
/// level, the node's bag and values. Bags are padded to exactly `k`
/// variables and leaves to depth `d` with dummy variables.
pub fn bincsp_dfold_to_prenex(inst: &BinCsp, w: &FatEliminationTree) -> Result<(RelationalStructure, PrenexSentence)> {
    if w.is_empty() || !validate_fat_tree(inst.graph(), w)? {
        return input("not a fat elimination tree of the instance");
    }
    let d = w.depth();
    let k = w.width();
    let parent = pad_forest(&w.parent, d);
    let nt = parent.len();
    let mut bags: Vec<Vec<usize>> = w.bags.clone();
    bags.resize(nt, Vec::new());
    let mut nvars = inst.n();
    for bag in &mut bags {
        while bag.len() < k {
            bag.push(nvars);
            nvars += 1;
        }
    }
    let vals = Values::new(inst, nvars - inst.n(), nt + nvars);
    let mut a = RelationalStructure::new(nt + nvars + vals.total);
    for (name, arity) in [("root", 1), ("parent", 2), ("bag", 2)] {
        a.declare(name, arity)?;
    }
    for (t, p) in parent.iter().enumerate() {
        match p {
            Some(p) => a.insert("parent", &[*p, t])?,
            None => a.insert("root", &[t])?,
        }
        for &u in &bags[t] {
            a.insert("bag", &[t, nt + u])?;
        }
    }
    add_values(&mut a, inst, &vals, |u| nt + u)?;

    // x_j, then y_j^i and z_j^i per level
    let stride = 1 + 2 * k;
    let xv = |j: usize| (j - 1) * stride;
    let yv = |j: usize, i: usize| (j - 1) * stride + 2 * i - 1;
    let zv = |j: usize, i: usize| (j - 1) * stride + 2 * i;
    let mut names = Vec::with_capacity(d * stride);
    for j in 1..=d {
        names.push(format!("x{j}"));
        for i in 1..=k {
            names.push(format!("y{j}_{i}"));
            names.push(format!("z{j}_{i}"));
        }
    }
    let level = |j: usize| (1..=k).flat_map(|i| [yv(j, i), zv(j, i)]).collect::<Vec<_>>();
    let mut blocks = vec![(Quantifier::Exists, [vec![xv(1)], level(1)].concat())];
    for j in 2..=d {
        if k == 0 {
            match blocks.last_mut() {
                Some((Quantifier::Forall, vs)) => vs.push(xv(j)),
                _ => blocks.push((Quantifier::Forall, vec![xv(j)])),
            }
        } else {
            blocks.push((Quantifier::Forall, vec![xv(j)]));
            blocks.push((Quantifier::Exists, level(j)));
        }
    }

    let mut psi = Vec::new();
    for j in 1..=d {
        for i in 1..=k {
            psi.push(Fo::atom("bag", &[xv(j), yv(j, i)]));
            psi.push(Fo::atom("domain", &[yv(j, i), zv(j, i)]));
            for i2 in i + 1..=k {
                psi.push(Fo::not(Fo::Eq(yv(j, i), yv(j, i2))));
            }
        }
    }
    let zs: Vec<usize> = (1..=d).flat_map(|j| (1..=k).map(move |i| zv(j, i))).collect();
    for (idx, &z1) in zs.iter().enumerate() {
        for &z2 in &zs[idx + 1..] {
            psi.push(Fo::not(Fo::atom("forbidden", &[z1, z2])));
        }
    }
    let guard = Fo::And((2..=d).map(|j| Fo::atom("parent", &[xv(j - 1), xv(j)])).collect());
    let matrix = Fo::And(vec![Fo::atom("root", &[xv(1)]), Fo::implies(guard, Fo::And(psi))]);
    let s = PrenexSentence { names, blocks, matrix };
    s.validate()?;
    Ok((a, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::instance::random_instance_with;
    use crate::logic::{count_guided_chains, eval_guided, eval_guided_counted, eval_prenex};
    use crate::solvers::solve_bruteforce;
    use crate::structure::{fat_elimination_tree, treedepth_exact};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn td_examples() {
        let inst = BinCsp::new(vec![vec![4]]);
        let (a, s) = bincsp_td_to_structure(&inst, &EliminationForest::flat(1)).unwrap();
        assert_eq!((a.universe, s.k), (4, 2));
        assert!(eval_guided(&a, &s).unwrap());

        let mut inst = BinCsp::new(vec![vec![0, 1], vec![0]]);
        inst.add_edge(0, 1).unwrap();
        let (a, s) = bincsp_td_to_structure(&inst, &EliminationForest::chain(&[0, 1])).unwrap();
        assert_eq!(a.relations["forbidden"].tuples.len(), 4);
        assert!(!eval_guided(&a, &s).unwrap());
        assert!(bincsp_td_to_structure(&inst, &EliminationForest::flat(2)).is_err());
    }

    #[test]
    fn td_agrees_with_bruteforce() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..40 {
            let n = rng.gen_range(1..=5);
            let inst = random_instance_with(&mut rng, n, 3, 0.5, 0.6);
            let (_, f) = treedepth_exact(inst.graph()).unwrap();
            let (a, s) = bincsp_td_to_structure(&inst, &f).unwrap();
            let r = eval_guided_counted(&a, &s).unwrap();
            assert_eq!(r.holds, solve_bruteforce(&inst).unwrap().is_some());
            assert!(r.chains_examined <= count_guided_chains(&a, s.k));
        }
    }

    #[test]
    fn dfold_examples() {
        let inst = BinCsp::new(vec![vec![0, 1], vec![2]]);
        let w = FatEliminationTree { parent: vec![None], bags: vec![vec![0, 1]] };
        let (a, s) = bincsp_dfold_to_prenex(&inst, &w).unwrap();
        assert_eq!(s.sigma_level(), Some(1));
        assert!(eval_prenex(&a, &s).unwrap());

        // star with centre 0 and three leaves, centre on top
        let g = Graph::star(3);
        let mut inst = BinCsp::new(vec![vec![0, 1]; 4]);
        for v in 1..4 {
            inst.add_edge(0, v).unwrap();
            inst.allow(0, v, 1, 0).unwrap();
        }
        let w = fat_elimination_tree(&g, 2, 1).unwrap().unwrap();
        let (a, s) = bincsp_dfold_to_prenex(&inst, &w).unwrap();
        assert_eq!(s.sigma_level(), Some(3));
        assert!(eval_prenex(&a, &s).unwrap());
        inst.forbid(0, 3, 1, 0);
        let (a, s) = bincsp_dfold_to_prenex(&inst, &w).unwrap();
        assert!(!eval_prenex(&a, &s).unwrap());
    }

    #[test]
    fn dfold_agrees_with_bruteforce() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        for _ in 0..25 {
            let n = rng.gen_range(1..=5);
            let inst = random_instance_with(&mut rng, n, 3, 0.4, 0.6);
            let d = rng.gen_range(1..=2);
            let Some(w) = (1..=2).find_map(|k| fat_elimination_tree(inst.graph(), d, k).unwrap()) else { continue };
            let (a, s) = bincsp_dfold_to_prenex(&inst, &w).unwrap();
            assert_eq!(s.sigma_level(), Some(2 * w.depth() - 1));
            assert_eq!(eval_prenex(&a, &s).unwrap(), solve_bruteforce(&inst).unwrap().is_some());
        }
    }
}
