//! Binary CSP, List Coloring and Precoloring Extension instances.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{input, Result};
use crate::graph::Graph;

/// Domain values are plain integer tokens.
pub type Value = u32;

/// Total assignment, indexed by variable.
pub type Assignment = Vec<Value>;

/// Binary CSP: a Gaifman graph, per-variable domains, and for every edge the
/// set of allowed value pairs, stored once in `(min id, max id)` orientation.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct BinCsp {
    graph: Graph,
    domains: Vec<Vec<Value>>,
    allowed: BTreeMap<(usize, usize), BTreeSet<(Value, Value)>>,
}

impl BinCsp {
    /// Edgeless instance with the given domains (sorted and deduplicated).
    pub fn new(domains: Vec<Vec<Value>>) -> Self {
        let domains: Vec<Vec<Value>> = domains.into_iter().map(normalize).collect();
        BinCsp {
            graph: Graph::new(domains.len()),
            domains,
            allowed: BTreeMap::new(),
        }
    }

    /// Canonical unsatisfiable instance: one variable with an empty domain.
    pub fn unsatisfiable() -> Self {
        BinCsp::new(vec![Vec::new()])
    }

    pub fn n(&self) -> usize {
        self.domains.len()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn domain(&self, v: usize) -> &[Value] {
        &self.domains[v]
    }

    pub fn domains(&self) -> &[Vec<Value>] {
        &self.domains
    }

    pub fn max_domain(&self) -> usize {
        self.domains.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn in_domain(&self, v: usize, a: Value) -> bool {
        self.domains[v].binary_search(&a).is_ok()
    }

    pub fn add_var(&mut self, domain: Vec<Value>) -> usize {
        self.domains.push(normalize(domain));
        self.graph.add_vertex()
    }

    /// Adds edge `uv` with an empty allowed set if it is not present yet.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u == v || u >= self.n() || v >= self.n() {
            return input(format!("bad edge {u}-{v}"));
        }
        self.graph.add_edge(u, v);
        self.allowed.entry((u.min(v), u.max(v))).or_default();
        Ok(())
    }

    /// Allows `(a, b)` on `(u, v)` in that orientation, creating the edge if
    /// needed.
    pub fn allow(&mut self, u: usize, v: usize, a: Value, b: Value) -> Result<()> {
        self.add_edge(u, v)?;
        if !self.in_domain(u, a) || !self.in_domain(v, b) {
            return input(format!("pair ({a},{b}) outside domains of {u},{v}"));
        }
        let pair = if u < v { (a, b) } else { (b, a) };
        self.allowed.get_mut(&(u.min(v), u.max(v))).unwrap().insert(pair);
        Ok(())
    }

    /// Adds edge `uv` allowing every pair satisfying `pred(a, b)`.
    pub fn constrain(
        &mut self,
        u: usize,
        v: usize,
        mut pred: impl FnMut(Value, Value) -> bool,
    ) -> Result<()> {
        self.add_edge(u, v)?;
        let (du, dv) = (self.domains[u].clone(), self.domains[v].clone());
        for &a in &du {
            for &b in &dv {
                if pred(a, b) {
                    self.allow(u, v, a, b)?;
                }
            }
        }
        Ok(())
    }

    /// Removes a single allowed pair; returns whether it was present.
    pub fn forbid(&mut self, u: usize, v: usize, a: Value, b: Value) -> bool {
        let pair = if u < v { (a, b) } else { (b, a) };
        self.allowed
            .get_mut(&(u.min(v), u.max(v)))
            .is_some_and(|s| s.remove(&pair))
    }

    pub fn allows(&self, u: usize, v: usize, a: Value, b: Value) -> bool {
        let pair = if u < v { (a, b) } else { (b, a) };
        match self.allowed.get(&(u.min(v), u.max(v))) {
            Some(s) => s.contains(&pair),
            None => true,
        }
    }

    /// `C(u, v)` in the requested orientation; the reversed view is derived.
    pub fn allowed_pairs(&self, u: usize, v: usize) -> Vec<(Value, Value)> {
        match self.allowed.get(&(u.min(v), u.max(v))) {
            None => Vec::new(),
            Some(s) if u < v => s.iter().copied().collect(),
            Some(s) => {
                let mut out: Vec<_> = s.iter().map(|&(a, b)| (b, a)).collect();
                out.sort_unstable();
                out
            }
        }
    }

    /// Edges with their canonical allowed sets.
    pub fn constraints(&self) -> impl Iterator<Item = (&(usize, usize), &BTreeSet<(Value, Value)>)> {
        self.allowed.iter()
    }

    /// Replaces the domain of `v`, dropping allowed pairs that fall outside.
    pub fn restrict_domain(&mut self, v: usize, keep: &[Value]) {
        let keep = normalize(keep.to_vec());
        self.domains[v].retain(|a| keep.binary_search(a).is_ok());
        let dom = self.domains[v].clone();
        for (&(x, y), set) in self.allowed.iter_mut() {
            if x == v {
                set.retain(|(a, _)| dom.binary_search(a).is_ok());
            } else if y == v {
                set.retain(|(_, b)| dom.binary_search(b).is_ok());
            }
        }
    }

    /// Sub-instance induced by `keep`; variable `i` of the result is
    /// `map[i]` here, with `map` ascending.
    pub fn induced(&self, keep: &[usize]) -> (BinCsp, Vec<usize>) {
        let (graph, map) = self.graph.induced(keep);
        let domains: Vec<_> = map.iter().map(|&v| self.domains[v].clone()).collect();
        let mut allowed = BTreeMap::new();
        for (i, j) in graph.edges() {
            allowed.insert((i, j), self.allowed[&(map[i], map[j])].clone());
        }
        (BinCsp { graph, domains, allowed }, map)
    }

    /// Product of domain sizes, saturating.
    pub fn search_space(&self) -> u128 {
        self.domains
            .iter()
            .fold(1u128, |acc, d| acc.saturating_mul(d.len() as u128))
    }
}

fn normalize(mut d: Vec<Value>) -> Vec<Value> {
    d.sort_unstable();
    d.dedup();
    d
}

/// True iff every edge's value pair is allowed. Partial or out-of-domain
/// assignments are input errors.
pub fn check_assignment(inst: &BinCsp, a: &[Value]) -> Result<bool> {
    if a.len() != inst.n() {
        return input(format!("assignment covers {} of {} variables", a.len(), inst.n()));
    }
    for (v, &val) in a.iter().enumerate() {
        if !inst.in_domain(v, val) {
            return input(format!("value {val} not in domain of variable {v}"));
        }
    }
    Ok(inst
        .graph
        .edges()
        .iter()
        .all(|&(u, v)| inst.allows(u, v, a[u], a[v])))
}

/// List Coloring: colors are the tokens `0..colors`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ListColoring {
    pub graph: Graph,
    pub colors: usize,
    pub lists: Vec<Vec<Value>>,
}

impl ListColoring {
    pub fn new(graph: Graph, colors: usize, lists: Vec<Vec<Value>>) -> Result<Self> {
        if lists.len() != graph.n() {
            return input("one list per vertex required");
        }
        let lists: Vec<_> = lists.into_iter().map(normalize).collect();
        if lists.iter().flatten().any(|&c| c as usize >= colors) {
            return input("list color outside the declared color set");
        }
        Ok(ListColoring { graph, colors, lists })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn is_proper(&self, col: &[Value]) -> bool {
        col.len() == self.n()
            && col
                .iter()
                .enumerate()
                .all(|(v, c)| self.lists[v].binary_search(c).is_ok())
            && self.graph.edges().iter().all(|&(u, v)| col[u] != col[v])
    }

    /// First proper list coloring in lexicographic order, by plain
    /// backtracking over the coloring definition.
    pub fn solve_bruteforce(&self) -> Option<Vec<Value>> {
        let mut col = Vec::with_capacity(self.n());
        color_rec(&self.graph, &self.lists, &mut col).then_some(col)
    }
}

fn color_rec(g: &Graph, lists: &[Vec<Value>], col: &mut Vec<Value>) -> bool {
    let v = col.len();
    if v == g.n() {
        return true;
    }
    for &c in &lists[v] {
        if g.neighbors(v).iter().all(|&w| w >= v || col[w] != c) {
            col.push(c);
            if color_rec(g, lists, col) {
                return true;
            }
            col.pop();
        }
    }
    false
}

/// Precoloring Extension: extend the partial coloring `pre` to a proper
/// coloring with colors `0..colors`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Precoloring {
    pub graph: Graph,
    pub colors: usize,
    pub pre: BTreeMap<usize, Value>,
}

impl Precoloring {
    pub fn new(graph: Graph, colors: usize, pre: BTreeMap<usize, Value>) -> Result<Self> {
        if pre.keys().any(|&v| v >= graph.n()) {
            return input("precolored vertex outside the graph");
        }
        if pre.values().any(|&c| c as usize >= colors) {
            return input("precolor outside the color set");
        }
        Ok(Precoloring { graph, colors, pre })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// The equivalent list instance: precolored vertices get singleton lists.
    pub fn as_list_coloring(&self) -> ListColoring {
        let all: Vec<Value> = (0..self.colors as Value).collect();
        let lists = (0..self.n())
            .map(|v| match self.pre.get(&v) {
                Some(&c) => vec![c],
                None => all.clone(),
            })
            .collect();
        ListColoring { graph: self.graph.clone(), colors: self.colors, lists }
    }

    pub fn solve_bruteforce(&self) -> Option<Vec<Value>> {
        self.as_list_coloring().solve_bruteforce()
    }
}

/// Same graph, lists as domains, every constraint a disequality.
pub fn listcoloring_to_bincsp(lc: &ListColoring) -> BinCsp {
    let mut inst = BinCsp::new(lc.lists.clone());
    for (u, v) in lc.graph.edges() {
        inst.constrain(u, v, |a, b| a != b).expect("edge within range");
    }
    inst
}

/// Output of [`bincsp_to_listcoloring`]: color `c` stands for value
/// `color_tags[c].1` of variable `color_tags[c].0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GadgetColoring {
    pub lc: ListColoring,
    pub color_tags: Vec<(usize, Value)>,
    /// Gadget vertex `n + i` blocks the forbidden pair `gadgets[i]`
    /// given as `(u, v, a, b)`.
    pub gadgets: Vec<(usize, usize, Value, Value)>,
}

impl GadgetColoring {
    /// Reads a CSP assignment off a coloring of the original vertices.
    pub fn decode(&self, col: &[Value]) -> Assignment {
        (0..self.gadgets_start())
            .map(|v| self.color_tags[col[v] as usize].1)
            .collect()
    }

    fn gadgets_start(&self) -> usize {
        self.lc.n() - self.gadgets.len()
    }
}

/// Tags every value with its variable so domains become disjoint, then adds
/// one vertex with list `{a, b}` adjacent to `u` and `v` for each forbidden
/// pair `(a, b)` on edge `uv`. Original edges are dropped.
pub fn bincsp_to_listcoloring(inst: &BinCsp) -> GadgetColoring {
    let mut color_tags = Vec::new();
    let mut color_of = BTreeMap::new();
    for v in 0..inst.n() {
        for &a in inst.domain(v) {
            color_of.insert((v, a), color_tags.len() as Value);
            color_tags.push((v, a));
        }
    }
    let mut lists: Vec<Vec<Value>> = (0..inst.n())
        .map(|v| inst.domain(v).iter().map(|&a| color_of[&(v, a)]).collect())
        .collect();
    let mut graph = Graph::new(inst.n());
    let mut gadgets = Vec::new();
    for (u, v) in inst.graph().edges() {
        for &a in inst.domain(u) {
            for &b in inst.domain(v) {
                if !inst.allows(u, v, a, b) {
                    let g = graph.add_vertex();
                    graph.add_edge(g, u);
                    graph.add_edge(g, v);
                    lists.push(vec![color_of[&(u, a)], color_of[&(v, b)]]);
                    gadgets.push((u, v, a, b));
                }
            }
        }
    }
    let lc = ListColoring::new(graph, color_tags.len(), lists).expect("tags are in range");
    GadgetColoring { lc, color_tags, gadgets }
}

/// Seeded random instance: domain sizes uniform in `1..=max_dom` with values
/// `0..size`, each edge present with `edge_prob`, each pair allowed with
/// `pair_prob`.
pub fn random_instance(n: usize, max_dom: usize, edge_prob: f64, pair_prob: f64, seed: u64) -> BinCsp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_instance_with(&mut rng, n, max_dom, edge_prob, pair_prob)
}

pub fn random_instance_with(
    rng: &mut impl Rng,
    n: usize,
    max_dom: usize,
    edge_prob: f64,
    pair_prob: f64,
) -> BinCsp {
    let max_dom = max_dom.max(1);
    let domains = (0..n)
        .map(|_| (0..rng.gen_range(1..=max_dom) as Value).collect())
        .collect();
    let mut inst = BinCsp::new(domains);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(edge_prob) {
                inst.add_edge(u, v).unwrap();
                for a in inst.domain(u).to_vec() {
                    for b in inst.domain(v).to_vec() {
                        if rng.gen_bool(pair_prob) {
                            inst.allow(u, v, a, b).unwrap();
                        }
                    }
                }
            }
        }
    }
    inst
}

/// Random list coloring with lists drawn from `0..colors`.
pub fn random_list_coloring(
    rng: &mut impl Rng,
    n: usize,
    colors: usize,
    edge_prob: f64,
    keep_prob: f64,
) -> ListColoring {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(edge_prob) {
                g.add_edge(u, v);
            }
        }
    }
    let lists = (0..n)
        .map(|_| (0..colors as Value).filter(|_| rng.gen_bool(keep_prob)).collect())
        .collect();
    ListColoring::new(g, colors, lists).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_assignments(inst: &BinCsp) -> Vec<Assignment> {
        let mut out = vec![Vec::new()];
        for v in 0..inst.n() {
            out = out
                .into_iter()
                .flat_map(|a: Assignment| {
                    inst.domain(v).iter().map(move |&x| {
                        let mut b = a.clone();
                        b.push(x);
                        b
                    })
                })
                .collect();
        }
        out
    }

    fn satisfiable(inst: &BinCsp) -> bool {
        all_assignments(inst)
            .iter()
            .any(|a| check_assignment(inst, a).unwrap())
    }

    #[test]
    fn edgeless_instance_accepts_anything_in_domain() {
        let inst = BinCsp::new(vec![vec![1, 2], vec![0]]);
        assert!(check_assignment(&inst, &[2, 0]).unwrap());
    }

    #[test]
    fn empty_constraint_rejects() {
        let mut inst = BinCsp::new(vec![vec![0, 1], vec![0, 1]]);
        inst.add_edge(0, 1).unwrap();
        assert!(all_assignments(&inst)
            .iter()
            .all(|a| !check_assignment(&inst, a).unwrap()));
    }

    #[test]
    fn odd_cycle_is_not_two_colorable() {
        let mut inst = BinCsp::new(vec![vec![0, 1]; 3]);
        for (u, v) in [(0, 1), (1, 2), (0, 2)] {
            inst.constrain(u, v, |a, b| a != b).unwrap();
        }
        assert_eq!(all_assignments(&inst).len(), 8);
        assert!(!satisfiable(&inst));
    }

    #[test]
    fn partial_or_foreign_assignments_are_errors() {
        let inst = BinCsp::new(vec![vec![0], vec![0]]);
        assert!(check_assignment(&inst, &[0]).is_err());
        assert!(check_assignment(&inst, &[0, 3]).is_err());
    }

    #[test]
    fn reversed_view_swaps_pairs() {
        let mut inst = BinCsp::new(vec![vec![0, 1], vec![5, 6]]);
        inst.allow(1, 0, 5, 1).unwrap();
        inst.allow(0, 1, 0, 6).unwrap();
        assert_eq!(inst.allowed_pairs(0, 1), vec![(0, 6), (1, 5)]);
        assert_eq!(inst.allowed_pairs(1, 0), vec![(5, 1), (6, 0)]);
        assert!(inst.allows(1, 0, 6, 0));
        assert!(!inst.allows(1, 0, 6, 1));
    }

    #[test]
    fn allow_rejects_out_of_domain_pairs() {
        let mut inst = BinCsp::new(vec![vec![0], vec![0]]);
        assert!(inst.allow(0, 1, 0, 1).is_err());
        assert!(inst.add_edge(0, 0).is_err());
    }

    #[test]
    fn list_coloring_translation_examples() {
        let lc = ListColoring::new(Graph::new(1), 2, vec![vec![1]]).unwrap();
        let inst = listcoloring_to_bincsp(&lc);
        assert_eq!(inst.domain(0), &[1]);
        assert!(satisfiable(&inst));

        let lc = ListColoring::new(Graph::path(2), 2, vec![vec![1], vec![1]]).unwrap();
        assert!(!satisfiable(&listcoloring_to_bincsp(&lc)));
    }

    #[test]
    fn gadget_counts() {
        let mut inst = BinCsp::new(vec![vec![0, 1], vec![0, 1]]);
        inst.constrain(0, 1, |_, _| true).unwrap();
        assert!(bincsp_to_listcoloring(&inst).gadgets.is_empty());
        inst.forbid(0, 1, 1, 0);
        let out = bincsp_to_listcoloring(&inst);
        assert_eq!(out.gadgets, vec![(0, 1, 1, 0)]);
        assert_eq!(out.lc.lists[2].len(), 2);
        assert_eq!(out.lc.n(), 3);
    }

    #[test]
    fn random_instance_is_deterministic() {
        assert_eq!(random_instance(5, 3, 0.5, 0.5, 11), random_instance(5, 3, 0.5, 0.5, 11));
        let single = random_instance(1, 3, 1.0, 1.0, 0);
        assert_eq!(single.graph().edge_count(), 0);
        let full = random_instance(5, 3, 1.0, 1.0, 7);
        assert_eq!(full.graph().edge_count(), 10);
        let mins: Vec<_> = (0..5).map(|v| full.domain(v)[0]).collect();
        assert!(check_assignment(&full, &mins).unwrap());
    }

    #[test]
    fn round_trips_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let lc = random_list_coloring(&mut rng, 5, 3, 0.5, 0.6);
            assert_eq!(
                lc.solve_bruteforce().is_some(),
                satisfiable(&listcoloring_to_bincsp(&lc))
            );
            let inst = random_instance_with(&mut rng, 4, 3, 0.6, 0.5);
            let gadget = bincsp_to_listcoloring(&inst);
            match gadget.lc.solve_bruteforce() {
                Some(col) => {
                    assert!(check_assignment(&inst, &gadget.decode(&col)).unwrap());
                }
                None => assert!(!satisfiable(&inst)),
            }
        }
    }
}
