use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use super::{universal_block, Kind, Machine, Stackless, UniversalBlock};
use crate::error::{input, resource, Result};
use crate::instance::{BinCsp, Value};
use crate::structure::EliminationForest;
use crate::tree::OrderedTree;

/// Cap on reachable stackless configurations.
pub const CONFIG_CAP: usize = 4096;

/// Cap on the number of tuples in the shared domain.
pub const TUPLE_CAP: usize = 1 << 20;

/// Budgets of the reduction: `nondeterminism` and `conondeterminism` bound
/// the counters, `stack` bounds the stack length, `k` is the depth bound of
/// the contraction tree and `log_n` the word length per block slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegularParams {
    pub nondeterminism: usize,
    pub conondeterminism: usize,
    pub stack: usize,
    pub k: usize,
    pub log_n: usize,
}

/// One domain value: configuration index, the bits most recently pushed,
/// both counters, and the stack length.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Tuple {
    pub config: usize,
    pub word: Vec<bool>,
    pub n_exists: usize,
    pub n_forall: usize,
    pub depth: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularCsp {
    pub inst: BinCsp,
    pub forest: EliminationForest,
    pub configs: Vec<Stackless>,
    /// Value `i` of every variable stands for `tuples[i]`.
    pub tuples: Vec<Tuple>,
    /// Vertex of the subdivided tree for every node of the contraction tree.
    pub principal: Vec<usize>,
}

struct Space<'a, M: Machine + ?Sized> {
    m: &'a M,
    input: &'a [bool],
    configs: Vec<Stackless>,
    index: HashMap<Stackless, usize>,
    blocks: HashMap<usize, UniversalBlock>,
}

impl<M: Machine + ?Sized> Space<'_, M> {
    fn id(&mut self, c: &Stackless) -> Result<usize> {
        if let Some(&i) = self.index.get(c) {
            return Ok(i);
        }
        if self.configs.len() >= CONFIG_CAP {
            return resource(format!("more than {CONFIG_CAP} stackless configurations"));
        }
        self.index.insert(c.clone(), self.configs.len());
        self.configs.push(c.clone());
        Ok(self.configs.len() - 1)
    }

    /// All configurations reachable from the start, ignoring the stack.
    fn explore(&mut self) -> Result<()> {
        let start = self.m.start();
        self.id(&start)?;
        let mut i = 0;
        while i < self.configs.len() {
            let c = self.configs[i].clone();
            for (_, mv) in self.moves(&c)? {
                self.id(&mv.next)?;
            }
            i += 1;
        }
        Ok(())
    }

    fn moves(&self, c: &Stackless) -> Result<Vec<(bool, super::Move)>> {
        let bits: &[bool] = match self.m.kind(c.state) {
            Kind::Final => &[],
            Kind::Deterministic => &[false],
            _ => &[false, true],
        };
        bits.iter().map(|&b| Ok((b, self.m.step(c, self.input, b)?))).collect()
    }

    fn block(&mut self, c: usize) -> Result<&UniversalBlock> {
        if !self.blocks.contains_key(&c) {
            let b = universal_block(self.m, &self.configs[c], self.input)?;
            self.blocks.insert(c, b);
        }
        Ok(&self.blocks[&c])
    }

    /// Ends `(c', word, existential steps)` of sequences from `c` pushing at
    /// most `l` bits through at most `l` existential configurations, with
    /// no universal configuration before the end.
    fn hops(&self, c: usize, l: usize) -> Result<BTreeSet<(usize, Vec<bool>, usize)>> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([(c, Vec::new(), 0)]);
        while let Some((x, word, e)) = queue.pop_front() {
            if !seen.insert((x, word.clone(), e)) {
                continue;
            }
            let cx = &self.configs[x];
            let kind = self.m.kind(cx.state);
            let e2 = match kind {
                Kind::Universal | Kind::Final => continue,
                Kind::Existential => e + 1,
                Kind::Deterministic => e,
            };
            if e2 > l {
                continue;
            }
            for (_, mv) in self.moves(cx)? {
                let mut w = word.clone();
                w.extend(mv.push);
                if w.len() <= l {
                    queue.push_back((self.index[&mv.next], w, e2));
                }
            }
        }
        Ok(seen)
    }
}

/// Pairs per constraint, intersected when a pair of variables is
/// constrained twice.
#[derive(Default)]
struct Constraints {
    map: HashMap<(usize, usize), BTreeSet<(Value, Value)>>,
}

impl Constraints {
    fn add(&mut self, u: usize, v: usize, pairs: BTreeSet<(Value, Value)>) {
        match self.map.get_mut(&(u, v)) {
            Some(old) => old.retain(|p| pairs.contains(p)),
            None => {
                self.map.insert((u, v), pairs);
            }
        }
    }
}

/// Encodes the accepting computation trees of `m` on `input` whose
/// contraction is `t` as a BinCSP instance with elimination tree `S`,
/// obtained from `t` by subdividing every edge `3K` times.
///
/// Two completions of the acceptance relation: a leaf's own word is checked
/// in its domain, and the decisive index must lie inside the stack.
pub fn compile_regular_arosm_to_bincsp<M: Machine + ?Sized>(
    m: &M,
    t: &OrderedTree,
    input_bits: &[bool],
    p: RegularParams,
) -> Result<RegularCsp> {
    if p.k == 0 || p.log_n == 0 {
        return input("k and log n must be positive");
    }
    if t.depth() > p.k {
        return input(format!("contraction tree deeper than k = {}", p.k));
    }
    let mut sp = Space { m, input: input_bits, configs: Vec::new(), index: HashMap::new(), blocks: HashMap::new() };
    sp.explore()?;
    let l = p.log_n;

    let words: Vec<Vec<bool>> = (0..=l).flat_map(|len| (0..1usize << len).map(move |x| (0..len).rev().map(|i| x >> i & 1 == 1).collect())).collect();
    let total = sp.configs.len() * words.len() * (p.nondeterminism + 1) * (p.conondeterminism + 1) * (p.stack + 1);
    if total > TUPLE_CAP {
        return resource(format!("{total} tuples exceed the cap of {TUPLE_CAP}"));
    }
    let mut tuples = Vec::with_capacity(total);
    for config in 0..sp.configs.len() {
        for word in &words {
            for n_exists in 0..=p.nondeterminism {
                for n_forall in 0..=p.conondeterminism {
                    for depth in word.len()..=p.stack {
                        tuples.push(Tuple { config, word: word.clone(), n_exists, n_forall, depth });
                    }
                }
            }
        }
    }
    let value: HashMap<Tuple, Value> = tuples.iter().enumerate().map(|(i, q)| (q.clone(), i as Value)).collect();

    // subdivided tree: s^1..s^K then x^1..x^2K on every edge
    let kk = p.k;
    let mut parent: Vec<Option<usize>> = vec![None];
    let mut principal = vec![0; t.len()];
    let mut edges = Vec::new();
    for u in t.preorder() {
        for (i, &v) in t.children(u).iter().enumerate() {
            let mut chain = Vec::with_capacity(3 * kk);
            let mut last = principal[u];
            for _ in 0..3 * kk + 1 {
                parent.push(Some(last));
                last = parent.len() - 1;
                chain.push(last);
            }
            principal[v] = chain.pop().unwrap();
            edges.push((u, v, i, chain));
        }
    }
    let forest = EliminationForest::new(parent)?;
    let n_s = forest.n();
    let s_children = forest.children();

    let mut domains: Vec<Vec<Value>> = vec![(0..tuples.len() as Value).collect(); n_s];
    let start = Tuple { config: 0, word: Vec::new(), n_exists: 0, n_forall: 0, depth: 0 };
    domains[0] = vec![value[&start]];
    for u in 0..t.len() {
        let su = principal[u];
        let mut keep = Vec::new();
        for &x in &domains[su] {
            let q = &tuples[x as usize];
            let ok = if t.is_leaf(u) {
                m.kind(sp.configs[q.config].state) == Kind::Final && own_word_accepts(&sp.configs[q.config], q)
            } else {
                sp.block(q.config)?.leaves().len() == s_children[su].len()
            };
            if ok {
                keep.push(x);
            }
        }
        domains[su] = keep;
    }

    let mut cons = Constraints::default();
    let bound = |q: &Tuple| q.n_exists <= p.nondeterminism && q.n_forall <= p.conondeterminism && q.depth <= p.stack;

    for (u, _, i, chain) in &edges {
        let su = principal[*u];
        let mut guided = vec![BTreeSet::new(); kk];
        for &x in &domains[su] {
            let q = tuples[x as usize].clone();
            let seq = guided_sequence(&mut sp, &q, *i, kk, l)?;
            if let Some(seq) = seq.filter(|s| s.iter().all(bound)) {
                for (j, qj) in seq.iter().enumerate() {
                    guided[j].insert((x, value[qj]));
                }
            }
        }
        for (j, pairs) in guided.into_iter().enumerate() {
            cons.add(su, chain[j], pairs);
        }
    }

    let mut hop_cache: HashMap<usize, BTreeSet<(usize, Vec<bool>, usize)>> = HashMap::new();
    for (_, v, _, chain) in &edges {
        let mut path = chain[kk - 1..].to_vec();
        path.push(principal[*v]);
        for w in path.windows(2) {
            let (a, b) = (w[0], w[1]);
            let target: BTreeSet<Value> = domains[b].iter().copied().collect();
            let mut pairs = BTreeSet::new();
            for &x in &domains[a] {
                let q = &tuples[x as usize];
                if !hop_cache.contains_key(&q.config) {
                    hop_cache.insert(q.config, sp.hops(q.config, l)?);
                }
                for (c2, word, e) in &hop_cache[&q.config] {
                    let q2 = Tuple {
                        config: *c2,
                        word: word.clone(),
                        n_exists: q.n_exists + e,
                        n_forall: q.n_forall,
                        depth: q.depth + word.len(),
                    };
                    if let Some(&y) = value.get(&q2) {
                        if target.contains(&y) {
                            pairs.insert((x, y));
                        }
                    }
                }
            }
            cons.add(a, b, pairs);
        }
    }

    for u in t.leaves() {
        let leaf = principal[u];
        let mut w = forest.parent(leaf);
        while let Some(a) = w {
            let mut pairs = BTreeSet::new();
            for &x in &domains[a] {
                for &y in &domains[leaf] {
                    let (qa, ql) = (&tuples[x as usize], &tuples[y as usize]);
                    if read_accepts(qa, sp.configs[ql.config].work_index()) {
                        pairs.insert((x, y));
                    }
                }
            }
            cons.add(a, leaf, pairs);
            w = forest.parent(a);
        }
    }

    let mut inst = BinCsp::new(domains);
    let mut keys: Vec<_> = cons.map.keys().copied().collect();
    keys.sort_unstable();
    for (a, b) in keys {
        inst.add_edge(a, b)?;
        for &(x, y) in &cons.map[&(a, b)] {
            inst.allow(a, b, x, y)?;
        }
    }
    Ok(RegularCsp { inst, forest, configs: sp.configs, tuples, principal })
}

/// The acceptance relation for an ancestor slot: an index inside its word
/// must point at a 1.
fn read_accepts(q: &Tuple, p: u128) -> bool {
    let lo = (q.depth - q.word.len()) as u128;
    if p <= lo || p > q.depth as u128 {
        return true;
    }
    q.word[(p - lo - 1) as usize]
}

fn own_word_accepts(c: &Stackless, q: &Tuple) -> bool {
    let p = c.work_index();
    p >= 1 && p <= q.depth as u128 && read_accepts(q, p)
}

/// The entries `q^1..q^K` following the `i`th leaf of `U(c)`; `None` if
/// there is no such leaf or the block pushes more than `K * l` bits.
fn guided_sequence<M: Machine + ?Sized>(
    sp: &mut Space<'_, M>,
    q: &Tuple,
    i: usize,
    kk: usize,
    l: usize,
) -> Result<Option<Vec<Tuple>>> {
    let block = sp.block(q.config)?.clone();
    let leaves = block.leaves();
    let Some(&leaf) = leaves.get(i) else { return Ok(None) };
    let path = block.path_to(leaf);
    // pushes before each path node, and universal nodes strictly before it
    let mut pushed: Vec<Vec<bool>> = vec![Vec::new()];
    let mut universal = vec![0];
    for w in path.windows(2) {
        let mut word = pushed.last().unwrap().clone();
        word.extend(block.edge[w[1]].1);
        pushed.push(word);
        let u = universal.last().unwrap() + (sp.m.kind(block.configs[w[0]].state) == Kind::Universal) as usize;
        universal.push(u);
    }
    if pushed.last().unwrap().len() > kk * l {
        return Ok(None);
    }
    let mut out = Vec::with_capacity(kk);
    let mut prev = 0;
    for j in 1..=kk {
        let at = (0..path.len()).rev().find(|&x| pushed[x].len() <= j * l).unwrap();
        let config = sp.id(&block.configs[path[at]])?;
        out.push(Tuple {
            config,
            word: pushed[at][pushed[prev].len()..].to_vec(),
            n_exists: q.n_exists,
            n_forall: q.n_forall + universal[at],
            depth: q.depth + pushed[at].len(),
        });
        prev = at;
    }
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{decide, toy_machines, ArosMachine, ResourceLimits, Transition};
    use crate::solvers::solve_by_elimination_forest;
    use crate::structure::validate_elimination_forest;
    use std::collections::BTreeMap;

    fn params(a: usize) -> RegularParams {
        RegularParams { nondeterminism: a, conondeterminism: 1, stack: 2, k: 2, log_n: 1 }
    }

    fn limits(p: &RegularParams) -> ResourceLimits {
        ResourceLimits {
            nondeterminism: p.nondeterminism,
            conondeterminism: p.conondeterminism,
            stack: p.stack,
            ..ResourceLimits::unbounded()
        }
    }

    #[test]
    fn toys_agree_with_decide() {
        for toy in toy_machines() {
            for a in 1..=2 {
                let p = params(a);
                let r = compile_regular_arosm_to_bincsp(&toy.machine, &toy.tree, &[], p).unwrap();
                assert!(validate_elimination_forest(r.inst.graph(), &r.forest).unwrap());
                assert!(r.forest.depth() <= 3 * p.k * p.k + p.k);
                assert!(r.configs.len() <= 12, "{}", toy.name);
                let sat = solve_by_elimination_forest(&r.inst, &r.forest).unwrap().is_some();
                let acc = decide(&toy.machine, &[], &limits(&p)).unwrap().accept;
                assert_eq!(sat, acc, "{} a={a}", toy.name);
                assert_eq!(acc, toy.accepts_from.is_some_and(|m| a >= m), "{} a={a}", toy.name);
            }
        }
    }

    fn push_then_halt() -> ArosMachine {
        let mut trans = BTreeMap::new();
        trans.insert((0, None), Transition { next: 1, push: Some(true), write: Some(vec![true]) });
        ArosMachine::new(vec![Kind::Deterministic, Kind::Final], 0, trans).unwrap()
    }

    #[test]
    fn single_block_machines() {
        let m = push_then_halt();
        let two = OrderedTree::join(&[OrderedTree::leaf()]);
        let r = compile_regular_arosm_to_bincsp(&m, &two, &[], params(1)).unwrap();
        assert!(solve_by_elimination_forest(&r.inst, &r.forest).unwrap().is_some());
        // a single node would have to be final at the start, with an empty stack
        let r = compile_regular_arosm_to_bincsp(&m, &OrderedTree::leaf(), &[], params(1)).unwrap();
        assert!(solve_by_elimination_forest(&r.inst, &r.forest).unwrap().is_none());
        let halt = ArosMachine::new(vec![Kind::Final], 0, BTreeMap::new()).unwrap();
        let r = compile_regular_arosm_to_bincsp(&halt, &OrderedTree::leaf(), &[], params(1)).unwrap();
        assert!(solve_by_elimination_forest(&r.inst, &r.forest).unwrap().is_none());
        assert!(!decide(&halt, &[], &ResourceLimits::unbounded()).unwrap().accept);
    }
}
