//! Relational structures, first-order sentences in the two shapes used
//! here (prenex, and guided by a forest), their evaluators, and the two
//! encodings of BinCSP into model checking.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use crate::error::{input, Result};

mod encode;

pub use encode::{bincsp_dfold_to_prenex, bincsp_td_to_structure};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub arity: usize,
    pub tuples: BTreeSet<Vec<usize>>,
}

/// Finite structure with universe `0..universe` and named relations of
/// arity 1 or 2.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RelationalStructure {
    pub universe: usize,
    pub relations: BTreeMap<String, Relation>,
}

impl RelationalStructure {
    pub fn new(universe: usize) -> Self {
        RelationalStructure { universe, relations: BTreeMap::new() }
    }

    pub fn declare(&mut self, name: &str, arity: usize) -> Result<()> {
        if !(1..=2).contains(&arity) {
            return input(format!("relation {name} has arity {arity}; only 1 and 2 are supported"));
        }
        match self.relations.get(name) {
            Some(r) if r.arity != arity => input(format!("relation {name} redeclared with arity {arity}")),
            Some(_) => Ok(()),
            None => {
                self.relations.insert(name.to_string(), Relation { arity, tuples: BTreeSet::new() });
                Ok(())
            }
        }
    }

    pub fn insert(&mut self, name: &str, tuple: &[usize]) -> Result<()> {
        let universe = self.universe;
        let Some(r) = self.relations.get_mut(name) else { return input(format!("undeclared relation {name}")) };
        if tuple.len() != r.arity {
            return input(format!("relation {name} has arity {}, got {} elements", r.arity, tuple.len()));
        }
        if let Some(&e) = tuple.iter().find(|&&e| e >= universe) {
            return input(format!("element {e} outside a universe of {universe}"));
        }
        r.tuples.insert(tuple.to_vec());
        Ok(())
    }

    pub fn holds(&self, name: &str, tuple: &[usize]) -> bool {
        self.relations.get(name).is_some_and(|r| r.tuples.contains(tuple))
    }
}

/// Quantifier-free formula over numbered variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Fo {
    True,
    False,
    Atom(String, Vec<usize>),
    Eq(usize, usize),
    Not(Box<Fo>),
    And(Vec<Fo>),
    Or(Vec<Fo>),
}

impl Fo {
    pub fn atom(rel: &str, args: &[usize]) -> Fo {
        Fo::Atom(rel.to_string(), args.to_vec())
    }

    pub fn not(f: Fo) -> Fo {
        Fo::Not(Box::new(f))
    }

    pub fn implies(a: Fo, b: Fo) -> Fo {
        Fo::Or(vec![Fo::not(a), b])
    }

    /// Largest variable index plus one.
    pub fn var_bound(&self) -> usize {
        match self {
            Fo::True | Fo::False => 0,
            Fo::Atom(_, args) => args.iter().map(|&v| v + 1).max().unwrap_or(0),
            Fo::Eq(a, b) => a.max(b) + 1,
            Fo::Not(f) => f.var_bound(),
            Fo::And(fs) | Fo::Or(fs) => fs.iter().map(Fo::var_bound).max().unwrap_or(0),
        }
    }

    fn relations<'a>(&'a self, out: &mut BTreeSet<(&'a str, usize)>) {
        match self {
            Fo::Atom(r, args) => {
                out.insert((r, args.len()));
            }
            Fo::Not(f) => f.relations(out),
            Fo::And(fs) | Fo::Or(fs) => fs.iter().for_each(|f| f.relations(out)),
            _ => {}
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quantifier {
    Exists,
    Forall,
}

/// Prenex sentence: quantifier blocks, then a matrix. `names[v]` names
/// variable `v` in printed form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrenexSentence {
    pub names: Vec<String>,
    pub blocks: Vec<(Quantifier, Vec<usize>)>,
    pub matrix: Fo,
}

impl PrenexSentence {
    /// Checks that every variable is bound exactly once and that block
    /// kinds alternate.
    pub fn validate(&self) -> Result<()> {
        let mut seen = vec![false; self.names.len()];
        for (i, (q, vars)) in self.blocks.iter().enumerate() {
            if vars.is_empty() {
                return input("empty quantifier block");
            }
            if i > 0 && self.blocks[i - 1].0 == *q {
                return input("consecutive blocks of the same quantifier");
            }
            for &v in vars {
                if v >= seen.len() || std::mem::replace(&mut seen[v], true) {
                    return input(format!("variable {v} unnamed or bound twice"));
                }
            }
        }
        if self.matrix.var_bound() > seen.len() || !seen.iter().all(|&b| b) {
            return input("matrix mentions an unbound variable");
        }
        Ok(())
    }

    /// `Some(t)` when the sentence is in Sigma_t: it starts existential (or
    /// has no quantifiers) and has `t` blocks.
    pub fn sigma_level(&self) -> Option<usize> {
        match self.blocks.first() {
            Some((Quantifier::Forall, _)) => None,
            _ => Some(self.blocks.len()),
        }
    }
}

/// `forall x1 exists y1 ... forall xk exists yk (root(x1) and parent(x1,
/// x2) and ... and parent(x_{k-1}, xk)) -> matrix`, where `x_i` is variable
/// `2(i-1)` and `y_i` is variable `2(i-1)+1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GuidedSentence {
    pub k: usize,
    pub matrix: Fo,
}

impl GuidedSentence {
    pub fn x(i: usize) -> usize {
        2 * (i - 1)
    }

    pub fn y(i: usize) -> usize {
        2 * (i - 1) + 1
    }

    /// The same sentence with the guard written out.
    pub fn to_prenex(&self) -> PrenexSentence {
        let mut names = Vec::with_capacity(2 * self.k);
        let mut blocks = Vec::with_capacity(2 * self.k);
        for i in 1..=self.k {
            names.push(format!("x{i}"));
            names.push(format!("y{i}"));
            blocks.push((Quantifier::Forall, vec![Self::x(i)]));
            blocks.push((Quantifier::Exists, vec![Self::y(i)]));
        }
        let mut guard = Vec::with_capacity(self.k);
        if self.k > 0 {
            guard.push(Fo::atom("root", &[Self::x(1)]));
        }
        for i in 2..=self.k {
            guard.push(Fo::atom("parent", &[Self::x(i - 1), Self::x(i)]));
        }
        PrenexSentence { names, blocks, matrix: Fo::implies(Fo::And(guard), self.matrix.clone()) }
    }
}

/// Matrix with relation names resolved.
enum Compiled {
    Const(bool),
    Unary(usize, usize),
    Binary(usize, usize, usize),
    Eq(usize, usize),
    Not(Box<Compiled>),
    And(Vec<Compiled>),
    Or(Vec<Compiled>),
}

struct Tables {
    unary: Vec<Vec<bool>>,
    binary: Vec<HashSet<(usize, usize)>>,
}

fn compile(a: &RelationalStructure, f: &Fo) -> Result<(Compiled, Tables)> {
    let mut used = BTreeSet::new();
    f.relations(&mut used);
    let mut tables = Tables { unary: Vec::new(), binary: Vec::new() };
    let mut index = BTreeMap::new();
    for (name, arity) in used {
        let Some(r) = a.relations.get(name) else { return input(format!("structure lacks relation {name}")) };
        if r.arity != arity {
            return input(format!("relation {name} used with arity {arity}, declared {}", r.arity));
        }
        let id = if arity == 1 {
            let mut t = vec![false; a.universe];
            r.tuples.iter().for_each(|x| t[x[0]] = true);
            tables.unary.push(t);
            tables.unary.len() - 1
        } else {
            tables.binary.push(r.tuples.iter().map(|x| (x[0], x[1])).collect());
            tables.binary.len() - 1
        };
        index.insert(name, id);
    }
    fn go(f: &Fo, index: &BTreeMap<&str, usize>) -> Compiled {
        match f {
            Fo::True => Compiled::Const(true),
            Fo::False => Compiled::Const(false),
            Fo::Atom(r, args) if args.len() == 1 => Compiled::Unary(index[r.as_str()], args[0]),
            Fo::Atom(r, args) => Compiled::Binary(index[r.as_str()], args[0], args[1]),
            Fo::Eq(a, b) => Compiled::Eq(*a, *b),
            Fo::Not(g) => Compiled::Not(Box::new(go(g, index))),
            Fo::And(gs) => Compiled::And(gs.iter().map(|g| go(g, index)).collect()),
            Fo::Or(gs) => Compiled::Or(gs.iter().map(|g| go(g, index)).collect()),
        }
    }
    Ok((go(f, &index), tables))
}

impl Compiled {
    /// Kleene evaluation: `None` when the unassigned variables matter.
    fn eval(&self, t: &Tables, asg: &[Option<usize>]) -> Option<bool> {
        match self {
            Compiled::Const(b) => Some(*b),
            Compiled::Unary(r, x) => asg[*x].map(|e| t.unary[*r][e]),
            Compiled::Binary(r, x, y) => Some(t.binary[*r].contains(&(asg[*x]?, asg[*y]?))),
            Compiled::Eq(x, y) => Some(asg[*x]? == asg[*y]?),
            Compiled::Not(g) => g.eval(t, asg).map(|b| !b),
            Compiled::And(gs) => {
                let mut unknown = false;
                for g in gs {
                    match g.eval(t, asg) {
                        Some(false) => return Some(false),
                        None => unknown = true,
                        _ => {}
                    }
                }
                (!unknown).then_some(true)
            }
            Compiled::Or(gs) => {
                let mut unknown = false;
                for g in gs {
                    match g.eval(t, asg) {
                        Some(true) => return Some(true),
                        None => unknown = true,
                        _ => {}
                    }
                }
                (!unknown).then_some(false)
            }
        }
    }
}

struct Prenex {
    m: Compiled,
    t: Tables,
    universe: usize,
    order: Vec<(Quantifier, usize)>,
    /// Per position: the universal variable following the current
    /// existential block when that block is a single variable.
    lookahead: Vec<Option<usize>>,
}

impl Prenex {
    /// Some adversarial value of the next universal variable falsifies the
    /// matrix whatever the unassigned variables are.
    fn refuted(&self, asg: &mut [Option<usize>], pos: usize) -> bool {
        let Some(v) = self.lookahead[pos] else { return false };
        let hit = (0..self.universe).any(|e| {
            asg[v] = Some(e);
            self.m.eval(&self.t, asg) == Some(false)
        });
        asg[v] = None;
        hit
    }

    fn run(&self, pos: usize, asg: &mut [Option<usize>]) -> bool {
        if let Some(b) = self.m.eval(&self.t, asg) {
            return b;
        }
        let (q, v) = self.order[pos];
        let want = q == Quantifier::Exists;
        for e in 0..self.universe {
            asg[v] = Some(e);
            if want && self.refuted(asg, pos) {
                continue;
            }
            if self.run(pos + 1, asg) == want {
                asg[v] = None;
                return want;
            }
        }
        asg[v] = None;
        !want
    }
}

/// Nested quantification over the universe, pruned by three-valued
/// evaluation of the matrix on partial assignments.
pub fn eval_prenex(a: &RelationalStructure, s: &PrenexSentence) -> Result<bool> {
    s.validate()?;
    let (m, t) = compile(a, &s.matrix)?;
    let order: Vec<(Quantifier, usize)> = s.blocks.iter().flat_map(|(q, vs)| vs.iter().map(move |&v| (*q, v))).collect();
    let mut lookahead = vec![None; order.len()];
    let mut pos = 0;
    for (i, (q, vs)) in s.blocks.iter().enumerate() {
        if *q == Quantifier::Exists {
            if let Some((_, next)) = s.blocks.get(i + 1).filter(|b| b.1.len() == 1) {
                lookahead[pos..pos + vs.len()].fill(Some(next[0]));
            }
        }
        pos += vs.len();
    }
    let p = Prenex { m, t, universe: a.universe, order, lookahead };
    Ok(p.run(0, &mut vec![None; s.names.len()]))
}

/// Outcome of guided evaluation with the number of distinct universal
/// tuples `(x1, ..., xk)` that were examined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GuidedEval {
    pub holds: bool,
    pub chains_examined: usize,
}

struct Guided {
    m: Compiled,
    t: Tables,
    k: usize,
    universe: usize,
    roots: Vec<usize>,
    children: Vec<Vec<usize>>,
    /// Nodes on the longest downward path from each element.
    height: Vec<usize>,
    seen: HashSet<Vec<usize>>,
}

impl Guided {
    /// Level `i` (1-based) is about to quantify `x_i` among `cands`.
    fn forall(&mut self, i: usize, cands: &[usize], asg: &mut Vec<Option<usize>>) -> bool {
        for &x in cands {
            // a failed guard makes the implication true
            if self.height[x] < self.k - i + 1 {
                continue;
            }
            asg[GuidedSentence::x(i)] = Some(x);
            if i == self.k {
                let chain: Vec<usize> = (1..=self.k).map(|j| asg[GuidedSentence::x(j)].unwrap()).collect();
                self.seen.insert(chain);
            }
            let ok = self.m.eval(&self.t, asg) == Some(true) || self.m.eval(&self.t, asg).is_none() && self.exists(i, asg);
            asg[GuidedSentence::x(i)] = None;
            if !ok {
                return false;
            }
        }
        true
    }

    fn exists(&mut self, i: usize, asg: &mut Vec<Option<usize>>) -> bool {
        let y = GuidedSentence::y(i);
        for e in 0..self.universe {
            asg[y] = Some(e);
            let ok = match self.m.eval(&self.t, asg) {
                Some(b) => b,
                None if i < self.k => {
                    let x = asg[GuidedSentence::x(i)].unwrap();
                    let cands = self.children[x].clone();
                    self.forall(i + 1, &cands, asg)
                }
                None => unreachable!("all variables assigned"),
            };
            if ok {
                asg[y] = None;
                return true;
            }
        }
        asg[y] = None;
        false
    }
}

pub fn eval_guided(a: &RelationalStructure, s: &GuidedSentence) -> Result<bool> {
    Ok(eval_guided_counted(a, s)?.holds)
}

/// Universal variables range only over roots and then children of the
/// previous one, so the guard is never materialized.
pub fn eval_guided_counted(a: &RelationalStructure, s: &GuidedSentence) -> Result<GuidedEval> {
    if s.matrix.var_bound() > 2 * s.k {
        return input("matrix mentions a variable beyond the k levels");
    }
    for (name, arity) in [("root", 1), ("parent", 2)] {
        match a.relations.get(name) {
            Some(r) if r.arity == arity => {}
            _ => return input(format!("structure lacks the {name} relation of arity {arity}")),
        }
    }
    let (m, t) = compile(a, &s.matrix)?;
    let n = a.universe;
    let mut children = vec![Vec::new(); n];
    for p in &a.relations["parent"].tuples {
        children[p[0]].push(p[1]);
    }
    let mut height = vec![0; n];
    // heights by repeated relaxation; a forest settles within n rounds
    for _ in 0..n {
        let mut changed = false;
        for x in 0..n {
            let h = 1 + children[x].iter().map(|&c| height[c]).max().unwrap_or(0);
            if h != height[x] && h <= n {
                height[x] = h;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let roots: Vec<usize> = a.relations["root"].tuples.iter().map(|x| x[0]).collect();
    let mut g = Guided { m, t, k: s.k, universe: n, roots, children, height, seen: HashSet::new() };
    if s.k == 0 {
        let holds = g.m.eval(&g.t, &[]).expect("closed matrix");
        return Ok(GuidedEval { holds, chains_examined: 0 });
    }
    let roots = g.roots.clone();
    let holds = g.forall(1, &roots, &mut vec![None; 2 * s.k]);
    Ok(GuidedEval { holds, chains_examined: g.seen.len() })
}

/// Root-to-depth-`k` chains of the forest given by `root` and `parent`.
pub fn count_guided_chains(a: &RelationalStructure, k: usize) -> usize {
    let mut children = vec![Vec::new(); a.universe];
    if let Some(r) = a.relations.get("parent") {
        for p in &r.tuples {
            children[p[0]].push(p[1]);
        }
    }
    fn count(x: usize, left: usize, ch: &[Vec<usize>]) -> usize {
        if left == 1 {
            1
        } else {
            ch[x].iter().map(|&c| count(c, left - 1, ch)).sum()
        }
    }
    match a.relations.get("root") {
        Some(r) if k > 0 => r.tuples.iter().map(|x| count(x[0], k, &children)).sum(),
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn structure(n: usize, rels: &[(&str, usize, &[&[usize]])]) -> RelationalStructure {
        let mut a = RelationalStructure::new(n);
        for (name, arity, tuples) in rels {
            a.declare(name, *arity).unwrap();
            for t in *tuples {
                a.insert(name, t).unwrap();
            }
        }
        a
    }

    fn sentence(blocks: Vec<(Quantifier, Vec<usize>)>, matrix: Fo) -> PrenexSentence {
        let n = blocks.iter().map(|b| b.1.len()).sum();
        PrenexSentence { names: (0..n).map(|i| format!("v{i}")).collect(), blocks, matrix }
    }

    #[test]
    fn prenex_basics() {
        let a = structure(2, &[("R", 1, &[])]);
        let s = sentence(vec![(Quantifier::Exists, vec![0])], Fo::Eq(0, 0));
        assert!(eval_prenex(&a, &s).unwrap());
        let s = sentence(vec![(Quantifier::Forall, vec![0])], Fo::atom("R", &[0]));
        assert!(!eval_prenex(&a, &s).unwrap());
        let s = sentence(vec![(Quantifier::Forall, vec![0])], Fo::atom("S", &[0]));
        assert!(eval_prenex(&a, &s).is_err());
        let bad = sentence(vec![(Quantifier::Exists, vec![0]), (Quantifier::Exists, vec![1])], Fo::True);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn prenex_alternation() {
        // every element has an R-successor, and some element is R-reached by all
        let a = structure(3, &[("R", 2, &[&[0, 1], &[1, 2], &[2, 2]])]);
        let all_succ = sentence(vec![(Quantifier::Forall, vec![0]), (Quantifier::Exists, vec![1])], Fo::atom("R", &[0, 1]));
        assert!(eval_prenex(&a, &all_succ).unwrap());
        let sink = sentence(vec![(Quantifier::Exists, vec![0]), (Quantifier::Forall, vec![1])], Fo::atom("R", &[1, 0]));
        assert!(!eval_prenex(&a, &sink).unwrap());
        assert_eq!(sink.sigma_level(), Some(2));
        assert_eq!(all_succ.sigma_level(), None);
    }

    #[test]
    fn guided_basics() {
        let a = structure(3, &[("root", 1, &[&[0]]), ("parent", 2, &[&[0, 1]]), ("forest", 1, &[&[0], &[1]])]);
        let s = GuidedSentence { k: 1, matrix: Fo::False };
        assert!(!eval_guided(&a, &s).unwrap());
        let s = GuidedSentence { k: 2, matrix: Fo::And(vec![Fo::atom("forest", &[0]), Fo::atom("forest", &[2]), Fo::Eq(1, 3)]) };
        let r = eval_guided_counted(&a, &s).unwrap();
        assert!(r.holds);
        assert!(r.chains_examined <= count_guided_chains(&a, 2));
        assert_eq!(eval_prenex(&a, &s.to_prenex()).unwrap(), r.holds);
        // no parent tuples: nothing reaches depth 2, so the guard always fails
        let flat = structure(2, &[("root", 1, &[&[0], &[1]]), ("parent", 2, &[])]);
        assert!(eval_guided(&flat, &GuidedSentence { k: 2, matrix: Fo::False }).unwrap());
        let bare = structure(2, &[("root", 1, &[])]);
        assert!(eval_guided(&bare, &GuidedSentence { k: 1, matrix: Fo::False }).is_err());
    }
}
