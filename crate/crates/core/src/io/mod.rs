//! Text formats. Line formats share a few rules: blank lines and lines
//! starting with `#` are ignored, the first remaining line is a header,
//! ids are 0-based decimal, and parse errors carry 1-based line numbers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::formulas::{BooleanCircuit, Gate};
use crate::graph::Graph;
use crate::instance::{BinCsp, ListColoring, Precoloring, Value};
use crate::logic::RelationalStructure;
use crate::machine::{ArosMachine, Kind, Transition};
use crate::structure::{EdgeLabeling, EliminationForest, FatEliminationTree};
use crate::tree::OrderedTree;

mod sexpr;

pub use sexpr::{read_fo, read_guided, read_wsat, write_fo, write_guided, write_wsat};

pub(crate) fn perr<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

struct Line<'a> {
    no: usize,
    words: Vec<&'a str>,
}

impl Line<'_> {
    fn key(&self) -> &str {
        self.words[0]
    }

    fn arg<T: FromStr>(&self, i: usize, what: &str) -> Result<T> {
        match self.words.get(i) {
            None => perr(self.no, format!("missing {what}")),
            Some(w) => w.parse().or_else(|_| perr(self.no, format!("bad {what} `{w}`"))),
        }
    }

    /// Arguments from position `from` on.
    fn rest<T: FromStr>(&self, from: usize, what: &str) -> Result<Vec<T>> {
        (from..self.words.len()).map(|i| self.arg(i, what)).collect()
    }

    fn arity(&self, n: usize) -> Result<()> {
        if self.words.len() != n + 1 {
            return perr(self.no, format!("`{}` takes {n} arguments", self.key()));
        }
        Ok(())
    }

    fn id(&self, i: usize, n: usize, what: &str) -> Result<usize> {
        let v: usize = self.arg(i, what)?;
        if v >= n {
            return perr(self.no, format!("{what} {v} out of range (n = {n})"));
        }
        Ok(v)
    }
}

fn lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .map(|(i, l)| Line { no: i + 1, words: l.split_whitespace().collect() })
        .filter(|l| !l.words.is_empty() && !l.words[0].starts_with('#'))
        .collect()
}

/// Splits off the header line, checking its keyword.
fn header<'a, 'b>(ls: &'b [Line<'a>], key: &str) -> Result<(&'b Line<'a>, &'b [Line<'a>])> {
    match ls.split_first() {
        Some((h, rest)) if h.key() == key => Ok((h, rest)),
        Some((h, _)) => perr(h.no, format!("expected `{key}` header, found `{}`", h.key())),
        None => perr(1, format!("empty input, expected `{key}` header")),
    }
}

fn unknown<T>(l: &Line) -> Result<T> {
    perr(l.no, format!("unknown directive `{}`", l.key()))
}

pub fn read_bincsp(text: &str) -> Result<BinCsp> {
    let ls = lines(text);
    let (h, body) = header(&ls, "bincsp")?;
    h.arity(1)?;
    let n: usize = h.arg(1, "variable count")?;
    let mut domains: Vec<Option<Vec<Value>>> = vec![None; n];
    for l in body.iter().filter(|l| l.key() == "var") {
        let v = l.id(1, n, "variable")?;
        if domains[v].is_some() {
            return perr(l.no, format!("variable {v} declared twice"));
        }
        domains[v] = Some(l.rest(2, "value")?);
    }
    if let Some(v) = domains.iter().position(Option::is_none) {
        return perr(h.no, format!("variable {v} has no `var` line"));
    }
    let mut inst = BinCsp::new(domains.into_iter().flatten().collect());
    for l in body {
        match l.key() {
            "var" => {}
            "edge" => {
                l.arity(2)?;
                let (u, v) = (l.id(1, n, "variable")?, l.id(2, n, "variable")?);
                inst.add_edge(u, v).or_else(|e| perr(l.no, e.to_string()))?;
            }
            "allow" => {
                l.arity(4)?;
                let (u, v) = (l.id(1, n, "variable")?, l.id(2, n, "variable")?);
                let (a, b) = (l.arg(3, "value")?, l.arg(4, "value")?);
                inst.allow(u, v, a, b).or_else(|e| perr(l.no, e.to_string()))?;
            }
            _ => return unknown(l),
        }
    }
    Ok(inst)
}

pub fn write_bincsp(inst: &BinCsp) -> String {
    let mut s = format!("bincsp {}\n", inst.n());
    for v in 0..inst.n() {
        let _ = write!(s, "var {v}");
        for a in inst.domain(v) {
            let _ = write!(s, " {a}");
        }
        s.push('\n');
    }
    for (u, v) in inst.graph().edges() {
        let _ = writeln!(s, "edge {u} {v}");
        for (a, b) in inst.allowed_pairs(u, v) {
            let _ = writeln!(s, "allow {u} {v} {a} {b}");
        }
    }
    s
}

/// Graph, color count and lists of a `listcol` file, plus `pre` lines.
fn read_colouring(text: &str) -> Result<(Graph, usize, Vec<Option<Vec<Value>>>, BTreeMap<usize, Value>)> {
    let ls = lines(text);
    let (h, body) = header(&ls, "listcol")?;
    h.arity(2)?;
    let n: usize = h.arg(1, "vertex count")?;
    let colors: usize = h.arg(2, "color count")?;
    let mut g = Graph::new(n);
    let mut lists = vec![None; n];
    let mut pre = BTreeMap::new();
    for l in body {
        match l.key() {
            "list" => {
                let v = l.id(1, n, "vertex")?;
                let cs: Vec<Value> = l.rest(2, "color")?;
                if let Some(c) = cs.iter().find(|&&c| c as usize >= colors) {
                    return perr(l.no, format!("color {c} outside 0..{colors}"));
                }
                if lists[v].replace(cs).is_some() {
                    return perr(l.no, format!("vertex {v} has two lists"));
                }
            }
            "edge" => {
                l.arity(2)?;
                let (u, v) = (l.id(1, n, "vertex")?, l.id(2, n, "vertex")?);
                if u == v {
                    return perr(l.no, "loop edge");
                }
                g.add_edge(u, v);
            }
            "pre" => {
                l.arity(2)?;
                let v = l.id(1, n, "vertex")?;
                let c: Value = l.arg(2, "color")?;
                if c as usize >= colors {
                    return perr(l.no, format!("color {c} outside 0..{colors}"));
                }
                if pre.insert(v, c).is_some() {
                    return perr(l.no, format!("vertex {v} precolored twice"));
                }
            }
            _ => return unknown(l),
        }
    }
    Ok((g, colors, lists, pre))
}

/// Vertices without a `list` line get the full color set.
pub fn read_listcoloring(text: &str) -> Result<ListColoring> {
    let (g, colors, lists, pre) = read_colouring(text)?;
    if !pre.is_empty() {
        return perr(1, "`pre` lines belong in a precoloring file");
    }
    let all: Vec<Value> = (0..colors as Value).collect();
    let lists = lists.into_iter().map(|l| l.unwrap_or_else(|| all.clone())).collect();
    ListColoring::new(g, colors, lists)
}

pub fn write_listcoloring(lc: &ListColoring) -> String {
    let mut s = format!("listcol {} {}\n", lc.n(), lc.colors);
    for (v, list) in lc.lists.iter().enumerate() {
        let _ = write!(s, "list {v}");
        for c in list {
            let _ = write!(s, " {c}");
        }
        s.push('\n');
    }
    for (u, v) in lc.graph.edges() {
        let _ = writeln!(s, "edge {u} {v}");
    }
    s
}

/// `list` lines are accepted only when they name the full color set.
pub fn read_precoloring(text: &str) -> Result<Precoloring> {
    let (g, colors, lists, pre) = read_colouring(text)?;
    if lists.iter().flatten().any(|l| l.len() != colors) {
        return perr(1, "a precoloring file may only list the full color set");
    }
    Precoloring::new(g, colors, pre)
}

pub fn write_precoloring(p: &Precoloring) -> String {
    let mut s = format!("listcol {} {}\n", p.n(), p.colors);
    for (u, v) in p.graph.edges() {
        let _ = writeln!(s, "edge {u} {v}");
    }
    for (v, c) in &p.pre {
        let _ = writeln!(s, "pre {v} {c}");
    }
    s
}

/// `graph <n>` followed by `edge <u> <v>` lines.
pub fn read_graph(text: &str) -> Result<Graph> {
    let ls = lines(text);
    let (h, body) = header(&ls, "graph")?;
    h.arity(1)?;
    let n: usize = h.arg(1, "vertex count")?;
    let mut g = Graph::new(n);
    for l in body {
        if l.key() != "edge" {
            return unknown(l);
        }
        l.arity(2)?;
        let (u, v) = (l.id(1, n, "vertex")?, l.id(2, n, "vertex")?);
        if u == v {
            return perr(l.no, "loop edge");
        }
        g.add_edge(u, v);
    }
    Ok(g)
}

pub fn write_graph(g: &Graph) -> String {
    let mut s = format!("graph {}\n", g.n());
    for (u, v) in g.edges() {
        let _ = writeln!(s, "edge {u} {v}");
    }
    s
}

/// `set <v1> <v2> ...`; the set may be empty.
pub fn read_vertex_set(text: &str) -> Result<Vec<usize>> {
    let ls = lines(text);
    let (h, body) = header(&ls, "set")?;
    if let Some(l) = body.first() {
        return perr(l.no, "a vertex set is a single `set` line");
    }
    let mut vs: Vec<usize> = h.rest(1, "vertex")?;
    vs.sort_unstable();
    vs.dedup();
    Ok(vs)
}

pub fn write_vertex_set(vs: &[usize]) -> String {
    let mut s = String::from("set");
    for v in vs {
        let _ = write!(s, " {v}");
    }
    s.push('\n');
    s
}

/// Everything a `.tree` file can hold.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TreeFile {
    pub parent: Vec<Option<usize>>,
    pub bags: BTreeMap<usize, Vec<usize>>,
    pub labels: BTreeMap<usize, String>,
    pub annotations: BTreeMap<usize, (usize, usize)>,
}

pub fn read_tree_file(text: &str) -> Result<TreeFile> {
    let ls = lines(text);
    let (h, body) = header(&ls, "tree")?;
    h.arity(1)?;
    let n: usize = h.arg(1, "node count")?;
    let mut parent: Vec<Option<Option<usize>>> = vec![None; n];
    let mut out = TreeFile::default();
    for l in body {
        match l.key() {
            "node" => {
                l.arity(3)?;
                let v = l.id(1, n, "node")?;
                if l.words[2] != "parent" {
                    return perr(l.no, "expected `node <id> parent <pid|->`");
                }
                let p = if l.words[3] == "-" { None } else { Some(l.id(3, n, "parent")?) };
                if parent[v].replace(p).is_some() {
                    return perr(l.no, format!("node {v} given twice"));
                }
            }
            "bag" => {
                let v = l.id(1, n, "node")?;
                out.bags.insert(v, l.rest(2, "vertex")?);
            }
            "label" => {
                l.arity(3)?;
                let (u, v) = (l.id(1, n, "node")?, l.id(2, n, "node")?);
                if parent[v] != Some(Some(u)) {
                    return perr(l.no, format!("{u} is not the parent of {v}"));
                }
                let w = if l.words[3] == "-" { "" } else { l.words[3] };
                if !w.chars().all(|c| c == '0' || c == '1') {
                    return perr(l.no, format!("label `{w}` is not a bit string"));
                }
                out.labels.insert(v, w.to_string());
            }
            "ut" => {
                l.arity(3)?;
                let v = l.id(1, n, "node")?;
                out.annotations.insert(v, (l.arg(2, "n")?, l.arg(3, "k")?));
            }
            _ => return unknown(l),
        }
    }
    if let Some(v) = parent.iter().position(Option::is_none) {
        return perr(h.no, format!("node {v} has no `node` line"));
    }
    out.parent = parent.into_iter().flatten().collect();
    EliminationForest::new(out.parent.clone()).or_else(|e| perr(h.no, e.to_string()))?;
    Ok(out)
}

fn write_parents(s: &mut String, parent: &[Option<usize>]) {
    let _ = writeln!(s, "tree {}", parent.len());
    for (v, p) in parent.iter().enumerate() {
        match p {
            Some(p) => _ = writeln!(s, "node {v} parent {p}"),
            None => _ = writeln!(s, "node {v} parent -"),
        }
    }
}

pub fn read_forest(text: &str) -> Result<EliminationForest> {
    EliminationForest::new(read_tree_file(text)?.parent)
}

pub fn write_forest(f: &EliminationForest) -> String {
    let mut s = String::new();
    write_parents(&mut s, f.parents());
    s
}

/// Nodes without a `bag` line get an empty bag.
pub fn read_fat_tree(text: &str) -> Result<FatEliminationTree> {
    let t = read_tree_file(text)?;
    let n = t.parent.len();
    let bags = (0..n).map(|v| t.bags.get(&v).cloned().unwrap_or_default()).collect();
    Ok(FatEliminationTree { parent: t.parent, bags })
}

pub fn write_fat_tree(w: &FatEliminationTree) -> String {
    let mut s = String::new();
    write_parents(&mut s, &w.parent);
    for (v, bag) in w.bags.iter().enumerate() {
        let _ = write!(s, "bag {v}");
        for u in bag {
            let _ = write!(s, " {u}");
        }
        s.push('\n');
    }
    s
}

/// Node 0 must be the root; children are ordered by id.
pub fn read_ordered_tree(text: &str) -> Result<OrderedTree> {
    let t = read_tree_file(text)?;
    OrderedTree::from_parents(&t.parent).ok_or(Error::Parse { line: 1, msg: "not a tree rooted at node 0".into() })
}

/// The tree with its child order renumbered in preorder, so reading it
/// back gives the same ordered tree, plus optional labels and annotations.
pub fn write_ordered_tree(t: &OrderedTree, labels: Option<&EdgeLabeling>, ann: Option<&[(usize, usize)]>) -> String {
    let order = t.preorder();
    let mut id = vec![0; t.len()];
    for (i, &v) in order.iter().enumerate() {
        id[v] = i;
    }
    let parent: Vec<Option<usize>> = order.iter().map(|&v| t.parent(v).map(|p| id[p])).collect();
    let mut s = String::new();
    write_parents(&mut s, &parent);
    if let Some(lab) = labels {
        for &v in order.iter().skip(1) {
            let w = lab.label(v);
            let _ = writeln!(s, "label {} {} {}", id[t.parent(v).unwrap()], id[v], if w.is_empty() { "-" } else { w });
        }
    }
    if let Some(ann) = ann {
        for &v in &order {
            let _ = writeln!(s, "ut {} {} {}", id[v], ann[v].0, ann[v].1);
        }
    }
    s
}

/// A circuit with its weight: `inputs <n>`, `weight <k>`, gate lines
/// `g<id> = AND g.. | OR g.. | NOT g | IN x<j>`, then `out g<id>`. Gates
/// may be listed in any order but ids must be `0..m`.
pub fn read_circuit(text: &str) -> Result<(BooleanCircuit, usize)> {
    let ls = lines(text);
    let (h, body) = header(&ls, "inputs")?;
    h.arity(1)?;
    let n: usize = h.arg(1, "input count")?;
    let mut k = None;
    let mut gates: BTreeMap<usize, Gate> = BTreeMap::new();
    let mut output = None;
    let gate_ref = |l: &Line, w: &str| -> Result<usize> {
        match w.strip_prefix('g').and_then(|x| x.parse().ok()) {
            Some(g) => Ok(g),
            None => perr(l.no, format!("bad gate reference `{w}`")),
        }
    };
    for l in body {
        match l.key() {
            "weight" => {
                l.arity(1)?;
                k = Some(l.arg(1, "weight")?);
            }
            "out" => {
                l.arity(1)?;
                output = Some((gate_ref(l, l.words[1])?, l.no));
            }
            w if w.starts_with('g') => {
                let id = gate_ref(l, w)?;
                if l.words.get(1) != Some(&"=") || l.words.len() < 3 {
                    return perr(l.no, "expected `g<id> = <KIND> ...`");
                }
                let ins = l.words[3..].iter().map(|w| gate_ref(l, w)).collect::<Result<Vec<_>>>();
                let g = match l.words[2] {
                    "AND" => Gate::And(ins?),
                    "OR" => Gate::Or(ins?),
                    "NOT" => {
                        l.arity(3)?;
                        Gate::Not(ins?[0])
                    }
                    "IN" => {
                        l.arity(3)?;
                        match l.words[3].strip_prefix('x').and_then(|x| x.parse::<usize>().ok()) {
                            Some(j) if j < n => Gate::Input(j),
                            _ => return perr(l.no, format!("bad input `{}`", l.words[3])),
                        }
                    }
                    other => return perr(l.no, format!("unknown gate kind `{other}`")),
                };
                if gates.insert(id, g).is_some() {
                    return perr(l.no, format!("gate g{id} defined twice"));
                }
            }
            _ => return unknown(l),
        }
    }
    let m = gates.len();
    if let Some((&id, _)) = gates.iter().find(|(&id, _)| id >= m) {
        return perr(h.no, format!("gate ids must be 0..{m}, found g{id}"));
    }
    let Some((output, out_line)) = output else { return perr(h.no, "missing `out` line") };
    if output >= m {
        return perr(out_line, format!("output g{output} is not defined"));
    }
    let c = BooleanCircuit { n, gates: gates.into_values().collect(), output };
    c.topological_order().or_else(|e| perr(h.no, e.to_string()))?;
    Ok((c, k.unwrap_or(0)))
}

pub fn write_circuit(c: &BooleanCircuit, k: usize) -> String {
    let mut s = format!("inputs {}\nweight {k}\n", c.n);
    for (i, g) in c.gates.iter().enumerate() {
        let _ = write!(s, "g{i} =");
        match g {
            Gate::Input(j) => _ = write!(s, " IN x{j}"),
            Gate::Not(x) => _ = write!(s, " NOT g{x}"),
            Gate::And(ins) | Gate::Or(ins) => {
                s.push_str(if matches!(g, Gate::And(_)) { " AND" } else { " OR" });
                for x in ins {
                    let _ = write!(s, " g{x}");
                }
            }
        }
        s.push('\n');
    }
    let _ = writeln!(s, "out g{}", c.output);
    s
}

/// `state <id> <E|U|D> [final]`, `trans <state> <bit|-> <next> <push|->
/// [<bits|->]` where the optional last field replaces the work tape, and
/// optionally `start <id>` (default 0). State ids must be `0..m`.
pub fn read_arosm(text: &str) -> Result<ArosMachine> {
    let ls = lines(text);
    let mut kinds: BTreeMap<usize, Kind> = BTreeMap::new();
    let mut start = 0;
    let mut trans = BTreeMap::new();
    let bit = |l: &Line, i: usize| -> Result<Option<bool>> {
        match l.words.get(i).copied() {
            Some("-") => Ok(None),
            Some("0") => Ok(Some(false)),
            Some("1") => Ok(Some(true)),
            Some(w) => perr(l.no, format!("expected 0, 1 or -, found `{w}`")),
            None => perr(l.no, "missing bit"),
        }
    };
    for l in &ls {
        match l.key() {
            "state" => {
                let id: usize = l.arg(1, "state")?;
                let kind = match (l.words.get(2).copied(), l.words.get(3).copied(), l.words.len()) {
                    (Some(_), Some("final"), 4) => Kind::Final,
                    (Some("E"), None, 3) => Kind::Existential,
                    (Some("U"), None, 3) => Kind::Universal,
                    (Some("D"), None, 3) => Kind::Deterministic,
                    _ => return perr(l.no, "expected `state <id> <E|U|D> [final]`"),
                };
                if kinds.insert(id, kind).is_some() {
                    return perr(l.no, format!("state {id} declared twice"));
                }
            }
            "start" => {
                l.arity(1)?;
                start = l.arg(1, "state")?;
            }
            "trans" => {
                if !(5..=6).contains(&l.words.len()) {
                    return perr(l.no, "expected `trans <state> <bit|-> <next> <push|-> [<bits|->]`");
                }
                let s: usize = l.arg(1, "state")?;
                let b = bit(l, 2)?;
                let next = l.arg(3, "state")?;
                let push = bit(l, 4)?;
                let write = match l.words.get(5).copied() {
                    None => None,
                    Some("-") => Some(Vec::new()),
                    Some(w) if w.chars().all(|c| c == '0' || c == '1') => Some(w.chars().map(|c| c == '1').collect()),
                    Some(w) => return perr(l.no, format!("work tape `{w}` is not a bit string")),
                };
                if trans.insert((s, b), Transition { next, push, write }).is_some() {
                    return perr(l.no, format!("duplicate transition from state {s}"));
                }
            }
            _ => return unknown(l),
        }
    }
    let m = kinds.len();
    if let Some((&id, _)) = kinds.iter().find(|(&id, _)| id >= m) {
        return perr(1, format!("state ids must be 0..{m}, found {id}"));
    }
    ArosMachine::new(kinds.into_values().collect(), start, trans).or_else(|e| perr(1, e.to_string()))
}

pub fn write_arosm(m: &ArosMachine) -> String {
    let mut s = String::new();
    for (i, k) in m.kinds.iter().enumerate() {
        let tag = match k {
            Kind::Existential => "E",
            Kind::Universal => "U",
            Kind::Deterministic => "D",
            Kind::Final => "D final",
        };
        let _ = writeln!(s, "state {i} {tag}");
    }
    if m.start != 0 {
        let _ = writeln!(s, "start {}", m.start);
    }
    let bit = |b: Option<bool>| match b {
        None => "-",
        Some(false) => "0",
        Some(true) => "1",
    };
    for (&(st, b), t) in &m.trans {
        let _ = write!(s, "trans {st} {} {} {}", bit(b), t.next, bit(t.push));
        if let Some(w) = &t.write {
            let w: String = w.iter().map(|&x| if x { '1' } else { '0' }).collect();
            let _ = write!(s, " {}", if w.is_empty() { "-" } else { &w });
        }
        s.push('\n');
    }
    s
}

pub fn read_structure(text: &str) -> Result<RelationalStructure> {
    let ls = lines(text);
    let (h, body) = header(&ls, "universe")?;
    h.arity(1)?;
    let mut a = RelationalStructure::new(h.arg(1, "universe size")?);
    for l in body {
        match l.key() {
            "rel" => {
                l.arity(2)?;
                a.declare(l.words[1], l.arg(2, "arity")?).or_else(|e| perr(l.no, e.to_string()))?;
            }
            "tup" => {
                let name = l.words.get(1).copied().unwrap_or("");
                let t: Vec<usize> = l.rest(2, "element")?;
                a.insert(name, &t).or_else(|e| perr(l.no, e.to_string()))?;
            }
            _ => return unknown(l),
        }
    }
    Ok(a)
}

pub fn write_structure(a: &RelationalStructure) -> String {
    let mut s = format!("universe {}\n", a.universe);
    for (name, r) in &a.relations {
        let _ = writeln!(s, "rel {name} {}", r.arity);
    }
    for (name, r) in &a.relations {
        for t in &r.tuples {
            let _ = write!(s, "tup {name}");
            for e in t {
                let _ = write!(s, " {e}");
            }
            s.push('\n');
        }
    }
    s
}
