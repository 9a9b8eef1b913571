use std::collections::{BTreeMap, BTreeSet};

use super::WsatEncoding;
use crate::error::{input, Result};
use crate::formulas::{and, lit, or, Node, NormalizedFormula, WeightedSatInstance};
use crate::instance::{ListColoring, Value};

type Tok = (Value, Value);
type Pred = Box<dyn Fn(Tok, Tok) -> bool>;

/// Clause builder: variables carry names, clauses are signed literal lists.
struct Cnf {
    names: Vec<String>,
    clauses: Vec<Node>,
}

impl Cnf {
    fn var(&mut self, name: String) -> usize {
        self.names.push(name);
        self.names.len() - 1
    }

    fn clause(&mut self, lits: impl IntoIterator<Item = (usize, bool)>) {
        self.clauses.push(or(lits.into_iter().map(|(v, p)| lit(v, p)).collect()));
    }

    fn at_most_one_pair(&mut self, a: usize, b: usize) {
        self.clause([(a, false), (b, false)]);
    }
}

/// One auxiliary vertex: its list and the variable of each list entry.
struct Aux {
    list: Vec<Tok>,
    vars: Vec<usize>,
}

pub(crate) fn sorted_vertices(n: usize, w: &[usize]) -> Result<Vec<usize>> {
    let mut s = w.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.len() != w.len() || s.last().is_some_and(|&v| v >= n) {
        return input("modulator must list distinct vertices of the instance");
    }
    Ok(s)
}

/// List Coloring with vertex cover `W` to weighted 2-normalized
/// satisfiability (a CNF) with weight `k + 4 Σ |W_j|`.
///
/// Outside vertices are grouped by their neighbourhood `W_j`. Each group
/// gets copies of `W_j`, the copied colors in sorted order, the copy
/// permutation, and the interval endpoints between consecutive sorted
/// colors, with one wrap-around interval covering the colors below the
/// minimum or above the maximum. An outside vertex is colorable iff one of
/// its colors lies in one of these intervals.
pub fn listcoloring_vc_to_wsat2(lc: &ListColoring, w: &[usize]) -> Result<WsatEncoding> {
    let w = sorted_vertices(lc.n(), w)?;
    if !lc.graph.is_vertex_cover(&w) {
        return input("W is not a vertex cover");
    }
    let colors = lc.colors as Value;
    let mut cnf = Cnf { names: Vec::new(), clauses: Vec::new() };

    let mut x: BTreeMap<(usize, Value), usize> = BTreeMap::new();
    for &u in &w {
        for &c in &lc.lists[u] {
            let id = cnf.var(format!("x[{u}={c}]"));
            x.insert((u, c), id);
        }
        cnf.clause(lc.lists[u].iter().map(|&c| (x[&(u, c)], true)));
    }
    for (i, &u) in w.iter().enumerate() {
        for &v in &w[i + 1..] {
            if lc.graph.has_edge(u, v) {
                for &c in &lc.lists[u] {
                    if let Some(&b) = x.get(&(v, c)) {
                        cnf.at_most_one_pair(x[&(u, c)], b);
                    }
                }
            }
        }
    }

    let mut classes: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for v in lc.graph.complement_of(&w) {
        classes.entry(lc.graph.neighbors(v).to_vec()).or_default().push(v);
    }
    let mut weight = w.len();
    for (j, (nbhd, members)) in classes.iter().enumerate() {
        let m = nbhd.len();
        if m == 0 {
            for &v in members {
                if lc.lists[v].is_empty() {
                    cnf.clause([]);
                }
            }
            continue;
        }
        weight += 4 * m;
        let all: Vec<Value> = (0..colors).collect();
        let mut lists: Vec<(String, Vec<Tok>)> = Vec::new();
        for &u in nbhd {
            lists.push((format!("copy{u}"), lc.lists[u].iter().map(|&c| (c, 0)).collect()));
        }
        for i in 0..m {
            lists.push((format!("sorted{i}"), all.iter().map(|&c| (c, 0)).collect()));
        }
        for i in 0..m {
            let pairs = (0..m as Value).flat_map(|s| all.iter().map(move |&c| (s, c))).collect();
            lists.push((format!("source{i}"), pairs));
        }
        for i in 0..m - 1 {
            let pairs = all.iter().flat_map(|&a| all.iter().filter(move |&&b| a <= b).map(move |&b| (a, b))).collect();
            lists.push((format!("gap{i}"), pairs));
        }
        let wrap = all.iter().flat_map(|&a| all.iter().filter(move |&&b| a >= b).map(move |&b| (a, b))).collect();
        lists.push(("wrap".to_string(), wrap));

        let aux: Vec<Aux> = lists
            .into_iter()
            .map(|(label, list)| {
                let vars = list.iter().map(|t| cnf.var(format!("x{j}[{label}={},{}]", t.0, t.1))).collect();
                Aux { list, vars }
            })
            .collect();
        for a in &aux {
            cnf.clause(a.vars.iter().map(|&v| (v, true)));
        }

        let (copy, sorted, source) = (|i: usize| i, |i: usize| m + i, |i: usize| 2 * m + i);
        let gap = |i: usize| 3 * m + i;
        let wrap = 4 * m - 1;
        let mut rules: Vec<(usize, usize, Pred)> = Vec::new();
        for i in 0..m {
            for i2 in i + 1..m {
                if lc.graph.has_edge(nbhd[i], nbhd[i2]) {
                    rules.push((copy(i), copy(i2), Box::new(|a, b| a.0 != b.0)));
                }
                rules.push((source(i), source(i2), Box::new(|a, b| a.0 != b.0)));
            }
            for i2 in 0..m {
                let me = i as Value;
                rules.push((copy(i), source(i2), Box::new(move |a, s| s.0 != me || a.0 == s.1)));
            }
            rules.push((sorted(i), source(i), Box::new(|a, s| a.0 == s.1)));
        }
        for i in 0..m - 1 {
            rules.push((sorted(i), gap(i), Box::new(|a, p| a.0 == p.0)));
            rules.push((sorted(i + 1), gap(i), Box::new(|a, p| a.0 == p.1)));
        }
        rules.push((sorted(0), wrap, Box::new(|a, p| a.0 == p.1)));
        rules.push((sorted(m - 1), wrap, Box::new(|a, p| a.0 == p.0)));
        for (u, v, ok) in &rules {
            for (ta, &va) in aux[*u].list.iter().zip(&aux[*u].vars) {
                for (tb, &vb) in aux[*v].list.iter().zip(&aux[*v].vars) {
                    if !ok(*ta, *tb) {
                        cnf.at_most_one_pair(va, vb);
                    }
                }
            }
        }

        for &v in members {
            let mut free = BTreeSet::new();
            for &c in &lc.lists[v] {
                for i in 0..m - 1 {
                    let g = &aux[gap(i)];
                    free.extend(g.list.iter().zip(&g.vars).filter(|(p, _)| p.0 < c && c < p.1).map(|(_, &x)| x));
                }
                let r = &aux[wrap];
                free.extend(r.list.iter().zip(&r.vars).filter(|(p, _)| c > p.0 || c < p.1).map(|(_, &x)| x));
            }
            cnf.clause(free.into_iter().map(|x| (x, true)));
        }

        for (i, &u) in nbhd.iter().enumerate() {
            let cp = &aux[copy(i)];
            for (t, &xc) in cp.list.iter().zip(&cp.vars) {
                for &c2 in &lc.lists[u] {
                    if c2 != t.0 {
                        let orig = x[&(u, c2)];
                        cnf.at_most_one_pair(xc, orig);
                    }
                }
            }
        }
    }
    let formula = NormalizedFormula::new(cnf.names.len(), and(cnf.clauses))?;
    Ok(WsatEncoding { wsat: WeightedSatInstance { formula, k: weight }, names: cnf.names })
}
