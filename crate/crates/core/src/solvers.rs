//! Exact BinCSP solvers. Every solver returns the lexicographically least
//! satisfying assignment (variables by id, values ascending).

use std::collections::HashMap;

use crate::error::{input, resource, Result};
use crate::instance::{Assignment, BinCsp, Value};
use crate::structure::{validate_elimination_forest, EliminationForest};

/// Default cap on the product of domain sizes for brute force.
pub const BRUTE_CAP: u128 = 1 << 40;

/// Backtracking over variables in id order and values ascending, checking
/// each new value against the already assigned neighbors.
pub fn solve_bruteforce(inst: &BinCsp) -> Result<Option<Assignment>> {
    solve_bruteforce_capped(inst, BRUTE_CAP)
}

pub fn solve_bruteforce_capped(inst: &BinCsp, cap: u128) -> Result<Option<Assignment>> {
    if inst.search_space() > cap {
        return resource(format!("search space {} exceeds {cap}", inst.search_space()));
    }
    let mut a = Vec::with_capacity(inst.n());
    Ok(brute_rec(inst, &mut a).then_some(a))
}

fn brute_rec(inst: &BinCsp, a: &mut Assignment) -> bool {
    let v = a.len();
    if v == inst.n() {
        return true;
    }
    for &x in inst.domain(v) {
        let fits = inst
            .graph()
            .neighbors(v)
            .iter()
            .all(|&w| w >= v || inst.allows(w, v, a[w], x));
        if fits {
            a.push(x);
            if brute_rec(inst, a) {
                return true;
            }
            a.pop();
        }
    }
    false
}

/// Fixes variables in id order to their smallest value that keeps the
/// instance feasible under `feasible` (which sees restricted domains).
fn lex_least(inst: &BinCsp, mut feasible: impl FnMut(&[Vec<Value>]) -> bool) -> Option<Assignment> {
    let mut doms: Vec<Vec<Value>> = inst.domains().to_vec();
    if !feasible(&doms) {
        return None;
    }
    for v in 0..inst.n() {
        let options = std::mem::take(&mut doms[v]);
        let pick = options.iter().copied().find(|&a| {
            doms[v] = vec![a];
            feasible(&doms)
        });
        doms[v] = vec![pick.expect("some value extends a feasible instance")];
    }
    Some(doms.into_iter().map(|d| d[0]).collect())
}

/// Dynamic programming over an elimination forest, memoized on the node and
/// the values of those ancestors that some vertex of its subtree touches.
struct ForestDp<'a> {
    inst: &'a BinCsp,
    children: Vec<Vec<usize>>,
    roots: Vec<usize>,
    /// neighbors of `v` that are its ancestors
    up: Vec<Vec<usize>>,
    /// ancestors constrained by the subtree of `v`, ascending
    keys: Vec<Vec<usize>>,
}

impl<'a> ForestDp<'a> {
    fn new(inst: &'a BinCsp, f: &EliminationForest) -> Self {
        let children = f.children();
        let up: Vec<Vec<usize>> = (0..inst.n())
            .map(|v| {
                inst.graph()
                    .neighbors(v)
                    .iter()
                    .copied()
                    .filter(|&w| f.is_ancestor(w, v))
                    .collect()
            })
            .collect();
        let mut keys = vec![Vec::new(); inst.n()];
        for v in f.preorder().into_iter().rev() {
            let mut k = up[v].clone();
            for &c in &children[v] {
                k.extend(keys[c].iter().copied().filter(|&x| x != v));
            }
            k.sort_unstable();
            k.dedup();
            keys[v] = k;
        }
        ForestDp { inst, children, roots: f.roots(), up, keys }
    }

    fn feasible(&self, doms: &[Vec<Value>]) -> bool {
        let mut memo = vec![HashMap::new(); self.inst.n()];
        let mut assign = vec![0 as Value; self.inst.n()];
        self.roots.iter().all(|&r| self.node(r, doms, &mut assign, &mut memo))
    }

    fn node(
        &self,
        v: usize,
        doms: &[Vec<Value>],
        assign: &mut [Value],
        memo: &mut [HashMap<Vec<Value>, bool>],
    ) -> bool {
        let key: Vec<Value> = self.keys[v].iter().map(|&x| assign[x]).collect();
        if let Some(&hit) = memo[v].get(&key) {
            return hit;
        }
        let mut ok = false;
        for &a in &doms[v] {
            if !self.up[v].iter().all(|&w| self.inst.allows(w, v, assign[w], a)) {
                continue;
            }
            assign[v] = a;
            if self.children[v].iter().all(|&c| self.node(c, doms, assign, memo)) {
                ok = true;
                break;
            }
        }
        memo[v].insert(key, ok);
        ok
    }
}

fn check_forest(inst: &BinCsp, f: &EliminationForest) -> Result<()> {
    if f.n() != inst.n() || !validate_elimination_forest(inst.graph(), f)? {
        return input("not an elimination forest of the constraint graph");
    }
    Ok(())
}

pub fn solve_by_elimination_forest(inst: &BinCsp, f: &EliminationForest) -> Result<Option<Assignment>> {
    check_forest(inst, f)?;
    let dp = ForestDp::new(inst, f);
    Ok(lex_least(inst, |doms| dp.feasible(doms)))
}

/// Calls `visit` on every assignment of `w` (in lexicographic order) that
/// is consistent inside `w`, stopping when it returns true.
fn for_each_cover_assignment(
    inst: &BinCsp,
    w: &[usize],
    doms: &[Vec<Value>],
    mut visit: impl FnMut(&[Value]) -> bool,
) -> bool {
    fn rec(
        inst: &BinCsp,
        w: &[usize],
        doms: &[Vec<Value>],
        vals: &mut Vec<Value>,
        visit: &mut dyn FnMut(&[Value]) -> bool,
    ) -> bool {
        let i = vals.len();
        if i == w.len() {
            return visit(vals);
        }
        for &a in &doms[w[i]] {
            if (0..i).all(|j| inst.allows(w[j], w[i], vals[j], a)) {
                vals.push(a);
                if rec(inst, w, doms, vals, visit) {
                    return true;
                }
                vals.pop();
            }
        }
        false
    }
    rec(inst, w, doms, &mut Vec::new(), &mut visit)
}

fn sorted_set(inst: &BinCsp, w: &[usize]) -> Result<Vec<usize>> {
    let mut w = w.to_vec();
    w.sort_unstable();
    w.dedup();
    if w.iter().any(|&v| v >= inst.n()) {
        return input("vertex set mentions a missing variable");
    }
    Ok(w)
}

/// Enumerates assignments of the cover; each vertex outside it only needs
/// one value compatible with its (covered) neighbors.
pub fn solve_by_vertex_cover(inst: &BinCsp, w: &[usize]) -> Result<Option<Assignment>> {
    let w = sorted_set(inst, w)?;
    if !inst.graph().is_vertex_cover(&w) {
        return input("W is not a vertex cover");
    }
    let outside = inst.graph().complement_of(&w);
    let feasible = |doms: &[Vec<Value>]| {
        for_each_cover_assignment(inst, &w, doms, |vals| {
            outside.iter().all(|&v| {
                doms[v].iter().any(|&a| {
                    inst.graph().neighbors(v).iter().all(|&u| {
                        let j = w.binary_search(&u).expect("neighbors of outside vertices are in W");
                        inst.allows(u, v, vals[j], a)
                    })
                })
            })
        })
    };
    Ok(lex_least(inst, feasible))
}

/// Enumerates assignments of `w`, filters the domains of `G - W` by the
/// constraints to `w`, and runs the forest DP on `G - W`. The forest is
/// indexed by position among the vertices outside `w`, ascending.
pub fn solve_by_modulator(inst: &BinCsp, w: &[usize], f: &EliminationForest) -> Result<Option<Assignment>> {
    let w = sorted_set(inst, w)?;
    let rest = inst.graph().complement_of(&w);
    let (sub, map) = inst.induced(&rest);
    check_forest(&sub, f)?;
    let dp = ForestDp::new(&sub, f);
    let feasible = |doms: &[Vec<Value>]| {
        for_each_cover_assignment(inst, &w, doms, |vals| {
            let filtered: Vec<Vec<Value>> = map
                .iter()
                .map(|&v| {
                    doms[v]
                        .iter()
                        .copied()
                        .filter(|&a| {
                            w.iter()
                                .zip(vals)
                                .all(|(&u, &b)| !inst.graph().has_edge(u, v) || inst.allows(u, v, b, a))
                        })
                        .collect()
                })
                .collect();
            dp.feasible(&filtered)
        })
    };
    Ok(lex_least(inst, feasible))
}
