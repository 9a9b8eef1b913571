use std::collections::BTreeMap;

use serde::Serialize;

use super::listcol::sorted_vertices;
use crate::error::{input, Result};
use crate::graph::Graph;
use crate::instance::{listcoloring_to_bincsp, ListColoring, Precoloring, Value};
use crate::solvers::solve_by_elimination_forest;
use crate::structure::{treedepth_exact, validate_elimination_forest, EliminationForest, TREEDEPTH_CAP};

/// Precoloring Extension instance with a modulator and an elimination forest
/// of `G - W`, indexed by position outside `W`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrecolExt {
    pub pre: Precoloring,
    pub w: Vec<usize>,
    pub forest: EliminationForest,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum KernelOutcome {
    Verdict(bool),
    /// Vertex `i` of the kernel is vertex `map[i]` of the input.
    Kernel { lc: ListColoring, map: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum StripOutcome {
    Verdict(bool),
    /// The forest is indexed by position of the vertices outside `s` in
    /// the reduced graph; vertex `i` there is `map[i]` of the input.
    Reduced { lc: ListColoring, s: Vec<usize>, forest: EliminationForest, map: Vec<usize> },
}

fn check_forest(g: &Graph, w: &[usize], f: &EliminationForest) -> Result<Vec<usize>> {
    let rest = g.complement_of(w);
    let (sub, _) = g.induced(&rest);
    if !validate_elimination_forest(&sub, f)? {
        return input("not an elimination forest of G - W");
    }
    Ok(rest)
}

/// List Coloring to Precoloring Extension: every color `c` missing from
/// `L(v)` becomes a pendant neighbour of `v` precolored `c`. Pendants of
/// vertices outside `W` hang below them in the forest, pendants of `W`
/// vertices are new roots, so the depth grows by at most one.
pub fn listcoloring_to_precolext(lc: &ListColoring, w: &[usize], f: &EliminationForest) -> Result<PrecolExt> {
    let w = sorted_vertices(lc.n(), w)?;
    let rest = check_forest(&lc.graph, &w, f)?;
    let mut pos = vec![None; lc.n()];
    for (i, &v) in rest.iter().enumerate() {
        pos[v] = Some(i);
    }
    let mut g = lc.graph.clone();
    let mut pre = BTreeMap::new();
    let mut parent = f.parents().to_vec();
    for v in 0..lc.n() {
        for c in 0..lc.colors as Value {
            if lc.lists[v].binary_search(&c).is_err() {
                let a = g.add_vertex();
                g.add_edge(a, v);
                pre.insert(a, c);
                parent.push(pos[v]);
            }
        }
    }
    let forest = EliminationForest::new(parent)?;
    Ok(PrecolExt { pre: Precoloring::new(g, lc.colors, pre)?, w, forest })
}

fn precoloring_is_proper(pre: &Precoloring) -> bool {
    pre.graph.edges().iter().all(|(u, v)| match (pre.pre.get(u), pre.pre.get(v)) {
        (Some(a), Some(b)) => a != b,
        _ => true,
    })
}

/// Decides the instance through the CSP forest DP. `top` is eliminated
/// first as a chain; the remaining vertices use `below`, a forest over
/// them in ascending order, hung under the last vertex of `top`.
fn solve_direct(pre: &Precoloring, top: &[usize], below: Option<&EliminationForest>) -> Result<bool> {
    let lc = pre.as_list_coloring();
    let inst = listcoloring_to_bincsp(&lc);
    let forest = if lc.n() <= TREEDEPTH_CAP {
        treedepth_exact(&lc.graph)?.1
    } else {
        let rest = lc.graph.complement_of(top);
        let mut parent = vec![None; lc.n()];
        for i in 1..top.len() {
            parent[top[i]] = Some(top[i - 1]);
        }
        let hook = top.last().copied();
        match below {
            Some(f) => {
                for (i, &v) in rest.iter().enumerate() {
                    parent[v] = f.parent(i).map(|p| rest[p]).or(hook);
                }
            }
            None => {
                for &v in &rest {
                    parent[v] = hook;
                }
            }
        }
        EliminationForest::new(parent)?
    };
    Ok(solve_by_elimination_forest(&inst, &forest)?.is_some())
}

/// Lists of the uncolored vertices: all colors minus those of precolored
/// neighbours.
fn residual_lists(pre: &Precoloring, keep: &[usize]) -> Vec<Vec<Value>> {
    keep.iter()
        .map(|&v| {
            (0..pre.colors as Value)
                .filter(|c| !pre.graph.neighbors(v).iter().any(|u| pre.pre.get(u) == Some(c)))
                .collect()
        })
        .collect()
}

/// Kernel for Precoloring Extension by vertex cover `S`, `k = |S|`.
///
/// With at most `k` colors the instance is solved outright. Otherwise the
/// uncolored independent vertices (at most `k` neighbours) and the
/// uncolored cover vertices with at least `k` residual colors can always be
/// colored last, so the kernel keeps the remaining cover vertices with
/// their residual lists. A conflict inside the precoloring is reported as
/// a negative verdict.
pub fn precolext_vc_kernel(pre: &Precoloring, s: &[usize]) -> Result<KernelOutcome> {
    let s = sorted_vertices(pre.n(), s)?;
    if !pre.graph.is_vertex_cover(&s) {
        return input("S is not a vertex cover");
    }
    let k = s.len();
    if !precoloring_is_proper(pre) {
        return Ok(KernelOutcome::Verdict(false));
    }
    if pre.colors <= k {
        return Ok(KernelOutcome::Verdict(solve_direct(pre, &s, None)?));
    }
    let open: Vec<usize> = s.iter().copied().filter(|v| !pre.pre.contains_key(v)).collect();
    let lists = residual_lists(pre, &open);
    let (map, lists): (Vec<usize>, Vec<Vec<Value>>) =
        open.into_iter().zip(lists).filter(|(_, l)| l.len() < k).unzip();
    let (g, _) = pre.graph.induced(&map);
    Ok(KernelOutcome::Kernel { lc: ListColoring::new(g, pre.colors, lists)?, map })
}

/// Shrinks Precoloring Extension with modulator `S` (`k = |S|`) and a
/// forest of `G - S` of depth `d` to List Coloring with forest depth at
/// most `d - 1`.
///
/// With at most `d + k` colors the instance is solved outright. Otherwise
/// uncolored forest leaves have at most `d + k - 1` neighbours and are
/// stripped repeatedly; every remaining leaf is then precolored, and all
/// precolored vertices leave through the residual lists of their
/// neighbours.
pub fn precolext_modtd_strip(pre: &Precoloring, s: &[usize], f: &EliminationForest) -> Result<StripOutcome> {
    let s = sorted_vertices(pre.n(), s)?;
    let rest = check_forest(&pre.graph, &s, f)?;
    let d = f.depth();
    if !precoloring_is_proper(pre) {
        return Ok(StripOutcome::Verdict(false));
    }
    if pre.colors <= d + s.len() {
        return Ok(StripOutcome::Verdict(solve_direct(pre, &s, Some(f))?));
    }
    let mut alive = vec![true; rest.len()];
    let mut live_children = vec![0usize; rest.len()];
    for i in 0..rest.len() {
        if let Some(p) = f.parent(i) {
            live_children[p] += 1;
        }
    }
    let mut stack: Vec<usize> =
        (0..rest.len()).filter(|&i| live_children[i] == 0 && !pre.pre.contains_key(&rest[i])).collect();
    while let Some(i) = stack.pop() {
        alive[i] = false;
        if let Some(p) = f.parent(i) {
            live_children[p] -= 1;
            if live_children[p] == 0 && !pre.pre.contains_key(&rest[p]) {
                stack.push(p);
            }
        }
    }
    let keep_rest: Vec<usize> = (0..rest.len()).filter(|&i| alive[i] && !pre.pre.contains_key(&rest[i])).collect();
    let s_open: Vec<usize> = s.iter().copied().filter(|v| !pre.pre.contains_key(v)).collect();
    let mut map: Vec<usize> = s_open.iter().copied().chain(keep_rest.iter().map(|&i| rest[i])).collect();
    map.sort_unstable();
    let lists = residual_lists(pre, &map);
    let (g, _) = pre.graph.induced(&map);
    let new_s: Vec<usize> = (0..map.len()).filter(|&i| s_open.binary_search(&map[i]).is_ok()).collect();
    let mut local = vec![None; rest.len()];
    for (j, &i) in keep_rest.iter().enumerate() {
        local[i] = Some(j);
    }
    let parent = keep_rest
        .iter()
        .map(|&i| {
            let mut p = f.parent(i);
            while let Some(q) = p {
                if local[q].is_some() {
                    break;
                }
                p = f.parent(q);
            }
            p.and_then(|q| local[q])
        })
        .collect();
    Ok(StripOutcome::Reduced {
        lc: ListColoring::new(g, pre.colors, lists)?,
        s: new_s,
        forest: EliminationForest::new(parent)?,
        map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::random_list_coloring;
    use crate::structure::{modulator_to_treedepth, vertex_cover_exact};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_precoloring(rng: &mut ChaCha8Rng, n: usize, colors: usize) -> Precoloring {
        let lc = random_list_coloring(rng, n, colors, 0.45, 1.0);
        let mut pre = BTreeMap::new();
        for v in 0..n {
            if rng.gen_bool(0.4) {
                pre.insert(v, rng.gen_range(0..colors as Value));
            }
        }
        Precoloring::new(lc.graph, colors, pre).unwrap()
    }

    #[test]
    fn pendants_encode_lists() {
        let lc = ListColoring::new(Graph::path(2), 2, vec![vec![0], vec![]]).unwrap();
        let out = listcoloring_to_precolext(&lc, &[0], &EliminationForest::flat(1)).unwrap();
        assert_eq!(out.pre.n(), 5);
        assert_eq!(out.forest.depth(), 2);
        assert!(out.pre.solve_bruteforce().is_none());
        let full = ListColoring::new(Graph::path(2), 2, vec![vec![0, 1]; 2]).unwrap();
        assert_eq!(listcoloring_to_precolext(&full, &[0], &EliminationForest::flat(1)).unwrap().pre.n(), 2);
    }

    #[test]
    fn pendant_construction_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for trial in 0..60 {
            let d = 1 + trial % 2;
            let n = rng.gen_range(1..=6);
            let colors = rng.gen_range(1..=3);
            let lc = random_list_coloring(&mut rng, n, colors, 0.5, 0.7);
            let m = modulator_to_treedepth(&lc.graph, d, n).unwrap().unwrap();
            let out = listcoloring_to_precolext(&lc, &m.set, &m.forest).unwrap();
            let g = &out.pre.graph;
            let (sub, _) = g.induced(&g.complement_of(&out.w));
            assert!(validate_elimination_forest(&sub, &out.forest).unwrap());
            assert!(out.forest.depth() <= m.forest.depth() + 1);
            assert_eq!(out.pre.solve_bruteforce().is_some(), lc.solve_bruteforce().is_some());
        }
    }

    #[test]
    fn kernel_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..150 {
            let n = rng.gen_range(1..=7);
            let colors = rng.gen_range(1..=5);
            let pre = random_precoloring(&mut rng, n, colors);
            let s = vertex_cover_exact(&pre.graph, n).unwrap();
            let want = pre.solve_bruteforce().is_some();
            match precolext_vc_kernel(&pre, &s).unwrap() {
                KernelOutcome::Verdict(v) => assert_eq!(v, want),
                KernelOutcome::Kernel { lc, map } => {
                    assert!(map.len() <= s.len());
                    assert_eq!(lc.solve_bruteforce().is_some(), want);
                }
            }
        }
    }

    #[test]
    fn strip_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for trial in 0..150 {
            let d = 1 + trial % 3;
            let n = rng.gen_range(1..=7);
            let colors = rng.gen_range(1..=6);
            let pre = random_precoloring(&mut rng, n, colors);
            let m = modulator_to_treedepth(&pre.graph, d, n).unwrap().unwrap();
            let want = pre.solve_bruteforce().is_some();
            match precolext_modtd_strip(&pre, &m.set, &m.forest).unwrap() {
                StripOutcome::Verdict(v) => assert_eq!(v, want),
                StripOutcome::Reduced { lc, s, forest, .. } => {
                    let (sub, _) = lc.graph.induced(&lc.graph.complement_of(&s));
                    assert!(validate_elimination_forest(&sub, &forest).unwrap());
                    assert!(forest.depth() + 1 <= m.forest.depth().max(1));
                    assert_eq!(lc.solve_bruteforce().is_some(), want);
                }
            }
        }
    }

    #[test]
    fn nothing_precolored_strips_everything() {
        let pre = Precoloring::new(Graph::path(4), 5, BTreeMap::new()).unwrap();
        let f = EliminationForest::new(vec![Some(1), None, Some(1), Some(2)]).unwrap();
        match precolext_modtd_strip(&pre, &[], &f).unwrap() {
            StripOutcome::Reduced { lc, .. } => assert_eq!(lc.n(), 0),
            other => panic!("{other:?}"),
        }
    }
}
