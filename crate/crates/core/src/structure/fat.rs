use std::collections::HashMap;

use serde::Serialize;

use super::{check_cap, SEARCH_CAP};
use crate::error::{input, Result};
use crate::graph::{combinations, mask_components, mask_to_vec, Graph};

/// Rooted tree whose nodes carry bags partitioning the vertex set; node 0 is
/// the root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FatEliminationTree {
    pub parent: Vec<Option<usize>>,
    pub bags: Vec<Vec<usize>>,
}

impl FatEliminationTree {
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn depth_of(&self, t: usize) -> usize {
        let mut d = 1;
        let mut x = t;
        while let Some(p) = self.parent[x] {
            d += 1;
            x = p;
        }
        d
    }

    pub fn depth(&self) -> usize {
        (0..self.len()).map(|t| self.depth_of(t)).max().unwrap_or(0)
    }

    pub fn children(&self, t: usize) -> Vec<usize> {
        (0..self.len()).filter(|&c| self.parent[c] == Some(t)).collect()
    }

    fn is_ancestor_or_equal(&self, a: usize, t: usize) -> bool {
        let mut x = Some(t);
        while let Some(y) = x {
            if y == a {
                return true;
            }
            x = self.parent[y];
        }
        false
    }

    /// Node holding each vertex.
    pub fn node_of(&self, n: usize) -> Vec<usize> {
        let mut at = vec![usize::MAX; n];
        for (t, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v < n {
                    at[v] = t;
                }
            }
        }
        at
    }
}

/// True iff the bags partition `V(g)`, the parent map is a single tree
/// rooted at node 0, and every edge joins equal or ancestor-related bags.
pub fn validate_fat_tree(g: &Graph, t: &FatEliminationTree) -> Result<bool> {
    if t.parent.len() != t.bags.len() || t.is_empty() {
        return input("fat tree needs one bag per node and at least one node");
    }
    if t.parent[0].is_some() || t.parent.iter().skip(1).any(|p| !matches!(p, Some(q) if *q < t.len())) {
        return Ok(false);
    }
    if (0..t.len()).any(|x| t.depth_of_checked(x).is_none()) {
        return Ok(false);
    }
    let mut seen = vec![0usize; g.n()];
    for &v in t.bags.iter().flatten() {
        if v >= g.n() {
            return Ok(false);
        }
        seen[v] += 1;
    }
    if seen.iter().any(|&c| c != 1) {
        return Ok(false);
    }
    let at = t.node_of(g.n());
    Ok(g.edges().iter().all(|&(u, v)| {
        t.is_ancestor_or_equal(at[u], at[v]) || t.is_ancestor_or_equal(at[v], at[u])
    }))
}

impl FatEliminationTree {
    fn depth_of_checked(&self, t: usize) -> Option<usize> {
        let mut d = 1;
        let mut x = t;
        while let Some(p) = self.parent[x] {
            d += 1;
            x = p;
            if d > self.len() {
                return None;
            }
        }
        Some(d)
    }
}

struct FatSearch {
    adj: Vec<u64>,
    k: usize,
    /// (vertex set, depth budget) -> chosen root bag, if any
    memo: HashMap<(u64, usize), Option<u64>>,
}

impl FatSearch {
    fn root_bag(&mut self, set: u64, d: usize) -> Option<u64> {
        if set.count_ones() as usize <= self.k {
            return Some(set);
        }
        if d <= 1 {
            return None;
        }
        if let Some(hit) = self.memo.get(&(set, d)) {
            return *hit;
        }
        let verts = mask_to_vec(set);
        let mut found = None;
        'sizes: for size in 0..=self.k {
            for bag in combinations(&verts, size) {
                let bag = bag.iter().fold(0u64, |m, &v| m | (1 << v));
                let comps = mask_components(&self.adj, set & !bag);
                if comps.into_iter().all(|c| self.root_bag(c, d - 1).is_some()) {
                    found = Some(bag);
                    break 'sizes;
                }
            }
        }
        self.memo.insert((set, d), found);
        found
    }

    fn build(&mut self, set: u64, d: usize, above: Option<usize>, out: &mut FatEliminationTree) {
        let bag = self.root_bag(set, d).expect("feasibility established before building");
        let node = out.parent.len();
        out.parent.push(above);
        out.bags.push(mask_to_vec(bag));
        for c in mask_components(&self.adj, set & !bag) {
            self.build(c, d - 1, Some(node), out);
        }
    }
}

/// A `k`-fat elimination tree of depth at most `d`, or `None` when the
/// `d`-fold vertex cover number exceeds `k`. Root bags are tried by size,
/// then lexicographically; a set of at most `k` vertices becomes one bag.
pub fn fat_elimination_tree(g: &Graph, d: usize, k: usize) -> Result<Option<FatEliminationTree>> {
    check_cap(g.n(), SEARCH_CAP, "fat elimination tree search")?;
    if d == 0 {
        return input("depth bound must be at least 1");
    }
    let mut s = FatSearch { adj: g.masks(), k, memo: HashMap::new() };
    let all = super::treedepth::full_mask(g.n());
    if s.root_bag(all, d).is_none() {
        return Ok(None);
    }
    let mut out = FatEliminationTree { parent: Vec::new(), bags: Vec::new() };
    s.build(all, d, None, &mut out);
    Ok(Some(out))
}

/// Smallest `k` with a `k`-fat elimination tree of depth at most `d`;
/// the empty graph has value 0.
pub fn d_fold_vc_number(g: &Graph, d: usize) -> Result<usize> {
    for k in 0..=g.n() {
        if fat_elimination_tree(g, d, k)?.is_some() {
            return Ok(k);
        }
    }
    unreachable!("a single bag of all vertices always works")
}
