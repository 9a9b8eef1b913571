use serde::Serialize;

use crate::error::{input, Result};
use crate::graph::Graph;

/// Rooted forest given by a parent map; roots have no parent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EliminationForest {
    parent: Vec<Option<usize>>,
}

impl EliminationForest {
    /// Checks that parents are in range and the relation is acyclic.
    pub fn new(parent: Vec<Option<usize>>) -> Result<Self> {
        let n = parent.len();
        if parent.iter().flatten().any(|&p| p >= n) {
            return input("parent id out of range");
        }
        // walk up from every vertex; a path longer than n means a cycle
        for v in 0..n {
            let mut x = v;
            let mut steps = 0;
            while let Some(p) = parent[x] {
                x = p;
                steps += 1;
                if steps > n {
                    return input(format!("parent relation has a cycle through {v}"));
                }
            }
        }
        Ok(EliminationForest { parent })
    }

    /// Chain following `order`: `order[0]` is the root.
    pub fn chain(order: &[usize]) -> Self {
        let mut parent = vec![None; order.len()];
        for w in order.windows(2) {
            parent[w[1]] = Some(w[0]);
        }
        EliminationForest { parent }
    }

    /// Every vertex a root.
    pub fn flat(n: usize) -> Self {
        EliminationForest { parent: vec![None; n] }
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.parent[v].is_none()).collect()
    }

    /// Children lists, ascending.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.n()];
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                ch[*p].push(v);
            }
        }
        ch
    }

    /// Strict ancestors of `v`, nearest first.
    pub fn ancestors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut x = v;
        while let Some(p) = self.parent[x] {
            out.push(p);
            x = p;
        }
        out
    }

    pub fn is_ancestor(&self, a: usize, v: usize) -> bool {
        let mut x = v;
        while let Some(p) = self.parent[x] {
            if p == a {
                return true;
            }
            x = p;
        }
        false
    }

    /// Vertices on the root path of `v`, so roots have depth 1.
    pub fn depth_of(&self, v: usize) -> usize {
        self.ancestors(v).len() + 1
    }

    /// Maximum vertex count on a root-to-leaf path; 0 for the empty forest.
    pub fn depth(&self) -> usize {
        (0..self.n()).map(|v| self.depth_of(v)).max().unwrap_or(0)
    }

    /// Vertices in depth-first preorder, roots and children ascending.
    pub fn preorder(&self) -> Vec<usize> {
        let ch = self.children();
        let mut out = Vec::with_capacity(self.n());
        let mut stack: Vec<usize> = self.roots().into_iter().rev().collect();
        while let Some(v) = stack.pop() {
            out.push(v);
            stack.extend(ch[v].iter().rev());
        }
        out
    }

    /// Parent map of this forest (built on an induced subgraph) in host
    /// ids: vertex `i` becomes `map[i]`, host vertices outside `map` get
    /// `None`.
    pub fn lift(&self, map: &[usize], n_host: usize) -> Vec<Option<usize>> {
        let mut parent = vec![None; n_host];
        for (i, p) in self.parent.iter().enumerate() {
            parent[map[i]] = p.map(|p| map[p]);
        }
        parent
    }
}

/// True iff every edge of `g` joins an ancestor/descendant pair of `f`.
/// A vertex-count mismatch is an input error.
pub fn validate_elimination_forest(g: &Graph, f: &EliminationForest) -> Result<bool> {
    if g.n() != f.n() {
        return input(format!("forest spans {} vertices, graph has {}", f.n(), g.n()));
    }
    Ok(g.edges()
        .iter()
        .all(|&(u, v)| f.is_ancestor(u, v) || f.is_ancestor(v, u)))
}
