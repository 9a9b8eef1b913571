//! Simple undirected graphs with sorted adjacency lists.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n] }
    }

    /// Builds a graph from an edge list; duplicates and self-loops are dropped.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::path(n);
        if n >= 3 {
            g.add_edge(0, n - 1);
        }
        g
    }

    /// Star with center 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Graph::from_edges(leaves + 1, &edges)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn add_vertex(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    /// Returns true if the edge was new.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        assert!(u < self.n() && v < self.n(), "edge endpoint out of range");
        if u == v {
            return false;
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                true
            }
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n() {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Subgraph induced by `keep` (any order); vertex `i` of the result is
    /// `map[i]` in `self`, with `map` sorted ascending.
    pub fn induced(&self, keep: &[usize]) -> (Graph, Vec<usize>) {
        let mut map: Vec<usize> = keep.to_vec();
        map.sort_unstable();
        map.dedup();
        let mut back = vec![usize::MAX; self.n()];
        for (i, &v) in map.iter().enumerate() {
            back[v] = i;
        }
        let mut g = Graph::new(map.len());
        for (i, &v) in map.iter().enumerate() {
            for &w in &self.adj[v] {
                if back[w] != usize::MAX && i < back[w] {
                    g.add_edge(i, back[w]);
                }
            }
        }
        (g, map)
    }

    /// The vertices not in `removed`, ascending.
    pub fn complement_of(&self, removed: &[usize]) -> Vec<usize> {
        let mut gone = vec![false; self.n()];
        for &v in removed {
            gone[v] = true;
        }
        (0..self.n()).filter(|&v| !gone[v]).collect()
    }

    /// Adjacency bitmasks; requires at most 64 vertices.
    pub fn masks(&self) -> Vec<u64> {
        assert!(self.n() <= 64, "bitmask view needs at most 64 vertices");
        self.adj
            .iter()
            .map(|ns| ns.iter().fold(0u64, |m, &w| m | (1 << w)))
            .collect()
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// True iff the graph has no cycle.
    pub fn is_forest(&self) -> bool {
        self.edge_count() + self.components().len() == self.n()
    }

    /// True iff every edge has an endpoint in `set`.
    pub fn is_vertex_cover(&self, set: &[usize]) -> bool {
        let mut inside = vec![false; self.n()];
        for &v in set {
            if v >= self.n() {
                return false;
            }
            inside[v] = true;
        }
        self.edges().iter().all(|&(u, v)| inside[u] || inside[v])
    }

    /// True iff removing `set` leaves a forest.
    pub fn is_feedback_vertex_set(&self, set: &[usize]) -> bool {
        if set.iter().any(|&v| v >= self.n()) {
            return false;
        }
        let (rest, _) = self.induced(&self.complement_of(set));
        rest.is_forest()
    }
}

/// Components of the subgraph induced by `set`, as bitmasks, in order of
/// their lowest vertex.
pub(crate) fn mask_components(adj: &[u64], set: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut left = set;
    while left != 0 {
        let start = left & left.wrapping_neg();
        let mut comp = start;
        let mut frontier = start;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = adj[v] & set & !comp;
            comp |= fresh;
            frontier |= fresh;
        }
        out.push(comp);
        left &= !comp;
    }
    out
}

pub(crate) fn mask_to_vec(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

pub(crate) fn vec_to_mask(vs: &[usize]) -> u64 {
    vs.iter().fold(0, |m, &v| m | (1u64 << v))
}

/// Subsets of `items` of size exactly `size`, in lexicographic order of
/// positions.
pub(crate) struct Combinations<'a> {
    items: &'a [usize],
    idx: Vec<usize>,
    done: bool,
}

pub(crate) fn combinations(items: &[usize], size: usize) -> Combinations<'_> {
    Combinations {
        items,
        idx: (0..size).collect(),
        done: size > items.len(),
    }
}

impl Iterator for Combinations<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.iter().map(|&i| self.items[i]).collect();
        let (n, size) = (self.items.len(), self.idx.len());
        let mut i = size;
        while i > 0 && self.idx[i - 1] == n - size + i - 1 {
            i -= 1;
        }
        if i == 0 {
            self.done = true;
        } else {
            self.idx[i - 1] += 1;
            for j in i..size {
                self.idx[j] = self.idx[j - 1] + 1;
            }
        }
        Some(out)
    }
}
