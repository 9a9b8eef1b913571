//! Rooted trees with ordered child lists. Node 0 is the root.

use rand::Rng;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderedTree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

impl Default for OrderedTree {
    fn default() -> Self {
        OrderedTree::leaf()
    }
}

impl OrderedTree {
    /// A single node.
    pub fn leaf() -> Self {
        OrderedTree { parent: vec![None], children: vec![Vec::new()] }
    }

    /// Builds a tree from a parent array; children keep increasing id order.
    /// Node 0 must be the unique root.
    pub fn from_parents(parent: &[Option<usize>]) -> Option<Self> {
        let n = parent.len();
        if n == 0 || parent[0].is_some() {
            return None;
        }
        let mut t = OrderedTree { parent: parent.to_vec(), children: vec![Vec::new(); n] };
        for (v, p) in parent.iter().enumerate().skip(1) {
            let p = (*p)?;
            if p >= n || p == v {
                return None;
            }
            t.children[p].push(v);
        }
        // every node must reach the root
        if t.preorder().len() != n {
            return None;
        }
        Some(t)
    }

    /// Root whose children are copies of `subtrees`, in order.
    pub fn join(subtrees: &[OrderedTree]) -> Self {
        let mut t = OrderedTree::leaf();
        for s in subtrees {
            t.graft(0, s);
        }
        t
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn parent(&self, u: usize) -> Option<usize> {
        self.parent[u]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn children(&self, u: usize) -> &[usize] {
        &self.children[u]
    }

    pub fn is_leaf(&self, u: usize) -> bool {
        self.children[u].is_empty()
    }

    pub fn add_child(&mut self, p: usize) -> usize {
        let id = self.parent.len();
        self.parent.push(Some(p));
        self.children.push(Vec::new());
        self.children[p].push(id);
        id
    }

    /// Appends a copy of `sub` as the last child of `p`; returns the copy's
    /// root.
    pub fn graft(&mut self, p: usize, sub: &OrderedTree) -> usize {
        let top = self.add_child(p);
        let mut stack = vec![(0, top)];
        while let Some((s, t)) = stack.pop() {
            for &c in &sub.children[s] {
                let id = self.add_child(t);
                stack.push((c, id));
            }
        }
        // children were pushed in order, since add_child appends at each step
        top
    }

    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = vec![0];
        while let Some(u) = stack.pop() {
            out.push(u);
            stack.extend(self.children[u].iter().rev());
        }
        out
    }

    /// Leaves in preorder.
    pub fn leaves(&self) -> Vec<usize> {
        self.preorder().into_iter().filter(|&u| self.is_leaf(u)).collect()
    }

    pub fn leaf_count(&self) -> usize {
        self.children.iter().filter(|c| c.is_empty()).count()
    }

    /// Number of nodes on the root path of `u`, so the root has depth 1.
    pub fn depth_of(&self, u: usize) -> usize {
        let mut d = 1;
        let mut x = u;
        while let Some(p) = self.parent[x] {
            d += 1;
            x = p;
        }
        d
    }

    /// Maximum number of nodes on a root-to-leaf path.
    pub fn depth(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(0, 1)];
        while let Some((u, d)) = stack.pop() {
            best = best.max(d);
            stack.extend(self.children[u].iter().map(|&c| (c, d + 1)));
        }
        best
    }

    /// Nodes from the root down to `u`, inclusive.
    pub fn path_to(&self, u: usize) -> Vec<usize> {
        let mut path = vec![u];
        let mut x = u;
        while let Some(p) = self.parent[x] {
            path.push(p);
            x = p;
        }
        path.reverse();
        path
    }

    /// The subtree rooted at `u` as a fresh tree.
    pub fn subtree(&self, u: usize) -> OrderedTree {
        let mut t = OrderedTree::leaf();
        let mut stack = vec![(u, 0)];
        while let Some((s, d)) = stack.pop() {
            for &c in &self.children[s] {
                let id = t.add_child(d);
                stack.push((c, id));
            }
        }
        t
    }

    /// Balanced-parenthesis code; equal codes mean ordered-isomorphic trees.
    pub fn code(&self) -> String {
        fn rec(t: &OrderedTree, u: usize, out: &mut String) {
            out.push('(');
            for &c in &t.children[u] {
                rec(t, c, out);
            }
            out.push(')');
        }
        let mut s = String::new();
        rec(self, 0, &mut s);
        s
    }
}

/// Random ordered tree with exactly `leaves` leaves (at least one) and depth
/// at most `max_depth` (at least 2 when `leaves > 1`). Each node's leaves
/// are split among its children at random cut points; a node with a single
/// leaf below it continues as a path with probability 1/3.
pub fn random_ordered_tree(rng: &mut impl Rng, leaves: usize, max_depth: usize) -> OrderedTree {
    fn grow(rng: &mut impl Rng, t: &mut OrderedTree, at: usize, leaves: usize, room: usize) {
        if room <= 1 {
            return;
        }
        let mut parts = vec![1];
        for _ in 1..leaves {
            if room == 2 || rng.gen_bool(0.4) {
                parts.push(1);
            } else {
                *parts.last_mut().unwrap() += 1;
            }
        }
        if parts.len() == 1 && leaves > 1 && rng.gen_bool(0.5) {
            parts = vec![leaves / 2, leaves - leaves / 2];
        }
        if parts == [1] && !rng.gen_bool(1.0 / 3.0) {
            return;
        }
        for p in parts {
            let c = t.add_child(at);
            grow(rng, t, c, p, room - 1);
        }
    }
    let leaves = leaves.max(1);
    assert!(leaves == 1 || max_depth >= 2, "{leaves} leaves need depth 2");
    let mut t = OrderedTree::leaf();
    grow(rng, &mut t, 0, leaves, max_depth.max(1));
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_trees_respect_bounds() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for i in 0..300 {
            let leaves = 1 + i % 40;
            let depth = 2 + i % 5;
            let t = random_ordered_tree(&mut rng, leaves, depth);
            assert_eq!(t.leaf_count(), leaves);
            assert!(t.depth() <= depth);
        }
    }

    #[test]
    fn graft_preserves_shape_and_order() {
        let path = OrderedTree::from_parents(&[None, Some(0)]).unwrap();
        let t = OrderedTree::join(&[OrderedTree::leaf(), path.clone()]);
        assert_eq!(t.code(), "(()(()))");
        assert_eq!(t.depth(), 3);
        assert_eq!(t.leaf_count(), 2);
        assert_eq!(t.subtree(t.children(0)[1]).code(), path.code());
    }

    #[test]
    fn from_parents_rejects_cycles() {
        assert!(OrderedTree::from_parents(&[None, Some(2), Some(1)]).is_none());
        assert!(OrderedTree::from_parents(&[Some(0)]).is_none());
    }
}
