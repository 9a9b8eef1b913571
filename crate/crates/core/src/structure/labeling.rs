use serde::Serialize;

use crate::tree::OrderedTree;

/// Binary labels on tree edges, stored at the child endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeLabeling {
    /// `labels[v]` labels the edge from `parent(v)` to `v`; empty at the root.
    pub labels: Vec<String>,
    /// Length of the leaf indices, `ceil(log2(leaves))`.
    pub bits: usize,
}

impl EdgeLabeling {
    pub fn label(&self, child: usize) -> &str {
        &self.labels[child]
    }

    /// Concatenated labels from the root down to `v`.
    pub fn branch_word(&self, t: &OrderedTree, v: usize) -> String {
        t.path_to(v).iter().map(|&u| self.labels[u].as_str()).collect()
    }
}

pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Labels every edge `uv` with `eta(v)` minus the prefix `eta(u)`, where
/// `eta(u)` is the longest common prefix of the fixed-width preorder indices
/// of the leftmost and rightmost leaves below `u`.
pub fn tree_edge_labeling(t: &OrderedTree) -> EdgeLabeling {
    let leaves = t.leaves();
    let bits = ceil_log2(leaves.len());
    let mut index = vec![usize::MAX; t.len()];
    for (i, &l) in leaves.iter().enumerate() {
        index[l] = i;
    }
    let word = |i: usize| -> String {
        (0..bits).rev().map(|b| if i >> b & 1 == 1 { '1' } else { '0' }).collect()
    };
    // leftmost and rightmost leaf index below each node
    let mut span = vec![(usize::MAX, 0usize); t.len()];
    for &u in t.preorder().iter().rev() {
        span[u] = if t.is_leaf(u) {
            (index[u], index[u])
        } else {
            let cs = t.children(u);
            (span[cs[0]].0, span[*cs.last().unwrap()].1)
        };
    }
    let eta: Vec<String> = (0..t.len())
        .map(|u| {
            let (l, r) = (word(span[u].0), word(span[u].1));
            l.chars().zip(r.chars()).take_while(|(a, b)| a == b).map(|(a, _)| a).collect()
        })
        .collect();
    let labels = (0..t.len())
        .map(|v| match t.parent(v) {
            None => String::new(),
            Some(u) => eta[v][eta[u].len()..].to_string(),
        })
        .collect();
    EdgeLabeling { labels, bits }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        let single = tree_edge_labeling(&OrderedTree::leaf());
        assert_eq!(single.labels, vec![String::new()]);
        let two = OrderedTree::join(&[OrderedTree::leaf(), OrderedTree::leaf()]);
        assert_eq!(tree_edge_labeling(&two).labels[1..], ["0", "1"]);
        let four = OrderedTree::join(&vec![OrderedTree::leaf(); 4]);
        assert_eq!(tree_edge_labeling(&four).labels[1..], ["00", "01", "10", "11"]);
    }

    #[test]
    fn ceil_log2_values() {
        let got: Vec<_> = (1..=9).map(ceil_log2).collect();
        assert_eq!(got, vec![0, 1, 2, 2, 3, 3, 3, 3, 4]);
    }
}
