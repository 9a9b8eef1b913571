//! Universal ordered trees, order-preserving embeddings, and the capacity
//! annotations used to steer computations through a universal tree.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{input, resource, Result};
use crate::structure::ceil_log2;
use crate::tree::OrderedTree;

/// `U_{n,k}` together with the parameters `(n', k')` of the universal tree
/// rooted at each node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniversalTree {
    pub n: usize,
    pub k: usize,
    pub tree: OrderedTree,
    pub ann: Vec<(usize, usize)>,
}

impl UniversalTree {
    pub fn build(n: usize, k: usize) -> Self {
        let k = k.max(1);
        let mut tree = OrderedTree::leaf();
        let mut ann = vec![(n, k)];
        grow(&mut tree, &mut ann, 0, n, k);
        UniversalTree { n, k, tree, ann }
    }
}

/// Attaches the root children of `U_{n,k}` below `at`: those of
/// `U_{⌊n/2⌋,k}`, then a fresh child carrying `U_{n,k-1}`, then those of
/// `U_{n-1-⌊n/2⌋,k}`.
fn grow(t: &mut OrderedTree, ann: &mut Vec<(usize, usize)>, at: usize, n: usize, k: usize) {
    if n == 0 || k == 1 {
        return;
    }
    let half = n / 2;
    grow(t, ann, at, half, k);
    let mid = t.add_child(at);
    ann.push((n, k - 1));
    grow(t, ann, mid, n, k - 1);
    grow(t, ann, at, n - 1 - half, k);
}

/// Ordered tree of depth at most `k` into which every ordered tree of depth
/// at most `k` with at most `n` leaves embeds.
pub fn build_universal_tree(n: usize, k: usize) -> OrderedTree {
    UniversalTree::build(n, k).tree
}

/// Leaves of `U_{n,k}` without building it.
pub fn universal_leaf_count(n: usize, k: usize) -> u128 {
    fn rec(n: usize, k: usize, memo: &mut HashMap<(usize, usize), u128>) -> u128 {
        if n == 0 {
            return 0;
        }
        if k <= 1 {
            return 1;
        }
        if let Some(&c) = memo.get(&(n, k)) {
            return c;
        }
        let c = rec(n / 2, k, memo) + rec(n, k - 1, memo) + rec(n - 1 - n / 2, k, memo);
        memo.insert((n, k), c);
        c
    }
    rec(n, k, &mut HashMap::new()).max(1)
}

/// The stated bound `2n * binom(⌈log n⌉ + k + 1, k)`.
pub fn universal_leaf_bound(n: usize, k: usize) -> u128 {
    2 * n as u128 * crate::formulas::binomial(ceil_log2(n) + k + 1, k)
}

/// Recovers the annotation of a tree built by [`build_universal_tree`]:
/// the root gets the largest `n` whose `U_{n,k}` has this shape, with `k`
/// the depth.
pub fn annotate_subtrees(u: &OrderedTree) -> Result<Vec<(usize, usize)>> {
    let k = u.depth();
    let code = u.code();
    let leaves = u.leaf_count();
    let found = (1..=leaves.max(1))
        .rev()
        .map(|n| UniversalTree::build(n, k))
        .find(|ut| ut.tree.code() == code);
    match found {
        Some(ut) => Ok(ut.ann),
        None => input("tree is not a universal tree"),
    }
}

/// Greedily picks children `v_1 < ... < v_p` of `node` with capacities
/// `n'_i >= demands[i]` one level down.
pub fn select_children(u: &UniversalTree, node: usize, demands: &[usize]) -> Option<Vec<usize>> {
    let k = u.ann[node].1;
    let mut out = Vec::with_capacity(demands.len());
    let mut kids = u.tree.children(node).iter();
    for &need in demands {
        let v = kids.find(|&&c| u.ann[c].1 + 1 == k && u.ann[c].0 >= need)?;
        out.push(*v);
    }
    Some(out)
}

/// Order-preserving embedding: `map[s]` is the image of node `s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeEmbedding {
    pub map: Vec<usize>,
}

/// Root to root, and the children of every node go to distinct children
/// of its image, in the same order.
pub fn is_embedding(s: &OrderedTree, t: &OrderedTree, e: &TreeEmbedding) -> bool {
    if e.map.len() != s.len() || e.map[0] != t.root() || e.map.iter().any(|&x| x >= t.len()) {
        return false;
    }
    (0..s.len()).all(|a| {
        let kids = t.children(e.map[a]);
        let pos: Option<Vec<usize>> =
            s.children(a).iter().map(|&c| kids.iter().position(|&x| x == e.map[c])).collect();
        pos.is_some_and(|p| p.windows(2).all(|w| w[0] < w[1]))
    })
}

/// Embedding of `s` into `t`, if any. Children are matched leftmost-first,
/// which is complete for order-preserving matching.
pub fn find_embedding(s: &OrderedTree, t: &OrderedTree) -> Option<TreeEmbedding> {
    let mut memo = HashMap::new();
    if !fits(s, t, 0, 0, &mut memo) {
        return None;
    }
    let mut map = vec![0; s.len()];
    let mut stack = vec![(0, 0)];
    while let Some((a, b)) = stack.pop() {
        map[a] = b;
        let mut kids = t.children(b).iter();
        for &c in s.children(a) {
            let &d = kids.find(|&&d| fits(s, t, c, d, &mut memo)).expect("checked above");
            stack.push((c, d));
        }
    }
    Some(TreeEmbedding { map })
}

fn fits(s: &OrderedTree, t: &OrderedTree, a: usize, b: usize, memo: &mut HashMap<(usize, usize), bool>) -> bool {
    if let Some(&r) = memo.get(&(a, b)) {
        return r;
    }
    let mut kids = t.children(b).iter();
    let r = s.children(a).iter().all(|&c| kids.any(|&d| fits(s, t, c, d, memo)));
    memo.insert((a, b), r);
    r
}

pub const ENUM_MAX_LEAVES: usize = 5;
pub const ENUM_MAX_DEPTH: usize = 4;

/// Every ordered tree with at most `max_leaves` leaves and depth at most
/// `max_depth`, once each.
pub fn enumerate_ordered_trees(max_leaves: usize, max_depth: usize) -> Result<Vec<OrderedTree>> {
    if max_leaves > ENUM_MAX_LEAVES || max_depth > ENUM_MAX_DEPTH {
        return resource(format!("enumeration capped at {ENUM_MAX_LEAVES} leaves and depth {ENUM_MAX_DEPTH}"));
    }
    if max_leaves == 0 || max_depth == 0 {
        return Ok(Vec::new());
    }
    Ok(shapes(max_leaves, max_depth).into_iter().map(|(t, _)| t).collect())
}

fn shapes(l: usize, d: usize) -> Vec<(OrderedTree, usize)> {
    let mut out = vec![(OrderedTree::leaf(), 1)];
    if d == 1 {
        return out;
    }
    let sub = shapes(l, d - 1);
    let mut seq: Vec<&OrderedTree> = Vec::new();
    sequences(&sub, l, &mut seq, 0, &mut out);
    out
}

fn sequences<'a>(
    sub: &'a [(OrderedTree, usize)],
    budget: usize,
    seq: &mut Vec<&'a OrderedTree>,
    used: usize,
    out: &mut Vec<(OrderedTree, usize)>,
) {
    for (t, leaves) in sub {
        if used + leaves <= budget {
            seq.push(t);
            let owned: Vec<OrderedTree> = seq.iter().map(|&x| x.clone()).collect();
            out.push((OrderedTree::join(&owned), used + leaves));
            sequences(sub, budget, seq, used + leaves, out);
            seq.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn small_universal_trees() {
        assert_eq!(build_universal_tree(1, 1).len(), 1);
        assert_eq!(build_universal_tree(2, 2).code(), "(()())");
        assert_eq!(build_universal_tree(1, 3).code(), "((()))");
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_ordered_trees(1, 1).unwrap().len(), 1);
        assert_eq!(enumerate_ordered_trees(2, 2).unwrap().len(), 3);
        assert!(enumerate_ordered_trees(6, 2).is_err());
        let mut prev = 0;
        for l in 1..=4 {
            let all = enumerate_ordered_trees(l, 3).unwrap();
            let codes: BTreeSet<String> = all.iter().map(OrderedTree::code).collect();
            assert_eq!(codes.len(), all.len());
            assert!(all.len() >= prev);
            prev = all.len();
            assert!(all.iter().all(|t| t.leaf_count() <= l && t.depth() <= 3));
        }
    }

    #[test]
    fn universality_small() {
        for n in 1..=3 {
            for k in 1..=3 {
                let u = build_universal_tree(n, k);
                assert!(u.depth() <= k);
                assert_eq!(u.leaf_count() as u128, universal_leaf_count(n, k));
                for s in enumerate_ordered_trees(n, k).unwrap() {
                    let e = find_embedding(&s, &u).expect("embeds");
                    assert!(is_embedding(&s, &u, &e));
                }
            }
        }
    }

    #[test]
    fn embedding_examples() {
        let three = OrderedTree::join(&[OrderedTree::leaf(), OrderedTree::leaf(), OrderedTree::leaf()]);
        let two = OrderedTree::join(&[OrderedTree::leaf(), OrderedTree::leaf()]);
        assert!(find_embedding(&three, &two).is_none());
        let path = OrderedTree::join(&[OrderedTree::leaf()]);
        let s = OrderedTree::join(&[OrderedTree::leaf(), path]);
        assert!(find_embedding(&s, &build_universal_tree(3, 3)).is_some());
        let e = find_embedding(&OrderedTree::leaf(), &three).unwrap();
        assert_eq!(e.map, vec![0]);
    }

    #[test]
    fn annotations() {
        let u = UniversalTree::build(5, 3);
        assert_eq!(annotate_subtrees(&u.tree).unwrap(), u.ann);
        for v in 0..u.tree.len() {
            let (n2, k2) = u.ann[v];
            assert_eq!(u.tree.subtree(v).code(), build_universal_tree(n2, k2).code());
            if u.tree.is_leaf(v) {
                assert!(k2 == 1 && n2 >= 1);
            }
            for &c in u.tree.children(v) {
                assert_eq!(u.ann[c].1 + 1, k2);
            }
        }
        let bad = OrderedTree::join(&[OrderedTree::join(&[OrderedTree::leaf()]), OrderedTree::leaf(), OrderedTree::leaf()]);
        assert!(annotate_subtrees(&bad).is_err());
    }

    #[test]
    fn greedy_selection() {
        let u = UniversalTree::build(2, 2);
        assert_eq!(select_children(&u, 0, &[]), Some(vec![]));
        assert_eq!(select_children(&u, 0, &[1, 1]), Some(vec![1, 2]));
        let u = UniversalTree::build(6, 3);
        let full = select_children(&u, 0, &[6]).unwrap();
        assert!(u.ann[full[0]].0 >= 6);
        for demands in [vec![1, 2, 3], vec![3, 3], vec![2, 2, 2], vec![1; 6]] {
            let got = select_children(&u, 0, &demands).unwrap();
            assert!(got.windows(2).all(|w| w[0] < w[1]));
            assert!(got.iter().zip(&demands).all(|(&v, &d)| u.ann[v].0 >= d));
        }
    }
}
