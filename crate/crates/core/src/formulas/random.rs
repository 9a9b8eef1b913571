use rand::Rng;

use super::formula::{neg, pos, Node, NormalizedFormula};

/// Random `t`-normalized formula over `n` variables. Every gate has
/// `0..=width` children (the root `1..=width`), and literals sit directly
/// below level `t`. With `negative_only` every literal is negated.
pub fn random_normalized<R: Rng>(rng: &mut R, n: usize, t: usize, width: usize, negative_only: bool) -> NormalizedFormula {
    fn gate<R: Rng>(rng: &mut R, n: usize, level: usize, t: usize, width: usize, neg_only: bool) -> Node {
        let count = if level == 1 { rng.gen_range(1..=width.max(1)) } else { rng.gen_range(0..=width) };
        let children = (0..count)
            .map(|_| {
                if level == t {
                    let v = rng.gen_range(0..n.max(1));
                    if neg_only || rng.gen_bool(0.5) {
                        neg(v)
                    } else {
                        pos(v)
                    }
                } else {
                    gate(rng, n, level + 1, t, width, neg_only)
                }
            })
            .collect();
        if level % 2 == 1 {
            Node::And(children)
        } else {
            Node::Or(children)
        }
    }
    let root = if n == 0 { Node::And(Vec::new()) } else { gate(rng, n, 1, t, width, negative_only) };
    NormalizedFormula::new(n, root).expect("variables in range")
}
