//! Normalized Boolean formulas, circuits and exact-weight satisfiability.

mod circuit;
mod formula;
mod random;
mod search;

pub use circuit::{eval_circuit, weighted_circuit_sat_bruteforce, BooleanCircuit, Gate};
pub use formula::{
    and, eval_formula, is_antimonotone, is_monotone, is_t_normalized, lit, neg, normalization_level, or,
    pos, weighted_sat_bruteforce, Literal, Node, NormalizedFormula, WeightedSatInstance, WSAT_CAP,
};
pub use random::random_normalized;
pub use search::weighted_sat_search;

/// `binom(n, k)`, saturating.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Calls `f` on every `k`-subset of `0..n` (as a membership vector) in
/// colexicographic order until it returns `true`; returns that subset.
pub(crate) fn first_k_subset(n: usize, k: usize, mut f: impl FnMut(&[bool]) -> bool) -> Option<Vec<usize>> {
    if k > n {
        return None;
    }
    // positions in increasing order; colex successor bumps the lowest
    // position that can move and resets the ones below it
    let mut pos: Vec<usize> = (0..k).collect();
    let mut truth = vec![false; n];
    for &p in &pos {
        truth[p] = true;
    }
    loop {
        if f(&truth) {
            return Some(pos);
        }
        let mut i = 0;
        while i < k && pos[i] + 1 == if i + 1 < k { pos[i + 1] } else { n } {
            i += 1;
        }
        if i == k {
            return None;
        }
        for &p in &pos[..=i] {
            truth[p] = false;
        }
        pos[i] += 1;
        for j in 0..i {
            pos[j] = j;
        }
        for &p in &pos[..=i] {
            truth[p] = true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colex_order() {
        let mut seen = Vec::new();
        first_k_subset(4, 2, |t| {
            seen.push((0..4).filter(|&i| t[i]).collect::<Vec<_>>());
            false
        });
        assert_eq!(
            seen,
            vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 3], vec![1, 3], vec![2, 3]]
        );
        let mut count = 0;
        first_k_subset(3, 0, |_| {
            count += 1;
            false
        });
        assert_eq!(count, 1);
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(2, 3), 0);
    }
}
