use std::collections::HashMap;

use super::check_cap;
use super::forest::EliminationForest;
use crate::error::Result;
use crate::graph::{mask_components, mask_to_vec, Graph};

/// Default vertex cap for exact treedepth.
pub const TREEDEPTH_CAP: usize = 20;

/// Exact treedepth over vertex subsets, memoized on connected subsets.
pub(crate) struct TdSolver {
    adj: Vec<u64>,
    /// connected set -> (treedepth, root of an optimal elimination tree)
    memo: HashMap<u64, (usize, usize)>,
}

impl TdSolver {
    pub(crate) fn new(g: &Graph) -> Self {
        TdSolver { adj: g.masks(), memo: HashMap::new() }
    }

    pub(crate) fn td(&mut self, set: u64) -> usize {
        mask_components(&self.adj, set)
            .into_iter()
            .map(|c| self.td_connected(c).0)
            .max()
            .unwrap_or(0)
    }

    fn td_connected(&mut self, set: u64) -> (usize, usize) {
        if set.count_ones() == 1 {
            return (1, set.trailing_zeros() as usize);
        }
        if let Some(&hit) = self.memo.get(&set) {
            return hit;
        }
        let mut best = (usize::MAX, 0);
        for v in mask_to_vec(set) {
            let rest = set & !(1u64 << v);
            let mut worst = 0;
            for c in mask_components(&self.adj, rest) {
                worst = worst.max(self.td_connected(c).0);
                if 1 + worst >= best.0 {
                    break;
                }
            }
            if 1 + worst < best.0 {
                best = (1 + worst, v);
            }
        }
        self.memo.insert(set, best);
        best
    }

    /// Writes an optimal elimination forest of `set` into `parent` (host ids).
    pub(crate) fn build(&mut self, set: u64, above: Option<usize>, parent: &mut [Option<usize>]) {
        for c in mask_components(&self.adj, set) {
            let (_, root) = self.td_connected(c);
            parent[root] = above;
            self.build(c & !(1u64 << root), Some(root), parent);
        }
    }
}

/// Minimum-depth elimination forest. Ties go to the smallest root vertex.
pub fn treedepth_exact(g: &Graph) -> Result<(usize, EliminationForest)> {
    check_cap(g.n(), TREEDEPTH_CAP, "treedepth")?;
    let mut s = TdSolver::new(g);
    let all = full_mask(g.n());
    let depth = s.td(all);
    let mut parent = vec![None; g.n()];
    s.build(all, None, &mut parent);
    Ok((depth, EliminationForest::new(parent).expect("built forests are acyclic")))
}

/// Treedepth of the subgraph induced by the vertices in `mask`.
pub fn treedepth_of_mask(g: &Graph, mask: u64) -> Result<usize> {
    check_cap(g.n(), TREEDEPTH_CAP, "treedepth")?;
    Ok(TdSolver::new(g).td(mask))
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::validate_elimination_forest;

    /// Treedepth straight from the definition: minimum depth over all
    /// rooted forests on the vertex set that respect every edge.
    fn td_by_forests(g: &Graph) -> usize {
        let n = g.n();
        let mut best = usize::MAX;
        let mut parent = vec![None; n];
        fn rec(g: &Graph, v: usize, parent: &mut Vec<Option<usize>>, best: &mut usize) {
            if v == g.n() {
                if let Ok(f) = EliminationForest::new(parent.clone()) {
                    if validate_elimination_forest(g, &f).unwrap() {
                        *best = (*best).min(f.depth());
                    }
                }
                return;
            }
            for p in std::iter::once(None).chain((0..g.n()).filter(|&p| p != v).map(Some)) {
                parent[v] = p;
                rec(g, v + 1, parent, best);
            }
            parent[v] = None;
        }
        rec(g, 0, &mut parent, &mut best);
        best
    }

    #[test]
    fn examples() {
        assert_eq!(treedepth_exact(&Graph::new(1)).unwrap().0, 1);
        assert_eq!(treedepth_exact(&Graph::path(7)).unwrap().0, 3);
        assert_eq!(treedepth_exact(&Graph::complete(4)).unwrap().0, 4);
        assert_eq!(treedepth_exact(&Graph::new(0)).unwrap().0, 0);
        assert!(treedepth_exact(&Graph::new(21)).is_err());
    }

    #[test]
    fn matches_forest_enumeration_on_small_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let n = rng.gen_range(1..=5);
            let mut g = Graph::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.5) {
                        g.add_edge(u, v);
                    }
                }
            }
            let (d, f) = treedepth_exact(&g).unwrap();
            assert!(validate_elimination_forest(&g, &f).unwrap());
            assert_eq!(f.depth(), d);
            assert_eq!(d, td_by_forests(&g));
        }
    }
}
