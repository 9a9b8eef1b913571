use serde::Serialize;

use super::forest::EliminationForest;
use super::treedepth::{full_mask, TdSolver, TREEDEPTH_CAP};
use super::{check_cap, SEARCH_CAP};
use crate::error::Result;
use crate::graph::{combinations, vec_to_mask, Graph};

/// Smallest vertex cover of size at most `k`, lexicographically first among
/// those of minimum size.
pub fn vertex_cover_exact(g: &Graph, k: usize) -> Option<Vec<usize>> {
    first_set(g, k, |set| g.is_vertex_cover(set))
}

/// Smallest feedback vertex set of size at most `k`.
pub fn feedback_vertex_set_exact(g: &Graph, k: usize) -> Result<Option<Vec<usize>>> {
    check_cap(g.n(), SEARCH_CAP, "feedback vertex set")?;
    Ok(first_set(g, k, |set| g.is_feedback_vertex_set(set)))
}

fn first_set(g: &Graph, k: usize, mut ok: impl FnMut(&[usize]) -> bool) -> Option<Vec<usize>> {
    let all: Vec<usize> = (0..g.n()).collect();
    (0..=k.min(g.n())).find_map(|size| combinations(&all, size).find(|s| ok(s)))
}

/// A vertex set `W` with an elimination forest of `G - W`. The forest is
/// indexed by position in `rest`, the ascending list of vertices outside `W`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Modulator {
    pub set: Vec<usize>,
    pub rest: Vec<usize>,
    pub forest: EliminationForest,
}

impl Modulator {
    /// Checks `W` and the forest against `g`: the forest must be a valid
    /// elimination forest of `G - W` of depth at most `d`.
    pub fn validate(&self, g: &Graph, d: usize) -> Result<bool> {
        if self.rest != g.complement_of(&self.set) {
            return Ok(false);
        }
        let (sub, _) = g.induced(&self.rest);
        Ok(super::validate_elimination_forest(&sub, &self.forest)? && self.forest.depth() <= d)
    }
}

/// A smallest `W` with `|W| <= k` and `td(G - W) <= d`, with an optimal
/// elimination forest of `G - W`.
pub fn modulator_to_treedepth(g: &Graph, d: usize, k: usize) -> Result<Option<Modulator>> {
    check_cap(g.n(), TREEDEPTH_CAP, "modulator search")?;
    let mut td = TdSolver::new(g);
    let all = full_mask(g.n());
    let found = first_set(g, k, |set| td.td(all & !vec_to_mask(set)) <= d);
    Ok(found.map(|set| {
        let rest = g.complement_of(&set);
        let mut parent = vec![None; g.n()];
        td.build(vec_to_mask(&rest), None, &mut parent);
        let mut pos = vec![usize::MAX; g.n()];
        for (i, &v) in rest.iter().enumerate() {
            pos[v] = i;
        }
        let local = rest.iter().map(|&v| parent[v].map(|p| pos[p])).collect();
        Modulator { set, rest, forest: EliminationForest::new(local).expect("acyclic") }
    }))
}

/// Minimum size of a modulator to treedepth at most `d`; `d = 0` requires
/// deleting every vertex.
pub fn min_modulator_size(g: &Graph, d: usize) -> Result<usize> {
    Ok(modulator_to_treedepth(g, d, g.n())?
        .map(|m| m.set.len())
        .expect("deleting everything always works"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_cover_examples() {
        assert_eq!(vertex_cover_exact(&Graph::new(3), 0), Some(vec![]));
        assert_eq!(vertex_cover_exact(&Graph::path(2), 0), None);
        assert_eq!(vertex_cover_exact(&Graph::cycle(5), 2), None);
        let c = vertex_cover_exact(&Graph::cycle(5), 3).unwrap();
        assert_eq!(c.len(), 3);
        assert!(Graph::cycle(5).is_vertex_cover(&c));
    }

    #[test]
    fn fvs_examples() {
        assert_eq!(feedback_vertex_set_exact(&Graph::path(4), 0).unwrap(), Some(vec![]));
        assert_eq!(feedback_vertex_set_exact(&Graph::cycle(3), 0).unwrap(), None);
        let two = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        let s = feedback_vertex_set_exact(&two, 2).unwrap().unwrap();
        assert_eq!(s, vec![0, 3]);
    }

    #[test]
    fn modulator_examples() {
        let m = modulator_to_treedepth(&Graph::path(3), 2, 0).unwrap().unwrap();
        assert!(m.set.is_empty());
        assert!(m.validate(&Graph::path(3), 2).unwrap());
        let star = Graph::star(5);
        let m = modulator_to_treedepth(&star, 1, 1).unwrap().unwrap();
        assert_eq!(m.set, vec![0]);
        assert!(m.validate(&star, 1).unwrap());
        assert!(modulator_to_treedepth(&Graph::complete(5), 2, 2).unwrap().is_none());
        assert_eq!(min_modulator_size(&Graph::complete(5), 0).unwrap(), 5);
    }
}
