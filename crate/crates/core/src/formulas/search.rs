//! Exact-weight search for 2-normalized (CNF) formulas with unit
//! propagation, cardinality pruning and a disjoint-clause lower bound on
//! the number of variables that still have to become true.

use super::formula::{normalization_level, weighted_sat_bruteforce, Literal, Node, WeightedSatInstance};
use crate::error::Result;

/// Some satisfying assignment with exactly `k` true variables, or `None`.
/// Formulas that are not 2-normalized fall back to brute force.
pub fn weighted_sat_search(w: &WeightedSatInstance) -> Result<Option<Vec<usize>>> {
    if normalization_level(&w.formula)? != 2 {
        return weighted_sat_bruteforce(w);
    }
    let clauses: Vec<Vec<Literal>> = w
        .formula
        .root
        .children()
        .iter()
        .map(|c| {
            c.children()
                .iter()
                .map(|l| match l {
                    Node::Lit(l) => *l,
                    _ => unreachable!("2-normalized"),
                })
                .collect()
        })
        .collect();
    let n = w.formula.n;
    if w.k > n {
        return Ok(None);
    }
    let mut s = Search { clauses, k: w.k, value: vec![None; n], ones: 0, unset: n, trail: Vec::new() };
    if s.solve() {
        Ok(Some((0..n).filter(|&v| s.value[v] == Some(true)).collect()))
    } else {
        Ok(None)
    }
}

struct Search {
    clauses: Vec<Vec<Literal>>,
    k: usize,
    value: Vec<Option<bool>>,
    ones: usize,
    unset: usize,
    trail: Vec<usize>,
}

enum Status {
    Satisfied,
    Conflict,
    Unit(Literal),
    Open,
}

impl Search {
    fn set(&mut self, v: usize, b: bool) {
        self.value[v] = Some(b);
        self.unset -= 1;
        self.ones += b as usize;
        self.trail.push(v);
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            self.ones -= (self.value[v] == Some(true)) as usize;
            self.value[v] = None;
            self.unset += 1;
        }
    }

    fn status(&self, c: usize) -> Status {
        let mut open = None;
        let mut many = false;
        for l in &self.clauses[c] {
            match self.value[l.var] {
                Some(b) if b == l.positive => return Status::Satisfied,
                Some(_) => {}
                None if open.is_none() => open = Some(*l),
                None => many = true,
            }
        }
        match (open, many) {
            (None, _) => Status::Conflict,
            (Some(l), false) => Status::Unit(l),
            _ => Status::Open,
        }
    }

    /// Returns false on conflict.
    fn propagate(&mut self) -> bool {
        loop {
            if self.ones > self.k || self.ones + self.unset < self.k {
                return false;
            }
            if self.ones == self.k && self.unset > 0 {
                for v in 0..self.value.len() {
                    if self.value[v].is_none() {
                        self.set(v, false);
                    }
                }
                continue;
            }
            if self.ones + self.unset == self.k && self.unset > 0 {
                for v in 0..self.value.len() {
                    if self.value[v].is_none() {
                        self.set(v, true);
                    }
                }
                continue;
            }
            let mut changed = false;
            for c in 0..self.clauses.len() {
                match self.status(c) {
                    Status::Conflict => return false,
                    Status::Unit(l) => {
                        self.set(l.var, l.positive);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return self.ones + self.lower_bound() <= self.k;
            }
        }
    }

    /// Greedy packing of open clauses whose unset literals are all
    /// positive and pairwise variable-disjoint: each needs its own new one.
    fn lower_bound(&self) -> usize {
        let mut used = vec![false; self.value.len()];
        let mut count = 0;
        'clauses: for c in 0..self.clauses.len() {
            if !matches!(self.status(c), Status::Open) {
                continue;
            }
            let free: Vec<_> = self.clauses[c].iter().filter(|l| self.value[l.var].is_none()).collect();
            for l in &free {
                if !l.positive || used[l.var] {
                    continue 'clauses;
                }
            }
            for l in free {
                used[l.var] = true;
            }
            count += 1;
        }
        count
    }

    fn solve(&mut self) -> bool {
        let mark = self.trail.len();
        if !self.propagate() {
            self.undo(mark);
            return false;
        }
        // branch on the open clause with the fewest unset literals
        let mut pick: Option<(usize, Literal)> = None;
        for c in 0..self.clauses.len() {
            if let Status::Open = self.status(c) {
                let free: Vec<_> = self.clauses[c].iter().filter(|l| self.value[l.var].is_none()).collect();
                if pick.is_none_or(|(len, _)| free.len() < len) {
                    pick = Some((free.len(), *free[0]));
                }
            }
        }
        let branch = match pick {
            Some((_, l)) => (l.var, l.positive),
            None => match self.value.iter().position(Option::is_none) {
                // every clause satisfied; remaining variables only carry weight
                Some(v) => (v, true),
                None => return true,
            },
        };
        for b in [branch.1, !branch.1] {
            let inner = self.trail.len();
            self.set(branch.0, b);
            if self.solve() {
                return true;
            }
            self.undo(inner);
        }
        self.undo(mark);
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{and, eval_formula, lit, or, NormalizedFormula};
    use rand::{Rng, SeedableRng};

    #[test]
    fn agrees_with_brute_force_on_random_cnf() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..400 {
            let n = rng.gen_range(0..=9);
            let clauses = (0..rng.gen_range(0..=7))
                .map(|_| {
                    or((0..rng.gen_range(0..=3))
                        .filter(|_| n > 0)
                        .map(|_| lit(rng.gen_range(0..n), rng.gen_bool(0.5)))
                        .collect())
                })
                .collect();
            let formula = NormalizedFormula::new(n, and(clauses)).unwrap();
            let w = WeightedSatInstance { formula, k: rng.gen_range(0..=n + 1) };
            let fast = weighted_sat_search(&w).unwrap();
            let slow = weighted_sat_bruteforce(&w).unwrap();
            assert_eq!(fast.is_some(), slow.is_some(), "{w:?}");
            if let Some(t) = fast {
                assert_eq!(t.len(), w.k);
                assert!(eval_formula(&w.formula, &t));
            }
        }
    }
}
