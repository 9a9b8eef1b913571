use std::collections::BTreeMap;

use serde::Serialize;

use super::{Kind, Machine, Move, Stackless};
use crate::error::{input, Result};
use crate::tree::OrderedTree;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transition {
    pub next: usize,
    pub push: Option<bool>,
    /// Replaces the work tape when present.
    pub write: Option<Vec<bool>>,
}

/// A machine given by a transition table, keyed by state and branch bit
/// (`None` for deterministic states).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArosMachine {
    pub kinds: Vec<Kind>,
    pub start: usize,
    pub trans: BTreeMap<(usize, Option<bool>), Transition>,
}

impl ArosMachine {
    /// Checks that there is exactly one final state and that every other
    /// state has exactly the transitions its kind requires.
    pub fn new(kinds: Vec<Kind>, start: usize, trans: BTreeMap<(usize, Option<bool>), Transition>) -> Result<Self> {
        if start >= kinds.len() {
            return input("start state out of range");
        }
        if kinds.iter().filter(|&&k| k == Kind::Final).count() != 1 {
            return input("exactly one final state required");
        }
        for (&(s, bit), t) in &trans {
            if s >= kinds.len() || t.next >= kinds.len() {
                return input(format!("transition {s} -> {} out of range", t.next));
            }
            let ok = match kinds[s] {
                Kind::Deterministic => bit.is_none(),
                Kind::Existential | Kind::Universal => bit.is_some(),
                Kind::Final => false,
            };
            if !ok {
                return input(format!("transition from state {s} does not match its kind"));
            }
        }
        for (s, k) in kinds.iter().enumerate() {
            let needed: &[Option<bool>] = match k {
                Kind::Deterministic => &[None],
                Kind::Existential | Kind::Universal => &[Some(false), Some(true)],
                Kind::Final => &[],
            };
            if let Some(b) = needed.iter().find(|b| !trans.contains_key(&(s, **b))) {
                return input(format!("state {s} lacks its {b:?} transition"));
            }
        }
        Ok(ArosMachine { kinds, start, trans })
    }
}

impl Machine for ArosMachine {
    fn start(&self) -> Stackless {
        Stackless::at(self.start)
    }

    fn kind(&self, state: usize) -> Kind {
        self.kinds[state]
    }

    fn step(&self, c: &Stackless, _input: &[bool], bit: bool) -> Result<Move> {
        let key = match self.kinds[c.state] {
            Kind::Deterministic => None,
            _ => Some(bit),
        };
        let Some(t) = self.trans.get(&(c.state, key)) else {
            return input(format!("no transition from state {}", c.state));
        };
        let mut next = c.clone();
        next.state = t.next;
        if let Some(w) = &t.write {
            next.work = w.clone();
            next.work_head = w.len().saturating_sub(1);
        }
        Ok(Move { next, push: t.push })
    }
}

/// A hand-built regular machine, its contraction tree, and the smallest
/// nondeterminism budget under which it accepts (`None`: never).
#[derive(Debug, Clone)]
pub struct ToyMachine {
    pub name: &'static str,
    pub machine: ArosMachine,
    pub tree: OrderedTree,
    pub accepts_from: Option<usize>,
}

fn build(spec: &[(Kind, &[(Option<bool>, usize, Option<bool>, Option<&str>)])]) -> ArosMachine {
    let kinds = spec.iter().map(|s| s.0).collect();
    let mut trans = BTreeMap::new();
    for (s, (_, ts)) in spec.iter().enumerate() {
        for &(bit, next, push, write) in ts.iter() {
            let write = write.map(|w| w.chars().map(|ch| ch == '1').collect());
            trans.insert((s, bit), Transition { next, push, write });
        }
    }
    ArosMachine::new(kinds, 0, trans).expect("toy machine is well formed")
}

/// Small machines whose accepting computations all have one universal
/// block with two existential tails, so the contraction is a root with two
/// leaves.
pub fn toy_machines() -> Vec<ToyMachine> {
    use Kind::*;
    let (z, o) = (Some(false), Some(true));
    let cherry = OrderedTree::join(&[OrderedTree::leaf(), OrderedTree::leaf()]);
    let toy = |name, accepts_from, spec: &[(Kind, &[(Option<bool>, usize, Option<bool>, Option<&str>)])]| ToyMachine {
        name,
        machine: build(spec),
        tree: cherry.clone(),
        accepts_from,
    };
    vec![
        toy("guess-one", Some(1), &[
            (Universal, &[(z, 1, None, None), (o, 2, None, None)]),
            (Existential, &[(z, 3, z, None), (o, 3, o, None)]),
            (Existential, &[(z, 3, z, None), (o, 3, o, None)]),
            (Deterministic, &[(None, 4, None, Some("1"))]),
            (Final, &[]),
        ]),
        toy("forced-zero", None, &[
            (Universal, &[(z, 1, None, None), (o, 2, z, None)]),
            (Existential, &[(z, 3, z, None), (o, 3, o, None)]),
            (Deterministic, &[(None, 3, None, None)]),
            (Deterministic, &[(None, 4, None, Some("1"))]),
            (Final, &[]),
        ]),
        toy("second-bit", Some(1), &[
            (Universal, &[(z, 1, o, None), (o, 1, z, None)]),
            (Existential, &[(z, 2, z, None), (o, 2, o, None)]),
            (Deterministic, &[(None, 3, None, Some("10"))]),
            (Final, &[]),
        ]),
        toy("first-bit", None, &[
            (Universal, &[(z, 1, o, None), (o, 1, z, None)]),
            (Existential, &[(z, 2, None, None), (o, 2, o, None)]),
            (Deterministic, &[(None, 3, None, Some("1"))]),
            (Final, &[]),
        ]),
        toy("two-guesses", Some(2), &[
            (Universal, &[(z, 1, None, None), (o, 1, None, None)]),
            (Existential, &[(z, 2, z, None), (o, 2, o, None)]),
            (Existential, &[(z, 3, z, None), (o, 3, o, None)]),
            (Deterministic, &[(None, 4, None, Some("10"))]),
            (Final, &[]),
        ]),
    ]
}
