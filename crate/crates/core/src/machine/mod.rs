//! Alternating read-once stack machines: exact acceptance with resource
//! accounting, universal blocks, the compiler from BinCSP with an
//! elimination tree, and the reduction from regular machines back to
//! BinCSP.
//!
//! Transitions are macro steps: one step may rewrite the whole work tape
//! and push at most one bit. Existential and universal steps consume one
//! guessed bit each.

use serde::Serialize;

use crate::error::{resource, Result};

mod regular;
mod table;
mod td;

pub use regular::{compile_regular_arosm_to_bincsp, RegularCsp, RegularParams, Tuple};
pub use table::{toy_machines, ArosMachine, ToyMachine, Transition};
pub use td::{compile_bincsp_td, TdMachine};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Kind {
    Existential,
    Universal,
    Deterministic,
    Final,
}

/// Everything but the stack.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Stackless {
    pub state: usize,
    pub work: Vec<bool>,
    pub input_head: usize,
    pub work_head: usize,
}

impl Stackless {
    pub fn at(state: usize) -> Self {
        Stackless { state, work: Vec::new(), input_head: 0, work_head: 0 }
    }

    /// Cells of the work tape in use.
    pub fn space(&self) -> usize {
        self.work.len().max(self.work_head + 1)
    }

    /// The work tape read as a binary number, most significant bit first.
    pub fn work_index(&self) -> u128 {
        self.work.iter().fold(0u128, |acc, &b| acc.saturating_mul(2).saturating_add(b as u128))
    }
}

/// Result of one transition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Move {
    pub next: Stackless,
    pub push: Option<bool>,
}

pub trait Machine {
    fn start(&self) -> Stackless;

    fn kind(&self, state: usize) -> Kind;

    /// The `bit`-transition from `c`; deterministic states ignore `bit`.
    fn step(&self, c: &Stackless, input: &[bool], bit: bool) -> Result<Move>;
}

/// Acceptance at the final state: bit `i` of the stack (1-based, bottom
/// first) where `i` is the work tape content; outside the stack rejects.
pub fn accepts_at_final(c: &Stackless, stack: &[bool]) -> bool {
    let i = c.work_index();
    i >= 1 && i <= stack.len() as u128 && stack[i as usize - 1]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResourceLimits {
    pub work: usize,
    pub stack: usize,
    pub nondeterminism: usize,
    pub conondeterminism: usize,
    pub alternation: usize,
    /// Transitions per branch.
    pub steps: usize,
}

impl ResourceLimits {
    pub fn unbounded() -> Self {
        ResourceLimits {
            work: usize::MAX,
            stack: usize::MAX,
            nondeterminism: usize::MAX,
            conondeterminism: usize::MAX,
            alternation: usize::MAX,
            steps: 1 << 16,
        }
    }
}

/// Per-branch maxima over a computation tree.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ResourceUsage {
    pub work: usize,
    pub stack: usize,
    pub nondeterminism: usize,
    pub conondeterminism: usize,
    pub alternation: usize,
    pub steps: usize,
}

impl ResourceUsage {
    fn join(self, o: ResourceUsage) -> ResourceUsage {
        ResourceUsage {
            work: self.work.max(o.work),
            stack: self.stack.max(o.stack),
            nondeterminism: self.nondeterminism.max(o.nondeterminism),
            conondeterminism: self.conondeterminism.max(o.conondeterminism),
            alternation: self.alternation.max(o.alternation),
            steps: self.steps.max(o.steps),
        }
    }

    pub fn within(&self, l: &ResourceLimits) -> bool {
        self.work <= l.work
            && self.stack <= l.stack
            && self.nondeterminism <= l.nondeterminism
            && self.conondeterminism <= l.conondeterminism
            && self.alternation <= l.alternation
            && self.steps <= l.steps
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Decision {
    pub accept: bool,
    /// Usage of the accepting tree found, all zero on rejection.
    pub usage: ResourceUsage,
    /// Maxima over every branch the search visited.
    pub explored: ResourceUsage,
}

struct Search<'a, M: Machine + ?Sized> {
    m: &'a M,
    input: &'a [bool],
    limits: ResourceLimits,
    explored: ResourceUsage,
}

#[derive(Clone, Copy)]
struct Branch {
    usage: ResourceUsage,
    last: Option<Kind>,
}

impl<M: Machine + ?Sized> Search<'_, M> {
    fn run(&mut self, c: Stackless, stack: &mut Vec<bool>, mut b: Branch) -> Result<Option<ResourceUsage>> {
        let kind = self.m.kind(c.state);
        b.usage.work = b.usage.work.max(c.space());
        b.usage.stack = b.usage.stack.max(stack.len());
        match kind {
            Kind::Existential => b.usage.nondeterminism += 1,
            Kind::Universal => b.usage.conondeterminism += 1,
            _ => {}
        }
        if matches!(kind, Kind::Existential | Kind::Universal) {
            if b.last.is_some_and(|k| k != kind) {
                b.usage.alternation += 1;
            }
            b.last = Some(kind);
        }
        self.explored = self.explored.join(b.usage);
        if !b.usage.within(&self.limits) {
            return Ok(None);
        }
        if kind == Kind::Final {
            return Ok(accepts_at_final(&c, stack).then_some(b.usage));
        }
        if b.usage.steps == self.limits.steps {
            return Ok(None);
        }
        b.usage.steps += 1;
        match kind {
            Kind::Deterministic => self.follow(&c, false, stack, b),
            Kind::Existential => match self.follow(&c, false, stack, b)? {
                Some(u) => Ok(Some(u)),
                None => self.follow(&c, true, stack, b),
            },
            Kind::Universal => {
                let Some(u0) = self.follow(&c, false, stack, b)? else { return Ok(None) };
                Ok(self.follow(&c, true, stack, b)?.map(|u1| u0.join(u1)))
            }
            Kind::Final => unreachable!(),
        }
    }

    fn follow(&mut self, c: &Stackless, bit: bool, stack: &mut Vec<bool>, b: Branch) -> Result<Option<ResourceUsage>> {
        let mv = self.m.step(c, self.input, bit)?;
        if let Some(p) = mv.push {
            stack.push(p);
        }
        let r = self.run(mv.next, stack, b);
        if mv.push.is_some() {
            stack.pop();
        }
        r
    }
}

/// Searches for an accepting computation tree within `limits`, trying the
/// 0-transition of existential configurations first.
pub fn decide<M: Machine + ?Sized>(m: &M, input: &[bool], limits: &ResourceLimits) -> Result<Decision> {
    let mut s = Search { m, input, limits: *limits, explored: ResourceUsage::default() };
    let first = Branch { usage: ResourceUsage { alternation: 1, ..Default::default() }, last: None };
    let found = s.run(m.start(), &mut Vec::new(), first)?;
    Ok(Decision { accept: found.is_some(), usage: found.unwrap_or_default(), explored: s.explored })
}

/// `U(c)`: the computation from `c` branching at universal configurations
/// and stopping at existential or final ones. Node 0 is `c`; the 0-branch
/// child precedes the 1-branch child.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniversalBlock {
    pub configs: Vec<Stackless>,
    pub parent: Vec<Option<usize>>,
    /// Branch bit (universal steps only) and pushed bit of the edge into
    /// each node.
    pub edge: Vec<(Option<bool>, Option<bool>)>,
    pub children: Vec<Vec<usize>>,
}

impl UniversalBlock {
    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![0];
        while let Some(u) = stack.pop() {
            if self.children[u].is_empty() {
                out.push(u);
            }
            stack.extend(self.children[u].iter().rev());
        }
        out
    }

    /// Nodes from the root down to `u`.
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
}

/// Node cap for [`universal_block`].
pub const BLOCK_CAP: usize = 1 << 16;

pub fn universal_block<M: Machine + ?Sized>(m: &M, c: &Stackless, input: &[bool]) -> Result<UniversalBlock> {
    let mut b = UniversalBlock { configs: vec![c.clone()], parent: vec![None], edge: vec![(None, None)], children: vec![Vec::new()] };
    let mut stack = vec![0];
    while let Some(u) = stack.pop() {
        let cu = b.configs[u].clone();
        let bits: &[bool] = match m.kind(cu.state) {
            Kind::Existential | Kind::Final => continue,
            Kind::Deterministic => &[false],
            Kind::Universal => &[false, true],
        };
        let universal = bits.len() == 2;
        for &bit in bits {
            if b.configs.len() >= BLOCK_CAP {
                return resource(format!("universal block exceeds {BLOCK_CAP} configurations"));
            }
            let mv = m.step(&cu, input, bit)?;
            let id = b.configs.len();
            b.configs.push(mv.next);
            b.parent.push(Some(u));
            b.edge.push((universal.then_some(bit), mv.push));
            b.children.push(Vec::new());
            b.children[u].push(id);
        }
        stack.extend(b.children[u].iter().rev());
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn machine(kinds: &[Kind], ts: &[(usize, Option<bool>, usize, Option<bool>, Option<&str>)]) -> ArosMachine {
        let trans: BTreeMap<_, _> = ts
            .iter()
            .map(|&(s, b, next, push, w)| {
                let write = w.map(|w| w.chars().map(|c| c == '1').collect());
                ((s, b), Transition { next, push, write })
            })
            .collect();
        ArosMachine::new(kinds.to_vec(), 0, trans).unwrap()
    }

    #[test]
    fn decide_examples() {
        use Kind::*;
        let push_one = machine(&[Deterministic, Final], &[(0, None, 1, Some(true), Some("1"))]);
        assert!(decide(&push_one, &[], &ResourceLimits::unbounded()).unwrap().accept);
        let empty = machine(&[Deterministic, Final], &[(0, None, 1, None, Some("1"))]);
        assert!(!decide(&empty, &[], &ResourceLimits::unbounded()).unwrap().accept);
        let split = machine(
            &[Universal, Final],
            &[(0, Some(false), 1, Some(true), Some("1")), (0, Some(true), 1, Some(false), Some("1"))],
        );
        assert!(!decide(&split, &[], &ResourceLimits::unbounded()).unwrap().accept);
        let guess = machine(
            &[Existential, Final],
            &[(0, Some(false), 1, Some(false), Some("1")), (0, Some(true), 1, Some(true), Some("1"))],
        );
        let d = decide(&guess, &[], &ResourceLimits::unbounded()).unwrap();
        assert!(d.accept);
        assert_eq!((d.usage.nondeterminism, d.usage.stack, d.usage.alternation), (1, 1, 1));
        let none = ResourceLimits { nondeterminism: 0, ..ResourceLimits::unbounded() };
        assert!(!decide(&guess, &[], &none).unwrap().accept);
    }

    #[test]
    fn decide_is_monotone_in_limits() {
        for toy in toy_machines() {
            let mut prev = false;
            for a in 0..4 {
                let l = ResourceLimits { nondeterminism: a, ..ResourceLimits::unbounded() };
                let acc = decide(&toy.machine, &[], &l).unwrap().accept;
                assert!(!prev || acc, "{}", toy.name);
                assert_eq!(acc, toy.accepts_from.is_some_and(|m| a >= m), "{}", toy.name);
                prev = acc;
            }
        }
    }

    #[test]
    fn universal_block_shapes() {
        use Kind::*;
        let path = machine(&[Deterministic, Deterministic, Final], &[(0, None, 1, Some(true), None), (1, None, 2, None, Some("1"))]);
        let b = universal_block(&path, &path.start(), &[]).unwrap();
        assert_eq!(b.configs.len(), 3);
        assert_eq!(b.leaves(), vec![2]);
        let fork = machine(
            &[Universal, Existential, Final],
            &[(0, Some(false), 1, None, None), (0, Some(true), 1, Some(true), None), (1, Some(false), 2, None, None), (1, Some(true), 2, None, None)],
        );
        let b = universal_block(&fork, &fork.start(), &[]).unwrap();
        assert_eq!(b.configs.len(), 3);
        assert_eq!(b.leaves(), vec![1, 2]);
        assert_eq!(b.edge[2], (Some(true), Some(true)));
        for &l in &b.leaves() {
            assert!(matches!(fork.kind(b.configs[l].state), Existential | Final));
        }
        assert_eq!(b, universal_block(&fork, &fork.start(), &[]).unwrap());
    }
}
