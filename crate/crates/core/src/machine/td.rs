use super::{Kind, Machine, Move, Stackless};
use crate::error::{input, Result};
use crate::instance::BinCsp;
use crate::structure::{ceil_log2, tree_edge_labeling, validate_elimination_forest, EliminationForest};
use crate::tree::OrderedTree;

const DUMMY: usize = 0;
const GUESS: usize = 1;
const GUESS_TWIN: usize = 2;
const CHECK: usize = 3;
const LABEL_MORE: usize = 4;
const LABEL_BIT: usize = 5;
const LABEL_PICK: usize = 6;
const EDGE: usize = 7;
const EDGE_CHECK: usize = 8;
const PAIR: usize = 9;
const PAIR_CHECK: usize = 10;
const PROBE: usize = 11;
const PROBE_CHECK: usize = 12;
const FINAL: usize = 13;

/// Registers kept on the work tape, each `width` bits.
#[derive(Debug, Clone, Copy, Default)]
struct Regs {
    node: u64,
    acc: u64,
    count: u64,
    x: u64,
    y: u64,
}

/// The machine deciding one BinCSP instance along its elimination tree.
///
/// The tree gets a dummy root whose single value is pushed without
/// guessing. At each real node the machine guesses the value index with
/// `bits` existential steps, pushing every bit `b` as `b, 1-b`. It then
/// guesses a child label universally (each label bit preceded by a
/// continue bit), and at a leaf it universally picks a constraint on the
/// path, existentially picks an allowed pair, and universally picks one
/// bit of the pair to compare against the stack. Universal choices that
/// name nothing accept through a known 1 of the dummy's encoding.
#[derive(Debug, Clone)]
pub struct TdMachine {
    inst: BinCsp,
    /// Node 0 is the dummy root, node `v + 1` is variable `v`.
    tree: OrderedTree,
    labels: Vec<String>,
    max_label: usize,
    /// Value-index width.
    pub bits: usize,
    width: usize,
    /// Per node: the constrained pairs among its root path (variables).
    path_edges: Vec<Vec<(usize, usize)>>,
    /// Per node: the variables on its root path mapped to stack blocks.
    path_pos: Vec<Vec<(usize, usize)>>,
}

impl TdMachine {
    fn encode(&self, r: Regs) -> Vec<bool> {
        let mut out = Vec::with_capacity(5 * self.width);
        for v in [r.node, r.acc, r.count, r.x, r.y] {
            for i in (0..self.width).rev() {
                out.push(v >> i & 1 == 1);
            }
        }
        out
    }

    fn decode(&self, work: &[bool]) -> Regs {
        let field = |i: usize| work[i * self.width..(i + 1) * self.width].iter().fold(0u64, |a, &b| a * 2 + b as u64);
        Regs { node: field(0), acc: field(1), count: field(2), x: field(3), y: field(4) }
    }

    fn to(&self, c: &Stackless, state: usize, r: Regs, push: Option<bool>) -> Move {
        let work = self.encode(r);
        let mut next = c.clone();
        next.state = state;
        next.work_head = work.len() - 1;
        next.work = work;
        Move { next, push }
    }

    fn finish(&self, c: &Stackless, index: u64) -> Move {
        let mut work: Vec<bool> = (0..64 - index.leading_zeros()).rev().map(|i| index >> i & 1 == 1).collect();
        if work.is_empty() {
            work.push(false);
        }
        let mut next = c.clone();
        next.state = FINAL;
        next.work_head = work.len() - 1;
        next.work = work;
        Move { next, push: None }
    }

    /// Position 2 holds the `1` of the dummy's first encoded `0`.
    fn accept(&self, c: &Stackless) -> Move {
        self.finish(c, 2)
    }

    fn reject(&self, c: &Stackless) -> Move {
        self.finish(c, 0)
    }

    /// After the value of `node` is on the stack.
    fn after_value(&self, c: &Stackless, node: usize) -> Move {
        if !self.tree.is_leaf(node) {
            return self.to(c, LABEL_MORE, Regs { node: node as u64, ..Default::default() }, None);
        }
        let m = self.path_edges[node].len();
        match m {
            0 => self.accept(c),
            1 => self.to(c, EDGE_CHECK, Regs { node: node as u64, ..Default::default() }, None),
            _ => self.to(c, EDGE, Regs { node: node as u64, ..Default::default() }, None),
        }
    }

    fn edge_bits(&self, node: usize) -> u64 {
        ceil_log2(self.path_edges[node].len()) as u64
    }

    fn probe_bits(&self) -> u64 {
        ceil_log2(2 * self.bits) as u64
    }

    fn block_of(&self, node: usize, var: usize) -> usize {
        self.path_pos[node].iter().find(|p| p.0 == var).expect("variable on path").1
    }
}

impl Machine for TdMachine {
    fn start(&self) -> Stackless {
        let mut c = Stackless::at(DUMMY);
        c.work = self.encode(Regs::default());
        c.work_head = c.work.len() - 1;
        c
    }

    fn kind(&self, state: usize) -> Kind {
        match state {
            GUESS | PAIR => Kind::Existential,
            LABEL_MORE | LABEL_BIT | EDGE | PROBE => Kind::Universal,
            FINAL => Kind::Final,
            _ => Kind::Deterministic,
        }
    }

    fn step(&self, c: &Stackless, _input: &[bool], bit: bool) -> Result<Move> {
        let mut r = self.decode(&c.work);
        let node = r.node as usize;
        let b = bit as u64;
        let l = self.bits as u64;
        Ok(match c.state {
            DUMMY => {
                r.count += 1;
                let push = Some(r.count % 2 == 0);
                if r.count < 2 * l {
                    self.to(c, DUMMY, r, push)
                } else {
                    let mut m = self.after_value(c, 0);
                    m.push = push;
                    m
                }
            }
            GUESS => {
                r.acc = 2 * r.acc + b;
                r.x = b;
                self.to(c, GUESS_TWIN, r, Some(bit))
            }
            GUESS_TWIN => {
                r.count += 1;
                let push = Some(r.x == 0);
                if r.count < l {
                    self.to(c, GUESS, r, push)
                } else {
                    self.to(c, CHECK, r, push)
                }
            }
            CHECK => {
                if r.acc as usize >= self.inst.domain(node - 1).len() {
                    self.reject(c)
                } else {
                    self.after_value(c, node)
                }
            }
            LABEL_MORE => {
                if bit {
                    self.to(c, LABEL_PICK, r, None)
                } else if r.count as usize >= self.max_label {
                    self.accept(c)
                } else {
                    self.to(c, LABEL_BIT, r, None)
                }
            }
            LABEL_BIT => {
                r.y = 2 * r.y + b;
                r.count += 1;
                self.to(c, LABEL_MORE, r, None)
            }
            LABEL_PICK => {
                let word: String = (0..r.count).rev().map(|i| if r.y >> i & 1 == 1 { '1' } else { '0' }).collect();
                match self.tree.children(node).iter().find(|&&v| self.labels[v] == word) {
                    Some(&v) => self.to(c, GUESS, Regs { node: v as u64, ..Default::default() }, None),
                    None => self.accept(c),
                }
            }
            EDGE => {
                r.acc = 2 * r.acc + b;
                r.count += 1;
                let state = if r.count < self.edge_bits(node) { EDGE } else { EDGE_CHECK };
                self.to(c, state, r, None)
            }
            EDGE_CHECK => {
                if r.acc as usize >= self.path_edges[node].len() {
                    self.accept(c)
                } else {
                    self.to(c, PAIR, Regs { node: r.node, x: r.acc, ..Default::default() }, None)
                }
            }
            PAIR => {
                r.acc = 2 * r.acc + b;
                r.count += 1;
                let state = if r.count < 2 * l { PAIR } else { PAIR_CHECK };
                self.to(c, state, r, None)
            }
            PAIR_CHECK => {
                let (w1, w2) = self.path_edges[node][r.x as usize];
                let (i1, i2) = ((r.acc >> l) as usize, (r.acc & ((1 << l) - 1)) as usize);
                let (d1, d2) = (self.inst.domain(w1), self.inst.domain(w2));
                if i1 < d1.len() && i2 < d2.len() && self.inst.allows(w1, w2, d1[i1], d2[i2]) {
                    self.to(c, PROBE, Regs { node: r.node, x: r.x, y: r.acc, ..Default::default() }, None)
                } else {
                    self.reject(c)
                }
            }
            PROBE => {
                r.acc = 2 * r.acc + b;
                r.count += 1;
                let state = if r.count < self.probe_bits() { PROBE } else { PROBE_CHECK };
                self.to(c, state, r, None)
            }
            PROBE_CHECK => {
                let j = r.acc;
                if j >= 2 * l {
                    return Ok(self.accept(c));
                }
                let (w1, w2) = self.path_edges[node][r.x as usize];
                let (var, idx, p) = if j < l { (w1, r.y >> l, j) } else { (w2, r.y & ((1 << l) - 1), j - l) };
                let expected = idx >> (l - 1 - p) & 1 == 1;
                let first = 2 * l * self.block_of(node, var) as u64 + 2 * p + 1;
                self.finish(c, if expected { first } else { first + 1 })
            }
            _ => return input(format!("no transition from state {}", c.state)),
        })
    }
}

/// Compiles `inst` with an elimination forest into a machine accepting iff
/// `inst` is satisfiable. The second component is the input tape: the
/// macro steps read the instance from the machine itself, so the tape only
/// carries the variable count in unary.
pub fn compile_bincsp_td(inst: &BinCsp, forest: &EliminationForest) -> Result<(TdMachine, Vec<bool>)> {
    if !validate_elimination_forest(inst.graph(), forest)? {
        return input("not an elimination forest of the instance");
    }
    let n = inst.n();
    let parents: Vec<Option<usize>> =
        std::iter::once(None).chain((0..n).map(|v| Some(forest.parent(v).map_or(0, |p| p + 1)))).collect();
    let tree = OrderedTree::from_parents(&parents).expect("forest plus dummy root is a tree");
    let labeling = tree_edge_labeling(&tree);
    let labels: Vec<String> = (0..tree.len()).map(|v| if v == 0 { String::new() } else { labeling.label(v).to_string() }).collect();
    let max_label = labels.iter().map(String::len).max().unwrap_or(0);
    let bits = ceil_log2(n.max(inst.max_domain()).max(2));
    let mut path_edges = Vec::with_capacity(tree.len());
    let mut path_pos = Vec::with_capacity(tree.len());
    for u in 0..tree.len() {
        let path = tree.path_to(u);
        let vars: Vec<(usize, usize)> = path.iter().enumerate().skip(1).map(|(t, &x)| (x - 1, t)).collect();
        let mut edges = Vec::new();
        for (i, &(a, _)) in vars.iter().enumerate() {
            for &(b, _) in &vars[i + 1..] {
                if inst.graph().has_edge(a, b) {
                    edges.push((a.min(b), a.max(b)));
                }
            }
        }
        edges.sort_unstable();
        path_edges.push(edges);
        path_pos.push(vars);
    }
    let stack_len = 2 * bits * (tree.depth() + 1);
    let width = [ceil_log2(tree.len() + 1), 2 * bits, max_label + 1, ceil_log2(stack_len + 2), ceil_log2(n * n + 2)]
        .into_iter()
        .max()
        .unwrap()
        + 1;
    let m = TdMachine { inst: inst.clone(), tree, labels, max_label, bits, width, path_edges, path_pos };
    Ok((m, vec![true; n]))
}
