//! Seeded verification campaigns. Every trial draws its input from a
//! stream of one 64-bit seed selected by the trial index, runs a rule
//! (usually generate, reduce, and decide both sides by brute force) and
//! checks the declared parameters of the output. Trials run in parallel
//! when the `parallel` feature is on; results are merged by index, so a
//! report depends only on the configuration.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{input, resource, Error, Result};
use crate::formulas::{
    is_t_normalized, normalization_level, random_normalized, weighted_circuit_sat_bruteforce,
    weighted_sat_bruteforce, weighted_sat_search, WeightedSatInstance,
};
use crate::graph::Graph;
use crate::instance::{
    bincsp_to_listcoloring, check_assignment, listcoloring_to_bincsp, random_instance_with, random_list_coloring,
    BinCsp, Precoloring, Value,
};
use crate::logic::{bincsp_dfold_to_prenex, bincsp_td_to_structure, eval_guided, eval_prenex};
use crate::machine::{
    compile_bincsp_td, compile_regular_arosm_to_bincsp, decide, toy_machines, RegularParams, ResourceLimits,
};
use crate::reductions::{
    bincsp_fvs_to_circuit, bincsp_modtd_to_wsat2d1, bincsp_vc_to_wsat3, listcoloring_to_precolext,
    listcoloring_vc_to_wsat2, pad_to_level, precolext_modtd_strip, precolext_vc_kernel, wsat2d1am_to_bincsp_forest_modulator,
    wsat3am_to_bincsp_vc, wsatam_to_bincsp_fvs, KernelOutcome, StripOutcome,
};
use crate::solvers::{solve_bruteforce, solve_by_elimination_forest, solve_by_modulator, solve_by_vertex_cover};
use crate::structure::{
    ceil_log2, fat_elimination_tree, feedback_vertex_set_exact, modulator_to_treedepth, treedepth_exact,
    tree_edge_labeling, validate_elimination_forest, validate_fat_tree, vertex_cover_exact, EliminationForest,
};
use crate::tree::random_ordered_tree;
use crate::unitrees::{build_universal_tree, find_embedding, is_embedding, universal_leaf_bound};

/// Size caps of generated inputs. `n` bounds variables (or vertices,
/// formula variables, tree leaves), `dom` bounds domains, colors or the
/// gate fan-in of random formulas, `d` is the depth parameter and `k` the
/// weight or modulator budget. Rules ignore caps they have no use for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Caps {
    pub n: usize,
    pub dom: usize,
    pub d: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CampaignConfig {
    pub rule: String,
    pub trials: usize,
    pub seed: u64,
    pub caps: Caps,
}

impl CampaignConfig {
    /// The rule's default caps.
    pub fn new(rule: &str, trials: usize, seed: u64) -> Result<Self> {
        let r = find_rule(rule)?;
        Ok(CampaignConfig { rule: rule.to_string(), trials, seed, caps: r.defaults })
    }

    pub fn validate(&self) -> Result<&'static Rule> {
        let r = find_rule(&self.rule)?;
        let c = self.caps;
        let l = r.limits;
        if c.n == 0 || c.dom == 0 || c.d == 0 || c.k == 0 {
            return input("caps must be positive");
        }
        if c.n > l.n || c.dom > l.dom || c.d > l.d || c.k > l.k {
            return input(format!(
                "caps for `{}` are limited to n <= {}, dom <= {}, d <= {}, k <= {}",
                r.name, l.n, l.dom, l.d, l.k
            ));
        }
        Ok(r)
    }
}

/// What one trial established.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    /// Both sides (or all solvers) gave the same answer.
    pub agree: bool,
    /// The output passed its parameter validators.
    pub params_ok: bool,
    pub note: String,
}

impl Outcome {
    fn compare(want: bool, got: bool, params_ok: bool, note: String) -> Self {
        let note = format!("{note} {}", if want { "sat" } else { "unsat" });
        Outcome { agree: want == got, params_ok, note }
    }

    fn check(ok: bool, note: String) -> Self {
        Outcome { agree: ok, params_ok: true, note }
    }
}

type TrialFn = fn(&mut ChaCha8Rng, &Caps) -> Result<Outcome>;

pub struct Rule {
    pub name: &'static str,
    pub about: &'static str,
    pub defaults: Caps,
    /// Largest caps the oracles handle comfortably.
    pub limits: Caps,
    trial: TrialFn,
}

impl Rule {
    pub fn run(&self, rng: &mut ChaCha8Rng, caps: &Caps) -> Result<Outcome> {
        (self.trial)(rng, caps)
    }
}

const fn caps(n: usize, dom: usize, d: usize, k: usize) -> Caps {
    Caps { n, dom, d, k }
}

pub static RULES: &[Rule] = &[
    Rule {
        name: "w3hard",
        about: "antimonotone 3-normalized weighted SAT to BinCSP with a vertex cover",
        defaults: caps(8, 4, 1, 3),
        limits: caps(10, 4, 1, 4),
        trial: w3hard,
    },
    Rule {
        name: "vc-to-wsat3",
        about: "BinCSP with a vertex cover to 3-normalized weighted SAT",
        defaults: caps(6, 3, 1, 1),
        limits: caps(7, 3, 1, 1),
        trial: vc_to_wsat3,
    },
    Rule {
        name: "w2d1hard",
        about: "antimonotone (2d+1)-normalized weighted SAT to BinCSP with a modulator to depth d",
        defaults: caps(5, 2, 1, 3),
        limits: caps(6, 3, 2, 3),
        trial: w2d1hard,
    },
    Rule {
        name: "modtd-to-wsat",
        about: "BinCSP with a modulator to depth d to (2d+1)-normalized weighted SAT",
        defaults: caps(6, 3, 1, 1),
        limits: caps(7, 3, 3, 1),
        trial: modtd_to_wsat,
    },
    Rule {
        name: "fvs-hard",
        about: "antimonotone odd-level weighted SAT to BinCSP with a feedback vertex set",
        defaults: caps(5, 2, 1, 3),
        limits: caps(6, 3, 2, 3),
        trial: fvs_hard,
    },
    Rule {
        name: "fvs-to-circuit",
        about: "BinCSP with a feedback vertex set to weighted circuit SAT",
        defaults: caps(6, 3, 1, 1),
        limits: caps(7, 3, 1, 1),
        trial: fvs_to_circuit,
    },
    Rule {
        name: "listcol-vc",
        about: "List Coloring with a vertex cover to weighted 2-normalized SAT",
        defaults: caps(6, 4, 1, 1),
        limits: caps(7, 5, 1, 1),
        trial: listcol_vc,
    },
    Rule {
        name: "bincsp-to-listcol",
        about: "BinCSP to List Coloring by forbidden-pair gadgets",
        defaults: caps(6, 3, 1, 1),
        limits: caps(7, 3, 1, 1),
        trial: bincsp_to_listcol,
    },
    Rule {
        name: "listcol-to-bincsp",
        about: "List Coloring to BinCSP with disequality constraints",
        defaults: caps(6, 4, 1, 1),
        limits: caps(8, 6, 1, 1),
        trial: listcol_to_bincsp,
    },
    Rule {
        name: "listcol-to-precol",
        about: "List Coloring with a modulator to Precoloring Extension by pendant vertices",
        defaults: caps(6, 3, 2, 1),
        limits: caps(7, 4, 3, 1),
        trial: listcol_to_precol,
    },
    Rule {
        name: "precol-kernel",
        about: "Precoloring Extension with a vertex cover to a List Coloring kernel",
        defaults: caps(7, 5, 1, 1),
        limits: caps(8, 6, 1, 1),
        trial: precol_kernel,
    },
    Rule {
        name: "precol-strip",
        about: "Precoloring Extension with a modulator to List Coloring of smaller depth",
        defaults: caps(7, 6, 2, 1),
        limits: caps(8, 7, 3, 1),
        trial: precol_strip,
    },
    Rule {
        name: "td-machine",
        about: "BinCSP with an elimination forest compiled to an alternating read-once stack machine",
        defaults: caps(5, 3, 3, 1),
        limits: caps(6, 3, 4, 1),
        trial: td_machine,
    },
    Rule {
        name: "regular-arosm",
        about: "bundled toy regular machines to BinCSP along a contraction tree (K = 2)",
        defaults: caps(1, 1, 1, 2),
        limits: caps(1, 1, 1, 2),
        trial: regular_arosm,
    },
    Rule {
        name: "td-structure",
        about: "BinCSP with an elimination forest to a structure and a guided sentence",
        defaults: caps(5, 3, 1, 1),
        limits: caps(6, 3, 1, 1),
        trial: td_structure,
    },
    Rule {
        name: "dfold-prenex",
        about: "BinCSP with a fat elimination tree to a prenex sentence",
        defaults: caps(5, 3, 2, 2),
        limits: caps(6, 3, 2, 2),
        trial: dfold_prenex,
    },
    Rule {
        name: "solvers",
        about: "brute force, forest DP, cover and modulator solvers on one instance",
        defaults: caps(6, 3, 2, 1),
        limits: caps(8, 4, 3, 1),
        trial: solvers,
    },
    Rule {
        name: "labeling",
        about: "edge labels of random ordered trees spell preorder leaf indices",
        defaults: caps(64, 1, 12, 1),
        limits: caps(4096, 1, 64, 1),
        trial: labeling,
    },
    Rule {
        name: "universal-tree",
        about: "random ordered trees embed into universal trees",
        defaults: caps(8, 1, 1, 3),
        limits: caps(64, 1, 1, 5),
        trial: universal_tree,
    },
];

pub fn find_rule(name: &str) -> Result<&'static Rule> {
    match RULES.iter().find(|r| r.name == name) {
        Some(r) => Ok(r),
        None => {
            let known: Vec<&str> = RULES.iter().map(|r| r.name).collect();
            input(format!("unknown rule `{name}` (known: {})", known.join(", ")))
        }
    }
}

fn random_csp(rng: &mut ChaCha8Rng, c: &Caps) -> BinCsp {
    let n = rng.gen_range(1..=c.n);
    random_instance_with(rng, n, c.dom, 0.5, 0.6)
}

/// A minimum cover with some other vertices thrown in.
fn random_cover(rng: &mut ChaCha8Rng, g: &Graph) -> Vec<usize> {
    let mut w = vertex_cover_exact(g, g.n()).expect("all vertices cover");
    w.extend((0..g.n()).filter(|v| !w.contains(v) && rng.gen_bool(0.25)).collect::<Vec<_>>());
    w.sort_unstable();
    w
}

fn forest_of_rest_ok(g: &Graph, w: &[usize], f: &EliminationForest, d: usize) -> Result<bool> {
    let (sub, _) = g.induced(&g.complement_of(w));
    Ok(validate_elimination_forest(&sub, f)? && f.depth() <= d)
}

/// Redraws until `accept` holds, giving up as a skipped trial.
fn draw<T>(rng: &mut ChaCha8Rng, mut gen: impl FnMut(&mut ChaCha8Rng) -> Result<Option<T>>) -> Result<T> {
    for _ in 0..256 {
        if let Some(x) = gen(rng)? {
            return Ok(x);
        }
    }
    resource("no admissible input in 256 draws")
}

fn w3hard(rng: &mut ChaCha8Rng, c: &Caps) -> Result<Outcome> {
    let n = rng.gen_range(1..=c.n);
    let f = random_normalized(rng, n, 3, c.dom, true);
    let k = rng.gen_range(0..=c.k);
    let h = wsat3am_to_bincsp_vc(&f, k)?;
    let want = weighted_sat_bruteforce(&WeightedSatInstance { formula: f, k })?.is_some();
    let got = solve_bruteforce(&h.inst)?.is_some();
    let ok = h.w.len() <= k && h.inst.graph().is_vertex_cover(&h.w);
    Ok(Outcome::compare(want, got, ok, format!("n={n} k={k}")))
}

fn vc_to_wsat3(rng: &mut ChaCha8Rng, c: &Caps) -> Result<Outcome> {
    let inst = random_csp(rng, c);
    let w = random_cover(rng, inst.graph());
    let e = bincsp_vc_to_wsat3(&inst, &w)?;
    let want = solve_bruteforce(&inst)?.is_some();
    let got = weighted_sat_bruteforce(&e.wsat)?.is_some();
    let ok = is_t_normalized(&e.wsat.formula, 3) && e.wsat.k == w.len();
    Ok(Outcome::compare(want, got, ok, format!("n={} |W|={}", inst.n(), w.len())))
}

fn w2d1hard(rng: &mut ChaCha8Rng, c: &Caps) -> Result<Outcome> {
    let d = c.d;
    let n = rng.gen_range(1..=c.n);
    let f = random_normalized(rng, n, 2 * d + 1, c.dom, true);
    let k = rng.gen_range(0..=c.k);
    let h = wsat2d1am_to_bincsp_forest_modulator(&f, k, d)?;
    let want = weighted_sat_bruteforce(&WeightedSatInstance { formula: f, k })?.is_some();
    let got = solve_bruteforce(&h.inst)?.is_some();
    let ok = h.w.len() <= k && forest_of_rest_ok(h.inst.graph(), &h.w, &h.forest, d)?;
    Ok(Outcome::compare(want, got, ok, format!("n={n} k={k} d={d}")))
}

fn modtd_to_wsat(rng: &mut ChaCha8Rng, c: &Caps) -> Result<Outcome> {
    let d = c.d;
    let inst = random_csp(rng, c);
    let g = inst.graph();
    let m = modulator_to_treedepth(g, d, g.n())?.expect("deleting everything works");
    let e = bincsp_modtd_to_wsat2d1(&inst, &m.set, &m.forest)?;
    let wsat = WeightedSatInstance { formula: pad_to_level(&e.wsat.formula, 2 * d + 1)?, k: e.wsat.k };
    let want = solve_bruteforce(&inst)?.is_some();
    let got = weighted_sat_bruteforce(&wsat)?.is_some();
    let ok = is_t_normalized(&wsat.formula, 2 * d + 1) && wsat.k == m.set.len() && m.validate(g, d)?;
    Ok(Outcome::compare(want, got, ok, format!("n={} |W|={} d={d}", inst.n(), m.set.len())))
}

fn fvs_hard(rng: &mut ChaCha8Rng, c: &Caps) -> Result<Outcome> {
    let t = 2 * c.d + 1;
    let n = rng.gen_range(1..=c.n);
    let f = draw(rng, |rng| {
        let f = random_normalized(rng, n, t, c.dom, true);
        Ok((normalization_level(&f)? == t).then_some(f))
    })?;
    let k = rng.gen_range(0..=c.k);
    let h = wsatam_to_bincsp_fvs(&f, k)?;
    let want = weighted_sat_bruteforce(&WeightedSatInstance { formula: f, k })?.is_some();
    let got = solve_bruteforce(&h.inst)?.is_some();
    let g = h.inst.graph();
    let ok = h.w.len() <= k && g.is_feedback_vertex_set(&h.w) && forest_of_rest_ok(g, &h.w, &h.forest, usize::MAX)?;
    Ok(Outcome::compare(want, got, ok, format!("n={n} k={k} t={t}")))
}

fn fvs_to_circuit(rng: &mut ChaCha8Rng, c: &Caps) -> Result<Outcome> {
    let inst = random_csp(rng, c);
    let g = inst.graph();
    let mut w = feedback_vertex_set_exact(g, g.n())?.expect("all vertices form a feedback set");
    w.extend((0..g.n()).filter(|v| !w.contains(v) && rng.gen_bool(0.25)).collect::<Vec<_>>());
    w.sort_unstable();
    let e = bincsp_fvs_to_circuit(&inst, &w)?;
    let want = solve_bruteforce(&inst)?.is_some();
    let got = weighted_circuit_sat_bruteforce(&e.circuit, e.k)?.is_some();
    let ok = e.circuit.is_acyclic() && e.k == w.len();
    Ok(Outcome::compare(want, got, ok, format!("n={} |W|={}", inst.n(), w.len())))
}

/// `|W|` plus four times the sizes of the distinct non-empty neighbourhoods
/// of vertices outside `W`.
fn listcol_weight(g: &Graph, w: &[usize]) -> usize {
    let mut seen: Vec<Vec<usize>> = Vec::new();
    for v in g.complement_of(w) {
        let mut nb = g.neighbors(v).to_vec();
        nb.sort_unstable();
        if !nb.is_empty() && !seen.contains(&nb) {
            seen.push(nb);
        }
    }
    w.len() + 4 * seen.iter().map(Vec::len).sum::<usize>()
}

fn listcol_vc(rng: &mut ChaCha8Rng, c: &Caps) -> Result<Outcome> {
    let n = rng.gen_range(1..=c.n);
    let colors = rng.gen_range(1..=c.dom);
    let lc = random_list_coloring(rng, n, colors, 0.5, 0.7);
    let w = random_cover(rng, &lc.graph);
    let e = listcoloring_vc_to_wsat2(&lc, &w)?;
    let want = lc.solve_bruteforce().is_some();
    let got = weighted_sat_search(&e.wsat)?.is_some();
    let ok = e.wsat.k == listcol_weight(&lc.graph, &w) && normalization_level(&e.wsat.formula)? <= 2;
    Ok(Outcome::compare(want, got, ok, format!("n={n} colors={colors} k'={}", e.wsat.k)))
}

fn bincsp_to_listcol(rng: &mut ChaCha8Rng, c: &Caps) -> Result<Outcome> {
    let inst = random_csp(rng, c);
    let gc = bincsp_to_listcoloring(&inst);
    let want = solve_bruteforce(&inst)?.is_some();
    let col = gc.lc.solve_bruteforce();
    let ok = match &col {
        Some(col) => check_assignment(&inst, &gc.decode(col))?,
        None => true,
    };
    let ok = ok && gc.lc.lists[inst.n()..].iter().all(|l| l.len() == 2);
    Ok(Outcome::compare(want, col.is_some(), ok, format!("n={} gadgets={}", inst.n(), gc.gadgets.len())))
}

fn listcol_to_bincsp(rng: &mut ChaCha8Rng, c: &Caps) -> Result<Outcome> {
    let n = rng.gen_range(1..=c.n);
    let colors = rng.gen_range(1..=c.dom);
    let lc = random_list_coloring(rng, n, colors, 0.5, 0.7);
    let inst = listcoloring_to_bincsp(&lc);
    let want = lc.solve_bruteforce();
    let got = solve_bruteforce(&inst)?;
    // both search in the same lexicographic order
    let ok = inst.graph() == &lc.graph && want == got;
    Ok(Outcome::compare(want.is_some(), got.is_some(), ok, format!("n={n} colors={colors}")))
}

fn listcol_to_precol(rng: &mut ChaCha8Rng, c: &Caps) -> Result<Outcome> {
    let d = c.d;
    let n = rng.gen_range(1..=c.n);
    let colors = rng.gen_range(1..=c.dom);
    let lc = random_list_coloring(rng, n, colors, 0.5, 0.7);
    let m = modulator_to_treedepth(&lc.graph, d, n)?.expect("deleting everything works");
    let out = listcoloring_to_precolext(&lc, &m.set, &m.forest)?;
    let want = lc.solve_bruteforce().is_some();
    let got = out.pre.solve_bruteforce().is_some();
    let ok = out.w == m.set && forest_of_rest_ok(&out.pre.graph, &out.w, &out.forest, m.forest.depth() + 1)?;
    Ok(Outcome::compare(want, got, ok, format!("n={n} colors={colors} |W|={}", m.set.len())))
}

fn random_precoloring(rng: &mut ChaCha8Rng, c: &Caps) -> Result<Precoloring> {
    let n = rng.gen_range(1..=c.n);
    let colors = rng.gen_range(1..=c.dom);
    let lc = random_list_coloring(rng, n, colors, 0.45, 1.0);
    let mut pre = std::collections::BTreeMap::new();
    for v in 0..n {
        if rng.gen_bool(0.4) {
            pre.insert(v, rng.gen_range(0..colors as Value));
        }
    }
    Precoloring::new(lc.graph, colors, pre)
}

fn precol_kernel(rng: &mut ChaCha8Rng, c: &Caps) -> Result<Outcome> {
    let pre = random_precoloring(rng, c)?;
    let s = random_cover(rng, &pre.graph);
    let want = pre.solve_bruteforce().is_some();
    let note = format!("n={} colors={} |S|={}", pre.n(), pre.colors, s.len());
    Ok(match precolext_vc_kernel(&pre, &s)? {
        KernelOutcome::Verdict(v) => Outcome::compare(want, v, true, note),
        KernelOutcome::Kernel { lc, map } => {
            let ok = map.len() <= s.len() && lc.n() == map.len();
            Outcome::compare(want, lc.solve_bruteforce().is_some(), ok, note + " kernel")
        }
    })
}

fn precol_strip(rng: &mut ChaCha8Rng, c: &Caps) -> Result<Outcome> {
    let d = c.d;
    let pre = random_precoloring(rng, c)?;
    let m = modulator_to_treedepth(&pre.graph, d, pre.n())?.expect("deleting everything works");
    let want = pre.solve_bruteforce().is_some();
    let note = format!("n={} colors={} |S|={} d={d}", pre.n(), pre.colors, m.set.len());
    Ok(match precolext_modtd_strip(&pre, &m.set, &m.forest)? {
        StripOutcome::Verdict(v) => Outcome::compare(want, v, true, note),
        StripOutcome::Reduced { lc, s, forest, .. } => {
            let shallower = m.forest.depth().max(1) - 1;
            let ok = s.len() <= m.set.len() && forest_of_rest_ok(&lc.graph, &s, &forest, shallower)?;
            Outcome::compare(want, lc.solve_bruteforce().is_some(), ok, note + " reduced")
        }
    })
}

/// Per-branch bounds checked on compiled td machines, in terms of the depth
/// `td` of the forest and the value width `bits = ceil(log2 max(n, |D|, 2))`.
pub fn td_machine_bounds(td: usize, bits: usize) -> (usize, usize, usize) {
    let alternation = 2 * td + 3;
    let conondeterminism = 2 * td + 3 * bits + 4;
    let nondeterminism = (td + 3) * bits;
    (alternation, conondeterminism, nondeterminism)
}

fn td_machine(rng: &mut ChaCha8Rng, c: &Caps) -> Result<Outcome> {
    let (inst, td, f) = draw(rng, |rng| {
        let inst = random_csp(rng, c);
        let (td, f) = treedepth_exact(inst.graph())?;
        Ok((td <= c.d).then_some((inst, td, f)))
    })?;
    let (m, x) = compile_bincsp_td(&inst, &f)?;
    let dec = decide(&m, &x, &ResourceLimits::unbounded())?;
    let want = solve_bruteforce(&inst)?.is_some();
    let (alt, co, nd) = td_machine_bounds(td, m.bits);
    let u = dec.explored;
    let ok = u.alternation <= alt && u.conondeterminism <= co && u.nondeterminism <= nd;
    let note = format!(
        "n={} td={td} alt={} co={} nd={}",
        inst.n(),
        u.alternation,
        u.conondeterminism,
        u.nondeterminism
    );
    Ok(Outcome::compare(want, dec.accept, ok, note))
}

/// Budgets of the regular reduction for the bundled toys with `a`
/// existential steps allowed.
pub fn toy_params(a: usize) -> RegularParams {
    RegularParams { nondeterminism: a, conondeterminism: 1, stack: 2, k: 2, log_n: 1 }
}

pub fn toy_limits(p: &RegularParams) -> ResourceLimits {
    ResourceLimits {
        nondeterminism: p.nondeterminism,
        conondeterminism: p.conondeterminism,
        stack: p.stack,
        ..ResourceLimits::unbounded()
    }
}

fn regular_arosm(rng: &mut ChaCha8Rng, _: &Caps) -> Result<Outcome> {
    let toys = toy_machines();
    let toy = &toys[rng.gen_range(0..toys.len())];
    let p = toy_params(rng.gen_range(1..=2));
    let r = compile_regular_arosm_to_bincsp(&toy.machine, &toy.tree, &[], p)?;
    let want = decide(&toy.machine, &[], &toy_limits(&p))?.accept;
    let got = solve_by_elimination_forest(&r.inst, &r.forest)?.is_some();
    let ok = validate_elimination_forest(r.inst.graph(), &r.forest)?
        && r.forest.depth() <= 3 * p.k * p.k + p.k
        && r.configs.len() <= 12;
    Ok(Outcome::compare(want, got, ok, format!("{} a={}", toy.name, p.nondeterminism)))
}

fn td_structure(rng: &mut ChaCha8Rng, c: &Caps) -> Result<Outcome> {
    let inst = random_csp(rng, c);
    let (td, f) = treedepth_exact(inst.graph())?;
    let (a, s) = bincsp_td_to_structure(&inst, &f)?;
    let want = solve_bruteforce(&inst)?.is_some();
    let got = eval_guided(&a, &s)?;
    Ok(Outcome::compare(want, got, s.k == td.max(2), format!("n={} td={td}", inst.n())))
}

fn dfold_prenex(rng: &mut ChaCha8Rng, c: &Caps) -> Result<Outcome> {
    let (inst, w) = draw(rng, |rng| {
        let inst = random_csp(rng, c);
        let d = rng.gen_range(1..=c.d);
        let mut found = None;
        for k in 1..=c.k {
            found = fat_elimination_tree(inst.graph(), d, k)?;
            if found.is_some() {
                break;
            }
        }
        Ok(found.map(|w| (inst, w)))
    })?;
    let (a, s) = bincsp_dfold_to_prenex(&inst, &w)?;
    let want = solve_bruteforce(&inst)?.is_some();
    let got = eval_prenex(&a, &s)?;
    let ok = validate_fat_tree(inst.graph(), &w)? && w.width() <= c.k && s.sigma_level() == Some(2 * w.depth() - 1);
    Ok(Outcome::compare(want, got, ok, format!("n={} d={} k={}", inst.n(), w.depth(), w.width())))
}

fn solvers(rng: &mut ChaCha8Rng, c: &Caps) -> Result<Outcome> {
    let inst = random_csp(rng, c);
    let g = inst.graph();
    let brute = solve_bruteforce(&inst)?;
    let (_, f) = treedepth_exact(g)?;
    let dp = solve_by_elimination_forest(&inst, &f)?;
    let vc = solve_by_vertex_cover(&inst, &random_cover(rng, g))?;
    let d = rng.gen_range(1..=c.d);
    let m = modulator_to_treedepth(g, d, g.n())?.expect("deleting everything works");
    let modulator = solve_by_modulator(&inst, &m.set, &m.forest)?;
    let witness_ok = match &brute {
        Some(a) => check_assignment(&inst, a)?,
        None => true,
    };
    let agree = dp == brute && vc == brute && modulator == brute && witness_ok;
    let note = format!("n={} {}", inst.n(), if brute.is_some() { "sat" } else { "unsat" });
    Ok(Outcome::check(agree, note))
}

fn labeling(rng: &mut ChaCha8Rng, c: &Caps) -> Result<Outcome> {
    let leaves = rng.gen_range(1..=c.n);
    let depth = if leaves == 1 { rng.gen_range(1..=c.d.max(1)) } else { rng.gen_range(2..=c.d.max(2)) };
    let t = random_ordered_tree(rng, leaves, depth);
    let lab = tree_edge_labeling(&t);
    let mut width = 0;
    while 1usize << width < leaves {
        width += 1;
    }
    let distinct = (0..t.len()).all(|u| {
        let mut ls: Vec<&str> = t.children(u).iter().map(|&v| lab.label(v)).collect();
        ls.sort_unstable();
        ls.windows(2).all(|p| p[0] != p[1])
    });
    let mut short = true;
    let mut spells = true;
    for (i, &l) in t.preorder().iter().filter(|&&u| t.is_leaf(u)).enumerate() {
        let word = lab.branch_word(&t, l);
        short &= word.len() <= width;
        let index = if width == 0 { String::new() } else { format!("{i:0width$b}") };
        spells &= word == index;
    }
    let note = format!("leaves={leaves} depth={}", t.depth());
    Ok(Outcome::check(distinct && short && spells && lab.bits == ceil_log2(leaves), note))
}

fn universal_tree(rng: &mut ChaCha8Rng, c: &Caps) -> Result<Outcome> {
    let k = rng.gen_range(1..=c.k);
    let leaves = if k == 1 { 1 } else { rng.gen_range(1..=c.n) };
    let s = random_ordered_tree(rng, leaves, k);
    let n = rng.gen_range(leaves..=c.n.max(leaves));
    let u = build_universal_tree(n, k);
    let embeds = find_embedding(&s, &u).is_some_and(|e| is_embedding(&s, &u, &e));
    let ok = u.depth() <= k && u.leaf_count() as u128 <= universal_leaf_bound(n, k);
    Ok(Outcome { agree: embeds, params_ok: ok, note: format!("leaves={leaves} n={n} k={k}") })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialStatus {
    Pass,
    Mismatch,
    /// The output failed a parameter validator.
    Invalid,
    /// A resource cap was hit.
    Skipped,
    /// The rule rejected its own generated input.
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub index: usize,
    pub status: TrialStatus,
    pub note: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    Parallel,
    Sequential,
}

/// The random stream of trial `index`.
pub fn trial_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// `f(0), ..., f(count - 1)` in index order, in parallel when the
/// `parallel` feature is enabled and `Schedule::Parallel` is asked for.
pub fn run_indexed<T, F>(count: usize, schedule: Schedule, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match schedule {
        #[cfg(feature = "parallel")]
        Schedule::Parallel => {
            use rayon::prelude::*;
            (0..count).into_par_iter().map(f).collect()
        }
        _ => (0..count).map(f).collect(),
    }
}

pub fn run_trial(rule: &Rule, seed: u64, index: usize, c: &Caps) -> TrialRecord {
    let start = Instant::now();
    let mut rng = trial_rng(seed, index);
    let (status, note) = match rule.run(&mut rng, c) {
        Ok(o) if !o.params_ok => (TrialStatus::Invalid, o.note),
        Ok(o) if !o.agree => (TrialStatus::Mismatch, o.note),
        Ok(o) => (TrialStatus::Pass, o.note),
        Err(Error::Resource(msg)) => (TrialStatus::Skipped, msg),
        Err(e) => (TrialStatus::Error, e.to_string()),
    };
    TrialRecord { index, status, note, elapsed: start.elapsed() }
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignReport {
    pub config: CampaignConfig,
    pub passed: usize,
    pub mismatches: usize,
    pub invalid: usize,
    pub skipped: usize,
    pub errors: usize,
    pub records: Vec<TrialRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Timing {
    pub p50: Duration,
    pub p90: Duration,
    pub p99: Duration,
    pub max: Duration,
}

impl CampaignReport {
    /// No mismatches, validator failures or errors. Skipped trials do not
    /// fail a campaign.
    pub fn ok(&self) -> bool {
        self.mismatches == 0 && self.invalid == 0 && self.errors == 0
    }

    /// Nearest-rank percentiles of the per-trial wall time.
    pub fn timing(&self) -> Timing {
        let mut ts: Vec<Duration> = self.records.iter().map(|r| r.elapsed).collect();
        ts.sort_unstable();
        let at = |p: usize| -> Duration {
            if ts.is_empty() {
                Duration::ZERO
            } else {
                ts[(p * ts.len()).div_ceil(100).max(1) - 1]
            }
        };
        Timing { p50: at(50), p90: at(90), p99: at(99), max: ts.last().copied().unwrap_or_default() }
    }

    /// Counts and the failing trials; timings are left out so that the
    /// text depends only on the configuration.
    pub fn summary(&self) -> String {
        let c = &self.config;
        let mut s = format!(
            "rule {} trials {} seed {} caps n={} dom={} d={} k={}\n",
            c.rule, c.trials, c.seed, c.caps.n, c.caps.dom, c.caps.d, c.caps.k
        );
        s += &format!(
            "passed {} mismatches {} invalid {} skipped {} errors {}\n",
            self.passed, self.mismatches, self.invalid, self.skipped, self.errors
        );
        for r in self.records.iter().filter(|r| r.status != TrialStatus::Pass) {
            s += &format!("trial {} {:?}: {}\n", r.index, r.status, r.note).to_lowercase();
        }
        s
    }
}

pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    run_campaign_scheduled(cfg, Schedule::Parallel)
}

pub fn run_campaign_scheduled(cfg: &CampaignConfig, schedule: Schedule) -> Result<CampaignReport> {
    let rule = cfg.validate()?;
    let records = run_indexed(cfg.trials, schedule, |i| run_trial(rule, cfg.seed, i, &cfg.caps));
    let count = |s: TrialStatus| records.iter().filter(|r| r.status == s).count();
    Ok(CampaignReport {
        config: cfg.clone(),
        passed: count(TrialStatus::Pass),
        mismatches: count(TrialStatus::Mismatch),
        invalid: count(TrialStatus::Invalid),
        skipped: count(TrialStatus::Skipped),
        errors: count(TrialStatus::Error),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_rule_passes_a_few_trials() {
        for r in RULES {
            let cfg = CampaignConfig::new(r.name, 6, 1).unwrap();
            let rep = run_campaign(&cfg).unwrap();
            assert!(rep.ok(), "{}", rep.summary());
            assert_eq!(rep.skipped, 0, "{}", rep.summary());
        }
    }

    #[test]
    fn schedules_agree() {
        let cfg = CampaignConfig::new("w3hard", 12, 9).unwrap();
        let a = run_campaign_scheduled(&cfg, Schedule::Parallel).unwrap();
        let b = run_campaign_scheduled(&cfg, Schedule::Sequential).unwrap();
        assert_eq!(a.summary(), b.summary());
        let notes = |r: &CampaignReport| r.records.iter().map(|t| t.note.clone()).collect::<Vec<_>>();
        assert_eq!(notes(&a), notes(&b));
    }

    #[test]
    fn config_checks() {
        assert!(CampaignConfig::new("nope", 1, 0).is_err());
        let mut cfg = CampaignConfig::new("w3hard", 0, 0).unwrap();
        let rep = run_campaign(&cfg).unwrap();
        assert!(rep.ok() && rep.records.is_empty());
        cfg.caps.n = 0;
        assert!(run_campaign(&cfg).is_err());
        cfg.caps.n = 1000;
        assert!(run_campaign(&cfg).is_err());
    }

    #[test]
    fn streams_differ_per_index() {
        let a: u64 = trial_rng(3, 0).gen();
        let b: u64 = trial_rng(3, 1).gen();
        assert_ne!(a, b);
        assert_eq!(a, trial_rng(3, 0).gen::<u64>());
    }
}
