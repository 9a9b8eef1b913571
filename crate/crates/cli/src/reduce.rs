use std::path::{Path, PathBuf};

use clap::Args;
use paramcsp::campaign::toy_params;
use paramcsp::formulas::{is_t_normalized, normalization_level, NormalizedFormula, WeightedSatInstance};
use paramcsp::instance::{bincsp_to_listcoloring, listcoloring_to_bincsp};
use paramcsp::io;
use paramcsp::logic::{bincsp_dfold_to_prenex, bincsp_td_to_structure};
use paramcsp::machine::{compile_regular_arosm_to_bincsp, RegularParams};
use paramcsp::reductions::{
    bincsp_fvs_to_circuit, bincsp_modtd_to_wsat2d1, bincsp_vc_to_wsat3, listcoloring_to_precolext,
    listcoloring_vc_to_wsat2, pad_to_level, precolext_modtd_strip, precolext_vc_kernel,
    wsat2d1am_to_bincsp_forest_modulator, wsat3am_to_bincsp_vc, wsatam_to_bincsp_fvs, HardInstance, KernelOutcome,
    ReductionReport, StripOutcome,
};
use paramcsp::structure::{
    d_fold_vc_number, fat_elimination_tree, feedback_vertex_set_exact, modulator_to_treedepth, treedepth_exact,
    validate_elimination_forest, validate_fat_tree, vertex_cover_exact, EliminationForest,
};
use paramcsp::{BinCsp, Graph, ListColoring, Precoloring};

use crate::files::{load, load_csp, output_path, read, sibling, write};
use crate::Verdict;

/// Budgets for `regular-arosm`; `--k` sets the number of stack blocks.
#[derive(Args, Debug, Clone)]
pub struct MachineArgs {
    #[arg(long, default_value_t = 1)]
    pub nondet: usize,
    #[arg(long, default_value_t = 1)]
    pub conondet: usize,
    #[arg(long, default_value_t = 2)]
    pub stack: usize,
    #[arg(long, default_value_t = 1)]
    pub log_n: usize,
    /// Input word as a string of 0s and 1s.
    #[arg(long, default_value = "")]
    pub input: String,
}

pub struct Options {
    pub cover: Option<PathBuf>,
    pub tree: Option<PathBuf>,
    pub d: Option<usize>,
    pub k: Option<usize>,
    pub out: Option<PathBuf>,
    pub machine: MachineArgs,
}

const RULES: &[&str] = &[
    "w3hard",
    "w2d1hard",
    "fvs-hard",
    "vc-to-wsat3",
    "modtd-to-wsat",
    "fvs-to-circuit",
    "listcol-vc",
    "bincsp-to-listcol",
    "listcol-to-bincsp",
    "listcol-to-precol",
    "precol-kernel",
    "precol-strip",
    "regular-arosm",
    "td-structure",
    "dfold-prenex",
];

fn err(e: paramcsp::Error) -> String {
    e.to_string()
}

/// Writes `text`, then checks that it parses back to the same text.
fn emit<T>(path: &Path, text: &str, parse: impl Fn(&str) -> paramcsp::Result<T>, print: impl Fn(&T) -> String) -> Result<T, String> {
    write(path, text)?;
    let back = load(path, parse)?;
    if print(&back) != text {
        return Err(format!("{}: written artifact does not read back identically", path.display()));
    }
    println!("wrote {}", path.display());
    Ok(back)
}

fn check(ok: bool, what: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(format!("output failed validation: {what}"))
    }
}

fn cover_or_min(g: &Graph, cover: Option<&Path>) -> Result<Vec<usize>, String> {
    let w = match cover {
        Some(p) => load(p, io::read_vertex_set)?,
        None => vertex_cover_exact(g, g.n()).expect("all vertices cover"),
    };
    check(w.iter().all(|&v| v < g.n()) && g.is_vertex_cover(&w), "--cover is not a vertex cover")?;
    Ok(w)
}

/// A modulator and a forest of the rest, read or computed with depth `d`.
fn modulator(g: &Graph, opts: &Options) -> Result<(Vec<usize>, EliminationForest), String> {
    match (&opts.cover, &opts.tree) {
        (Some(c), Some(t)) => Ok((load(c, io::read_vertex_set)?, load(t, io::read_forest)?)),
        (Some(c), None) => {
            let w = load(c, io::read_vertex_set)?;
            check(w.iter().all(|&v| v < g.n()), "--cover names a missing vertex")?;
            let (sub, _) = g.induced(&g.complement_of(&w));
            Ok((w, treedepth_exact(&sub).map_err(err)?.1))
        }
        (None, None) => {
            let d = opts.d.unwrap_or(1);
            let m = modulator_to_treedepth(g, d, g.n()).map_err(err)?.expect("deleting everything works");
            Ok((m.set, m.forest))
        }
        (None, Some(_)) => Err("--tree needs --cover".into()),
    }
}

fn forest_of_rest_ok(g: &Graph, w: &[usize], f: &EliminationForest) -> Result<bool, String> {
    let (sub, _) = g.induced(&g.complement_of(w));
    validate_elimination_forest(&sub, f).map_err(err)
}

fn report_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".report.json");
    PathBuf::from(s)
}

fn finish(out: &Path, report: ReductionReport) -> Verdict {
    let path = report_path(out);
    let json = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
    write(&path, &(json + "\n"))?;
    let back: serde_json::Value = serde_json::from_str(&read(&path)?).map_err(|e| format!("{}: {e}", path.display()))?;
    check(back["rule"] == report.rule.as_str(), "report does not read back")?;
    println!("wrote {}", path.display());
    for (name, v) in &report.parameters {
        println!("{name} {v}");
    }
    Ok(true)
}

fn emit_bcsp(out: &Path, inst: &BinCsp) -> Result<BinCsp, String> {
    emit(out, &io::write_bincsp(inst), io::read_bincsp, io::write_bincsp)
}

fn emit_wsat(out: &Path, w: &WeightedSatInstance) -> Result<WeightedSatInstance, String> {
    emit(out, &io::write_wsat(w), io::read_wsat, io::write_wsat)
}

fn emit_lcol(out: &Path, lc: &ListColoring) -> Result<ListColoring, String> {
    emit(out, &io::write_listcoloring(lc), io::read_listcoloring, io::write_listcoloring)
}

fn emit_pcol(out: &Path, p: &Precoloring) -> Result<Precoloring, String> {
    emit(out, &io::write_precoloring(p), io::read_precoloring, io::write_precoloring)
}

fn hard_report(rule: &str, h: &HardInstance, k: usize) -> ReductionReport {
    let mut r = ReductionReport::new(rule)
        .param("k", k)
        .param("|W|", h.w.len())
        .param("n", h.inst.n())
        .param("depth", h.forest.depth())
        .set("W", &h.w);
    r.forest = Some(h.forest.parents().to_vec());
    r
}

fn level(f: &NormalizedFormula) -> Result<usize, String> {
    normalization_level(f).map_err(err)
}

pub fn run(file: &Path, rule: &str, opts: &Options) -> Verdict {
    if !RULES.contains(&rule) {
        return Err(format!("unknown rule `{rule}` (known: {})", RULES.join(", ")));
    }
    let out_of = |ext: &str| output_path(file, opts.out.as_deref(), ext);
    match rule {
        "w3hard" | "w2d1hard" | "fvs-hard" => {
            let w = load(file, io::read_wsat)?;
            let k = opts.k.unwrap_or(w.k);
            let t = level(&w.formula)?;
            let (h, d) = match rule {
                "w3hard" => (wsat3am_to_bincsp_vc(&w.formula, k).map_err(err)?, 1),
                "w2d1hard" => {
                    let d = opts.d.unwrap_or(t.max(2) / 2);
                    (wsat2d1am_to_bincsp_forest_modulator(&w.formula, k, d).map_err(err)?, d)
                }
                _ => (wsatam_to_bincsp_fvs(&w.formula, k).map_err(err)?, usize::MAX),
            };
            let out = out_of("bcsp");
            let inst = emit_bcsp(&out, &h.inst)?;
            let g = inst.graph();
            check(h.w.len() <= k, "|W| <= k")?;
            match rule {
                "w3hard" => check(g.is_vertex_cover(&h.w), "W is a vertex cover")?,
                "w2d1hard" => check(forest_of_rest_ok(g, &h.w, &h.forest)? && h.forest.depth() <= d, "forest of G - W")?,
                _ => check(g.is_feedback_vertex_set(&h.w), "W is a feedback vertex set")?,
            }
            let mut r = hard_report(rule, &h, k).param("level", t);
            if rule == "w2d1hard" {
                r = r.param("d", d);
            }
            finish(&out, r)
        }
        "vc-to-wsat3" => {
            let inst = load_csp(file)?;
            let w = cover_or_min(inst.graph(), opts.cover.as_deref())?;
            let e = bincsp_vc_to_wsat3(&inst, &w).map_err(err)?;
            let out = out_of("wsat");
            let back = emit_wsat(&out, &e.wsat)?;
            check(is_t_normalized(&back.formula, 3) && back.k == w.len(), "3-normalized with k = |W|")?;
            finish(&out, ReductionReport::new(rule).param("k", back.k).param("vars", back.formula.n).set("W", &w))
        }
        "modtd-to-wsat" => {
            let inst = load_csp(file)?;
            let (w, f) = modulator(inst.graph(), opts)?;
            check(forest_of_rest_ok(inst.graph(), &w, &f)?, "--tree is a forest of G - W")?;
            let d = opts.d.unwrap_or(f.depth()).max(f.depth()).max(1);
            let e = bincsp_modtd_to_wsat2d1(&inst, &w, &f).map_err(err)?;
            let wsat = WeightedSatInstance { formula: pad_to_level(&e.wsat.formula, 2 * d + 1).map_err(err)?, k: e.wsat.k };
            let out = out_of("wsat");
            let back = emit_wsat(&out, &wsat)?;
            check(is_t_normalized(&back.formula, 2 * d + 1) && back.k == w.len(), "(2d+1)-normalized with k = |W|")?;
            let mut r = ReductionReport::new(rule).param("k", back.k).param("d", d).param("level", 2 * d + 1).set("W", &w);
            r.forest = Some(f.parents().to_vec());
            finish(&out, r)
        }
        "fvs-to-circuit" => {
            let inst = load_csp(file)?;
            let g = inst.graph();
            let w = match &opts.cover {
                Some(p) => load(p, io::read_vertex_set)?,
                None => feedback_vertex_set_exact(g, g.n()).map_err(err)?.expect("all vertices form a feedback set"),
            };
            check(w.iter().all(|&v| v < g.n()) && g.is_feedback_vertex_set(&w), "--cover is a feedback vertex set")?;
            let e = bincsp_fvs_to_circuit(&inst, &w).map_err(err)?;
            let out = out_of("circ");
            let text = io::write_circuit(&e.circuit, e.k);
            let (c, k) = emit(&out, &text, io::read_circuit, |(c, k)| io::write_circuit(c, *k))?;
            check(c.is_acyclic() && k == w.len(), "acyclic circuit with k = |W|")?;
            finish(&out, ReductionReport::new(rule).param("k", k).param("inputs", c.n).set("W", &w))
        }
        "listcol-vc" => {
            let lc = load(file, io::read_listcoloring)?;
            let w = cover_or_min(&lc.graph, opts.cover.as_deref())?;
            let e = listcoloring_vc_to_wsat2(&lc, &w).map_err(err)?;
            let out = out_of("wsat");
            let back = emit_wsat(&out, &e.wsat)?;
            check(level(&back.formula)? <= 2, "2-normalized")?;
            finish(&out, ReductionReport::new(rule).param("k", back.k).param("|W|", w.len()).set("W", &w))
        }
        "bincsp-to-listcol" => {
            let inst = load(file, io::read_bincsp)?;
            let gc = bincsp_to_listcoloring(&inst);
            let out = out_of("lcol");
            let lc = emit_lcol(&out, &gc.lc)?;
            check(lc.lists[inst.n()..].iter().all(|l| l.len() == 2), "gadget lists have two colors")?;
            let r = ReductionReport::new(rule)
                .param("n", lc.n())
                .param("colors", lc.colors)
                .param("gadgets", gc.gadgets.len());
            finish(&out, r)
        }
        "listcol-to-bincsp" => {
            let lc = load(file, io::read_listcoloring)?;
            let out = out_of("bcsp");
            let inst = emit_bcsp(&out, &listcoloring_to_bincsp(&lc))?;
            check(inst.graph() == &lc.graph, "same primal graph")?;
            finish(&out, ReductionReport::new(rule).param("n", inst.n()).param("dom", inst.max_domain()))
        }
        "listcol-to-precol" => {
            let lc = load(file, io::read_listcoloring)?;
            let (w, f) = modulator(&lc.graph, opts)?;
            let p = listcoloring_to_precolext(&lc, &w, &f).map_err(err)?;
            let out = out_of("pcol");
            let pre = emit_pcol(&out, &p.pre)?;
            check(forest_of_rest_ok(&pre.graph, &p.w, &p.forest)?, "forest of G' - W")?;
            let mut r = ReductionReport::new(rule)
                .param("|W|", p.w.len())
                .param("depth", p.forest.depth())
                .param("n", pre.n())
                .set("W", &p.w);
            r.forest = Some(p.forest.parents().to_vec());
            finish(&out, r)
        }
        "precol-kernel" => {
            let pre = load(file, io::read_precoloring)?;
            let s = cover_or_min(&pre.graph, opts.cover.as_deref())?;
            let out = out_of("lcol");
            let r = ReductionReport::new(rule).param("|S|", s.len()).set("S", &s);
            match precolext_vc_kernel(&pre, &s).map_err(err)? {
                KernelOutcome::Kernel { lc, map } => {
                    let lc = emit_lcol(&out, &lc)?;
                    check(map.len() <= s.len() && lc.n() == map.len(), "kernel has at most |S| vertices")?;
                    finish(&out, r.param("n", lc.n()).set("map", &map))
                }
                KernelOutcome::Verdict(v) => {
                    emit_lcol(&out, &trivial(v))?;
                    finish(&out, r.note(format!("decided during kernelization: {}", if v { "sat" } else { "unsat" })))
                }
            }
        }
        "precol-strip" => {
            let pre = load(file, io::read_precoloring)?;
            let (w, f) = modulator(&pre.graph, opts)?;
            let out = out_of("lcol");
            let r = ReductionReport::new(rule).param("|S|", w.len()).param("depth", f.depth()).set("S", &w);
            match precolext_modtd_strip(&pre, &w, &f).map_err(err)? {
                StripOutcome::Reduced { lc, s, forest, map } => {
                    let lc = emit_lcol(&out, &lc)?;
                    let shallower = f.depth().max(1) - 1;
                    check(
                        s.len() <= w.len() && forest.depth() <= shallower && forest_of_rest_ok(&lc.graph, &s, &forest)?,
                        "smaller modulator and shallower forest",
                    )?;
                    let mut r = r.param("|S'|", s.len()).param("depth'", forest.depth()).set("S'", &s).set("map", &map);
                    r.forest = Some(forest.parents().to_vec());
                    finish(&out, r)
                }
                StripOutcome::Verdict(v) => {
                    emit_lcol(&out, &trivial(v))?;
                    finish(&out, r.note(format!("decided while stripping: {}", if v { "sat" } else { "unsat" })))
                }
            }
        }
        "regular-arosm" => {
            let m = load(file, io::read_arosm)?;
            let tree = opts.tree.as_deref().ok_or("regular-arosm needs --tree with an ordered contraction tree")?;
            let t = load(tree, io::read_ordered_tree)?;
            let input = parse_bits(&opts.machine.input)?;
            let a = &opts.machine;
            let p = RegularParams {
                nondeterminism: a.nondet,
                conondeterminism: a.conondet,
                stack: a.stack,
                k: opts.k.unwrap_or(toy_params(1).k),
                log_n: a.log_n,
            };
            let r = compile_regular_arosm_to_bincsp(&m, &t, &input, p).map_err(err)?;
            let out = out_of("bcsp");
            let inst = emit_bcsp(&out, &r.inst)?;
            let bound = 3 * p.k * p.k + p.k;
            check(
                validate_elimination_forest(inst.graph(), &r.forest).map_err(err)? && r.forest.depth() <= bound,
                "elimination forest of depth at most 3K^2 + K",
            )?;
            let tree_out = sibling(&out, "tree");
            emit(&tree_out, &io::write_forest(&r.forest), io::read_forest, io::write_forest)?;
            let mut rep = ReductionReport::new(rule)
                .param("K", p.k)
                .param("depth", r.forest.depth())
                .param("configs", r.configs.len())
                .param("tuples", r.tuples.len())
                .param("n", inst.n())
                .set("principal", &r.principal);
            rep.forest = Some(r.forest.parents().to_vec());
            finish(&out, rep)
        }
        "td-structure" => {
            let inst = load_csp(file)?;
            let f = match &opts.tree {
                Some(p) => load(p, io::read_forest)?,
                None => treedepth_exact(inst.graph()).map_err(err)?.1,
            };
            check(validate_elimination_forest(inst.graph(), &f).map_err(err)?, "--tree is an elimination forest")?;
            let (a, s) = bincsp_td_to_structure(&inst, &f).map_err(err)?;
            let out = out_of("struct");
            let a = emit(&out, &io::write_structure(&a), io::read_structure, io::write_structure)?;
            let fo = sibling(&out, "fo");
            emit(&fo, &io::write_guided(&s), io::read_guided, io::write_guided)?;
            let r = ReductionReport::new(rule).param("universe", a.universe).param("k", s.k).param("depth", f.depth());
            finish(&out, r)
        }
        "dfold-prenex" => {
            let inst = load_csp(file)?;
            let g = inst.graph();
            let w = match &opts.tree {
                Some(p) => load(p, io::read_fat_tree)?,
                None => {
                    let d = opts.d.unwrap_or(1);
                    let k = match opts.k {
                        Some(k) => k,
                        None => d_fold_vc_number(g, d).map_err(err)?,
                    };
                    match fat_elimination_tree(g, d, k).map_err(err)? {
                        Some(w) => w,
                        None => return Err(format!("no {k}-fat elimination tree of depth {d}")),
                    }
                }
            };
            check(validate_fat_tree(g, &w).map_err(err)?, "fat elimination tree")?;
            let (a, s) = bincsp_dfold_to_prenex(&inst, &w).map_err(err)?;
            let out = out_of("struct");
            let a = emit(&out, &io::write_structure(&a), io::read_structure, io::write_structure)?;
            let fo = sibling(&out, "fo");
            emit(&fo, &io::write_fo(&s), io::read_fo, io::write_fo)?;
            let r = ReductionReport::new(rule)
                .param("universe", a.universe)
                .param("d", w.depth())
                .param("k", w.width())
                .param("sigma", s.sigma_level().unwrap_or(0));
            finish(&out, r)
        }
        _ => unreachable!("rule list checked above"),
    }
}

/// An instance standing in for a verdict reached during preprocessing:
/// no vertices when satisfiable, one vertex with an empty list otherwise.
fn trivial(sat: bool) -> ListColoring {
    let n = usize::from(!sat);
    ListColoring::new(Graph::new(n), 1, vec![Vec::new(); n]).expect("well-formed")
}

fn parse_bits(s: &str) -> Result<Vec<bool>, String> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(format!("--input must be a string of 0s and 1s, found `{c}`")),
        })
        .collect()
}
