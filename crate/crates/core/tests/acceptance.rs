//! Acceptance run: every criterion at its stated size and time limit, one
//! line each. Runs without the test harness so the lines always show.

use std::collections::{BTreeSet, HashMap};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use paramcsp::campaign::{run_campaign, toy_limits, toy_params, CampaignConfig};
use paramcsp::machine::{compile_regular_arosm_to_bincsp, decide, toy_machines};
use paramcsp::solvers::solve_by_elimination_forest;
use paramcsp::structure::{d_fold_vc_number, min_modulator_size, treedepth_exact, validate_elimination_forest};
use paramcsp::tree::OrderedTree;
use paramcsp::unitrees::{build_universal_tree, enumerate_ordered_trees, find_embedding, is_embedding};
use paramcsp::Graph;

type Check = Result<String, String>;

/// Runs `rule` with the given caps; passes only if every trial passed.
fn campaign(rule: &str, trials: usize, seed: u64, caps: (usize, usize, usize, usize)) -> Check {
    let mut cfg = CampaignConfig::new(rule, trials, seed).map_err(|e| e.to_string())?;
    (cfg.caps.n, cfg.caps.dom, cfg.caps.d, cfg.caps.k) = caps;
    let rep = run_campaign(&cfg).map_err(|e| e.to_string())?;
    if rep.passed == trials {
        Ok(format!("{rule} {trials}/{trials}"))
    } else {
        Err(rep.summary().replace('\n', "; "))
    }
}

fn all(parts: Vec<Check>) -> Check {
    let mut ok = Vec::new();
    for p in parts {
        ok.push(p?);
    }
    Ok(ok.join(", "))
}

fn w3_round_trip() -> Check {
    all(vec![campaign("w3hard", 200, 1, (8, 4, 1, 3)), campaign("vc-to-wsat3", 200, 1, (6, 3, 1, 1))])
}

fn w2d1_constructions() -> Check {
    let mut parts = Vec::new();
    for d in 1..=2 {
        parts.push(campaign("w2d1hard", 100, d as u64, (5, 2, d, 3)));
        parts.push(campaign("modtd-to-wsat", 100, d as u64, (6, 3, d, 1)));
    }
    all(parts)
}

fn fvs_wp() -> Check {
    all(vec![campaign("fvs-hard", 100, 3, (5, 2, 1, 3)), campaign("fvs-to-circuit", 100, 3, (6, 3, 1, 1))])
}

fn list_coloring() -> Check {
    all(vec![
        campaign("listcol-vc", 100, 4, (6, 4, 1, 1)),
        campaign("bincsp-to-listcol", 100, 4, (6, 3, 1, 1)),
        campaign("listcol-to-bincsp", 100, 4, (6, 4, 1, 1)),
        campaign("listcol-to-precol", 100, 4, (6, 3, 2, 1)),
        campaign("precol-kernel", 100, 4, (7, 5, 1, 1)),
        campaign("precol-strip", 100, 4, (7, 6, 2, 1)),
    ])
}

// Graphs as adjacency bitmasks over vertices 0..n.

fn to_graph(adj: &[u8]) -> Graph {
    let mut g = Graph::new(adj.len());
    for (u, &m) in adj.iter().enumerate() {
        for v in u + 1..adj.len() {
            if m >> v & 1 == 1 {
                g.add_edge(u, v);
            }
        }
    }
    g
}

fn permutations(classes: &[Vec<usize>]) -> Vec<Vec<usize>> {
    fn rec(classes: &[Vec<usize>], i: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == classes.len() {
            out.push(cur.clone());
            return;
        }
        let mut c = classes[i].clone();
        let k = c.len();
        heap(&mut c, k, &mut |p| {
            let at = cur.len();
            cur.extend_from_slice(p);
            rec(classes, i + 1, cur, out);
            cur.truncate(at);
        });
    }
    fn heap(a: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
        if k <= 1 {
            f(a);
            return;
        }
        for i in 0..k {
            heap(a, k - 1, f);
            a.swap(if k.is_multiple_of(2) { i } else { 0 }, k - 1);
        }
    }
    let mut out = Vec::new();
    rec(classes, 0, &mut Vec::new(), &mut out);
    out
}

/// Least relabeled edge list over orderings that list vertices by an
/// isomorphism-invariant signature.
fn canonical(adj: &[u8]) -> Vec<(usize, usize)> {
    let n = adj.len();
    let deg = |v: usize| adj[v].count_ones();
    let sig = |v: usize| {
        let mut nb: Vec<u32> = (0..n).filter(|&u| adj[v] >> u & 1 == 1).map(deg).collect();
        nb.sort_unstable();
        (deg(v), nb)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| sig(v));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        if i > 0 && sig(order[i - 1]) == sig(v) {
            classes.last_mut().unwrap().push(v);
        } else {
            classes.push(vec![v]);
        }
    }
    permutations(&classes)
        .into_iter()
        .map(|perm| {
            let mut pos = vec![0; n];
            for (i, &v) in perm.iter().enumerate() {
                pos[v] = i;
            }
            let mut es: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| (u + 1..n).filter(move |&v| adj[u] >> v & 1 == 1).map(move |v| (u, v)))
                .map(|(u, v)| (pos[u].min(pos[v]), pos[u].max(pos[v])))
                .collect();
            es.sort_unstable();
            es
        })
        .min()
        .unwrap()
}

/// Connected graphs up to isomorphism, grown one vertex at a time: every
/// connected graph has a vertex whose removal keeps it connected.
fn connected_graphs(max_n: usize) -> Vec<Vec<Vec<u8>>> {
    let mut by_n: Vec<Vec<Vec<u8>>> = vec![Vec::new(), vec![vec![0]]];
    for n in 2..=max_n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for g in &by_n[n - 1] {
            for nb in 1u8..1 << (n - 1) {
                let mut adj = g.clone();
                for (u, m) in adj.iter_mut().enumerate() {
                    if nb >> u & 1 == 1 {
                        *m |= 1 << (n - 1);
                    }
                }
                adj.push(nb);
                if seen.insert(canonical(&adj)) {
                    next.push(adj);
                }
            }
        }
        by_n.push(next);
    }
    by_n
}

/// Treedepth from the recursive definition over vertex subsets.
fn td_oracle(adj: &[u8]) -> usize {
    fn td(adj: &[u8], set: u8, memo: &mut HashMap<u8, usize>) -> usize {
        if set == 0 {
            return 0;
        }
        if let Some(&t) = memo.get(&set) {
            return t;
        }
        // component of the lowest vertex
        let mut comp = set & set.wrapping_neg();
        loop {
            let grown = (0..8).filter(|&v| comp >> v & 1 == 1).fold(comp, |c, v| c | (adj[v] & set));
            if grown == comp {
                break;
            }
            comp = grown;
        }
        let t = if comp != set {
            td(adj, comp, memo).max(td(adj, set & !comp, memo))
        } else {
            1 + (0..8).filter(|&v| set >> v & 1 == 1).map(|v| td(adj, set & !(1 << v), memo)).min().unwrap()
        };
        memo.insert(set, t);
        t
    }
    let all = ((1u16 << adj.len()) - 1) as u8;
    td(adj, all, &mut HashMap::new())
}

fn delete(adj: &[u8], gone: u8) -> Vec<u8> {
    let keep: Vec<usize> = (0..adj.len()).filter(|&v| gone >> v & 1 == 0).collect();
    keep.iter()
        .map(|&u| keep.iter().enumerate().filter(|&(_, &v)| adj[u] >> v & 1 == 1).fold(0, |m, (i, _)| m | 1 << i))
        .collect()
}

/// Smallest vertex set whose deletion leaves treedepth at most `d`.
fn modulator_oracle(adj: &[u8], d: usize) -> usize {
    let n = adj.len();
    (0u16..1 << n)
        .map(|s| s as u8)
        .filter(|&s| td_oracle(&delete(adj, s)) <= d)
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap()
}

fn treedepth_facts() -> Check {
    for n in 1..=15 {
        let (td, f) = treedepth_exact(&Graph::path(n)).map_err(|e| e.to_string())?;
        let want = (usize::BITS - n.leading_zeros()) as usize;
        if td != want || f.depth() != td {
            return Err(format!("td(P_{n}) = {td}, expected {want}"));
        }
    }
    let graphs = connected_graphs(7);
    // connected graphs on 1..=7 vertices
    let counts: Vec<usize> = graphs[1..].iter().map(Vec::len).collect();
    if counts != [1, 1, 2, 6, 21, 112, 853] {
        return Err(format!("enumerated {counts:?} connected graphs"));
    }
    let mut checked = 0;
    for adj in graphs.iter().flatten() {
        let g = to_graph(adj);
        let (td, _) = treedepth_exact(&g).map_err(|e| e.to_string())?;
        if td != td_oracle(adj) {
            return Err(format!("treedepth disagrees with the oracle on {adj:?}"));
        }
        for d in 1..=3 {
            let vc = d_fold_vc_number(&g, d).map_err(|e| e.to_string())?;
            let m = min_modulator_size(&g, d - 1).map_err(|e| e.to_string())?;
            if m != modulator_oracle(adj, d - 1) {
                return Err(format!("modulator size disagrees with the oracle on {adj:?}, d = {}", d - 1));
            }
            // bags partition a nonempty vertex set, so vc_d >= 1 even when
            // no modulator vertex is needed
            if td > d * vc || vc > m.max(1) {
                return Err(format!("{adj:?}, d = {d}: td {td}, vc_d {vc}, modulator {m}"));
            }
            checked += 1;
        }
    }
    Ok(format!("P_1..P_15, {} graphs, {checked} (graph, d) pairs", graphs.iter().map(Vec::len).sum::<usize>()))
}

/// Whether `s` below `a` maps into `t` below `b`, trying every increasing
/// choice of children.
fn embeds(s: &OrderedTree, a: usize, t: &OrderedTree, b: usize) -> bool {
    fn place(s: &OrderedTree, sk: &[usize], t: &OrderedTree, tk: &[usize]) -> bool {
        match sk.split_first() {
            None => true,
            Some((&c, rest)) => {
                (0..tk.len()).any(|i| embeds(s, c, t, tk[i]) && place(s, rest, t, &tk[i + 1..]))
            }
        }
    }
    place(s, s.children(a), t, t.children(b))
}

fn binom(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn universal_trees() -> Check {
    let mut checked = 0;
    for n in 1..=4 {
        for k in 1..=3 {
            let u = build_universal_tree(n, k);
            if u.depth() > k {
                return Err(format!("U({n},{k}) has depth {}", u.depth()));
            }
            for s in enumerate_ordered_trees(n, k).map_err(|e| e.to_string())? {
                let found = find_embedding(&s, &u).is_some_and(|e| is_embedding(&s, &u, &e));
                if !found || !embeds(&s, s.root(), &u, u.root()) {
                    return Err(format!("a tree with {} leaves misses U({n},{k})", s.leaf_count()));
                }
                checked += 1;
            }
        }
    }
    for n in 1..=8usize {
        for k in 1..=3 {
            let log = (usize::BITS - (n - 1).leading_zeros()) as u128;
            let bound = 2 * n as u128 * binom(log + k as u128 + 1, k as u128);
            let leaves = build_universal_tree(n, k).leaf_count() as u128;
            if leaves > bound {
                return Err(format!("U({n},{k}) has {leaves} leaves, bound {bound}"));
            }
        }
    }
    Ok(format!("{checked} embeddings, leaf bound for n <= 8, k <= 3"))
}

fn labeling() -> Check {
    campaign("labeling", 500, 7, (64, 1, 12, 1))
}

fn machine_compile() -> Check {
    campaign("td-machine", 30, 8, (5, 3, 3, 1))
}

fn regular_reduction() -> Check {
    let toys = toy_machines();
    if toys.len() < 3 {
        return Err(format!("only {} toy machines", toys.len()));
    }
    for toy in &toys {
        for a in 1..=2 {
            let p = toy_params(a);
            let r = compile_regular_arosm_to_bincsp(&toy.machine, &toy.tree, &[], p).map_err(|e| e.to_string())?;
            let want = decide(&toy.machine, &[], &toy_limits(&p)).map_err(|e| e.to_string())?.accept;
            let dp = solve_by_elimination_forest(&r.inst, &r.forest).map_err(|e| e.to_string())?.is_some();
            let forest_ok = validate_elimination_forest(r.inst.graph(), &r.forest).map_err(|e| e.to_string())?;
            let bound = 3 * p.k * p.k + p.k;
            if want != dp || !forest_ok || r.forest.depth() > bound || r.configs.len() > 12 || p.k > 2 {
                return Err(format!(
                    "{} a={a}: decide {want}, csp {dp}, depth {} (bound {bound}), {} configs",
                    toy.name,
                    r.forest.depth(),
                    r.configs.len()
                ));
            }
        }
    }
    Ok(format!("{} toys x 2 budgets, {}", toys.len(), campaign("regular-arosm", 20, 9, (1, 1, 1, 2))?))
}

fn logic() -> Check {
    all(vec![campaign("td-structure", 100, 10, (5, 3, 1, 1)), campaign("dfold-prenex", 50, 10, (5, 3, 2, 2))])
}

fn solver_agreement() -> Check {
    campaign("solvers", 500, 11, (6, 3, 2, 1))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check, u64); 11] = [
        ("W[3] round trip", w3_round_trip, 120),
        ("W[2d+1] constructions", w2d1_constructions, 300),
        ("FVS and W[P]", fvs_wp, 180),
        ("list coloring and precoloring", list_coloring, 300),
        ("treedepth facts", treedepth_facts, 600),
        ("universal trees", universal_trees, 60),
        ("labeling", labeling, 30),
        ("machine compile", machine_compile, 300),
        ("regular reduction", regular_reduction, 120),
        ("logic", logic, 180),
        ("solver agreement", solver_agreement, 180),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = check();
        let took = start.elapsed();
        let r = match r {
            Ok(s) if took > Duration::from_secs(*limit) => Err(format!("{s}, but over the {limit}s limit")),
            r => r,
        };
        match r {
            Ok(s) => println!("criterion {:>2} PASS {name} ({took:.2?}): {s}", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({took:.2?}): {e}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
