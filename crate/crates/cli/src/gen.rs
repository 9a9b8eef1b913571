use std::collections::BTreeMap;
use std::path::Path;

use paramcsp::campaign::trial_rng;
use paramcsp::formulas::{random_normalized, WeightedSatInstance};
use paramcsp::instance::{random_instance_with, random_list_coloring};
use paramcsp::io;
use paramcsp::machine::toy_machines;
use paramcsp::{Graph, Precoloring, Value};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::files::{sibling, write};
use crate::{Kind, Verdict};

/// Caps on generated instances: sizes and domains are drawn up to `n` and
/// `dom`; formulas get level `2d + 1` and weight up to `k`.
pub struct Sizes {
    pub n: usize,
    pub dom: usize,
    pub d: usize,
    pub k: usize,
}

fn ext(kind: Kind) -> &'static str {
    match kind {
        Kind::Bcsp => "bcsp",
        Kind::Lcol => "lcol",
        Kind::Pcol => "pcol",
        Kind::Graph => "graph",
        Kind::Wsat => "wsat",
        Kind::Arosm => "arosm",
    }
}

/// The instance text, plus the contraction tree for machines.
fn generate(kind: Kind, rng: &mut ChaCha8Rng, s: &Sizes, index: usize) -> (String, Option<String>) {
    let n = rng.gen_range(1..=s.n);
    let colors = rng.gen_range(1..=s.dom);
    match kind {
        Kind::Bcsp => (io::write_bincsp(&random_instance_with(rng, n, s.dom, 0.5, 0.6)), None),
        Kind::Lcol => (io::write_listcoloring(&random_list_coloring(rng, n, colors, 0.5, 0.7)), None),
        Kind::Pcol => {
            let lc = random_list_coloring(rng, n, colors, 0.45, 1.0);
            let mut pre = BTreeMap::new();
            for v in 0..n {
                if rng.gen_bool(0.4) {
                    pre.insert(v, rng.gen_range(0..colors as Value));
                }
            }
            let p = Precoloring::new(lc.graph, colors, pre).expect("colors in range");
            (io::write_precoloring(&p), None)
        }
        Kind::Graph => {
            let mut g = Graph::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.5) {
                        g.add_edge(u, v);
                    }
                }
            }
            (io::write_graph(&g), None)
        }
        Kind::Wsat => {
            let formula = random_normalized(rng, n, 2 * s.d + 1, s.dom, true);
            let k = rng.gen_range(0..=s.k.min(n));
            (io::write_wsat(&WeightedSatInstance { formula, k }), None)
        }
        Kind::Arosm => {
            let toys = toy_machines();
            let t = &toys[index % toys.len()];
            (io::write_arosm(&t.machine), Some(io::write_ordered_tree(&t.tree, None, None)))
        }
    }
}

pub fn run(kind: Kind, seed: u64, trials: usize, s: Sizes, out: Option<&Path>) -> Verdict {
    if s.n == 0 || s.dom == 0 || s.d == 0 {
        return Err("--max-n, --max-dom and --d must be positive".into());
    }
    let ext = ext(kind);
    match (trials, out) {
        (0, _) => Ok(true),
        (1, None) if !matches!(kind, Kind::Arosm) => {
            print!("{}", generate(kind, &mut trial_rng(seed, 0), &s, 0).0);
            Ok(true)
        }
        (1, Some(path)) => {
            let (text, tree) = generate(kind, &mut trial_rng(seed, 0), &s, 0);
            write(path, &text)?;
            if let Some(t) = tree {
                write(&sibling(path, "tree"), &t)?;
            }
            Ok(true)
        }
        (_, Some(dir)) => {
            std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            for i in 0..trials {
                let (text, tree) = generate(kind, &mut trial_rng(seed, i), &s, i);
                let path = dir.join(format!("{ext}-{i}.{ext}"));
                write(&path, &text)?;
                if let Some(t) = tree {
                    write(&sibling(&path, "tree"), &t)?;
                }
            }
            println!("wrote {trials} files to {}", dir.display());
            Ok(true)
        }
        (_, None) => Err("--out is required for several instances and for machines".into()),
    }
}
