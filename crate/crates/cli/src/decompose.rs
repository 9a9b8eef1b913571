use std::path::Path;

use paramcsp::io;
use paramcsp::structure::{
    d_fold_vc_number, fat_elimination_tree, feedback_vertex_set_exact, modulator_to_treedepth, treedepth_exact,
    vertex_cover_exact,
};

use crate::files::{load_graph, output_path, sibling, write};
use crate::{Parameter, Verdict};

pub fn run(file: &Path, p: Parameter, d: Option<usize>, k: Option<usize>, out: Option<&Path>) -> Verdict {
    let g = load_graph(file)?;
    let err = |e: paramcsp::Error| e.to_string();
    let k_or_n = k.unwrap_or(g.n());
    let none = |what: String| {
        println!("none: {what}");
        Ok(false)
    };
    match p {
        Parameter::Td => {
            let (td, f) = treedepth_exact(&g).map_err(err)?;
            if d.is_some_and(|d| td > d) {
                return none(format!("treedepth {td} exceeds {}", d.unwrap()));
            }
            let path = output_path(file, out, "tree");
            write(&path, &io::write_forest(&f))?;
            println!("td {td}");
            println!("wrote {}", path.display());
        }
        Parameter::Vc | Parameter::Fvs => {
            let found = match p {
                Parameter::Vc => vertex_cover_exact(&g, k_or_n),
                _ => feedback_vertex_set_exact(&g, k_or_n).map_err(err)?,
            };
            let name = if matches!(p, Parameter::Vc) { "vc" } else { "fvs" };
            let Some(w) = found else { return none(format!("no {name} of size at most {k_or_n}")) };
            let path = output_path(file, out, "set");
            write(&path, &io::write_vertex_set(&w))?;
            println!("{name} {}", w.len());
            println!("wrote {}", path.display());
        }
        Parameter::ModTd => {
            let d = d.unwrap_or(1);
            let Some(m) = modulator_to_treedepth(&g, d, k_or_n).map_err(err)? else {
                return none(format!("no modulator of size at most {k_or_n} to treedepth {d}"));
            };
            let set = output_path(file, out, "set");
            let tree = sibling(&set, "tree");
            write(&set, &io::write_vertex_set(&m.set))?;
            write(&tree, &io::write_forest(&m.forest))?;
            println!("mod-td d={d} k={} depth={}", m.set.len(), m.forest.depth());
            println!("wrote {} {}", set.display(), tree.display());
        }
        Parameter::Dfold | Parameter::FatTree => {
            let d = d.ok_or("--d is required")?;
            if d == 0 {
                return Err("--d must be positive".into());
            }
            let k = match (p, k) {
                (Parameter::Dfold, _) => {
                    let best = d_fold_vc_number(&g, d).map_err(err)?;
                    if k.is_some_and(|k| best > k) {
                        return none(format!("{d}-fold vertex cover number {best} exceeds {}", k.unwrap()));
                    }
                    best
                }
                (_, Some(k)) => k,
                (_, None) => return Err("--k is required".into()),
            };
            let Some(w) = fat_elimination_tree(&g, d, k).map_err(err)? else {
                return none(format!("no {k}-fat elimination tree of depth at most {d}"));
            };
            let path = output_path(file, out, "tree");
            write(&path, &io::write_fat_tree(&w))?;
            println!("{} d={d} k={} depth={}", if matches!(p, Parameter::Dfold) { "dfold" } else { "fat-tree" }, w.width(), w.depth());
            println!("wrote {}", path.display());
        }
    }
    Ok(true)
}
