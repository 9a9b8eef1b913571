use std::path::Path;

use paramcsp::io;
use paramcsp::solvers::{solve_bruteforce, solve_by_elimination_forest, solve_by_modulator, solve_by_vertex_cover};
use paramcsp::structure::{modulator_to_treedepth, treedepth_exact, vertex_cover_exact, EliminationForest};

use crate::files::{load, load_csp};
use crate::{Method, Verdict};

pub fn run(file: &Path, method: Method, tree: Option<&Path>, cover: Option<&Path>, d: usize, witness: bool) -> Verdict {
    let inst = load_csp(file)?;
    let g = inst.graph();
    let err = |e: paramcsp::Error| e.to_string();
    let (answer, param) = match method {
        Method::Brute => (solve_bruteforce(&inst).map_err(err)?, format!("search-space {}", inst.search_space())),
        Method::Dp => {
            let f = match tree {
                Some(p) => load(p, io::read_forest)?,
                None => treedepth_exact(g).map_err(err)?.1,
            };
            (solve_by_elimination_forest(&inst, &f).map_err(err)?, format!("depth {}", f.depth()))
        }
        Method::Vc => {
            let w = match cover {
                Some(p) => load(p, io::read_vertex_set)?,
                None => vertex_cover_exact(g, g.n()).expect("all vertices cover"),
            };
            (solve_by_vertex_cover(&inst, &w).map_err(err)?, format!("cover {}", w.len()))
        }
        Method::Modulator => {
            let (w, f) = match (cover, tree) {
                (Some(c), Some(t)) => (load(c, io::read_vertex_set)?, load(t, io::read_forest)?),
                (None, None) => {
                    let m = modulator_to_treedepth(g, d, g.n()).map_err(err)?.expect("deleting everything works");
                    (m.set, m.forest)
                }
                (Some(c), None) => {
                    let w = load(c, io::read_vertex_set)?;
                    let rest = g.complement_of(&w);
                    let (sub, _) = g.induced(&rest);
                    let f = treedepth_exact(&sub).map_err(err).map(|(_, f)| f);
                    (w, f.unwrap_or_else(|_| EliminationForest::chain(&(0..rest.len()).collect::<Vec<_>>())))
                }
                (None, Some(_)) => return Err("--tree for the modulator method needs --cover".into()),
            };
            let a = solve_by_modulator(&inst, &w, &f).map_err(err)?;
            (a, format!("modulator {} depth {}", w.len(), f.depth()))
        }
    };
    println!("{}", if answer.is_some() { "SAT" } else { "UNSAT" });
    println!("n {} edges {} {param}", inst.n(), g.edge_count());
    if let (true, Some(a)) = (witness, &answer) {
        let vals: Vec<String> = a.iter().map(|v| v.to_string()).collect();
        println!("witness {}", vals.join(" "));
    }
    Ok(answer.is_some())
}
