use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn dir(name: &str) -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn run(cwd: &PathBuf, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paramcsp")).current_dir(cwd).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_graph(n: usize) -> String {
    let mut s = format!("graph {n}\n");
    for i in 1..n {
        s += &format!("edge {} {i}\n", i - 1);
    }
    s
}

#[test]
fn treedepth_of_p7_is_three() {
    let d = dir("p7");
    fs::write(d.join("p7.graph"), path_graph(7)).unwrap();
    let o = run(&d, &["decompose", "--parameter", "td", "p7.graph"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("td 3"), "{}", stdout(&o));
    let tree = fs::read_to_string(d.join("p7.tree")).unwrap();
    assert!(tree.starts_with("tree 7"));
    let o = run(&d, &["decompose", "--parameter", "td", "--d", "2", "p7.graph"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn star_has_two_fold_cover_one() {
    let d = dir("star");
    let mut s = String::from("graph 7\n");
    for i in 1..7 {
        s += &format!("edge 0 {i}\n");
    }
    fs::write(d.join("star6.graph"), s).unwrap();
    let o = run(&d, &["decompose", "--parameter", "dfold", "--d", "2", "star6.graph"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("k=1"), "{}", stdout(&o));
    assert!(d.join("star6.tree").exists());
}

#[test]
fn edge_has_no_empty_cover() {
    let d = dir("edge");
    fs::write(d.join("edge.graph"), "graph 2\nedge 0 1\n").unwrap();
    assert_eq!(code(&run(&d, &["decompose", "--parameter", "vc", "--k", "0", "edge.graph"])), 1);
    assert_eq!(code(&run(&d, &["decompose", "--parameter", "vc", "--k", "1", "edge.graph"])), 0);
    assert_eq!(fs::read_to_string(d.join("edge.set")).unwrap().trim(), "set 0");
}

#[test]
fn campaigns_pass() {
    let d = dir("verify");
    let o = run(&d, &["verify", "--rule", "regular-arosm", "--trials", "5"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("mismatches 0"));
    let o = run(&d, &["verify", "--rule", "w3hard", "--trials", "200", "--seed", "7", "--out", "rep"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("passed 200 mismatches 0"));
    let json = fs::read_to_string(d.join("rep/w3hard-7.json")).unwrap();
    assert!(json.contains("\"mismatches\": 0"));
}

#[test]
fn zero_trials_pass_vacuously() {
    let d = dir("zero");
    assert_eq!(code(&run(&d, &["verify", "--rule", "solvers", "--trials", "0"])), 0);
}

#[test]
fn verify_is_deterministic_on_stdout() {
    let d = dir("det");
    let a = run(&d, &["verify", "--rule", "solvers", "--trials", "40", "--seed", "3"]);
    let b = run(&d, &["verify", "--rule", "solvers", "--trials", "40", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stderr).contains("p50"));
}

#[test]
fn gen_is_deterministic() {
    let d = dir("gen");
    for kind in ["bcsp", "lcol", "pcol", "graph", "wsat"] {
        let a = run(&d, &["gen", kind, "--seed", "11"]);
        let b = run(&d, &["gen", kind, "--seed", "11"]);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout, "{kind}");
    }
    assert_eq!(code(&run(&d, &["gen", "bcsp", "--trials", "4", "--out", "many"])), 0);
    assert_eq!(fs::read_dir(d.join("many")).unwrap().count(), 4);
    assert_eq!(code(&run(&d, &["gen", "bcsp", "--trials", "4"])), 2);
}

#[test]
fn w3hard_reduction_writes_instance_and_report() {
    let d = dir("w3");
    fs::write(d.join("f.wsat"), "(wsat :k 2 :n 4 (and (or (and (not 0) (not 1)) (and (not 2))) (or (and (not 3)))))\n")
        .unwrap();
    let o = run(&d, &["reduce", "--rule", "w3hard", "f.wsat"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("f.bcsp.report.json")).unwrap()).unwrap();
    assert_eq!(report["rule"], "w3hard");
    assert_eq!(report["parameters"]["k"], 2);
    assert_eq!(report["parameters"]["|W|"], 2);
    assert_eq!(report["sets"]["W"].as_array().unwrap().len(), 2);
    // the output is a readable instance with the same answer
    let sat = |file: &str| code(&run(&d, &["solve", file]));
    assert_eq!(sat("f.bcsp"), 0);
}

#[test]
fn vc_reduction_uses_the_given_cover() {
    let d = dir("vc");
    fs::write(
        d.join("x.bcsp"),
        "bincsp 3\nvar 0 0 1\nvar 1 0 1\nvar 2 0 1\nedge 0 1\nallow 0 1 0 1\nallow 0 1 1 0\nedge 1 2\nallow 1 2 0 1\nallow 1 2 1 0\n",
    )
    .unwrap();
    fs::write(d.join("w.set"), "set 1\n").unwrap();
    let o = run(&d, &["reduce", "--rule", "vc-to-wsat3", "x.bcsp", "--cover", "w.set"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(d.join("x.wsat")).unwrap().starts_with("(wsat :k 1"));
    fs::write(d.join("bad.set"), "set 0\n").unwrap();
    assert_eq!(code(&run(&d, &["reduce", "--rule", "vc-to-wsat3", "x.bcsp", "--cover", "bad.set"])), 2);
}

#[test]
fn every_reduction_round_trips() {
    let d = dir("rules");
    assert_eq!(code(&run(&d, &["gen", "bcsp", "--seed", "2", "--out", "x.bcsp"])), 0);
    assert_eq!(code(&run(&d, &["gen", "lcol", "--seed", "1", "--out", "l.lcol"])), 0);
    assert_eq!(code(&run(&d, &["gen", "pcol", "--seed", "4", "--max-dom", "4", "--out", "p.pcol"])), 0);
    assert_eq!(code(&run(&d, &["gen", "wsat", "--seed", "5", "--d", "2", "--max-n", "4", "--out", "g.wsat"])), 0);
    assert_eq!(code(&run(&d, &["gen", "arosm", "--out", "m.arosm"])), 0);
    let cases: &[&[&str]] = &[
        &["--rule", "w2d1hard", "g.wsat", "--d", "2", "--out", "a.bcsp"],
        &["--rule", "fvs-hard", "g.wsat", "--out", "b.bcsp"],
        &["--rule", "modtd-to-wsat", "x.bcsp", "--d", "1", "--out", "c.wsat"],
        &["--rule", "fvs-to-circuit", "x.bcsp"],
        &["--rule", "listcol-vc", "l.lcol"],
        &["--rule", "bincsp-to-listcol", "x.bcsp", "--out", "e.lcol"],
        &["--rule", "listcol-to-bincsp", "l.lcol", "--out", "f.bcsp"],
        &["--rule", "listcol-to-precol", "l.lcol"],
        &["--rule", "precol-kernel", "p.pcol", "--out", "h.lcol"],
        &["--rule", "precol-strip", "p.pcol", "--d", "2", "--out", "i.lcol"],
        &["--rule", "regular-arosm", "m.arosm", "--tree", "m.tree", "--out", "j.bcsp"],
        &["--rule", "td-structure", "x.bcsp"],
        &["--rule", "dfold-prenex", "x.bcsp", "--d", "2", "--out", "k.struct"],
    ];
    for args in cases {
        let mut full = vec!["reduce"];
        full.extend_from_slice(args);
        let o = run(&d, &full);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains(".report.json"), "{args:?}");
    }
    // reductions preserve the answer
    let verdict = |f: &str| code(&run(&d, &["solve", f]));
    assert_eq!(verdict("x.bcsp"), verdict("e.lcol"));
    assert_eq!(verdict("l.lcol"), verdict("f.bcsp"));
}

#[test]
fn solvers_agree_on_the_command_line() {
    let d = dir("solve");
    assert_eq!(code(&run(&d, &["gen", "bcsp", "--seed", "9", "--out", "x.bcsp"])), 0);
    let outs: Vec<(i32, Option<String>)> = ["brute", "dp", "vc", "modulator"]
        .iter()
        .map(|m| {
            let o = run(&d, &["solve", "--method", m, "--witness", "x.bcsp"]);
            (code(&o), stdout(&o).lines().find(|l| l.starts_with("witness")).map(String::from))
        })
        .collect();
    assert!(outs.windows(2).all(|w| w[0] == w[1]), "{outs:?}");
}

#[test]
fn error_exits() {
    let d = dir("errors");
    fs::write(d.join("trivial.bcsp"), "bincsp 1\nvar 0 0\n").unwrap();
    let o = run(&d, &["solve", "--method", "brute", "trivial.bcsp"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("SAT"));
    fs::write(d.join("unsat.bcsp"), "bincsp 1\nvar 0\n").unwrap();
    assert_eq!(code(&run(&d, &["solve", "unsat.bcsp"])), 1);
    fs::write(d.join("bad.bcsp"), "bincsp 2\nvar 0 0\nvar 1 0\nedge 0 7\n").unwrap();
    let o = run(&d, &["solve", "bad.bcsp"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
    assert_eq!(code(&run(&d, &["solve", "missing.bcsp"])), 2);
    assert_eq!(code(&run(&d, &["reduce", "--rule", "no-such-rule", "trivial.bcsp"])), 2);
    assert_eq!(code(&run(&d, &["verify", "--rule", "no-such-rule"])), 2);
    assert_eq!(code(&run(&d, &["verify", "--rule", "w3hard", "--max-n", "500"])), 2);
    assert_eq!(code(&run(&d, &["frobnicate"])), 2);
}
