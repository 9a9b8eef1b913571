//! S-expression formats: `.wsat` formulas and `.fo` sentences.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::perr;
use crate::error::Result;
use crate::formulas::{NormalizedFormula, Node, WeightedSatInstance};
use crate::logic::{Fo, GuidedSentence, PrenexSentence, Quantifier};

#[derive(Debug)]
enum Sx {
    Atom(String, usize),
    List(Vec<Sx>, usize),
}

impl Sx {
    fn line(&self) -> usize {
        match self {
            Sx::Atom(_, l) | Sx::List(_, l) => *l,
        }
    }

    fn atom(&self) -> Option<&str> {
        match self {
            Sx::Atom(a, _) => Some(a),
            Sx::List(..) => None,
        }
    }

    /// Head symbol and arguments of a list.
    fn call(&self) -> Option<(&str, &[Sx])> {
        match self {
            Sx::List(xs, _) => xs.split_first().and_then(|(h, rest)| h.atom().map(|h| (h, rest))),
            Sx::Atom(..) => None,
        }
    }

    fn num(&self, what: &str) -> Result<usize> {
        match self.atom().and_then(|a| a.parse().ok()) {
            Some(v) => Ok(v),
            None => perr(self.line(), format!("expected {what}")),
        }
    }
}

/// Parses exactly one expression; `;` starts a comment.
fn parse(text: &str) -> Result<Sx> {
    let mut stack: Vec<(Vec<Sx>, usize)> = Vec::new();
    let mut done = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let code = raw.split(';').next().unwrap_or("");
        let spaced = code.replace('(', " ( ").replace(')', " ) ");
        for tok in spaced.split_whitespace() {
            if done.is_some() {
                return perr(line, "trailing input after expression");
            }
            let x = match tok {
                "(" => {
                    stack.push((Vec::new(), line));
                    continue;
                }
                ")" => match stack.pop() {
                    Some((xs, l)) => Sx::List(xs, l),
                    None => return perr(line, "unbalanced `)`"),
                },
                a => Sx::Atom(a.to_string(), line),
            };
            match stack.last_mut() {
                Some((xs, _)) => xs.push(x),
                None => done = Some(x),
            }
        }
    }
    if let Some((_, l)) = stack.last() {
        return perr(*l, "unclosed `(`");
    }
    done.map_or_else(|| perr(1, "empty input"), Ok)
}

/// `(wsat :k <k> :n <n> <formula>)` where a formula is a variable index,
/// `(not <i>)`, or `(and ...)` / `(or ...)`.
pub fn read_wsat(text: &str) -> Result<WeightedSatInstance> {
    let top = parse(text)?;
    let Some(("wsat", args)) = top.call() else { return perr(top.line(), "expected `(wsat ...)`") };
    let (mut k, mut n, mut body) = (None, None, None);
    let mut it = args.iter();
    while let Some(a) = it.next() {
        match a.atom() {
            Some(key @ (":k" | ":n")) => {
                let Some(v) = it.next() else { return perr(a.line(), format!("missing value for {key}")) };
                let v = v.num("a number")?;
                if key == ":k" { k = Some(v) } else { n = Some(v) }
            }
            _ if body.is_none() => body = Some(a),
            _ => return perr(a.line(), "more than one formula"),
        }
    }
    let (Some(k), Some(n), Some(body)) = (k, n, body) else {
        return perr(top.line(), "`wsat` needs :k, :n and a formula");
    };
    let root = formula_node(body, n)?;
    let formula = NormalizedFormula::new(n, root).or_else(|e| perr(top.line(), e.to_string()))?;
    Ok(WeightedSatInstance { formula, k })
}

fn formula_node(x: &Sx, n: usize) -> Result<Node> {
    let var = |x: &Sx| -> Result<usize> {
        let v = x.num("a variable index")?;
        if v >= n {
            return perr(x.line(), format!("variable {v} out of range (n = {n})"));
        }
        Ok(v)
    };
    if x.atom().is_some() {
        return Ok(Node::Lit(crate::formulas::Literal { var: var(x)?, positive: true }));
    }
    match x.call() {
        Some(("not", [v])) => Ok(Node::Lit(crate::formulas::Literal { var: var(v)?, positive: false })),
        Some(("and", xs)) => Ok(Node::And(xs.iter().map(|c| formula_node(c, n)).collect::<Result<_>>()?)),
        Some(("or", xs)) => Ok(Node::Or(xs.iter().map(|c| formula_node(c, n)).collect::<Result<_>>()?)),
        _ => perr(x.line(), "expected a literal, `(and ...)` or `(or ...)`"),
    }
}

fn write_node(s: &mut String, node: &Node) {
    match node {
        Node::Lit(l) if l.positive => _ = write!(s, "{}", l.var),
        Node::Lit(l) => _ = write!(s, "(not {})", l.var),
        Node::And(cs) | Node::Or(cs) => {
            s.push_str(if matches!(node, Node::And(_)) { "(and" } else { "(or" });
            for c in cs {
                s.push(' ');
                write_node(s, c);
            }
            s.push(')');
        }
    }
}

pub fn write_wsat(w: &WeightedSatInstance) -> String {
    let mut s = format!("(wsat :k {} :n {} ", w.k, w.formula.n);
    write_node(&mut s, &w.formula.root);
    s.push_str(")\n");
    s
}

const RESERVED: [&str; 8] = ["and", "or", "not", "=", "true", "false", "exists", "forall"];

fn matrix(x: &Sx, vars: &BTreeMap<&str, usize>) -> Result<Fo> {
    let var = |a: &Sx| -> Result<usize> {
        match a.atom().and_then(|n| vars.get(n)) {
            Some(&v) => Ok(v),
            None => perr(a.line(), "expected a bound variable"),
        }
    };
    match x {
        Sx::Atom(a, l) => match a.as_str() {
            "true" => Ok(Fo::True),
            "false" => Ok(Fo::False),
            _ => perr(*l, format!("unexpected symbol `{a}`")),
        },
        Sx::List(..) => match x.call() {
            Some(("and", xs)) => Ok(Fo::And(xs.iter().map(|c| matrix(c, vars)).collect::<Result<_>>()?)),
            Some(("or", xs)) => Ok(Fo::Or(xs.iter().map(|c| matrix(c, vars)).collect::<Result<_>>()?)),
            Some(("not", [f])) => Ok(Fo::not(matrix(f, vars)?)),
            Some(("=", [a, b])) => Ok(Fo::Eq(var(a)?, var(b)?)),
            Some((r, args)) if !RESERVED.contains(&r) && !args.is_empty() => {
                Ok(Fo::Atom(r.to_string(), args.iter().map(var).collect::<Result<_>>()?))
            }
            _ => perr(x.line(), "malformed formula"),
        },
    }
}

/// `(exists (x y) (forall (z) <matrix>))`: nested quantifier blocks around
/// a quantifier-free matrix of atoms `(R a ..)`, `(= a b)`, `true`,
/// `false`, `and`, `or` and `not`. Variables are numbered in binding order.
pub fn read_fo(text: &str) -> Result<PrenexSentence> {
    let mut x = &parse(text)?;
    let mut names: Vec<String> = Vec::new();
    let mut blocks: Vec<(Quantifier, Vec<usize>)> = Vec::new();
    loop {
        let q = match x.call() {
            Some(("exists", _)) => Quantifier::Exists,
            Some(("forall", _)) => Quantifier::Forall,
            _ => break,
        };
        let Some((_, [Sx::List(vs, l), body])) = x.call() else {
            return perr(x.line(), "expected `(<quantifier> (<vars>) <body>)`");
        };
        let mut ids = Vec::new();
        for v in vs {
            match v.atom() {
                Some(n) if !RESERVED.contains(&n) && !names.iter().any(|m| m == n) => {
                    ids.push(names.len());
                    names.push(n.to_string());
                }
                _ => return perr(v.line(), "expected a fresh variable name"),
            }
        }
        if ids.is_empty() {
            return perr(*l, "empty quantifier block");
        }
        match blocks.last_mut() {
            Some((prev, prev_ids)) if *prev == q => prev_ids.extend(ids),
            _ => blocks.push((q, ids)),
        }
        x = body;
    }
    let vars = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let s = PrenexSentence { matrix: matrix(x, &vars)?, names, blocks };
    s.validate().or_else(|e| perr(1, e.to_string()))?;
    Ok(s)
}

fn write_matrix(s: &mut String, f: &Fo, names: &[String]) {
    match f {
        Fo::True => s.push_str("true"),
        Fo::False => s.push_str("false"),
        Fo::Eq(a, b) => _ = write!(s, "(= {} {})", names[*a], names[*b]),
        Fo::Atom(r, args) => {
            let _ = write!(s, "({r}");
            for a in args {
                let _ = write!(s, " {}", names[*a]);
            }
            s.push(')');
        }
        Fo::Not(g) => {
            s.push_str("(not ");
            write_matrix(s, g, names);
            s.push(')');
        }
        Fo::And(gs) | Fo::Or(gs) => {
            s.push_str(if matches!(f, Fo::And(_)) { "(and" } else { "(or" });
            for g in gs {
                s.push(' ');
                write_matrix(s, g, names);
            }
            s.push(')');
        }
    }
}

/// Variables are printed by name when names are distinct and usable,
/// otherwise as `v<i>`. Reading the output back renumbers variables in
/// binding order.
pub fn write_fo(p: &PrenexSentence) -> String {
    let usable = |n: &String| {
        !n.is_empty() && !RESERVED.contains(&n.as_str()) && !n.contains(|c: char| c.is_whitespace() || "();".contains(c))
    };
    let distinct: std::collections::BTreeSet<_> = p.names.iter().collect();
    let names: Vec<String> = if distinct.len() == p.names.len() && p.names.iter().all(usable) {
        p.names.clone()
    } else {
        (0..p.names.len()).map(|i| format!("v{i}")).collect()
    };
    let mut s = String::new();
    for (q, vs) in &p.blocks {
        s.push_str(if *q == Quantifier::Exists { "(exists (" } else { "(forall (" });
        let vs: Vec<&str> = vs.iter().map(|&v| names[v].as_str()).collect();
        s.push_str(&vs.join(" "));
        s.push_str(") ");
    }
    write_matrix(&mut s, &p.matrix, &names);
    s.push_str(&")".repeat(p.blocks.len()));
    s.push('\n');
    s
}

/// `(guided <k> <matrix>)` with variables `x1..xk`, `y1..yk`.
pub fn read_guided(text: &str) -> Result<GuidedSentence> {
    let top = parse(text)?;
    let Some(("guided", [k, body])) = top.call() else {
        return perr(top.line(), "expected `(guided <k> <matrix>)`");
    };
    let k = k.num("k")?;
    let names: Vec<String> = (1..=k).flat_map(|i| [format!("x{i}"), format!("y{i}")]).collect();
    let vars = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    Ok(GuidedSentence { k, matrix: matrix(body, &vars)? })
}

pub fn write_guided(s: &GuidedSentence) -> String {
    let names: Vec<String> = (1..=s.k).flat_map(|i| [format!("x{i}"), format!("y{i}")]).collect();
    let mut out = format!("(guided {} ", s.k);
    write_matrix(&mut out, &s.matrix, &names);
    out.push_str(")\n");
    out
}
