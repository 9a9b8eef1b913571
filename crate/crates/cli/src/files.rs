use std::path::{Path, PathBuf};

use paramcsp::io;
use paramcsp::{BinCsp, Graph};

pub fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn write(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Parses `path` with `parse`, prefixing errors with the path.
pub fn load<T>(path: &Path, parse: impl Fn(&str) -> paramcsp::Result<T>) -> Result<T, String> {
    parse(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn first_word(text: &str) -> &str {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .and_then(|l| l.split_whitespace().next())
        .unwrap_or("")
}

/// A `.bcsp`, or a `.lcol` read as its disequality CSP.
pub fn load_csp(path: &Path) -> Result<BinCsp, String> {
    let text = read(path)?;
    let at = |e: paramcsp::Error| format!("{}: {e}", path.display());
    match first_word(&text) {
        "listcol" => {
            let lc = io::read_listcoloring(&text).map_err(at)?;
            Ok(paramcsp::instance::listcoloring_to_bincsp(&lc))
        }
        _ => io::read_bincsp(&text).map_err(at),
    }
}

/// A `.graph`, or the primal graph of a `.bcsp`.
pub fn load_graph(path: &Path) -> Result<Graph, String> {
    let text = read(path)?;
    let at = |e: paramcsp::Error| format!("{}: {e}", path.display());
    match first_word(&text) {
        "bincsp" => Ok(io::read_bincsp(&text).map_err(at)?.graph().clone()),
        "listcol" => Ok(io::read_listcoloring(&text).map_err(at)?.graph),
        _ => io::read_graph(&text).map_err(at),
    }
}

/// `out`, or `input` with its extension replaced.
pub fn output_path(input: &Path, out: Option<&Path>, ext: &str) -> PathBuf {
    match out {
        Some(p) => p.to_path_buf(),
        None => input.with_extension(ext),
    }
}

/// `path` with `ext` in place of its extension.
pub fn sibling(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}
