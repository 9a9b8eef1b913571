//! Parameter-preserving reductions between BinCSP, weighted normalized
//! satisfiability, circuits, List Coloring and Precoloring Extension.
//!
//! Hardness constructions number their vertices with the clique `W` first
//! (`0..k`) and the forest part after it, so an elimination forest of
//! `G - W` is indexed by `vertex - k`. Inside those instances value `0`
//! means "inactive" and term pointers run from `1`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{input, Result};
use crate::formulas::{normalization_level, Node, NormalizedFormula, WeightedSatInstance};
use crate::instance::Value;

mod fvs;
mod listcol;
mod modtd;
mod precol;
mod vc;

pub use fvs::{bincsp_fvs_to_circuit, CircuitEncoding};
pub use listcol::listcoloring_vc_to_wsat2;
pub use modtd::{
    bincsp_modtd_to_wsat2d1, wsat2d1am_to_bincsp_forest_modulator, wsatam_to_bincsp_fvs, FormulaForest,
    FAMILY_CAP,
};
pub use precol::{
    listcoloring_to_precolext, precolext_modtd_strip, precolext_vc_kernel, KernelOutcome, PrecolExt,
    StripOutcome,
};
pub use vc::{bincsp_vc_to_wsat3, wsat3am_to_bincsp_vc, HardInstance};

/// The inactive value in the forest-modulator constructions.
pub const INACTIVE: Value = 0;

/// A weighted satisfiability instance with a readable name per variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WsatEncoding {
    pub wsat: WeightedSatInstance,
    pub names: Vec<String>,
}

/// Declared parameters and witnesses of a reduction output, written next
/// to the output artifact.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    pub rule: String,
    pub parameters: BTreeMap<String, usize>,
    pub sets: BTreeMap<String, Vec<usize>>,
    pub forest: Option<Vec<Option<usize>>>,
    pub notes: Vec<String>,
}

impl ReductionReport {
    pub fn new(rule: &str) -> Self {
        ReductionReport { rule: rule.to_string(), ..Default::default() }
    }

    pub fn param(mut self, name: &str, value: usize) -> Self {
        self.parameters.insert(name.to_string(), value);
        self
    }

    pub fn set(mut self, name: &str, vs: &[usize]) -> Self {
        self.sets.insert(name.to_string(), vs.to_vec());
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }
}

/// Variables `x_{w,c}` for `w` in `W` (ascending) and `c` in `D(w)`.
pub(crate) struct VarTable {
    ids: BTreeMap<(usize, Value), usize>,
    pub(crate) names: Vec<String>,
}

impl VarTable {
    pub(crate) fn new() -> Self {
        VarTable { ids: BTreeMap::new(), names: Vec::new() }
    }

    pub(crate) fn add(&mut self, w: usize, c: Value, name: String) -> usize {
        let id = self.names.len();
        self.ids.insert((w, c), id);
        self.names.push(name);
        id
    }

    pub(crate) fn get(&self, w: usize, c: Value) -> usize {
        self.ids[&(w, c)]
    }

    pub(crate) fn len(&self) -> usize {
        self.names.len()
    }
}

/// The same formula with literals pushed down to level `t` by singleton
/// gates; weighted satisfiability is unchanged.
pub fn pad_to_level(f: &NormalizedFormula, t: usize) -> Result<NormalizedFormula> {
    if normalization_level(f)? > t {
        return input(format!("formula is above level {t}"));
    }
    NormalizedFormula::new(f.n, pad_literals(f.root.clone(), 1, t))
}

/// Pushes literals down with singleton gates until every literal sits just
/// below level `t`. `depth` is the level of `node` (the root is level 1).
pub(crate) fn pad_literals(node: Node, depth: usize, t: usize) -> Node {
    match node {
        Node::Lit(_) if depth <= t => {
            let inner = pad_literals(node, depth + 1, t);
            if depth % 2 == 1 {
                Node::And(vec![inner])
            } else {
                Node::Or(vec![inner])
            }
        }
        Node::Lit(_) => node,
        Node::And(cs) => Node::And(cs.into_iter().map(|c| pad_literals(c, depth + 1, t)).collect()),
        Node::Or(cs) => Node::Or(cs.into_iter().map(|c| pad_literals(c, depth + 1, t)).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{and, neg, normalization_level, or, pos, NormalizedFormula};

    #[test]
    fn padding_reaches_requested_level() {
        let root = and(vec![or(vec![pos(0)]), or(vec![and(vec![neg(1)])]), neg(2)]);
        let padded = pad_literals(root, 1, 5);
        let f = NormalizedFormula::new(3, padded).unwrap();
        assert_eq!(normalization_level(&f).unwrap(), 5);
        assert_eq!(normalization_level(&pad_to_level(&f, 7).unwrap()).unwrap(), 7);
        assert!(pad_to_level(&f, 3).is_err());
    }
}
