//! Structural parameters and their witnesses: elimination forests,
//! covers and modulators, fat elimination trees, and branch labelings.

mod covers;
mod fat;
mod forest;
mod labeling;
mod treedepth;

pub use covers::{
    feedback_vertex_set_exact, min_modulator_size, modulator_to_treedepth, vertex_cover_exact,
    Modulator,
};
pub use fat::{d_fold_vc_number, fat_elimination_tree, validate_fat_tree, FatEliminationTree};
pub use forest::{validate_elimination_forest, EliminationForest};
pub use labeling::{tree_edge_labeling, EdgeLabeling};
pub use labeling::ceil_log2;
pub use treedepth::{treedepth_exact, treedepth_of_mask, TREEDEPTH_CAP};

/// Default vertex cap for the exponential searches in this module.
pub const SEARCH_CAP: usize = 20;

pub(crate) fn check_cap(n: usize, cap: usize, what: &str) -> crate::Result<()> {
    if n > cap {
        crate::error::resource(format!("{what} on {n} vertices exceeds the cap of {cap}"))
    } else {
        Ok(())
    }
}
