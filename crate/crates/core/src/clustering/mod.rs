//! Clustering engines: additive clustering of simple measures, exact level-set
//! clustering on the line, grid level-set clustering, kinship, adaptedness and
//! refinement sequences.

mod adapted;
mod grid;
mod kinship;
mod line;
mod refine;

pub use adapted::{is_adapted, is_adapted_grid, AdaptednessReport, PairReport};
pub use grid::{canonical_simple_measure, cluster_density_grid, GridClustering, MergeEvent};
pub use kinship::{grid_kinship_height, kinship, KinshipCertificate};
pub use line::{cluster_density_1d, level_chain_forest_1d};
pub use refine::{refine_and_cluster, uniqueness_check, RefinementReport, Schedule};

use crate::forest::Forest;
use crate::measure::SimpleMeasure;

/// `c(Q) = s(F_Q)`.
pub fn cluster_simple(q: &SimpleMeasure) -> Forest {
    q.forest().structure()
}
