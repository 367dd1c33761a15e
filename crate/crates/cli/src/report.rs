//! Forest reports: JSON with per-node metadata and provenance, plus DOT.

use hclust_core::clustering::{
    cluster_density_1d, cluster_density_grid, cluster_simple, AdaptednessReport, RefinementReport,
};
use hclust_core::forest::{Forest, ForestWire};
use hclust_core::geometry::Region;
use hclust_core::mixture::cluster_mixture;
use hclust_core::number::RationalText;
use hclust_core::separation::SeparationRelation;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::spec::Model;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub spec_sha256: String,
    pub engine: String,
    pub separation: String,
    pub depth: Option<u32>,
}

impl Provenance {
    pub fn new(
        spec_text: &str,
        engine: &str,
        rel: &SeparationRelation,
        depth: Option<u32>,
    ) -> Self {
        Provenance {
            spec_sha256: format!("{:x}", Sha256::digest(spec_text.as_bytes())),
            engine: engine.into(),
            separation: rel.to_string(),
            depth,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeReport {
    pub id: usize,
    pub dim: usize,
    pub birth: Option<RationalText>,
    /// Mass of the node under the clustered measure (`p/q`, or a decimal when inexact).
    pub mass: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ForestReport {
    pub provenance: Provenance,
    pub forest: ForestWire,
    pub nodes: Vec<NodeReport>,
}

impl ForestReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Runs the engine matching the model.
pub fn cluster(model: &Model, rel: &SeparationRelation) -> Result<Forest, CliError> {
    Ok(match model {
        Model::Simple(q) => cluster_simple(q),
        Model::Line(f) => cluster_density_1d(f, rel)?,
        Model::Grid(density) => cluster_density_grid(density, rel)?.forest,
        Model::Mixture(m) => cluster_mixture(m, rel)?,
    })
}

pub fn forest_report(
    model: &Model,
    forest: &Forest,
    provenance: Provenance,
) -> Result<ForestReport, CliError> {
    let density = model.density();
    let mut nodes = Vec::with_capacity(forest.len());
    for i in 0..forest.len() {
        let region = forest.node(i);
        let mass = match (&density, model) {
            (Some(p), _) => p.mass(region)?,
            (None, Model::Simple(q)) => q.evaluate(region)?,
            (None, _) => unreachable!("densities exist for every non-simple model"),
        };
        nodes.push(NodeReport {
            id: i,
            dim: region.dim_class(),
            birth: forest.meta(i).birth.clone().map(RationalText),
            mass: mass.text(),
        });
    }
    Ok(ForestReport {
        provenance,
        forest: forest.to_wire(),
        nodes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PairJson {
    pub first: Region,
    pub second: Region,
    pub kinship: Option<RationalText>,
    pub grounded: bool,
    pub fine: bool,
    pub motivated: bool,
    pub alpha: Option<RationalText>,
    pub counterexample: Option<(Region, RationalText)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdaptednessJson {
    pub provenance: Provenance,
    pub adapted: bool,
    pub failure: Option<String>,
    pub pairs: Vec<PairJson>,
}

pub fn adaptedness_json(report: &AdaptednessReport, provenance: Provenance) -> AdaptednessJson {
    AdaptednessJson {
        provenance,
        adapted: report.is_adapted(),
        failure: report.failure().map(String::from),
        pairs: report
            .pairs
            .iter()
            .map(|p| PairJson {
                first: p.first.clone(),
                second: p.second.clone(),
                kinship: p.kinship.clone().map(RationalText),
                grounded: p.grounded,
                fine: p.fine,
                motivated: p.motivated,
                alpha: p.alpha.clone().map(RationalText),
                counterexample: p
                    .counterexample
                    .as_ref()
                    .map(|b| (b.region().clone(), RationalText(b.weight().clone()))),
            })
            .collect(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RefineJson {
    pub provenance: Provenance,
    pub depths: Vec<u32>,
    pub offset: RationalText,
    pub node_counts: Vec<usize>,
    pub residual: RationalText,
    pub limit: ForestWire,
}

pub fn refine_json(report: &RefinementReport, provenance: Provenance) -> RefineJson {
    RefineJson {
        provenance,
        depths: report.schedule.depths.clone(),
        offset: RationalText(report.schedule.offset.clone()),
        node_counts: report.forests.iter().map(Forest::len).collect(),
        residual: RationalText(report.residual.clone()),
        limit: report.limit.to_wire(),
    }
}
