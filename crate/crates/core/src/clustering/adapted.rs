//! Adaptedness of a simple measure to a density: grounded, fine and strictly
//! motivated sibling pairs.

use crate::density::{DensityModel, GridDensity};
use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::measure::{BaseMeasure, SimpleMeasure};
use crate::number::{int, Rational, Scalar};
use crate::separation::SeparationRelation;

use super::grid::cluster_density_grid;
use super::kinship::{cells_at_depth, common_support, grid_kinship_height};

/// Verdict for one pair of direct siblings.
#[derive(Clone, Debug, PartialEq)]
pub struct PairReport {
    pub first: Region,
    pub second: Region,
    /// Flat level heights of the two siblings in `Q`.
    pub heights: (Scalar, Scalar),
    /// Supremum of admissible supporting heights, if the pair is kin below `P`.
    pub kinship: Option<Rational>,
    pub grounded: bool,
    pub fine: bool,
    pub motivated: bool,
    /// A margin `α ∈ (h*/min(h₁,h₂), 1)` when strictly motivated and kin.
    pub alpha: Option<Rational>,
    /// The supporting base measure that defeats strict motivation.
    pub counterexample: Option<BaseMeasure>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AdaptednessReport {
    pub pairs: Vec<PairReport>,
}

impl AdaptednessReport {
    pub fn is_adapted(&self) -> bool {
        self.failure().is_none()
    }

    /// Name of the most basic violated condition over all pairs, checked in
    /// the order grounded, fine, strictly motivated.
    pub fn failure(&self) -> Option<&'static str> {
        if self.pairs.iter().any(|p| !p.grounded) {
            Some("not grounded")
        } else if self.pairs.iter().any(|p| !p.fine) {
            Some("not fine")
        } else if self.pairs.iter().any(|p| !p.motivated) {
            Some("not strictly motivated")
        } else {
            None
        }
    }
}

type Support = Option<(Region, Rational, bool)>;

struct SiblingSet {
    regions: Vec<Region>,
    heights: Vec<Scalar>,
    has_parent: bool,
}

fn judge(
    set: &SiblingSet,
    all: &Support,
    pair_support: &dyn Fn(usize, usize) -> Result<Support>,
    out: &mut Vec<PairReport>,
) -> Result<()> {
    let k = set.regions.len();
    for i in 0..k {
        for j in i + 1..k {
            let pair = pair_support(i, j)?;
            let heights = (set.heights[i].clone(), set.heights[j].clone());
            let mut report = PairReport {
                first: set.regions[i].clone(),
                second: set.regions[j].clone(),
                heights: heights.clone(),
                kinship: None,
                grounded: true,
                fine: true,
                motivated: true,
                alpha: None,
                counterexample: None,
            };
            if let Some((support, h, attained)) = pair {
                report.kinship = Some(h.clone());
                report.grounded = set.has_parent;
                report.fine = match all {
                    Some((_, ha, all_attained)) => {
                        h < *ha || (&h == ha && (*all_attained || !attained))
                    }
                    None => false,
                };
                let low = if heights.0.le(&heights.1) {
                    heights.0
                } else {
                    heights.1
                };
                let hs = Scalar::Exact(h.clone());
                report.motivated = hs.lt(&low);
                if report.motivated {
                    if let Scalar::Exact(m) = &low {
                        report.alpha = Some((&h / m + int(1)) / int(2));
                    }
                } else if attained {
                    report.counterexample = BaseMeasure::with_height(support, h).ok();
                }
            }
            out.push(report);
        }
    }
    Ok(())
}

/// Checks every set of direct siblings of `Q`'s forest against `P`.
pub fn is_adapted(q: &SimpleMeasure, p: &DensityModel) -> Result<AdaptednessReport> {
    if !q.below_density(p) {
        return Err(Error::NotBelow("Q is not majorized by P".into()));
    }
    let forest = q.forest();
    let rel = q.rel();
    let mut keys: Vec<(usize, Option<usize>)> = Vec::new();
    for i in 0..forest.len() {
        let key = (forest.node(i).dim_class(), forest.parent(i));
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let mut report = AdaptednessReport::default();
    for key in keys {
        let members: Vec<usize> = (0..forest.len())
            .filter(|&i| (forest.node(i).dim_class(), forest.parent(i)) == key)
            .collect();
        if members.len() < 2 {
            continue;
        }
        let set = SiblingSet {
            regions: members.iter().map(|&i| forest.node(i).clone()).collect(),
            heights: members.iter().map(|&i| q.level_height(i)).collect(),
            has_parent: key.1.is_some(),
        };
        let all = common_support(p, rel, &set.regions)?;
        let pair = |i: usize, j: usize| {
            common_support(p, rel, &[set.regions[i].clone(), set.regions[j].clone()])
        };
        judge(&set, &all, &pair, &mut report.pairs)?;
    }
    Ok(report)
}

/// Adaptedness of the canonical simple measure of the grid density `q` to the
/// grid density `p`, read off the merge events of `q` without materializing
/// the canonical measure.
pub fn is_adapted_grid(
    q: &GridDensity,
    p: &GridDensity,
    rel: &SeparationRelation,
) -> Result<AdaptednessReport> {
    if !q.le(p) {
        return Err(Error::NotBelow("Q is not majorized by P".into()));
    }
    let clustering = cluster_density_grid(q, rel)?;
    let mut sets = vec![SiblingSet {
        regions: clustering
            .roots
            .iter()
            .map(|(c, _)| Region::Cells(c.clone()))
            .collect(),
        heights: clustering
            .roots
            .iter()
            .map(|(_, h)| Scalar::Exact(h.clone()))
            .collect(),
        has_parent: false,
    }];
    for m in &clustering.merges {
        sets.push(SiblingSet {
            regions: m.children.iter().cloned().map(Region::Cells).collect(),
            heights: m.child_heights.iter().cloned().map(Scalar::Exact).collect(),
            has_parent: true,
        });
    }
    let support = |regions: &[&Region]| -> Support {
        let mut seeds = Vec::new();
        for r in regions {
            if let Region::Cells(c) = r {
                seeds.extend(cells_at_depth(c, p.depth()));
            }
        }
        seeds.sort_unstable();
        seeds.dedup();
        grid_kinship_height(p, rel, &seeds).map(|(h, comp)| {
            let cells = crate::geometry::DyadicCellUnion::new(p.domain().clone(), p.depth(), comp)
                .expect("nonempty");
            (Region::Cells(cells), h, true)
        })
    };
    let mut report = AdaptednessReport::default();
    for set in sets.iter().filter(|s| s.regions.len() >= 2) {
        let all = support(&set.regions.iter().collect::<Vec<_>>());
        let pair = |i: usize, j: usize| Ok(support(&[&set.regions[i], &set.regions[j]]));
        judge(set, &all, &pair, &mut report.pairs)?;
    }
    Ok(report)
}
