//! Kinship below a density: the highest flat base measure below `P` whose
//! support holds two given regions.

use std::collections::{BTreeSet, VecDeque};

use num_traits::{Signed, Zero};

use crate::density::{DensityModel, DensityModel1D, GridDensity};
use crate::error::{Error, Result};
use crate::geometry::{DyadicCellUnion, IntervalSet, Region};
use crate::number::{int, Rational};
use crate::separation::SeparationRelation;

use super::line::{group_parts, tau_roots};

/// Witness that `B ∼_P B'`: the base set `A* ⊇ B ∪ B'` is a ⊥-connected
/// component of `ess{f ≥ h*}`, with `h*` maximal.
///
/// When the supremum of admissible heights is not attained (a τ-gap reaching
/// exactly `τ`), `attained` is false and `support` is taken just below it.
#[derive(Clone, Debug, PartialEq)]
pub struct KinshipCertificate {
    pub first: Region,
    pub second: Region,
    pub support: Region,
    pub height: Rational,
    pub attained: bool,
}

/// Searches the finitely many candidate heights for the best supporting base set.
pub fn kinship(
    p: &DensityModel,
    rel: &SeparationRelation,
    b: &Region,
    b2: &Region,
) -> Result<Option<KinshipCertificate>> {
    Ok(
        common_support(p, rel, &[b.clone(), b2.clone()])?.map(|(support, height, attained)| {
            KinshipCertificate {
                first: b.clone(),
                second: b2.clone(),
                support,
                height,
                attained,
            }
        }),
    )
}

/// Best `(A*, h*, attained)` with every region inside one ⊥-component `A*` of `ess{f ≥ h*}`.
pub(crate) fn common_support(
    p: &DensityModel,
    rel: &SeparationRelation,
    regions: &[Region],
) -> Result<Option<(Region, Rational, bool)>> {
    let all_cells: Option<Vec<&DyadicCellUnion>> = regions
        .iter()
        .map(|r| match r {
            Region::Cells(c) => Some(c),
            _ => None,
        })
        .collect();
    match p {
        DensityModel::Line(f) => line_support(f, rel, regions),
        DensityModel::Grid(g) => match all_cells {
            Some(cells) => grid_support(g, rel, &cells),
            None => match g.to_line_model() {
                Some(f) => line_support(&f, rel, regions),
                None => Err(Error::Unsupported(
                    "kinship of non-cell regions under a grid density".into(),
                )),
            },
        },
        DensityModel::Mixture(_) => {
            Err(Error::Unsupported("kinship under mixture measures".into()))
        }
    }
}

fn line_support(
    f: &DensityModel1D,
    rel: &SeparationRelation,
    regions: &[Region],
) -> Result<Option<(Region, Rational, bool)>> {
    let mut target = IntervalSet::empty();
    for r in regions {
        let s = r
            .line_set()
            .ok_or_else(|| Error::DimensionMismatch(format!("{r} is not a subset of the line")))?;
        target = target.union(&s);
    }
    let target = target.without_points().closure();
    if target.is_empty() {
        return Err(Error::InvalidRegion(
            "kinship needs regions of positive length".into(),
        ));
    }
    let feasible = |h: &Rational| -> Option<IntervalSet> {
        let set = f.ess_superlevel_closed(h);
        let parts = set.parts();
        let groups = group_parts(rel, parts);
        let group_of = |iv: &crate::geometry::Interval1D| {
            let k = parts
                .iter()
                .position(|q| q.lo() <= iv.lo() && iv.hi() <= q.hi())?;
            groups.iter().position(|(i, j)| *i <= k && k <= *j)
        };
        let first = group_of(&target.parts()[0])?;
        if target.parts().iter().all(|iv| group_of(iv) == Some(first)) {
            let (i, j) = groups[first];
            Some(IntervalSet::from_intervals(parts[i..=j].iter().cloned()))
        } else {
            None
        }
    };
    let base = f.breakpoint_values();
    let mut candidates: BTreeSet<Rational> =
        base.iter().filter(|v| v.is_positive()).cloned().collect();
    if let SeparationRelation::Tau(tau) = rel {
        for w in base.windows(2) {
            candidates.extend(tau_roots(
                &|h| f.ess_superlevel_closed(h),
                &w[0],
                &w[1],
                tau,
            ));
        }
    }
    for part in target.parts() {
        let m = f.ess_inf(part.lo(), part.hi());
        if m.is_positive() {
            candidates.insert(m);
        }
    }
    let candidates: Vec<Rational> = candidates.into_iter().rev().collect();
    for (k, h) in candidates.iter().enumerate() {
        if let Some(support) = feasible(h) {
            return Ok(Some((Region::from_line_set(support)?, h.clone(), true)));
        }
        let below = candidates
            .get(k + 1)
            .cloned()
            .unwrap_or_else(Rational::zero);
        let mid = (h + &below) / int(2);
        if let Some(support) = feasible(&mid) {
            return Ok(Some((Region::from_line_set(support)?, h.clone(), false)));
        }
    }
    Ok(None)
}

/// Cell indices of `c` at the grid depth `depth`, covering coarser or finer cells.
pub(crate) fn cells_at_depth(c: &DyadicCellUnion, depth: u32) -> Vec<u64> {
    if c.depth() <= depth {
        return c.refined_to(depth).cells().to_vec();
    }
    let from = c.grid();
    let to = crate::geometry::Grid::new(c.domain().clone(), depth).expect("coarser grid");
    let shift = c.depth() - depth;
    let mut out: Vec<u64> = c
        .cells()
        .iter()
        .map(|&i| {
            to.index(
                &from
                    .coords(i)
                    .iter()
                    .map(|x| x >> shift)
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Cells reachable from `seeds[0]` through non-separated cells of value `≥ h`,
/// provided every seed has value `≥ h` and is reached.
fn connected_at(
    g: &GridDensity,
    offsets: &[Vec<i64>],
    seeds: &[u64],
    h: &Rational,
) -> Option<Vec<u64>> {
    if seeds.iter().any(|&s| g.value(s) < h) {
        return None;
    }
    let grid = g.grid();
    let mut seen = vec![false; grid.cell_count() as usize];
    let mut queue = VecDeque::from([seeds[0]]);
    seen[seeds[0] as usize] = true;
    let mut comp = Vec::new();
    while let Some(c) = queue.pop_front() {
        comp.push(c);
        let coords = grid.coords(c);
        for o in offsets {
            if let Some(n) = grid.offset_index(&coords, o) {
                if !seen[n as usize] && g.value(n) >= h {
                    seen[n as usize] = true;
                    queue.push_back(n);
                }
            }
        }
    }
    if seeds.iter().all(|&s| seen[s as usize]) {
        comp.sort_unstable();
        Some(comp)
    } else {
        None
    }
}

/// Largest cell value `h` such that `seeds` lie in one ⊥-component of `{g ≥ h}`.
pub fn grid_kinship_height(
    g: &GridDensity,
    rel: &SeparationRelation,
    seeds: &[u64],
) -> Option<(Rational, Vec<u64>)> {
    let values = g.distinct_positive_desc();
    let offsets = rel.cell_offsets(&g.grid());
    let (mut lo, mut hi) = (0usize, values.len());
    // values[..lo] infeasible, values[hi..] feasible (feasibility grows as h drops)
    while lo < hi {
        let mid = (lo + hi) / 2;
        if connected_at(g, &offsets, seeds, &values[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let h = values.get(lo)?.clone();
    let comp = connected_at(g, &offsets, seeds, &h)?;
    Some((h, comp))
}

fn grid_support(
    g: &GridDensity,
    rel: &SeparationRelation,
    cells: &[&DyadicCellUnion],
) -> Result<Option<(Region, Rational, bool)>> {
    let mut seeds = Vec::new();
    for c in cells {
        if c.domain() != g.domain() {
            return Err(Error::DimensionMismatch(
                "regions and density use different boxes".into(),
            ));
        }
        seeds.extend(cells_at_depth(c, g.depth()));
    }
    seeds.sort_unstable();
    seeds.dedup();
    Ok(grid_kinship_height(g, rel, &seeds).map(|(height, comp)| {
        let support =
            DyadicCellUnion::new(g.domain().clone(), g.depth(), comp).expect("nonempty component");
        (Region::Cells(support), height, true)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::rat;

    #[test]
    fn bumps_over_a_podium_are_kin() {
        let f = DensityModel1D::step(
            vec![int(0), int(1), int(2), int(3), int(4), int(5), int(6)],
            vec![int(2), int(1), int(2), int(0), int(2), int(0)],
        )
        .unwrap();
        let p = DensityModel::Line(f);
        let rel = SeparationRelation::Disjointness;
        let a1 = Region::closed(int(0), int(1)).unwrap();
        let a2 = Region::closed(int(2), int(3)).unwrap();
        let a3 = Region::closed(int(4), int(5)).unwrap();
        let cert = kinship(&p, &rel, &a1, &a2).unwrap().unwrap();
        assert_eq!(cert.height, int(1));
        assert_eq!(cert.support, Region::closed(int(0), int(3)).unwrap());
        assert!(kinship(&p, &rel, &a1, &a3).unwrap().is_none());
        let self_kin = kinship(&p, &rel, &a1, &a1).unwrap().unwrap();
        assert_eq!(self_kin.height, int(2));
    }

    #[test]
    fn tau_supremum_is_not_attained() {
        let f = DensityModel1D::continuous(&[
            (int(0), int(0)),
            (rat(1, 3), rat(1, 3)),
            (rat(1, 2), rat(1, 6)),
            (rat(2, 3), rat(1, 3)),
            (int(1), int(0)),
        ])
        .unwrap();
        let p = DensityModel::Line(f);
        let rel = SeparationRelation::tau(rat(1, 6)).unwrap();
        let left = Region::closed(rat(3, 10), rat(1, 3)).unwrap();
        let right = Region::closed(rat(2, 3), rat(7, 10)).unwrap();
        let cert = kinship(&p, &rel, &left, &right).unwrap().unwrap();
        assert_eq!(cert.height, rat(1, 4));
        assert!(!cert.attained);
    }
}
