//! Exact level-set clustering of piecewise-linear densities on the line.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::density::DensityModel1D;
use crate::error::{Error, Result};
use crate::forest::{Forest, ParamChain, ParamChainForest};
use crate::geometry::{Interval1D, IntervalSet, Region};
use crate::number::{display_rational, int, Rational};
use crate::separation::SeparationRelation;

/// Runs of consecutive parts that are not separated from their neighbour.
pub(crate) fn group_parts(rel: &SeparationRelation, parts: &[Interval1D]) -> Vec<(usize, usize)> {
    let mut groups: Vec<(usize, usize)> = Vec::new();
    for i in 0..parts.len() {
        let joins = i > 0
            && match rel {
                SeparationRelation::Disjointness => {
                    parts[i - 1].hi() == parts[i].lo()
                        && (parts[i - 1].hi_closed() || parts[i].lo_closed())
                }
                SeparationRelation::Tau(tau) => &(parts[i].lo() - parts[i - 1].hi()) < tau,
            };
        if joins {
            groups.last_mut().expect("previous group").1 = i;
        } else {
            groups.push((i, i));
        }
    }
    groups
}

/// Levels strictly inside `(lo, hi)` at which the gap between two consecutive
/// parts of `parts_at(λ)` equals `tau`, assuming the part count is constant
/// there and every endpoint moves linearly.
pub(crate) fn tau_roots(
    parts_at: &dyn Fn(&Rational) -> IntervalSet,
    lo: &Rational,
    hi: &Rational,
    tau: &Rational,
) -> Vec<Rational> {
    let third = (hi - lo) / int(3);
    let a = lo + &third;
    let b = &a + &third;
    let (pa, pb) = (parts_at(&a), parts_at(&b));
    let (pa, pb) = (pa.parts(), pb.parts());
    if pa.len() != pb.len() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for j in 1..pa.len() {
        let ga = pa[j].lo() - pa[j - 1].hi();
        let gb = pb[j].lo() - pb[j - 1].hi();
        if ga == gb {
            continue;
        }
        let slope = (&gb - &ga) / (&b - &a);
        let r = &a + (tau - &ga) / slope;
        if &r > lo && &r < hi {
            out.push(r);
        }
    }
    out
}

fn level_parts(f: &DensityModel1D, lambda: &Rational) -> IntervalSet {
    f.superlevel(lambda).without_points()
}

/// Levels where the component structure of `{f > λ}` can change.
fn critical_levels(f: &DensityModel1D, rel: &SeparationRelation) -> Vec<Rational> {
    let base = f.breakpoint_values();
    let mut levels: BTreeSet<Rational> = base.iter().cloned().collect();
    if let SeparationRelation::Tau(tau) = rel {
        for w in base.windows(2) {
            levels.extend(tau_roots(&|l| level_parts(f, l), &w[0], &w[1], tau));
        }
    }
    levels.into_iter().collect()
}

/// One stretch of levels with constant component structure.
struct Segment {
    /// Lowest level of the stretch (attained only for point stretches).
    start: Rational,
    /// Component sets at a representative level.
    reps: Vec<IntervalSet>,
    /// Union of each component over the stretch.
    unions: Vec<IntervalSet>,
}

fn point_segment(f: &DensityModel1D, rel: &SeparationRelation, e: &Rational) -> Segment {
    let set = level_parts(f, e);
    let comps: Vec<IntervalSet> = group_parts(rel, set.parts())
        .into_iter()
        .map(|(i, j)| IntervalSet::from_intervals(set.parts()[i..=j].iter().cloned()))
        .collect();
    Segment {
        start: e.clone(),
        reps: comps.clone(),
        unions: comps,
    }
}

/// Components on the open stretch `(lo, hi)` together with their limits as `λ ↓ lo`.
fn open_segment(
    f: &DensityModel1D,
    rel: &SeparationRelation,
    lo: &Rational,
    hi: &Rational,
) -> Segment {
    let third = (hi - lo) / int(3);
    let a = lo + &third;
    let b = &a + &third;
    let (sa, sb) = (level_parts(f, &a), level_parts(f, &b));
    let (pa, pb) = (sa.parts(), sb.parts());
    assert_eq!(
        pa.len(),
        pb.len(),
        "part count changes inside an open stretch"
    );
    let span = &b - &a;
    let limit = |xa: &Rational, xb: &Rational, closed: bool| -> (Rational, bool) {
        if xa == xb {
            (xa.clone(), closed)
        } else {
            let slope = (xb - xa) / &span;
            (xa - slope * (&a - lo), false)
        }
    };
    let mut reps = Vec::new();
    let mut unions = Vec::new();
    for (i, j) in group_parts(rel, pa) {
        reps.push(IntervalSet::from_intervals(pa[i..=j].iter().cloned()));
        let limits = (i..=j).map(|k| {
            let (l, lc) = limit(pa[k].lo(), pb[k].lo(), pa[k].lo_closed());
            let (h, hc) = limit(pa[k].hi(), pb[k].hi(), pa[k].hi_closed());
            Interval1D::new(l, h, lc, hc).expect("limit of a growing interval")
        });
        unions.push(IntervalSet::from_intervals(limits));
    }
    Segment {
        start: lo.clone(),
        reps,
        unions,
    }
}

/// The level-set forest of `f` as parameterized chains of components.
pub fn level_chain_forest_1d(
    f: &DensityModel1D,
    rel: &SeparationRelation,
) -> Result<ParamChainForest> {
    let sup = f.sup();
    let levels: Vec<Rational> = critical_levels(f, rel)
        .into_iter()
        .filter(|l| l < &sup)
        .collect();
    let mut segments = Vec::new();
    for (k, e) in levels.iter().enumerate() {
        segments.push(point_segment(f, rel, e));
        let next = levels.get(k + 1).unwrap_or(&sup);
        segments.push(open_segment(f, rel, e, next));
    }

    let mut chains: Vec<ParamChain> = Vec::new();
    let mut open: Vec<Option<usize>> = Vec::new();
    let mut prev: Vec<IntervalSet> = Vec::new();
    for seg in &segments {
        let mut successors: Vec<Vec<usize>> = vec![Vec::new(); prev.len()];
        let mut first_level_roots = Vec::new();
        for (c, rep) in seg.reps.iter().enumerate() {
            match prev.iter().position(|p| p.contains_set(rep)) {
                Some(p) => successors[p].push(c),
                None => first_level_roots.push(c),
            }
        }
        let mut next_open: Vec<Option<usize>> = vec![None; seg.reps.len()];
        for c in first_level_roots {
            next_open[c] = Some(chains.len());
            chains.push(new_chain(seg, c, None)?);
        }
        for (p, succ) in successors.iter().enumerate() {
            let chain = open[p].expect("open chain");
            match succ.len() {
                0 => chains[chain].hi = seg.start.clone(),
                1 => next_open[succ[0]] = Some(chain),
                _ => {
                    chains[chain].hi = seg.start.clone();
                    let unions: Vec<Region> = succ
                        .iter()
                        .map(|&c| Region::from_line_set(seg.unions[c].clone()))
                        .collect::<Result<_>>()?;
                    for x in 0..unions.len() {
                        for y in x + 1..unions.len() {
                            if !rel.separated(&unions[x], &unions[y]) {
                                return Err(Error::ClosureSeparation {
                                    level: display_rational(&seg.start),
                                    detail: format!(
                                        "{} and {} are not separated",
                                        unions[x], unions[y]
                                    ),
                                });
                            }
                        }
                    }
                    for &c in succ {
                        next_open[c] = Some(chains.len());
                        chains.push(new_chain(seg, c, Some(chain))?);
                    }
                }
            }
        }
        open = next_open;
        prev = seg.reps.clone();
    }
    for chain in open.into_iter().flatten() {
        chains[chain].hi = sup.clone();
    }
    ParamChainForest::new(rel.clone(), chains)
}

fn new_chain(seg: &Segment, c: usize, parent: Option<usize>) -> Result<ParamChain> {
    Ok(ParamChain {
        lo: seg.start.clone(),
        hi: seg.start.clone(),
        union: Region::from_line_set(seg.unions[c].clone())?,
        parent,
    })
}

/// `c(P)` for a piecewise-linear density: the generalized structure of its
/// level-set forest. Node births are split levels, deaths the top of each
/// maximal pure chain.
pub fn cluster_density_1d(f: &DensityModel1D, rel: &SeparationRelation) -> Result<Forest> {
    let chains = level_chain_forest_1d(f, rel)?;
    let forest = chains.generalized_structure()?;
    debug_assert!(forest.roots().iter().all(|&r| forest
        .meta(r)
        .birth
        .as_ref()
        .is_none_or(|b| b >= &Rational::zero())));
    Ok(forest)
}
