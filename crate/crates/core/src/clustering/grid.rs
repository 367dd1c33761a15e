//! Level-set clustering of dyadic grid densities by a descending union-find sweep.

use num_traits::Zero;

use crate::density::GridDensity;
use crate::error::Result;
use crate::forest::{Forest, NodeMeta};
use crate::geometry::{DyadicCellUnion, Region};
use crate::measure::SimpleMeasure;
use crate::number::Rational;
use crate::separation::{SeparationRelation, UnionFind};

/// Two or more components of `{f ≥ v_prev}` joining into one component of `{f ≥ level}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MergeEvent {
    pub level: Rational,
    pub children: Vec<DyadicCellUnion>,
    /// Flat level height of each child in the canonical simple measure (its minimum value).
    pub child_heights: Vec<Rational>,
}

/// Output of the grid engine.
#[derive(Clone, Debug)]
pub struct GridClustering {
    /// `s(F_f)` with births (merge levels, 0 for roots) and deaths.
    pub forest: Forest,
    pub merges: Vec<MergeEvent>,
    /// Components of the support with their minimum values.
    pub roots: Vec<(DyadicCellUnion, Rational)>,
}

struct Component {
    members: Vec<u64>,
    top: Rational,
    min: Rational,
}

/// Clusters `f` under `rel`: the structure of the forest of ⊥-components of
/// the closed cell unions `{f ≥ v}` over the distinct positive values `v`.
pub fn cluster_density_grid(f: &GridDensity, rel: &SeparationRelation) -> Result<GridClustering> {
    let grid = f.grid();
    let offsets = rel.cell_offsets(&grid);
    let mut order: Vec<u64> = (0..grid.cell_count())
        .filter(|&c| !f.value(c).is_zero())
        .collect();
    order.sort_by(|a, b| f.value(*b).cmp(f.value(*a)).then(a.cmp(b)));

    let n = grid.cell_count() as usize;
    let mut uf = UnionFind::new(n);
    // index of the level at which each cell became active
    let mut stamp = vec![usize::MAX; n];
    let mut level_index = 0usize;
    let mut comps: Vec<Option<Component>> = (0..n).map(|_| None).collect();
    let mut nodes: Vec<(Region, NodeMeta)> = Vec::new();
    let mut merges = Vec::new();
    let domain = f.domain().clone();
    let depth = f.depth();

    let mut start = 0;
    while start < order.len() {
        let level = f.value(order[start]).clone();
        let mut end = start;
        while end < order.len() && f.value(order[end]) == &level {
            end += 1;
        }
        let fresh = &order[start..end];
        for &c in fresh {
            stamp[c as usize] = level_index;
        }
        // join fresh cells among themselves first
        let mut fresh_uf = UnionFind::new(fresh.len());
        let mut old_neighbours: Vec<Vec<usize>> = vec![Vec::new(); fresh.len()];
        for (i, &c) in fresh.iter().enumerate() {
            let coords = grid.coords(c);
            for o in &offsets {
                let Some(nb) = grid.offset_index(&coords, o) else {
                    continue;
                };
                if stamp[nb as usize] < level_index {
                    old_neighbours[i].push(uf.find(nb as usize));
                } else if stamp[nb as usize] == level_index {
                    if let Ok(j) = fresh.binary_search(&nb) {
                        fresh_uf.union(i, j);
                    }
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, (Vec<usize>, Vec<usize>)> =
            Default::default();
        for i in 0..fresh.len() {
            let g = groups.entry(fresh_uf.find(i)).or_default();
            g.0.push(i);
            g.1.extend(old_neighbours[i].iter().copied());
        }
        // fresh groups sharing an old component belong to the same merged component
        let group_keys: Vec<usize> = groups.keys().copied().collect();
        let mut meta_uf = UnionFind::new(group_keys.len());
        let mut owner: std::collections::HashMap<usize, usize> = Default::default();
        for (k, key) in group_keys.iter().enumerate() {
            for &old in &groups[key].1 {
                match owner.get(&old) {
                    Some(&other) => {
                        meta_uf.union(k, other);
                    }
                    None => {
                        owner.insert(old, k);
                    }
                }
            }
        }
        let mut merged: std::collections::BTreeMap<usize, (Vec<u64>, Vec<usize>)> =
            Default::default();
        for (k, key) in group_keys.iter().enumerate() {
            let slot = merged.entry(meta_uf.find(k)).or_default();
            slot.0.extend(groups[key].0.iter().map(|&i| fresh[i]));
            for &old in &groups[key].1 {
                if !slot.1.contains(&old) {
                    slot.1.push(old);
                }
            }
        }
        for (_, (cells, olds)) in merged {
            if olds.len() >= 2 {
                let mut children = Vec::new();
                let mut heights = Vec::new();
                for &old in &olds {
                    let comp = comps[old].as_ref().expect("old component");
                    let region = DyadicCellUnion::new(domain.clone(), depth, comp.members.clone())?;
                    nodes.push((
                        Region::Cells(region.clone()),
                        NodeMeta::span(level.clone(), comp.top.clone()),
                    ));
                    children.push(region);
                    heights.push(comp.min.clone());
                }
                merges.push(MergeEvent {
                    level: level.clone(),
                    children,
                    child_heights: heights,
                });
            }
            let mut members: Vec<u64> = cells.clone();
            let mut top = level.clone();
            if olds.len() == 1 {
                top = comps[olds[0]].as_ref().expect("old component").top.clone();
            }
            for &old in &olds {
                let comp = comps[old].take().expect("old component");
                members.extend(comp.members);
            }
            let anchor = cells[0] as usize;
            for &c in &cells {
                uf.union(anchor, c as usize);
            }
            for &old in &olds {
                uf.union(anchor, old);
            }
            let root = uf.find(anchor);
            comps[root] = Some(Component {
                members,
                top,
                min: level.clone(),
            });
        }
        start = end;
        level_index += 1;
    }

    let mut roots = Vec::new();
    for comp in comps.into_iter().flatten() {
        let mut members = comp.members;
        members.sort_unstable();
        let region = DyadicCellUnion::new(domain.clone(), depth, members)?;
        nodes.push((
            Region::Cells(region.clone()),
            NodeMeta::span(Rational::zero(), comp.top),
        ));
        roots.push((region, comp.min));
    }
    roots.sort();
    let forest = Forest::new(rel.clone(), nodes)?;
    Ok(GridClustering {
        forest,
        merges,
        roots,
    })
}

/// The simple measure whose flat level densities reproduce `f`: one term per
/// distinct component of each `{f ≥ v}`, weighted by the height increment.
pub fn canonical_simple_measure(
    f: &GridDensity,
    rel: &SeparationRelation,
) -> Result<SimpleMeasure> {
    let mut values = f.distinct_positive_desc();
    values.reverse();
    let mut terms = Vec::new();
    let mut below = Rational::zero();
    for v in &values {
        let set = f.superlevel_ge(v).expect("value attained");
        for comp in rel.cell_components(&set) {
            let w = (v - &below) * comp.measure();
            terms.push((Region::Cells(comp), w));
        }
        below = v.clone();
    }
    SimpleMeasure::validate_representation(terms, rel.clone())
}
