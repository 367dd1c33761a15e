//! Separation relations, ⊥-intersection graphs and unique ⊥-decompositions.

use std::fmt;
use std::str::FromStr;

use num_traits::Signed;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::cells::{cell_gap_squared, touching_offsets, Grid};
use crate::geometry::{DyadicCellUnion, IntervalSet, Region};
use crate::number::{format_rational, parse_rational, Rational};

/// A symmetric relation telling when two regions count as separated.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SeparationRelation {
    /// Separated iff the sets do not intersect (interval openness honored).
    Disjointness,
    /// Separated iff the infimum distance is at least `tau`.
    Tau(Rational),
}

impl SeparationRelation {
    pub fn tau(tau: Rational) -> Result<Self> {
        if !tau.is_positive() {
            return Err(Error::Parse(format!(
                "tau must be positive, got {}",
                format_rational(&tau)
            )));
        }
        Ok(SeparationRelation::Tau(tau))
    }

    pub fn separated(&self, a: &Region, b: &Region) -> bool {
        match self {
            SeparationRelation::Disjointness => !a.intersects(b),
            SeparationRelation::Tau(tau) => a.distance(b).at_least(tau),
        }
    }

    /// Offsets between cells of one grid that are NOT separated from each other.
    pub fn cell_offsets(&self, grid: &Grid) -> Vec<Vec<i64>> {
        match self {
            SeparationRelation::Disjointness => touching_offsets(grid.dim()),
            SeparationRelation::Tau(tau) => {
                let side = grid.cell_side(0);
                let units = tau / &side;
                let limit = units.clone() * units.clone();
                let radius = units
                    .ceil()
                    .to_integer()
                    .try_into()
                    .unwrap_or(i64::MAX - 1)
                    .min(grid.n as i64)
                    + 1;
                let mut out: Vec<Vec<i64>> = vec![Vec::new()];
                for _ in 0..grid.dim() {
                    let mut next = Vec::new();
                    for prefix in &out {
                        for d in -radius..=radius {
                            let mut q = prefix.clone();
                            q.push(d);
                            next.push(q);
                        }
                    }
                    out = next;
                }
                out.retain(|o| {
                    o.iter().any(|&d| d != 0)
                        && Rational::from_integer(cell_gap_squared(o).into()) < limit
                });
                out
            }
        }
    }

    /// Groups of consecutive parts of a line set that are mutually non-separated.
    pub fn line_components(&self, set: &IntervalSet) -> Vec<IntervalSet> {
        let parts = set.parts();
        let mut groups: Vec<Vec<crate::geometry::Interval1D>> = Vec::new();
        for (i, p) in parts.iter().enumerate() {
            let joins = i > 0
                && match self {
                    SeparationRelation::Disjointness => false,
                    SeparationRelation::Tau(tau) => &(p.lo() - parts[i - 1].hi()) < tau,
                };
            if joins {
                groups.last_mut().expect("previous group").push(p.clone());
            } else {
                groups.push(vec![p.clone()]);
            }
        }
        groups
            .into_iter()
            .map(IntervalSet::from_intervals)
            .collect()
    }

    /// ⊥-components of a cell union.
    pub fn cell_components(&self, cells: &DyadicCellUnion) -> Vec<DyadicCellUnion> {
        let grid = cells.grid();
        let offsets = self.cell_offsets(&grid);
        let ids = cells.cells();
        let mut uf = UnionFind::new(ids.len());
        for (i, &c) in ids.iter().enumerate() {
            let coords = grid.coords(c);
            for o in &offsets {
                if let Some(n) = grid.offset_index(&coords, o) {
                    if let Ok(j) = ids.binary_search(&n) {
                        uf.union(i, j);
                    }
                }
            }
        }
        let mut groups: Vec<Vec<u64>> = Vec::new();
        let mut slot = vec![usize::MAX; ids.len()];
        for i in 0..ids.len() {
            let r = uf.find(i);
            if slot[r] == usize::MAX {
                slot[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[r]].push(ids[i]);
        }
        let mut out: Vec<DyadicCellUnion> = groups
            .into_iter()
            .map(|g| cells.with_cells(g).expect("nonempty component"))
            .collect();
        out.sort();
        out
    }
}

impl fmt::Display for SeparationRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeparationRelation::Disjointness => write!(f, "disjoint"),
            SeparationRelation::Tau(t) => write!(f, "tau:{}", format_rational(t)),
        }
    }
}

impl FromStr for SeparationRelation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "disjoint" {
            return Ok(SeparationRelation::Disjointness);
        }
        if let Some(t) = s.strip_prefix("tau:") {
            return SeparationRelation::tau(parse_rational(t)?);
        }
        Err(Error::Parse(format!(
            "unknown separation {s:?}; expected \"disjoint\" or \"tau:<p/q>\""
        )))
    }
}

impl Serialize for SeparationRelation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SeparationRelation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the sets of `a` and `b`; returns the surviving root.
    pub fn union(&mut self, a: usize, b: usize) -> usize {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return ra;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        ra
    }
}

/// Regions joined by an edge whenever they are not separated.
#[derive(Clone, Debug)]
pub struct IntersectionGraph {
    nodes: Vec<Region>,
    adjacency: Vec<Vec<usize>>,
}

impl IntersectionGraph {
    pub fn new(rel: &SeparationRelation, nodes: Vec<Region>) -> Self {
        let n = nodes.len();
        let mut adjacency = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                if !rel.separated(&nodes[i], &nodes[j]) {
                    adjacency[i].push(j);
                    adjacency[j].push(i);
                }
            }
        }
        IntersectionGraph { nodes, adjacency }
    }

    pub fn nodes(&self) -> &[Region] {
        &self.nodes
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// Connected components as sorted index lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.nodes.len());
        for (i, adj) in self.adjacency.iter().enumerate() {
            for &j in adj {
                uf.union(i, j);
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..self.nodes.len() {
            groups.entry(uf.find(i)).or_default().push(i);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }
}

/// Partitions `parts` into the unique groups whose unions are pairwise ⊥.
///
/// Groups are returned in canonical order (each group sorted, groups sorted),
/// so the result does not depend on the input order.
pub fn decompose(rel: &SeparationRelation, parts: &[Region]) -> Vec<Vec<Region>> {
    let mut sorted = parts.to_vec();
    sorted.sort();
    let graph = IntersectionGraph::new(rel, sorted);
    let mut groups: Vec<Vec<Region>> = graph
        .components()
        .into_iter()
        .map(|g| g.into_iter().map(|i| graph.nodes[i].clone()).collect())
        .collect();
    groups.sort();
    groups
}

pub fn is_connected_union(rel: &SeparationRelation, parts: &[Region]) -> bool {
    decompose(rel, parts).len() == 1
}

/// Whether a single region is ⊥-connected (one piece under `rel`).
pub fn is_connected_region(rel: &SeparationRelation, region: &Region) -> bool {
    match region {
        Region::Cells(c) if c.domain().dim() >= 2 => rel.cell_components(c).len() == 1,
        Region::IntervalUnion(s) => rel.line_components(s).len() == 1,
        Region::Cells(c) => {
            rel.line_components(&c.to_interval_set().expect("1D cells"))
                .len()
                == 1
        }
        Region::Polyline(l) => match rel {
            SeparationRelation::Disjointness => l.params().parts().len() == 1,
            SeparationRelation::Tau(_) => {
                let pieces: Vec<Region> = l
                    .params()
                    .parts()
                    .iter()
                    .map(|p| {
                        Region::Polyline(
                            l.with_params(IntervalSet::from_interval(p.clone()))
                                .expect("subset"),
                        )
                    })
                    .collect();
                is_connected_union(rel, &pieces)
            }
        },
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{AmbientBox, Polyline};
    use crate::number::{int, rat};
    use std::sync::Arc;

    #[test]
    fn merlon_children_are_disjoint() {
        let a = Region::closed(int(0), rat(1, 3)).unwrap();
        let b = Region::closed(rat(2, 3), int(1)).unwrap();
        assert!(SeparationRelation::Disjointness.separated(&a, &b));
    }

    #[test]
    fn corner_squares_are_not_disjoint() {
        let bx = Arc::new(AmbientBox::cube(2, int(0), int(1)).unwrap());
        let a = Region::Cells(DyadicCellUnion::from_coords(bx.clone(), 1, &[vec![0, 0]]).unwrap());
        let b = Region::Cells(DyadicCellUnion::from_coords(bx, 1, &[vec![1, 1]]).unwrap());
        assert!(!SeparationRelation::Disjointness.separated(&a, &b));
    }

    #[test]
    fn tau_compares_gap() {
        let rel = SeparationRelation::tau(rat(1, 3)).unwrap();
        let a = Region::closed(int(0), int(1)).unwrap();
        assert!(!rel.separated(&a, &Region::closed(rat(7, 6), int(2)).unwrap()));
        assert!(rel.separated(&a, &Region::closed(rat(3, 2), int(2)).unwrap()));
        assert!(rel.separated(&a, &Region::closed(rat(4, 3), int(2)).unwrap()));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(
            "disjoint".parse::<SeparationRelation>().unwrap(),
            SeparationRelation::Disjointness
        );
        let t: SeparationRelation = "tau:1/6".parse().unwrap();
        assert_eq!(t.to_string(), "tau:1/6");
        assert!("tau:0".parse::<SeparationRelation>().is_err());
        assert!("tau:1/0".parse::<SeparationRelation>().is_err());
    }

    #[test]
    fn cross_of_segments_is_connected() {
        let h = Region::Polyline(
            Polyline::full(vec![vec![int(-1), int(0)], vec![int(1), int(0)]]).unwrap(),
        );
        let v = Region::Polyline(
            Polyline::full(vec![vec![int(0), int(-1)], vec![int(0), int(1)]]).unwrap(),
        );
        assert!(is_connected_union(
            &SeparationRelation::Disjointness,
            &[h, v]
        ));
    }

    #[test]
    fn merlon_level_cells_decompose_in_two() {
        let bx = Arc::new(AmbientBox::cube(1, int(0), int(1)).unwrap());
        let u = DyadicCellUnion::new(bx, 0, vec![0]).unwrap();
        assert_eq!(
            SeparationRelation::Disjointness.cell_components(&u).len(),
            1
        );
        let a = Region::closed(int(0), rat(1, 3)).unwrap();
        let b = Region::closed(rat(2, 3), int(1)).unwrap();
        assert_eq!(
            decompose(&SeparationRelation::Disjointness, &[b, a]).len(),
            2
        );
    }

    #[test]
    fn tau_cell_offsets_cover_the_gap() {
        let bx = Arc::new(AmbientBox::cube(1, int(0), int(1)).unwrap());
        let grid = Grid::new(bx, 3).unwrap();
        // side 1/8, tau 1/4: neighbors with gap 0 or 1 cell (gap 1/8 < 1/4) but not 2 cells
        let offs = SeparationRelation::tau(rat(1, 4))
            .unwrap()
            .cell_offsets(&grid);
        let mut ds: Vec<i64> = offs.iter().map(|o| o[0]).collect();
        ds.sort();
        assert_eq!(ds, vec![-2, -1, 1, 2]);
    }
}
