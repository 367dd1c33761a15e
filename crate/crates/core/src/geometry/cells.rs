//! The ambient box and unions of closed dyadic cells inside it.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geometry::interval::{Interval1D, IntervalSet};
use crate::number::{display_rational, Rational};

pub type Point = Vec<Rational>;

/// An axis-parallel compact box `Ω = Π [lo_k, hi_k]` with rational corners.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AmbientBox {
    lo: Point,
    hi: Point,
}

impl AmbientBox {
    pub fn new(lo: Point, hi: Point) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::InvalidRegion(
                "box corners must have equal, positive dimension".into(),
            ));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(Error::InvalidRegion(
                "box must have positive side lengths".into(),
            ));
        }
        Ok(AmbientBox { lo, hi })
    }

    /// `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: Rational, hi: Rational) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[Rational] {
        &self.lo
    }

    pub fn hi(&self) -> &[Rational] {
        &self.hi
    }

    pub fn side(&self, axis: usize) -> Rational {
        &self.hi[axis] - &self.lo[axis]
    }

    pub fn is_cube(&self) -> bool {
        let s = self.side(0);
        (1..self.dim()).all(|k| self.side(k) == s)
    }

    pub fn volume(&self) -> Rational {
        (0..self.dim())
            .map(|k| self.side(k))
            .fold(Rational::one(), |a, b| a * b)
    }

    pub fn contains_point(&self, p: &[Rational]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .enumerate()
                .all(|(k, x)| x >= &self.lo[k] && x <= &self.hi[k])
    }
}

/// Grid bookkeeping for one depth: `n = 2^depth` cells per axis, row-major
/// linear indices with axis 0 varying fastest.
#[derive(Clone, Debug)]
pub struct Grid {
    pub domain: Arc<AmbientBox>,
    pub depth: u32,
    pub n: u64,
}

impl Grid {
    pub fn new(domain: Arc<AmbientBox>, depth: u32) -> Result<Self> {
        if depth > 24 {
            return Err(Error::InvalidRegion(format!(
                "grid depth {depth} exceeds 24"
            )));
        }
        let n = 1u64 << depth;
        let total = (n as u128).pow(domain.dim() as u32);
        if total > (1u128 << 40) {
            return Err(Error::InvalidRegion("grid too large".into()));
        }
        Ok(Grid { domain, depth, n })
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn cell_count(&self) -> u64 {
        self.n.pow(self.dim() as u32)
    }

    pub fn cell_side(&self, axis: usize) -> Rational {
        self.domain.side(axis) / Rational::from_integer(self.n.into())
    }

    pub fn cell_volume(&self) -> Rational {
        self.domain.volume() / Rational::from_integer(self.n.pow(self.dim() as u32).into())
    }

    pub fn coords(&self, mut idx: u64) -> Vec<u64> {
        let mut c = Vec::with_capacity(self.dim());
        for _ in 0..self.dim() {
            c.push(idx % self.n);
            idx /= self.n;
        }
        c
    }

    pub fn index(&self, coords: &[u64]) -> u64 {
        coords.iter().rev().fold(0, |acc, &c| acc * self.n + c)
    }

    /// Linear index of the neighbor at `offset`, if it lies inside the grid.
    pub fn offset_index(&self, coords: &[u64], offset: &[i64]) -> Option<u64> {
        let mut idx = 0u64;
        for k in (0..coords.len()).rev() {
            let c = coords[k] as i64 + offset[k];
            if c < 0 || c >= self.n as i64 {
                return None;
            }
            idx = idx * self.n + c as u64;
        }
        Some(idx)
    }

    /// Lower corner of cell `coords`.
    pub fn cell_lo(&self, coords: &[u64]) -> Point {
        coords
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                &self.domain.lo[k] + self.cell_side(k) * Rational::from_integer(c.into())
            })
            .collect()
    }

    /// Point at fractional position `offset ∈ [0,1)` inside the cell along every axis.
    pub fn cell_sample_point(&self, coords: &[u64], offset: &Rational) -> Point {
        coords
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                &self.domain.lo[k] + self.cell_side(k) * (Rational::from_integer(c.into()) + offset)
            })
            .collect()
    }

    /// Cell indices along one axis whose closed extent contains coordinate `x`.
    pub fn axis_cells_containing(&self, axis: usize, x: &Rational) -> Vec<u64> {
        let rel = (x - &self.domain.lo[axis]) / self.cell_side(axis);
        if rel < Rational::zero() || rel > Rational::from_integer(self.n.into()) {
            return Vec::new();
        }
        let f = rel.floor();
        let fi: u64 = f.to_integer().try_into().unwrap_or(u64::MAX);
        let mut out = Vec::with_capacity(2);
        if rel == f {
            if fi > 0 {
                out.push(fi - 1);
            }
            if fi < self.n {
                out.push(fi);
            }
        } else {
            out.push(fi);
        }
        out
    }

    /// All cells whose closure contains point `p`.
    pub fn cells_containing(&self, p: &[Rational]) -> Vec<u64> {
        let per_axis: Vec<Vec<u64>> = (0..self.dim())
            .map(|k| self.axis_cells_containing(k, &p[k]))
            .collect();
        if per_axis.iter().any(|v| v.is_empty()) {
            return Vec::new();
        }
        let mut out = vec![Vec::new()];
        for axis in per_axis {
            let mut next = Vec::new();
            for prefix in &out {
                for &c in &axis {
                    let mut q: Vec<u64> = prefix.clone();
                    q.push(c);
                    next.push(q);
                }
            }
            out = next;
        }
        out.iter().map(|c| self.index(c)).collect()
    }
}

/// Offsets of all cells touching a cell (face, edge, or corner contact).
pub fn touching_offsets(dim: usize) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..dim {
        let mut next = Vec::new();
        for prefix in &out {
            for d in -1..=1 {
                let mut q = prefix.clone();
                q.push(d);
                next.push(q);
            }
        }
        out = next;
    }
    out.retain(|o| o.iter().any(|&d| d != 0));
    out
}

/// Squared gap (in cell units) between two closed cells `delta` apart.
pub fn cell_gap_squared(delta: &[i64]) -> u64 {
    delta
        .iter()
        .map(|&d| {
            let g = (d.unsigned_abs()).saturating_sub(1);
            g * g
        })
        .sum()
}

/// A nonempty union of closed dyadic cells of one depth.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicCellUnion {
    domain: Arc<AmbientBox>,
    depth: u32,
    cells: Vec<u64>,
}

impl DyadicCellUnion {
    pub fn new(domain: Arc<AmbientBox>, depth: u32, mut cells: Vec<u64>) -> Result<Self> {
        let grid = Grid::new(domain.clone(), depth)?;
        if domain.dim() >= 2 && !domain.is_cube() {
            return Err(Error::InvalidRegion(
                "cell unions in d >= 2 require a cubic box".into(),
            ));
        }
        cells.sort_unstable();
        cells.dedup();
        if cells.is_empty() {
            return Err(Error::InvalidRegion("empty cell union".into()));
        }
        if *cells.last().unwrap() >= grid.cell_count() {
            return Err(Error::InvalidRegion("cell index outside the grid".into()));
        }
        Ok(DyadicCellUnion {
            domain,
            depth,
            cells,
        })
    }

    pub fn from_coords(domain: Arc<AmbientBox>, depth: u32, coords: &[Vec<u64>]) -> Result<Self> {
        let grid = Grid::new(domain.clone(), depth)?;
        if coords
            .iter()
            .any(|c| c.len() != domain.dim() || c.iter().any(|&x| x >= grid.n))
        {
            return Err(Error::InvalidRegion(
                "cell coordinates outside the grid".into(),
            ));
        }
        let cells = coords.iter().map(|c| grid.index(c)).collect();
        Self::new(domain, depth, cells)
    }

    /// The whole box as one cell at depth 0.
    pub fn whole(domain: Arc<AmbientBox>) -> Result<Self> {
        Self::new(domain, 0, vec![0])
    }

    pub fn domain(&self) -> &Arc<AmbientBox> {
        &self.domain
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn cells(&self) -> &[u64] {
        &self.cells
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.domain.clone(), self.depth).expect("validated at construction")
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn has(&self, idx: u64) -> bool {
        self.cells.binary_search(&idx).is_ok()
    }

    pub fn measure(&self) -> Rational {
        self.grid().cell_volume() * Rational::from_integer(self.cells.len().into())
    }

    /// The same set expressed at a finer depth.
    pub fn refined_to(&self, depth: u32) -> DyadicCellUnion {
        assert!(depth >= self.depth, "refinement must not coarsen");
        if depth == self.depth {
            return self.clone();
        }
        let from = self.grid();
        let to = Grid::new(self.domain.clone(), depth).expect("depth bounded");
        let factor = 1u64 << (depth - self.depth);
        let dim = from.dim();
        let sub = factor.pow(dim as u32);
        let mut out = Vec::with_capacity(self.cells.len() * sub as usize);
        for &c in &self.cells {
            let base = from.coords(c);
            for s in 0..sub {
                let mut rest = s;
                let mut coords = Vec::with_capacity(dim);
                for b in &base {
                    coords.push(b * factor + rest % factor);
                    rest /= factor;
                }
                out.push(to.index(&coords));
            }
        }
        out.sort_unstable();
        DyadicCellUnion {
            domain: self.domain.clone(),
            depth,
            cells: out,
        }
    }

    fn common(&self, other: &DyadicCellUnion) -> (DyadicCellUnion, DyadicCellUnion) {
        assert_eq!(
            self.domain, other.domain,
            "cell unions over different boxes"
        );
        let d = self.depth.max(other.depth);
        (self.refined_to(d), other.refined_to(d))
    }

    pub fn contains_cells(&self, inner: &DyadicCellUnion) -> bool {
        if self.domain != inner.domain {
            return false;
        }
        if inner.depth >= self.depth {
            let shift = inner.depth - self.depth;
            let fine = inner.grid();
            let coarse = self.grid();
            inner.cells.iter().all(|&c| {
                let coords: Vec<u64> = fine.coords(c).iter().map(|x| x >> shift).collect();
                self.has(coarse.index(&coords))
            })
        } else {
            let r = inner.refined_to(self.depth);
            r.cells.iter().all(|&c| self.has(c))
        }
    }

    /// Closed-set intersection: cells touching at faces, edges or corners count.
    pub fn intersects_cells(&self, other: &DyadicCellUnion) -> bool {
        if self.domain != other.domain {
            return false;
        }
        let (a, b) = self.common(other);
        let (small, large) = if a.len() <= b.len() {
            (&a, &b)
        } else {
            (&b, &a)
        };
        let grid = small.grid();
        let offsets = touching_offsets(grid.dim());
        small.cells.iter().any(|&c| {
            if large.has(c) {
                return true;
            }
            let coords = grid.coords(c);
            offsets
                .iter()
                .any(|o| grid.offset_index(&coords, o).is_some_and(|n| large.has(n)))
        })
    }

    /// Cells with at least one face neighbor missing from the set.
    pub fn boundary_cells(&self) -> Vec<u64> {
        let grid = self.grid();
        let dim = grid.dim();
        self.cells
            .iter()
            .copied()
            .filter(|&c| {
                let coords = grid.coords(c);
                (0..dim).any(|k| {
                    [-1i64, 1].iter().any(|&s| {
                        let mut o = vec![0i64; dim];
                        o[k] = s;
                        match grid.offset_index(&coords, &o) {
                            Some(n) => !self.has(n),
                            None => true,
                        }
                    })
                })
            })
            .collect()
    }

    /// Squared Euclidean distance between the closed sets.
    pub fn distance_squared_cells(&self, other: &DyadicCellUnion) -> Rational {
        let (a, b) = self.common(other);
        if a.intersects_cells(&b) {
            return Rational::zero();
        }
        let grid = a.grid();
        let ab: Vec<Vec<u64>> = a.boundary_cells().iter().map(|&c| grid.coords(c)).collect();
        let bb: Vec<Vec<u64>> = b.boundary_cells().iter().map(|&c| grid.coords(c)).collect();
        let mut best = u64::MAX;
        for x in &ab {
            for y in &bb {
                let delta: Vec<i64> = x
                    .iter()
                    .zip(y)
                    .map(|(p, q)| *p as i64 - *q as i64)
                    .collect();
                best = best.min(cell_gap_squared(&delta));
            }
        }
        let side = grid.cell_side(0);
        &side * &side * Rational::from_integer(best.into())
    }

    pub fn contains_point(&self, p: &[Rational]) -> bool {
        if p.len() != self.domain.dim() {
            return false;
        }
        self.grid()
            .cells_containing(p)
            .into_iter()
            .any(|c| self.has(c))
    }

    /// Squared distance from a point to the closed set.
    pub fn distance_squared_point(&self, p: &[Rational]) -> Rational {
        if self.contains_point(p) {
            return Rational::zero();
        }
        let grid = self.grid();
        let mut best: Option<Rational> = None;
        for c in self.boundary_cells() {
            let coords = grid.coords(c);
            let lo = grid.cell_lo(&coords);
            let mut d2 = Rational::zero();
            for k in 0..p.len() {
                let hi = &lo[k] + grid.cell_side(k);
                let g = if p[k] < lo[k] {
                    &lo[k] - &p[k]
                } else if p[k] > hi {
                    &p[k] - &hi
                } else {
                    Rational::zero()
                };
                d2 += &g * &g;
            }
            best = Some(match best {
                Some(b) if b <= d2 => b,
                _ => d2,
            });
        }
        best.unwrap_or_else(Rational::zero)
    }

    pub fn union_cells(&self, other: &DyadicCellUnion) -> DyadicCellUnion {
        let (a, b) = self.common(other);
        let mut cells = a.cells;
        cells.extend(b.cells);
        cells.sort_unstable();
        cells.dedup();
        DyadicCellUnion {
            domain: a.domain,
            depth: a.depth,
            cells,
        }
    }

    pub fn intersection_cells(&self, other: &DyadicCellUnion) -> Option<DyadicCellUnion> {
        let (a, b) = self.common(other);
        let cells: Vec<u64> = a.cells.iter().copied().filter(|&c| b.has(c)).collect();
        (!cells.is_empty()).then_some(DyadicCellUnion {
            domain: a.domain,
            depth: a.depth,
            cells,
        })
    }

    pub fn difference_cells(&self, other: &DyadicCellUnion) -> Option<DyadicCellUnion> {
        let (a, b) = self.common(other);
        let cells: Vec<u64> = a.cells.iter().copied().filter(|&c| !b.has(c)).collect();
        (!cells.is_empty()).then_some(DyadicCellUnion {
            domain: a.domain,
            depth: a.depth,
            cells,
        })
    }

    /// Set equality regardless of the depth used to express the sets.
    pub fn same_set(&self, other: &DyadicCellUnion) -> bool {
        let (a, b) = self.common(other);
        a.cells == b.cells
    }

    /// One-dimensional unions as interval sets.
    pub fn to_interval_set(&self) -> Option<IntervalSet> {
        if self.domain.dim() != 1 {
            return None;
        }
        let grid = self.grid();
        let side = grid.cell_side(0);
        Some(IntervalSet::from_intervals(self.cells.iter().map(|&c| {
            let lo = &self.domain.lo()[0] + &side * Rational::from_integer(c.into());
            let hi = &lo + &side;
            Interval1D::closed(lo, hi).expect("positive side")
        })))
    }

    /// Coordinates of every cell, for serialization.
    pub fn coords_list(&self) -> Vec<Vec<u64>> {
        let grid = self.grid();
        self.cells.iter().map(|&c| grid.coords(c)).collect()
    }

    pub fn with_cells(&self, cells: Vec<u64>) -> Result<DyadicCellUnion> {
        DyadicCellUnion::new(self.domain.clone(), self.depth, cells)
    }
}

impl fmt::Display for DyadicCellUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo: Vec<String> = self.domain.lo().iter().map(display_rational).collect();
        let hi: Vec<String> = self.domain.hi().iter().map(display_rational).collect();
        write!(
            f,
            "cells(depth {}, {} of box [{}]..[{}])",
            self.depth,
            self.cells.len(),
            lo.join(","),
            hi.join(",")
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{int, rat};

    fn unit_square() -> Arc<AmbientBox> {
        Arc::new(AmbientBox::cube(2, int(0), int(1)).unwrap())
    }

    #[test]
    fn unit_square_depth_zero_has_volume_one() {
        assert_eq!(
            DyadicCellUnion::whole(unit_square()).unwrap().measure(),
            int(1)
        );
    }

    #[test]
    fn corner_touching_cells_intersect_with_zero_distance() {
        let b = unit_square();
        let a = DyadicCellUnion::from_coords(b.clone(), 1, &[vec![0, 0]]).unwrap();
        let c = DyadicCellUnion::from_coords(b, 1, &[vec![1, 1]]).unwrap();
        assert!(a.intersects_cells(&c));
        assert_eq!(a.distance_squared_cells(&c), int(0));
    }

    #[test]
    fn separated_cells_have_exact_distance() {
        let b = unit_square();
        let a = DyadicCellUnion::from_coords(b.clone(), 2, &[vec![0, 0]]).unwrap();
        let c = DyadicCellUnion::from_coords(b, 2, &[vec![3, 2]]).unwrap();
        assert!(!a.intersects_cells(&c));
        // gaps of 2 and 1 cells of side 1/4
        assert_eq!(a.distance_squared_cells(&c), rat(5, 16));
    }

    #[test]
    fn refinement_preserves_set_and_measure() {
        let b = unit_square();
        let a = DyadicCellUnion::from_coords(b, 1, &[vec![0, 0], vec![1, 0]]).unwrap();
        let r = a.refined_to(3);
        assert_eq!(r.len(), 32);
        assert_eq!(r.measure(), a.measure());
        assert!(a.same_set(&r));
        assert!(a.contains_cells(&r) && r.contains_cells(&a));
    }

    #[test]
    fn quadrant_contains_its_corner_point() {
        let b = Arc::new(AmbientBox::cube(2, int(-1), int(1)).unwrap());
        let q = DyadicCellUnion::from_coords(b, 1, &[vec![1, 1]]).unwrap();
        assert!(q.contains_point(&[int(0), int(0)]));
        assert!(q.contains_point(&[int(1), rat(1, 2)]));
        assert!(!q.contains_point(&[rat(-1, 8), int(0)]));
        assert_eq!(q.distance_squared_point(&[int(-1), int(0)]), int(1));
    }

    #[test]
    fn measure_is_additive_on_disjoint_sets() {
        let b = unit_square();
        let a = DyadicCellUnion::from_coords(b.clone(), 2, &[vec![0, 0], vec![1, 1]]).unwrap();
        let c = DyadicCellUnion::from_coords(b, 3, &[vec![7, 7]]).unwrap();
        assert_eq!(a.union_cells(&c).measure(), a.measure() + c.measure());
    }

    #[test]
    fn rejects_out_of_range_and_non_cubic() {
        assert!(DyadicCellUnion::from_coords(unit_square(), 1, &[vec![2, 0]]).is_err());
        let rect = Arc::new(AmbientBox::new(vec![int(0), int(0)], vec![int(2), int(1)]).unwrap());
        assert!(DyadicCellUnion::whole(rect).is_err());
    }

    #[test]
    fn one_dimensional_cells_become_intervals() {
        let b = Arc::new(AmbientBox::cube(1, int(0), int(1)).unwrap());
        let u = DyadicCellUnion::new(b, 2, vec![0, 1, 3]).unwrap();
        assert_eq!(
            u.to_interval_set().unwrap().to_string(),
            "[0,1/2] u [3/4,1]"
        );
    }
}
