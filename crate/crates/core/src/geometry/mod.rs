//! Concrete regions of a compact box: intervals, dyadic cell unions, polylines
//! and point atoms, with their reference measures, distances, containment and
//! intersection.

pub mod cells;
pub mod interval;
pub mod polyline;

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

pub use cells::{AmbientBox, DyadicCellUnion, Grid, Point};
pub use interval::{Interval1D, IntervalSet};
pub use polyline::Polyline;

use crate::error::{Error, Result};
use crate::number::{display_rational, texts, to_f64, untexts, Rational, RationalText, Scalar};

/// Infimum distance between two regions.
///
/// Exact when both regions are built from rational boxes and points; polylines
/// against anything other than their own parameter set fall back to floats.
#[derive(Clone, Debug, PartialEq)]
pub enum Distance {
    Squared(Rational),
    Approx(f64),
}

impl Distance {
    pub fn to_f64(&self) -> f64 {
        match self {
            Distance::Squared(r) => to_f64(r).sqrt(),
            Distance::Approx(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Distance::Squared(r) => r.is_zero(),
            Distance::Approx(x) => *x == 0.0,
        }
    }

    /// `self ≥ tau`; floating distances within `1e-9` of `tau` count as reaching it.
    pub fn at_least(&self, tau: &Rational) -> bool {
        match self {
            Distance::Squared(r) => r >= &(tau * tau),
            Distance::Approx(x) => *x >= to_f64(tau) - crate::number::FLOAT_TOL,
        }
    }
}

/// A nonempty subset of the ambient box.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "RegionWire", try_from = "RegionWire")]
pub enum Region {
    Atom(Point),
    Interval(Interval1D),
    IntervalUnion(IntervalSet),
    Polyline(Polyline),
    Cells(DyadicCellUnion),
}

impl Region {
    pub fn atom(point: Point) -> Result<Region> {
        if point.is_empty() {
            return Err(Error::InvalidRegion(
                "atom needs at least one coordinate".into(),
            ));
        }
        Ok(Region::Atom(point))
    }

    pub fn closed(lo: Rational, hi: Rational) -> Result<Region> {
        Ok(Region::Interval(Interval1D::closed(lo, hi)?))
    }

    pub fn interval(
        lo: Rational,
        hi: Rational,
        lo_closed: bool,
        hi_closed: bool,
    ) -> Result<Region> {
        Ok(Region::Interval(Interval1D::new(
            lo, hi, lo_closed, hi_closed,
        )?))
    }

    /// Single intervals become `Interval`, several become `IntervalUnion`.
    pub fn from_line_set(set: IntervalSet) -> Result<Region> {
        match set.parts().len() {
            0 => Err(Error::InvalidRegion("empty interval set".into())),
            1 => Ok(Region::Interval(set.into_parts().remove(0))),
            _ => Ok(Region::IntervalUnion(set)),
        }
    }

    /// Hausdorff dimension class of the reference measure: 0, 1 or d.
    pub fn dim_class(&self) -> usize {
        match self {
            Region::Atom(_) => 0,
            Region::Interval(_) | Region::IntervalUnion(_) | Region::Polyline(_) => 1,
            Region::Cells(c) => c.domain().dim(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Region::Atom(p) => p.len(),
            Region::Interval(_) | Region::IntervalUnion(_) => 1,
            Region::Polyline(l) => l.ambient_dim(),
            Region::Cells(c) => c.domain().dim(),
        }
    }

    /// The set as a union of intervals, for regions of the real line.
    pub fn line_set(&self) -> Option<IntervalSet> {
        match self {
            Region::Atom(p) if p.len() == 1 => {
                Some(IntervalSet::from_interval(Interval1D::point(p[0].clone())))
            }
            Region::Interval(i) => Some(IntervalSet::from_interval(i.clone())),
            Region::IntervalUnion(s) => Some(s.clone()),
            Region::Cells(c) => c.to_interval_set(),
            _ => None,
        }
    }

    /// Reference measure of the region's own dimension class.
    pub fn measure(&self) -> Scalar {
        match self {
            Region::Atom(_) => Scalar::Exact(crate::number::int(1)),
            Region::Interval(i) => Scalar::Exact(i.length()),
            Region::IntervalUnion(s) => Scalar::Exact(s.measure()),
            Region::Polyline(l) => Scalar::Approx(l.length()),
            Region::Cells(c) => Scalar::Exact(c.measure()),
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Region::Atom(_) | Region::Cells(_) => true,
            Region::Interval(i) => i.is_closed(),
            Region::IntervalUnion(s) => s.parts().iter().all(|p| p.is_closed()),
            Region::Polyline(l) => l.params().parts().iter().all(|p| p.is_closed()),
        }
    }

    /// Set equality, independent of representation (e.g. cell depth).
    pub fn set_eq(&self, other: &Region) -> bool {
        if self == other {
            return true;
        }
        if self.dim_class() != other.dim_class() || self.ambient_dim() != other.ambient_dim() {
            return false;
        }
        match (self, other) {
            (Region::Cells(a), Region::Cells(b)) if a.domain().dim() >= 2 => a.same_set(b),
            _ => match (self.line_set(), other.line_set()) {
                (Some(a), Some(b)) => a == b,
                _ => false,
            },
        }
    }

    pub fn contains(&self, inner: &Region) -> bool {
        if self.ambient_dim() != inner.ambient_dim() {
            return false;
        }
        if let (Some(a), Some(b)) = (self.line_set(), inner.line_set()) {
            return a.contains_set(&b);
        }
        match (self, inner) {
            (Region::Atom(a), Region::Atom(b)) => a == b,
            (Region::Atom(_), _) => false,
            (Region::Cells(c), Region::Atom(p)) => c.contains_point(p),
            (Region::Cells(c), Region::Polyline(l)) => cells_contain_polyline(c, l),
            (Region::Cells(a), Region::Cells(b)) => a.contains_cells(b),
            (Region::Polyline(l), Region::Atom(p)) => l.contains_point(p),
            (Region::Polyline(a), Region::Polyline(b)) => {
                a.same_curve(b) && a.params().contains_set(b.params())
            }
            _ => false,
        }
    }

    pub fn intersects(&self, other: &Region) -> bool {
        if self.ambient_dim() != other.ambient_dim() {
            return false;
        }
        if let (Some(a), Some(b)) = (self.line_set(), other.line_set()) {
            return a.intersects(&b);
        }
        match (self, other) {
            (Region::Atom(a), Region::Atom(b)) => a == b,
            (Region::Atom(p), r) | (r, Region::Atom(p)) => r.contains(&Region::Atom(p.clone())),
            (Region::Cells(a), Region::Cells(b)) => a.intersects_cells(b),
            (Region::Cells(c), Region::Polyline(l)) | (Region::Polyline(l), Region::Cells(c)) => {
                cells_meet_polyline(c, l)
            }
            (Region::Polyline(a), Region::Polyline(b)) => {
                if a.same_curve(b) {
                    return a.params().intersects(b.params());
                }
                let (pa, pb) = (a.pieces(), b.pieces());
                pa.iter().any(|(p, q)| {
                    pb.iter()
                        .any(|(r, s)| polyline::segments_intersect(p, q, r, s))
                })
            }
            _ => false,
        }
    }

    pub fn distance(&self, other: &Region) -> Distance {
        assert_eq!(
            self.ambient_dim(),
            other.ambient_dim(),
            "regions in different ambient spaces"
        );
        if let (Some(a), Some(b)) = (self.line_set(), other.line_set()) {
            let g = a.gap(&b);
            return Distance::Squared(&g * &g);
        }
        match (self, other) {
            (Region::Atom(a), Region::Atom(b)) => Distance::Squared(
                a.iter()
                    .zip(b)
                    .map(|(x, y)| (x - y) * (x - y))
                    .fold(Rational::zero(), |s, v| s + v),
            ),
            (Region::Atom(p), Region::Cells(c)) | (Region::Cells(c), Region::Atom(p)) => {
                Distance::Squared(c.distance_squared_point(p))
            }
            (Region::Cells(a), Region::Cells(b)) => Distance::Squared(a.distance_squared_cells(b)),
            (Region::Polyline(a), Region::Polyline(b))
                if a.same_curve(b) && a.params().intersects(b.params()) =>
            {
                Distance::Squared(Rational::zero())
            }
            _ => {
                if self.intersects(other) {
                    return Distance::Squared(Rational::zero());
                }
                Distance::Approx(float_distance(self, other))
            }
        }
    }

    /// Union of two regions of the same kind.
    pub fn union(&self, other: &Region) -> Result<Region> {
        if self.set_eq(other) || self.contains(other) {
            return Ok(self.clone());
        }
        if other.contains(self) {
            return Ok(other.clone());
        }
        match (self, other) {
            (Region::Cells(a), Region::Cells(b)) if a.domain().dim() >= 2 => {
                Ok(Region::Cells(a.union_cells(b)))
            }
            (Region::Polyline(a), Region::Polyline(b)) if a.same_curve(b) => Ok(Region::Polyline(
                a.with_params(a.params().union(b.params()))?,
            )),
            _ => match (
                self.line_set(),
                other.line_set(),
                self.dim_class() == other.dim_class(),
            ) {
                (Some(a), Some(b), true) => Region::from_line_set(a.union(&b)),
                _ => Err(Error::DimensionMismatch(format!(
                    "cannot unite {self} and {other}"
                ))),
            },
        }
    }

    /// Pieces of `self △ other`, each a region of the shared kind.
    pub fn symmetric_difference(&self, other: &Region) -> Result<Vec<Region>> {
        if self.set_eq(other) {
            return Ok(Vec::new());
        }
        match (self, other) {
            (Region::Atom(_), Region::Atom(_)) => Ok(vec![self.clone(), other.clone()]),
            (Region::Cells(a), Region::Cells(b)) if a.domain().dim() >= 2 => {
                Ok([a.difference_cells(b), b.difference_cells(a)]
                    .into_iter()
                    .flatten()
                    .map(Region::Cells)
                    .collect())
            }
            (Region::Polyline(a), Region::Polyline(b)) if a.same_curve(b) => {
                let d = a.params().symmetric_difference(b.params()).without_points();
                if d.is_empty() {
                    return Ok(Vec::new());
                }
                Ok(vec![Region::Polyline(a.with_params(d)?)])
            }
            _ => match (
                self.line_set(),
                other.line_set(),
                self.dim_class() == other.dim_class(),
            ) {
                (Some(a), Some(b), true) => Ok(a
                    .symmetric_difference(&b)
                    .into_parts()
                    .into_iter()
                    .map(Region::Interval)
                    .collect()),
                _ => Err(Error::DimensionMismatch(format!(
                    "no symmetric difference of {self} and {other}"
                ))),
            },
        }
    }

    /// Reference measure (of `self`'s dimension class) of `self ∩ other`.
    pub fn intersection_measure(&self, other: &Region) -> Result<Scalar> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{self} lives in dimension {}, {other} in {}",
                self.ambient_dim(),
                other.ambient_dim()
            )));
        }
        if let Region::Atom(p) = self {
            let hit = other.contains(&Region::Atom(p.clone()));
            return Ok(Scalar::Exact(if hit {
                crate::number::int(1)
            } else {
                Rational::zero()
            }));
        }
        if other.dim_class() < self.dim_class() {
            return Ok(Scalar::zero());
        }
        if self.dim_class() == 1 && self.ambient_dim() == 1 {
            let (a, b) = (
                self.line_set().expect("line region"),
                other.line_set().expect("line region"),
            );
            return Ok(Scalar::Exact(a.intersection(&b).measure()));
        }
        match (self, other) {
            (Region::Cells(a), Region::Cells(b)) => Ok(Scalar::Exact(
                a.intersection_cells(b)
                    .map(|c| c.measure())
                    .unwrap_or_else(Rational::zero),
            )),
            (Region::Polyline(a), Region::Polyline(b)) if a.same_curve(b) => {
                let p = a.params().intersection(b.params()).without_points();
                if p.is_empty() {
                    return Ok(Scalar::Approx(0.0));
                }
                Ok(Scalar::Approx(a.with_params(p)?.length()))
            }
            (Region::Polyline(l), Region::Cells(c)) => {
                Ok(Scalar::Approx(polyline_length_in_cells(l, c)))
            }
            _ => Err(Error::DimensionMismatch(format!(
                "cannot measure {self} within {other}"
            ))),
        }
    }
}

fn cells_contain_polyline(c: &DyadicCellUnion, l: &Polyline) -> bool {
    let grid = c.grid();
    l.pieces().iter().all(|(a, b)| {
        let (pieces, _) = polyline::segment_cells(&grid, a, b);
        pieces.iter().all(|cands| cands.iter().any(|&x| c.has(x)))
    })
}

fn cells_meet_polyline(c: &DyadicCellUnion, l: &Polyline) -> bool {
    let grid = c.grid();
    l.pieces().iter().any(|(a, b)| {
        let (pieces, touch) = polyline::segment_cells(&grid, a, b);
        pieces
            .iter()
            .flatten()
            .chain(touch.iter())
            .any(|&x| c.has(x))
    })
}

fn polyline_length_in_cells(l: &Polyline, c: &DyadicCellUnion) -> f64 {
    let grid = c.grid();
    let mut total = 0.0;
    for (a, b) in l.pieces() {
        let seg_len = polyline::euclid(&a, &b);
        let dim = grid.dim();
        let one = Rational::from(num_bigint::BigInt::from(1));
        let mut cuts = vec![Rational::zero(), one.clone()];
        for k in 0..dim {
            if a[k] == b[k] {
                continue;
            }
            let side = grid.cell_side(k);
            for j in 0..=grid.n {
                let plane =
                    &grid.domain.lo()[k] + &side * Rational::from(num_bigint::BigInt::from(j));
                let s = (&plane - &a[k]) / (&b[k] - &a[k]);
                if s > Rational::zero() && s < one {
                    cuts.push(s);
                }
            }
        }
        cuts.sort();
        cuts.dedup();
        for w in cuts.windows(2) {
            let mid = (&w[0] + &w[1]) / Rational::from(num_bigint::BigInt::from(2));
            let p = polyline::lerp(&a, &b, &mid);
            if grid.cells_containing(&p).iter().any(|&x| c.has(x)) {
                total += seg_len * to_f64(&(&w[1] - &w[0]));
            }
        }
    }
    total
}

fn float_distance(a: &Region, b: &Region) -> f64 {
    let segs = |r: &Region| -> Vec<(Point, Point)> {
        match r {
            Region::Polyline(l) => l.pieces(),
            Region::Atom(p) => vec![(p.clone(), p.clone())],
            _ => Vec::new(),
        }
    };
    let boxes = |r: &Region| -> Vec<(Point, Point)> {
        match r {
            Region::Cells(c) => {
                let grid = c.grid();
                c.boundary_cells()
                    .iter()
                    .map(|&x| {
                        let lo = grid.cell_lo(&grid.coords(x));
                        let hi = lo
                            .iter()
                            .enumerate()
                            .map(|(k, v)| v + grid.cell_side(k))
                            .collect();
                        (lo, hi)
                    })
                    .collect()
            }
            _ => Vec::new(),
        }
    };
    let mut best = f64::INFINITY;
    for (p, q) in segs(a) {
        for (r, s) in segs(b) {
            best = best.min(polyline::segment_segment_distance(&p, &q, &r, &s));
        }
        for (lo, hi) in boxes(b) {
            best = best.min(polyline::segment_box_distance(&p, &q, &lo, &hi));
        }
    }
    for (lo, hi) in boxes(a) {
        for (r, s) in segs(b) {
            best = best.min(polyline::segment_box_distance(&r, &s, &lo, &hi));
        }
    }
    best
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Atom(p) => {
                let c: Vec<String> = p.iter().map(display_rational).collect();
                if c.len() == 1 {
                    write!(f, "{{{}}}", c[0])
                } else {
                    write!(f, "{{({})}}", c.join(","))
                }
            }
            Region::Interval(i) => write!(f, "{i}"),
            Region::IntervalUnion(s) => write!(f, "{s}"),
            Region::Polyline(l) => write!(f, "{l}"),
            Region::Cells(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IntervalWire {
    pub lo: RationalText,
    pub hi: RationalText,
    #[serde(default = "yes")]
    pub lo_closed: bool,
    #[serde(default = "yes")]
    pub hi_closed: bool,
}

fn yes() -> bool {
    true
}

impl From<&Interval1D> for IntervalWire {
    fn from(i: &Interval1D) -> Self {
        IntervalWire {
            lo: RationalText(i.lo().clone()),
            hi: RationalText(i.hi().clone()),
            lo_closed: i.lo_closed(),
            hi_closed: i.hi_closed(),
        }
    }
}

impl TryFrom<IntervalWire> for Interval1D {
    type Error = Error;
    fn try_from(w: IntervalWire) -> Result<Self> {
        Interval1D::new(w.lo.0, w.hi.0, w.lo_closed, w.hi_closed)
    }
}

/// Serialized form of a region, discriminated by `kind`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionWire {
    Atom {
        point: Vec<RationalText>,
    },
    Interval {
        lo: RationalText,
        hi: RationalText,
        #[serde(default = "yes")]
        lo_closed: bool,
        #[serde(default = "yes")]
        hi_closed: bool,
    },
    IntervalUnion {
        intervals: Vec<IntervalWire>,
    },
    Polyline {
        vertices: Vec<Vec<RationalText>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        params: Option<Vec<IntervalWire>>,
    },
    Cells {
        box_lo: Vec<RationalText>,
        box_hi: Vec<RationalText>,
        depth: u32,
        cells: Vec<Vec<u64>>,
    },
}

impl From<Region> for RegionWire {
    fn from(r: Region) -> Self {
        match &r {
            Region::Atom(p) => RegionWire::Atom { point: texts(p) },
            Region::Interval(i) => RegionWire::Interval {
                lo: RationalText(i.lo().clone()),
                hi: RationalText(i.hi().clone()),
                lo_closed: i.lo_closed(),
                hi_closed: i.hi_closed(),
            },
            Region::IntervalUnion(s) => RegionWire::IntervalUnion {
                intervals: s.parts().iter().map(Into::into).collect(),
            },
            Region::Polyline(l) => RegionWire::Polyline {
                vertices: l.vertices().iter().map(|v| texts(v)).collect(),
                params: Some(l.params().parts().iter().map(Into::into).collect()),
            },
            Region::Cells(c) => RegionWire::Cells {
                box_lo: texts(c.domain().lo()),
                box_hi: texts(c.domain().hi()),
                depth: c.depth(),
                cells: c.coords_list(),
            },
        }
    }
}

impl TryFrom<RegionWire> for Region {
    type Error = Error;
    fn try_from(w: RegionWire) -> Result<Self> {
        match w {
            RegionWire::Atom { point } => Region::atom(untexts(point)),
            RegionWire::Interval {
                lo,
                hi,
                lo_closed,
                hi_closed,
            } => Region::interval(lo.0, hi.0, lo_closed, hi_closed),
            RegionWire::IntervalUnion { intervals } => {
                let parts = intervals
                    .into_iter()
                    .map(Interval1D::try_from)
                    .collect::<Result<Vec<_>>>()?;
                Region::from_line_set(IntervalSet::from_intervals(parts))
            }
            RegionWire::Polyline { vertices, params } => {
                let vertices: Vec<Point> = vertices.into_iter().map(untexts).collect();
                match params {
                    None => Ok(Region::Polyline(Polyline::full(vertices)?)),
                    Some(ps) => {
                        let parts = ps
                            .into_iter()
                            .map(Interval1D::try_from)
                            .collect::<Result<Vec<_>>>()?;
                        Ok(Region::Polyline(Polyline::new(
                            vertices,
                            IntervalSet::from_intervals(parts),
                        )?))
                    }
                }
            }
            RegionWire::Cells {
                box_lo,
                box_hi,
                depth,
                cells,
            } => {
                let domain = Arc::new(AmbientBox::new(untexts(box_lo), untexts(box_hi))?);
                Ok(Region::Cells(DyadicCellUnion::from_coords(
                    domain, depth, &cells,
                )?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{int, rat};

    #[test]
    fn measures_of_each_kind() {
        assert_eq!(
            Region::closed(rat(1, 6), rat(1, 2)).unwrap().measure(),
            Scalar::Exact(rat(1, 3))
        );
        let l = Region::Polyline(
            Polyline::full(vec![vec![int(0), int(0)], vec![int(3), int(4)]]).unwrap(),
        );
        assert!((l.measure().to_f64() - 5.0).abs() < 1e-12);
        assert_eq!(
            Region::atom(vec![int(0)]).unwrap().measure(),
            Scalar::Exact(int(1))
        );
    }

    #[test]
    fn interval_distances() {
        let a = Region::closed(int(0), int(1)).unwrap();
        let b = Region::closed(int(2), int(3)).unwrap();
        assert_eq!(a.distance(&b), Distance::Squared(int(1)));
        assert_eq!(a.distance(&a), Distance::Squared(int(0)));
    }

    #[test]
    fn containment_and_intersection_examples() {
        let unit = Region::closed(int(0), int(1)).unwrap();
        assert!(unit.contains(&Region::closed(rat(1, 6), rat(1, 2)).unwrap()));
        let left = Region::interval(int(0), rat(1, 2), true, false).unwrap();
        let right = Region::closed(rat(1, 2), int(1)).unwrap();
        assert!(!left.intersects(&right));
        let b = Arc::new(AmbientBox::cube(2, int(-1), int(1)).unwrap());
        let q = Region::Cells(DyadicCellUnion::from_coords(b, 1, &[vec![1, 1]]).unwrap());
        assert!(q.contains(&Region::atom(vec![int(0), int(0)]).unwrap()));
    }

    #[test]
    fn atom_inside_interval_counts() {
        let a = Region::atom(vec![int(0)]).unwrap();
        let b = Region::closed(int(-1), rat(1, 2)).unwrap();
        assert_eq!(a.intersection_measure(&b).unwrap(), Scalar::Exact(int(1)));
        assert_eq!(b.intersection_measure(&a).unwrap(), Scalar::zero());
    }

    #[test]
    fn polyline_against_cells() {
        let b = Arc::new(AmbientBox::cube(2, int(-1), int(1)).unwrap());
        let right_half =
            Region::Cells(DyadicCellUnion::from_coords(b, 1, &[vec![1, 0], vec![1, 1]]).unwrap());
        let seg = Region::Polyline(
            Polyline::full(vec![vec![int(-1), int(0)], vec![int(1), int(0)]]).unwrap(),
        );
        assert!(seg.intersects(&right_half));
        assert!(!right_half.contains(&seg));
        let m = seg.intersection_measure(&right_half).unwrap();
        assert!((m.to_f64() - 1.0).abs() < 1e-12);
        let far = Region::Polyline(
            Polyline::full(vec![vec![int(-1), int(-1)], vec![rat(-1, 2), int(-1)]]).unwrap(),
        );
        assert!((far.distance(&right_half).to_f64() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn json_round_trip_all_kinds() {
        let b = Arc::new(AmbientBox::cube(2, int(-1), int(1)).unwrap());
        let regions = vec![
            Region::atom(vec![rat(1, 2)]).unwrap(),
            Region::interval(rat(1, 6), rat(1, 2), false, true).unwrap(),
            Region::from_line_set(IntervalSet::from_intervals([
                Interval1D::closed(int(0), rat(1, 3)).unwrap(),
                Interval1D::closed(rat(2, 3), int(1)).unwrap(),
            ]))
            .unwrap(),
            Region::Polyline(
                Polyline::full(vec![vec![int(0), int(0)], vec![int(1), rat(1, 3)]]).unwrap(),
            ),
            Region::Cells(DyadicCellUnion::from_coords(b, 2, &[vec![0, 1], vec![3, 3]]).unwrap()),
        ];
        for r in regions {
            let s = serde_json::to_string(&r).unwrap();
            let back: Region = serde_json::from_str(&s).unwrap();
            assert_eq!(back, r);
            assert_eq!(serde_json::to_string(&back).unwrap(), s);
        }
    }

    #[test]
    fn symmetric_difference_of_half_open_and_closed() {
        let a = Region::interval(int(0), rat(1, 2), true, false).unwrap();
        let b = Region::closed(int(0), rat(1, 2)).unwrap();
        let d = a.symmetric_difference(&b).unwrap();
        assert_eq!(d, vec![Region::closed(rat(1, 2), rat(1, 2)).unwrap()]);
    }
}
