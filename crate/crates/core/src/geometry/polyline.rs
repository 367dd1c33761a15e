//! Polylines with a parameter subset, used as one-dimensional pieces of curves.
//!
//! The parameter `t ∈ [0,1]` places vertex `k` of `n` vertices at `t = k/(n-1)`
//! and interpolates linearly along each segment.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::cells::{Grid, Point};
use crate::geometry::interval::{Interval1D, IntervalSet};
use crate::number::{display_rational, to_f64, Rational};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Polyline {
    vertices: Vec<Point>,
    params: IntervalSet,
}

impl Polyline {
    pub fn new(vertices: Vec<Point>, params: IntervalSet) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidRegion(
                "polyline needs at least 2 vertices".into(),
            ));
        }
        let dim = vertices[0].len();
        if dim < 2 || vertices.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidRegion(
                "polyline vertices must share a dimension >= 2".into(),
            ));
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidRegion(
                "consecutive polyline vertices must differ".into(),
            ));
        }
        let params = params.without_points();
        let unit = IntervalSet::from_interval(
            Interval1D::closed(Rational::zero(), crate::number::int(1)).expect("unit"),
        );
        if params.is_empty() || !unit.contains_set(&params) {
            return Err(Error::InvalidRegion(
                "polyline parameters must be a nonempty subset of [0,1]".into(),
            ));
        }
        Ok(Polyline { vertices, params })
    }

    pub fn full(vertices: Vec<Point>) -> Result<Self> {
        Self::new(
            vertices,
            IntervalSet::from_interval(
                Interval1D::closed(Rational::zero(), crate::number::int(1)).expect("unit"),
            ),
        )
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn params(&self) -> &IntervalSet {
        &self.params
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn segment_count(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn with_params(&self, params: IntervalSet) -> Result<Polyline> {
        Polyline::new(self.vertices.clone(), params)
    }

    pub fn same_curve(&self, other: &Polyline) -> bool {
        self.vertices == other.vertices
    }

    pub fn position(&self, t: &Rational) -> Point {
        let m = Rational::from_integer(self.segment_count().into());
        let u = t * &m;
        let mut k = u.floor();
        if k >= m {
            k = &m - Rational::from_integer(1.into());
        }
        let s = &u - &k;
        let ki: usize = k.to_integer().try_into().expect("segment index");
        lerp(&self.vertices[ki], &self.vertices[ki + 1], &s)
    }

    /// Closed segments covering the closure of the parameter set.
    pub fn pieces(&self) -> Vec<(Point, Point)> {
        let m = self.segment_count();
        let mr = Rational::from_integer(m.into());
        let mut out = Vec::new();
        for part in self.params.parts() {
            let u0 = part.lo() * &mr;
            let u1 = part.hi() * &mr;
            for k in 0..m {
                let kr = Rational::from_integer(k.into());
                let one = Rational::from_integer(1.into());
                let s0 = if u0 > kr { &u0 - &kr } else { Rational::zero() };
                let s1 = if u1 < &kr + &one {
                    &u1 - &kr
                } else {
                    one.clone()
                };
                if s0 < s1 {
                    let (a, b) = (&self.vertices[k], &self.vertices[k + 1]);
                    out.push((lerp(a, b, &s0), lerp(a, b, &s1)));
                }
            }
        }
        out
    }

    /// Arc length of the parameter set.
    pub fn length(&self) -> f64 {
        self.pieces().iter().map(|(a, b)| euclid(a, b)).sum()
    }

    /// Parameter of `p` if it lies on the polyline (any segment), exactly.
    pub fn params_of_point(&self, p: &[Rational]) -> Vec<Rational> {
        let m = Rational::from_integer(self.segment_count().into());
        let mut out = Vec::new();
        for k in 0..self.segment_count() {
            if let Some(s) = segment_param(&self.vertices[k], &self.vertices[k + 1], p) {
                out.push((Rational::from_integer(k.into()) + s) / &m);
            }
        }
        out
    }

    pub fn contains_point(&self, p: &[Rational]) -> bool {
        self.params_of_point(p)
            .iter()
            .any(|t| self.params.contains_point(t))
    }
}

impl fmt::Display for Polyline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = &self.vertices[0];
        let b = self.vertices.last().expect("two vertices");
        let show = |p: &Point| p.iter().map(display_rational).collect::<Vec<_>>().join(",");
        write!(
            f,
            "curve[{} vertices ({})..({})] t in {}",
            self.vertices.len(),
            show(a),
            show(b),
            self.params
        )
    }
}

pub fn lerp(a: &[Rational], b: &[Rational], s: &Rational) -> Point {
    a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect()
}

/// `s ∈ [0,1]` with `p = a + s(b-a)`, if `p` lies on the closed segment.
pub fn segment_param(a: &[Rational], b: &[Rational], p: &[Rational]) -> Option<Rational> {
    let axis = (0..a.len()).find(|&k| a[k] != b[k])?;
    let s = (&p[axis] - &a[axis]) / (&b[axis] - &a[axis]);
    if s.is_negative() || s > Rational::from_integer(1.into()) {
        return None;
    }
    (0..a.len())
        .all(|k| p[k] == &a[k] + &s * (&b[k] - &a[k]))
        .then_some(s)
}

fn orient(a: &[Rational], b: &[Rational], c: &[Rational]) -> std::cmp::Ordering {
    let v = (&b[0] - &a[0]) * (&c[1] - &a[1]) - (&b[1] - &a[1]) * (&c[0] - &a[0]);
    v.cmp(&Rational::zero())
}

/// Exact closed-segment intersection test in the plane; float fallback otherwise.
pub fn segments_intersect(a: &[Rational], b: &[Rational], c: &[Rational], d: &[Rational]) -> bool {
    use std::cmp::Ordering::Equal;
    if a.len() != 2 {
        return segment_segment_distance(a, b, c, d) <= 1e-12;
    }
    let (o1, o2, o3, o4) = (
        orient(a, b, c),
        orient(a, b, d),
        orient(c, d, a),
        orient(c, d, b),
    );
    if o1 != o2 && o3 != o4 && o1 != Equal && o2 != Equal && o3 != Equal && o4 != Equal {
        return true;
    }
    segment_param(a, b, c).is_some()
        || segment_param(a, b, d).is_some()
        || segment_param(c, d, a).is_some()
        || segment_param(c, d, b).is_some()
}

/// Cells met by a closed segment: for each open sub-piece between grid-plane
/// crossings, the cells whose closure contains it; plus the cells touching
/// the crossing points themselves.
pub fn segment_cells(grid: &Grid, a: &[Rational], b: &[Rational]) -> (Vec<Vec<u64>>, Vec<u64>) {
    let dim = grid.dim();
    let one = Rational::from_integer(1.into());
    let mut cuts = vec![Rational::zero(), one.clone()];
    for k in 0..dim {
        if a[k] == b[k] {
            continue;
        }
        let side = grid.cell_side(k);
        for j in 0..=grid.n {
            let plane = &grid.domain.lo()[k] + &side * Rational::from_integer(j.into());
            let s = (&plane - &a[k]) / (&b[k] - &a[k]);
            if s > Rational::zero() && s < one {
                cuts.push(s);
            }
        }
    }
    cuts.sort();
    cuts.dedup();
    let mut pieces = Vec::new();
    let mut touch = Vec::new();
    for w in cuts.windows(2) {
        let mid = (&w[0] + &w[1]) / Rational::from_integer(2.into());
        pieces.push(grid.cells_containing(&lerp(a, b, &mid)));
    }
    for s in &cuts {
        touch.extend(grid.cells_containing(&lerp(a, b, s)));
    }
    (pieces, touch)
}

pub fn to_floats(p: &[Rational]) -> Vec<f64> {
    p.iter().map(to_f64).collect()
}

pub fn euclid(a: &[Rational], b: &[Rational]) -> f64 {
    let (a, b) = (to_floats(a), to_floats(b));
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn point_segment_f(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let ap: Vec<f64> = a.iter().zip(p).map(|(x, y)| y - x).collect();
    let len2: f64 = ab.iter().map(|x| x * x).sum();
    let s = if len2 == 0.0 {
        0.0
    } else {
        (ab.iter().zip(&ap).map(|(x, y)| x * y).sum::<f64>() / len2).clamp(0.0, 1.0)
    };
    a.iter()
        .zip(&ab)
        .zip(p)
        .map(|((x, d), q)| {
            let v = x + s * d - q;
            v * v
        })
        .sum::<f64>()
        .sqrt()
}

pub fn point_segment_distance(p: &[Rational], a: &[Rational], b: &[Rational]) -> f64 {
    point_segment_f(&to_floats(p), &to_floats(a), &to_floats(b))
}

/// Minimizes a convex function on `[0,1]` by ternary search.
fn minimize_convex(f: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    f(0.5 * (lo + hi)).min(f(0.0)).min(f(1.0))
}

pub fn segment_segment_distance(
    a: &[Rational],
    b: &[Rational],
    c: &[Rational],
    d: &[Rational],
) -> f64 {
    let (a, b, c, d) = (to_floats(a), to_floats(b), to_floats(c), to_floats(d));
    minimize_convex(|s| {
        let p: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + s * (y - x)).collect();
        point_segment_f(&p, &c, &d)
    })
}

fn point_box_f(p: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    p.iter()
        .enumerate()
        .map(|(k, x)| {
            let g = if *x < lo[k] {
                lo[k] - x
            } else if *x > hi[k] {
                x - hi[k]
            } else {
                0.0
            };
            g * g
        })
        .sum::<f64>()
        .sqrt()
}

pub fn segment_box_distance(
    a: &[Rational],
    b: &[Rational],
    lo: &[Rational],
    hi: &[Rational],
) -> f64 {
    let (a, b, lo, hi) = (to_floats(a), to_floats(b), to_floats(lo), to_floats(hi));
    minimize_convex(|s| {
        let p: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + s * (y - x)).collect();
        point_box_f(&p, &lo, &hi)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{int, rat};

    fn pt(x: i64, y: i64) -> Point {
        vec![int(x), int(y)]
    }

    #[test]
    fn pythagorean_length() {
        let p = Polyline::full(vec![pt(0, 0), pt(3, 4)]).unwrap();
        assert!((p.length() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn partial_parameters_scale_length() {
        let p = Polyline::full(vec![pt(0, 0), pt(1, 0), pt(1, 2)]).unwrap();
        let half = p
            .with_params(IntervalSet::from_interval(
                Interval1D::closed(int(0), rat(3, 4)).unwrap(),
            ))
            .unwrap();
        // t in [0,3/4] covers segment 0 and half of segment 1
        assert!((half.length() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_polylines() {
        assert!(Polyline::full(vec![pt(0, 0)]).is_err());
        assert!(Polyline::full(vec![pt(0, 0), pt(0, 0)]).is_err());
    }

    #[test]
    fn point_membership_respects_parameters() {
        let p = Polyline::full(vec![pt(0, 0), pt(2, 0)]).unwrap();
        assert!(p.contains_point(&[int(1), int(0)]));
        let left = p
            .with_params(IntervalSet::from_interval(
                Interval1D::new(int(0), rat(1, 2), true, false).unwrap(),
            ))
            .unwrap();
        assert!(!left.contains_point(&[int(1), int(0)]));
        assert!(left.contains_point(&[rat(1, 2), int(0)]));
    }

    #[test]
    fn crossing_segments_intersect_exactly() {
        assert!(segments_intersect(
            &pt(-1, 0),
            &pt(1, 0),
            &pt(0, -1),
            &pt(0, 1)
        ));
        assert!(!segments_intersect(
            &pt(-1, 0),
            &pt(1, 0),
            &pt(0, 1),
            &pt(1, 1)
        ));
        assert!(segments_intersect(
            &pt(0, 0),
            &pt(2, 0),
            &pt(1, 0),
            &pt(3, 0)
        ));
        assert!(segments_intersect(
            &pt(0, 0),
            &pt(2, 0),
            &pt(2, 0),
            &pt(2, 5)
        ));
    }

    #[test]
    fn float_distances() {
        assert!(
            (segment_segment_distance(&pt(0, 0), &pt(1, 0), &pt(0, 2), &pt(1, 2)) - 2.0).abs()
                < 1e-9
        );
        assert!(
            (segment_box_distance(&pt(3, 0), &pt(3, 5), &pt(0, 0), &pt(1, 1)) - 2.0).abs() < 1e-9
        );
        assert!((point_segment_distance(&pt(0, 1), &pt(-1, 0), &pt(1, 0)) - 1.0).abs() < 1e-12);
    }
}
