//! Density models: exact piecewise-linear densities on an interval, dyadic grid
//! densities, and the common [`DensityModel`] wrapper used to measure regions.

use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::{AmbientBox, DyadicCellUnion, Grid, Interval1D, IntervalSet, Region};
use crate::mixture::MixtureMeasure;
use crate::number::{display_rational, int, rational_max, rational_min, Rational, Scalar};

/// A density on the real line that is linear between consecutive knots.
///
/// Piece `i` runs over the open interval `(x_i, x_{i+1})` from the one-sided
/// value `start` to `end`; knots carry their own point values. The density is
/// zero outside `[x_0, x_n]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DensityModel1D {
    knots: Vec<Rational>,
    pieces: Vec<(Rational, Rational)>,
    point_values: Vec<Rational>,
}

impl DensityModel1D {
    /// `point_values = None` assigns each knot the larger of its one-sided limits.
    pub fn new(
        knots: Vec<Rational>,
        pieces: Vec<(Rational, Rational)>,
        point_values: Option<Vec<Rational>>,
    ) -> Result<Self> {
        if knots.len() < 2 || pieces.len() + 1 != knots.len() {
            return Err(Error::InvalidDensity(
                "need n+1 knots for n >= 1 pieces".into(),
            ));
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDensity(
                "knots must be strictly increasing".into(),
            ));
        }
        if pieces
            .iter()
            .any(|(a, b)| a.is_negative() || b.is_negative())
        {
            return Err(Error::InvalidDensity(
                "density values must be nonnegative".into(),
            ));
        }
        let point_values = match point_values {
            Some(v) => {
                if v.len() != knots.len() || v.iter().any(|x| x.is_negative()) {
                    return Err(Error::InvalidDensity(
                        "one nonnegative point value per knot".into(),
                    ));
                }
                v
            }
            None => (0..knots.len())
                .map(|i| {
                    let left = if i == 0 {
                        Rational::zero()
                    } else {
                        pieces[i - 1].1.clone()
                    };
                    let right = if i == pieces.len() {
                        Rational::zero()
                    } else {
                        pieces[i].0.clone()
                    };
                    rational_max(&left, &right)
                })
                .collect(),
        };
        let model = DensityModel1D {
            knots,
            pieces,
            point_values,
        };
        if !model.sup().is_positive() {
            return Err(Error::InvalidDensity(
                "density must be positive somewhere".into(),
            ));
        }
        Ok(model)
    }

    /// Continuous piecewise-linear density through `(x, y)` points.
    pub fn continuous(points: &[(Rational, Rational)]) -> Result<Self> {
        let knots = points.iter().map(|p| p.0.clone()).collect();
        let pieces = points
            .windows(2)
            .map(|w| (w[0].1.clone(), w[1].1.clone()))
            .collect();
        let values = points.iter().map(|p| p.1.clone()).collect();
        Self::new(knots, pieces, Some(values))
    }

    /// Piecewise-constant density with `values[i]` on `(x_i, x_{i+1})`.
    pub fn step(knots: Vec<Rational>, values: Vec<Rational>) -> Result<Self> {
        let pieces = values.into_iter().map(|v| (v.clone(), v)).collect();
        Self::new(knots, pieces, None)
    }

    pub fn knots(&self) -> &[Rational] {
        &self.knots
    }

    pub fn pieces(&self) -> &[(Rational, Rational)] {
        &self.pieces
    }

    pub fn point_values(&self) -> &[Rational] {
        &self.point_values
    }

    pub fn domain(&self) -> Interval1D {
        Interval1D::closed(
            self.knots[0].clone(),
            self.knots.last().expect("knots").clone(),
        )
        .expect("sorted")
    }

    fn piece_at(&self, i: usize, x: &Rational) -> Rational {
        let (a, b) = &self.pieces[i];
        let (x0, x1) = (&self.knots[i], &self.knots[i + 1]);
        a + (b - a) * (x - x0) / (x1 - x0)
    }

    pub fn value(&self, x: &Rational) -> Rational {
        match self.knots.binary_search(x) {
            Ok(i) => self.point_values[i].clone(),
            Err(0) => Rational::zero(),
            Err(i) if i == self.knots.len() => Rational::zero(),
            Err(i) => self.piece_at(i - 1, x),
        }
    }

    pub fn sup(&self) -> Rational {
        self.pieces
            .iter()
            .flat_map(|(a, b)| [a, b])
            .chain(self.point_values.iter())
            .fold(Rational::zero(), |m, v| rational_max(&m, v))
    }

    /// Every value at which the shape of `{f > λ}` can change, plus zero.
    pub fn breakpoint_values(&self) -> Vec<Rational> {
        let mut v: Vec<Rational> = self
            .pieces
            .iter()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .chain(self.point_values.iter().cloned())
            .chain(std::iter::once(Rational::zero()))
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// The strict superlevel set `{x : f(x) > λ}` for `λ ≥ 0`.
    pub fn superlevel(&self, lambda: &Rational) -> IntervalSet {
        let mut parts = Vec::new();
        for (i, (a, b)) in self.pieces.iter().enumerate() {
            let (x0, x1) = (&self.knots[i], &self.knots[i + 1]);
            match (a > lambda, b > lambda) {
                (true, true) => {
                    parts.push(Interval1D::open(x0.clone(), x1.clone()).expect("piece"))
                }
                (false, false) => {}
                (above_start, _) => {
                    let c = x0 + (lambda - a) * (x1 - x0) / (b - a);
                    let iv = if above_start {
                        Interval1D::open(x0.clone(), c)
                    } else {
                        Interval1D::open(c, x1.clone())
                    };
                    parts.push(iv.expect("crossing inside piece"));
                }
            }
        }
        for (k, v) in self.knots.iter().zip(&self.point_values) {
            if v > lambda {
                parts.push(Interval1D::point(k.clone()));
            }
        }
        IntervalSet::from_intervals(parts)
    }

    /// Closed intervals covering `{f ≥ h}` up to a null set.
    pub fn ess_superlevel_closed(&self, h: &Rational) -> IntervalSet {
        let mut parts = Vec::new();
        for (i, (a, b)) in self.pieces.iter().enumerate() {
            let (x0, x1) = (&self.knots[i], &self.knots[i + 1]);
            match (a >= h, b >= h) {
                (true, true) => {
                    parts.push(Interval1D::closed(x0.clone(), x1.clone()).expect("piece"))
                }
                (false, false) => {}
                (start_in, _) => {
                    let c = x0 + (h - a) * (x1 - x0) / (b - a);
                    let iv = if start_in {
                        Interval1D::closed(x0.clone(), c)
                    } else {
                        Interval1D::closed(c, x1.clone())
                    };
                    let iv = iv.expect("crossing inside piece");
                    if !iv.is_point() {
                        parts.push(iv);
                    }
                }
            }
        }
        IntervalSet::from_intervals(parts)
    }

    /// Essential infimum over a closed interval of positive length.
    pub fn ess_inf(&self, lo: &Rational, hi: &Rational) -> Rational {
        let dom = self.domain();
        if lo < dom.lo() || hi > dom.hi() {
            return Rational::zero();
        }
        let mut best: Option<Rational> = None;
        for i in 0..self.pieces.len() {
            let (x0, x1) = (&self.knots[i], &self.knots[i + 1]);
            let a = rational_max(lo, x0);
            let b = rational_min(hi, x1);
            if a >= b {
                continue;
            }
            let m = rational_min(&self.piece_at(i, &a), &self.piece_at(i, &b));
            best = Some(match best {
                Some(x) => rational_min(&x, &m),
                None => m,
            });
        }
        best.unwrap_or_else(Rational::zero)
    }

    /// Exact integral over a finite union of intervals.
    pub fn integrate(&self, set: &IntervalSet) -> Rational {
        let mut total = Rational::zero();
        let two = int(2);
        for part in set.parts() {
            for i in 0..self.pieces.len() {
                let (x0, x1) = (&self.knots[i], &self.knots[i + 1]);
                let a = rational_max(part.lo(), x0);
                let b = rational_min(part.hi(), x1);
                if a >= b {
                    continue;
                }
                total += (&b - &a) * (self.piece_at(i, &a) + self.piece_at(i, &b)) / &two;
            }
        }
        total
    }

    pub fn mass(&self) -> Rational {
        self.integrate(&IntervalSet::from_interval(self.domain()))
    }

    pub fn scaled(&self, alpha: &Rational) -> DensityModel1D {
        DensityModel1D {
            knots: self.knots.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|(a, b)| (a * alpha, b * alpha))
                .collect(),
            point_values: self.point_values.iter().map(|v| v * alpha).collect(),
        }
    }

    /// Limits of `f` just right of `x` and just left of `x`.
    pub fn one_sided(&self, x: &Rational) -> (Rational, Rational) {
        let n = self.knots.len();
        let right = match self.knots.binary_search(x) {
            Ok(i) if i + 1 < n => self.pieces[i].0.clone(),
            Ok(_) => Rational::zero(),
            Err(0) => Rational::zero(),
            Err(i) if i == n => Rational::zero(),
            Err(i) => self.piece_at(i - 1, x),
        };
        let left = match self.knots.binary_search(x) {
            Ok(0) => Rational::zero(),
            Ok(i) => self.pieces[i - 1].1.clone(),
            Err(0) => Rational::zero(),
            Err(i) if i == n => Rational::zero(),
            Err(i) => self.piece_at(i - 1, x),
        };
        (right, left)
    }

    /// `self ≤ other` almost everywhere, decided exactly on the common knots.
    pub fn le_ae(&self, other: &DensityModel1D) -> bool {
        let mut xs: Vec<Rational> = self
            .knots
            .iter()
            .chain(other.knots.iter())
            .cloned()
            .collect();
        xs.sort();
        xs.dedup();
        xs.windows(2).all(|w| {
            let (a_r, _) = self.one_sided(&w[0]);
            let (_, a_l) = self.one_sided(&w[1]);
            let (b_r, _) = other.one_sided(&w[0]);
            let (_, b_l) = other.one_sided(&w[1]);
            a_r <= b_r && a_l <= b_l
        }) && self.outside_zero_within(other)
    }

    fn outside_zero_within(&self, other: &DensityModel1D) -> bool {
        let od = other.domain();
        let mut ok = true;
        for i in 0..self.pieces.len() {
            let (x0, x1) = (&self.knots[i], &self.knots[i + 1]);
            let positive = self.pieces[i].0.is_positive() || self.pieces[i].1.is_positive();
            if positive && (x0 < od.lo() || x1 > od.hi()) {
                let lo = rational_max(x0, od.lo());
                let hi = rational_min(x1, od.hi());
                if lo >= hi || x0 < od.lo() || x1 > od.hi() {
                    ok = false;
                }
            }
        }
        ok
    }

    pub fn describe(&self) -> String {
        let pts: Vec<String> = self
            .knots
            .iter()
            .zip(&self.point_values)
            .map(|(x, v)| format!("{}:{}", display_rational(x), display_rational(v)))
            .collect();
        format!("piecewise-linear[{}]", pts.join(" "))
    }
}

/// A density constant on each closed dyadic cell of one depth.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridDensity {
    domain: Arc<AmbientBox>,
    depth: u32,
    values: Vec<Rational>,
}

impl GridDensity {
    pub fn new(domain: Arc<AmbientBox>, depth: u32, values: Vec<Rational>) -> Result<Self> {
        let grid = Grid::new(domain.clone(), depth)?;
        if domain.dim() >= 2 && !domain.is_cube() {
            return Err(Error::InvalidDensity(
                "grid densities in d >= 2 require a cubic box".into(),
            ));
        }
        if values.len() as u64 != grid.cell_count() {
            return Err(Error::InvalidDensity(format!(
                "expected {} cell values, got {}",
                grid.cell_count(),
                values.len()
            )));
        }
        if values.iter().any(|v| v.is_negative()) {
            return Err(Error::InvalidDensity(
                "cell values must be nonnegative".into(),
            ));
        }
        if !values.iter().any(|v| v.is_positive()) {
            return Err(Error::InvalidDensity(
                "at least one cell must be positive".into(),
            ));
        }
        Ok(GridDensity {
            domain,
            depth,
            values,
        })
    }

    /// Evaluates `f` at the point `lo + (i + offset)·side` of every cell.
    pub fn sample(
        domain: Arc<AmbientBox>,
        depth: u32,
        offset: &Rational,
        f: &dyn Fn(&[Rational]) -> Rational,
    ) -> Result<Self> {
        let grid = Grid::new(domain.clone(), depth)?;
        let values = (0..grid.cell_count())
            .map(|c| f(&grid.cell_sample_point(&grid.coords(c), offset)))
            .collect();
        Self::new(domain, depth, values)
    }

    /// `value` on the cells of `cells`, zero elsewhere.
    pub fn indicator(cells: &DyadicCellUnion, value: Rational) -> Result<Self> {
        let grid = cells.grid();
        let mut values = vec![Rational::zero(); grid.cell_count() as usize];
        for &c in cells.cells() {
            values[c as usize] = value.clone();
        }
        Self::new(cells.domain().clone(), cells.depth(), values)
    }

    pub fn domain(&self) -> &Arc<AmbientBox> {
        &self.domain
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.domain.clone(), self.depth).expect("validated")
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, cell: u64) -> &Rational {
        &self.values[cell as usize]
    }

    pub fn max(&self) -> Rational {
        self.values
            .iter()
            .fold(Rational::zero(), |m, v| rational_max(&m, v))
    }

    /// Distinct positive cell values, largest first.
    pub fn distinct_positive_desc(&self) -> Vec<Rational> {
        let mut v: Vec<Rational> = self
            .values
            .iter()
            .filter(|x| x.is_positive())
            .cloned()
            .collect();
        v.sort_by(|a, b| b.cmp(a));
        v.dedup();
        v
    }

    /// The closed cell union `{f ≥ v}`.
    pub fn superlevel_ge(&self, v: &Rational) -> Option<DyadicCellUnion> {
        let cells: Vec<u64> = (0..self.values.len() as u64)
            .filter(|&c| &self.values[c as usize] >= v)
            .collect();
        DyadicCellUnion::new(self.domain.clone(), self.depth, cells).ok()
    }

    pub fn support(&self) -> DyadicCellUnion {
        let cells: Vec<u64> = (0..self.values.len() as u64)
            .filter(|&c| self.values[c as usize].is_positive())
            .collect();
        DyadicCellUnion::new(self.domain.clone(), self.depth, cells).expect("some positive cell")
    }

    pub fn refined(&self, depth: u32) -> GridDensity {
        assert!(depth >= self.depth);
        if depth == self.depth {
            return self.clone();
        }
        let from = self.grid();
        let to = Grid::new(self.domain.clone(), depth).expect("depth bounded");
        let shift = depth - self.depth;
        let values = (0..to.cell_count())
            .map(|c| {
                let coords: Vec<u64> = to.coords(c).iter().map(|x| x >> shift).collect();
                self.values[from.index(&coords) as usize].clone()
            })
            .collect();
        GridDensity {
            domain: self.domain.clone(),
            depth,
            values,
        }
    }

    /// Lower envelope at a coarser depth: each coarse cell takes the minimum of its children.
    pub fn coarsened_min(&self, depth: u32) -> Result<GridDensity> {
        assert!(depth <= self.depth);
        let from = self.grid();
        let to = Grid::new(self.domain.clone(), depth)?;
        let shift = self.depth - depth;
        let mut values: Vec<Option<Rational>> = vec![None; to.cell_count() as usize];
        for c in 0..from.cell_count() {
            let coords: Vec<u64> = from.coords(c).iter().map(|x| x >> shift).collect();
            let slot = &mut values[to.index(&coords) as usize];
            let v = &self.values[c as usize];
            *slot = Some(match slot.take() {
                Some(m) => rational_min(&m, v),
                None => v.clone(),
            });
        }
        GridDensity::new(
            self.domain.clone(),
            depth,
            values.into_iter().map(|v| v.expect("filled")).collect(),
        )
    }

    pub fn integrate_cells(&self, cells: &DyadicCellUnion) -> Rational {
        assert_eq!(cells.domain(), &self.domain, "cells over a different box");
        let depth = self.depth.max(cells.depth());
        let f = self.refined(depth);
        let c = cells.refined_to(depth);
        let vol = f.grid().cell_volume();
        c.cells()
            .iter()
            .map(|&i| f.values[i as usize].clone())
            .fold(Rational::zero(), |a, b| a + b)
            * vol
    }

    pub fn mass(&self) -> Rational {
        self.values.iter().fold(Rational::zero(), |a, b| a + b) * self.grid().cell_volume()
    }

    /// Minimum of the density over the cells of `cells`.
    pub fn min_over(&self, cells: &DyadicCellUnion) -> Rational {
        let depth = self.depth.max(cells.depth());
        let f = self.refined(depth);
        let c = cells.refined_to(depth);
        c.cells()
            .iter()
            .map(|&i| f.values[i as usize].clone())
            .min()
            .unwrap_or_else(Rational::zero)
    }

    pub fn le(&self, other: &GridDensity) -> bool {
        if self.domain != other.domain {
            return false;
        }
        let depth = self.depth.max(other.depth);
        let (a, b) = (self.refined(depth), other.refined(depth));
        a.values.iter().zip(&b.values).all(|(x, y)| x <= y)
    }

    pub fn scaled(&self, alpha: &Rational) -> GridDensity {
        GridDensity {
            domain: self.domain.clone(),
            depth: self.depth,
            values: self.values.iter().map(|v| v * alpha).collect(),
        }
    }

    /// One-dimensional grids as piecewise-constant line densities.
    pub fn to_line_model(&self) -> Option<DensityModel1D> {
        if self.domain.dim() != 1 {
            return None;
        }
        let grid = self.grid();
        let side = grid.cell_side(0);
        let lo = &self.domain.lo()[0];
        let knots = (0..=grid.n)
            .map(|i| lo + &side * Rational::from_integer(i.into()))
            .collect();
        DensityModel1D::step(knots, self.values.clone()).ok()
    }
}

/// The finite measure `P` used to measure regions and their differences.
#[derive(Clone, Debug)]
pub enum DensityModel {
    Line(DensityModel1D),
    Grid(GridDensity),
    Mixture(MixtureMeasure),
}

impl DensityModel {
    /// `P(region)`.
    pub fn mass(&self, region: &Region) -> Result<Scalar> {
        match self {
            DensityModel::Line(f) => match region {
                Region::Atom(p) if p.len() == 1 => Ok(Scalar::zero()),
                _ => match region.line_set() {
                    Some(s) => Ok(Scalar::Exact(f.integrate(&s))),
                    None => Err(Error::DimensionMismatch(format!(
                        "{region} is not a subset of the line"
                    ))),
                },
            },
            DensityModel::Grid(g) => match region {
                Region::Cells(c) => Ok(Scalar::Exact(g.integrate_cells(c))),
                Region::Atom(_) | Region::Polyline(_)
                    if region.ambient_dim() == g.domain().dim() =>
                {
                    Ok(Scalar::zero())
                }
                _ => match g.to_line_model() {
                    Some(line) => DensityModel::Line(line).mass(region),
                    None => Err(Error::DimensionMismatch(format!(
                        "cannot measure {region} under a grid density"
                    ))),
                },
            },
            DensityModel::Mixture(m) => m.mass(region),
        }
    }

    /// `P(A △ B)`.
    pub fn mass_symmetric_difference(&self, a: &Region, b: &Region) -> Result<Scalar> {
        let pieces = a.symmetric_difference(b)?;
        let mut total = Scalar::zero();
        for p in &pieces {
            total = total + self.mass(p)?;
        }
        Ok(total)
    }

    /// `P(Ω)`.
    pub fn total_mass(&self) -> Scalar {
        match self {
            DensityModel::Line(f) => Scalar::Exact(f.mass()),
            DensityModel::Grid(g) => Scalar::Exact(g.mass()),
            DensityModel::Mixture(m) => m.total_mass(),
        }
    }

    /// Whether masses are exact rationals (so comparisons need no tolerance).
    pub fn is_exact(&self) -> bool {
        match self {
            DensityModel::Line(_) | DensityModel::Grid(_) => true,
            DensityModel::Mixture(m) => m.is_exact(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::rat;

    fn twin_peaks() -> DensityModel1D {
        DensityModel1D::continuous(&[
            (int(0), int(0)),
            (rat(1, 3), rat(1, 3)),
            (rat(1, 2), rat(1, 6)),
            (rat(2, 3), rat(1, 3)),
            (int(1), int(0)),
        ])
        .unwrap()
    }

    #[test]
    fn twin_peaks_values_and_mass() {
        let f = twin_peaks();
        assert_eq!(f.value(&rat(1, 4)), rat(1, 4));
        assert_eq!(f.value(&rat(5, 12)), rat(1, 4));
        assert_eq!(f.sup(), rat(1, 3));
        // two triangles of area 1/6 each minus the valley: 1/3*1/3/2 * 2 + trapezoids
        let oracle: Rational = (0..1200)
            .map(|i| f.value(&(rat(2 * i + 1, 2400))))
            .fold(Rational::zero(), |a, b| a + b)
            / int(1200);
        assert!((crate::number::to_f64(&f.mass()) - crate::number::to_f64(&oracle)).abs() < 1e-6);
    }

    #[test]
    fn superlevel_sets_of_twin_peaks() {
        let f = twin_peaks();
        assert_eq!(f.superlevel(&rat(1, 12)).to_string(), "(1/12,11/12)");
        assert_eq!(
            f.superlevel(&rat(1, 4)).to_string(),
            "(1/4,5/12) u (7/12,3/4)"
        );
        assert!(f.superlevel(&rat(1, 3)).is_empty());
    }

    #[test]
    fn factory_point_values_close_the_jump() {
        let f = DensityModel1D::new(
            vec![int(0), rat(1, 2), int(1)],
            vec![(int(1), rat(1, 2)), (int(1), int(1))],
            None,
        )
        .unwrap();
        assert_eq!(f.value(&rat(1, 2)), int(1));
        assert_eq!(f.superlevel(&rat(3, 4)).to_string(), "[0,1/4) u [1/2,1]");
    }

    #[test]
    fn ess_inf_and_ess_superlevel() {
        let f = twin_peaks();
        assert_eq!(f.ess_inf(&rat(1, 3), &rat(2, 3)), rat(1, 6));
        assert_eq!(f.ess_inf(&int(-1), &rat(1, 2)), int(0));
        assert_eq!(
            f.ess_superlevel_closed(&rat(1, 4)).to_string(),
            "[1/4,5/12] u [7/12,3/4]"
        );
    }

    #[test]
    fn majorization_of_line_densities() {
        let f = twin_peaks();
        assert!(f.scaled(&rat(1, 2)).le_ae(&f));
        assert!(!f.le_ae(&f.scaled(&rat(1, 2))));
        let unif = DensityModel1D::step(vec![int(0), int(1)], vec![int(1)]).unwrap();
        assert!(f.le_ae(&unif));
        let wide = DensityModel1D::step(vec![int(0), int(2)], vec![rat(1, 10)]).unwrap();
        assert!(!wide.le_ae(&unif));
    }

    #[test]
    fn grid_coarsening_is_a_lower_envelope() {
        let b = Arc::new(AmbientBox::cube(1, int(0), int(1)).unwrap());
        let g = GridDensity::sample(b, 3, &rat(1, 2), &|x| x[0].clone()).unwrap();
        let c = g.coarsened_min(1).unwrap();
        assert_eq!(c.values(), &[rat(1, 16), rat(9, 16)]);
        assert!(c.le(&g));
        assert!(!g.le(&c));
        assert_eq!(g.mass(), rat(1, 2));
    }
}
