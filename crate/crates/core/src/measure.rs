//! Base measures, simple measures on ⊥-forests, levels and majorization.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::density::{DensityModel, DensityModel1D, GridDensity};
use crate::error::{Error, Result};
use crate::forest::{Forest, NodeMeta};
use crate::geometry::{Polyline, Region};
use crate::number::{Rational, RationalText, Scalar};
use crate::separation::SeparationRelation;

/// `α·Q_A`: weight `α` spread uniformly over `A` with respect to the
/// reference measure of `A`'s dimension class.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BaseMeasure {
    region: Region,
    weight: Rational,
}

impl BaseMeasure {
    pub fn new(region: Region, weight: Rational) -> Result<Self> {
        if !weight.is_positive() {
            return Err(Error::InvalidWeight(format!(
                "weight of {region} must be positive"
            )));
        }
        if !region.is_closed() || !region.measure().is_positive() {
            return Err(Error::NotABaseSet(format!(
                "{region} is not closed with positive measure"
            )));
        }
        Ok(BaseMeasure { region, weight })
    }

    /// Base measure with flat density `height` on `region`.
    pub fn with_height(region: Region, height: Rational) -> Result<Self> {
        let mu = region.measure().exact().cloned().ok_or_else(|| {
            Error::Unsupported(format!(
                "height parameterization of {region} needs an exact measure"
            ))
        })?;
        Self::new(region, height * mu)
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn weight(&self) -> &Rational {
        &self.weight
    }

    /// Flat density `α / μ(A)`.
    pub fn height(&self) -> Scalar {
        Scalar::Exact(self.weight.clone()) / self.region.measure()
    }

    /// `α·μ(A ∩ B)/μ(A)`.
    pub fn evaluate(&self, b: &Region) -> Result<Scalar> {
        let inter = self.region.intersection_measure(b)?;
        Ok(inter.mul_rational(&self.weight) / self.region.measure())
    }

    /// `self ≤ other` as measures.
    pub fn le(&self, other: &BaseMeasure) -> bool {
        self.region.dim_class() == other.region.dim_class()
            && other.region.contains(&self.region)
            && self.height().le(&other.height())
    }
}

/// The level of a node: the combined ancestor mass restricted to the node.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelMeasure {
    pub node: usize,
    pub base: BaseMeasure,
}

/// A finite positive combination of base measures whose sets form a ⊥-forest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimpleMeasure {
    forest: Forest,
    weights: Vec<Rational>,
}

impl SimpleMeasure {
    /// The zero measure.
    pub fn empty(rel: SeparationRelation) -> Self {
        SimpleMeasure {
            forest: Forest::empty(rel),
            weights: Vec::new(),
        }
    }

    /// Checks that the term regions form a ⊥-forest. Repeated regions are
    /// merged by adding their weights.
    pub fn validate_representation(
        terms: Vec<(Region, Rational)>,
        rel: SeparationRelation,
    ) -> Result<Self> {
        let mut merged: Vec<(Region, Rational)> = Vec::new();
        for (r, w) in terms {
            BaseMeasure::new(r.clone(), w.clone())?;
            match merged.iter_mut().find(|(m, _)| m.set_eq(&r)) {
                Some(slot) => slot.1 += w,
                None => merged.push((r, w)),
            }
        }
        let regions: Vec<(Region, NodeMeta)> = merged
            .iter()
            .map(|(r, _)| (r.clone(), NodeMeta::default()))
            .collect();
        let forest = Forest::new(rel, regions)?;
        let weights = forest
            .nodes()
            .iter()
            .map(|n| {
                merged
                    .iter()
                    .find(|(r, _)| r == n)
                    .expect("node from terms")
                    .1
                    .clone()
            })
            .collect();
        Ok(SimpleMeasure { forest, weights })
    }

    /// Builds from an already validated forest with one weight per node.
    pub fn on_forest(forest: Forest, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != forest.len() {
            return Err(Error::InvalidWeight("one weight per forest node".into()));
        }
        for (r, w) in forest.nodes().iter().zip(&weights) {
            BaseMeasure::new(r.clone(), w.clone())?;
        }
        Ok(SimpleMeasure { forest, weights })
    }

    pub fn forest(&self) -> &Forest {
        &self.forest
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn rel(&self) -> &SeparationRelation {
        self.forest.rel()
    }

    pub fn terms(&self) -> Vec<(Region, Rational)> {
        self.forest
            .nodes()
            .iter()
            .cloned()
            .zip(self.weights.iter().cloned())
            .collect()
    }

    pub fn base(&self, i: usize) -> BaseMeasure {
        BaseMeasure {
            region: self.forest.node(i).clone(),
            weight: self.weights[i].clone(),
        }
    }

    pub fn total_mass(&self) -> Rational {
        self.weights.iter().fold(Rational::zero(), |a, b| a + b)
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn scaled(&self, alpha: &Rational) -> Result<SimpleMeasure> {
        if !alpha.is_positive() {
            return Err(Error::InvalidWeight("scale must be positive".into()));
        }
        Ok(SimpleMeasure {
            forest: self.forest.clone(),
            weights: self.weights.iter().map(|w| w * alpha).collect(),
        })
    }

    /// `Q(B)`.
    pub fn evaluate(&self, b: &Region) -> Result<Scalar> {
        let mut total = Scalar::zero();
        for i in 0..self.weights.len() {
            total = total + self.base(i).evaluate(b)?;
        }
        Ok(total)
    }

    /// Flat density of the level of node `i`: `Σ_{A' ⊇ A} α_{A'}/μ(A')`.
    pub fn level_height(&self, i: usize) -> Scalar {
        std::iter::once(i)
            .chain(self.forest.ancestors(i))
            .map(|j| self.base(j).height())
            .sum()
    }

    /// `λ_Q(A)`.
    pub fn level(&self, region: &Region) -> Result<LevelMeasure> {
        let i = self
            .forest
            .index_of(region)
            .ok_or_else(|| Error::NodeNotFound(region.to_string()))?;
        let mu = self.forest.node(i).measure();
        let weight = match self.level_height(i) * mu {
            Scalar::Exact(w) => w,
            Scalar::Approx(_) => {
                return Err(Error::Unsupported(format!(
                    "level of {region} needs an exact reference measure"
                )))
            }
        };
        Ok(LevelMeasure {
            node: i,
            base: BaseMeasure::new(self.forest.node(i).clone(), weight)?,
        })
    }

    /// `Q|_{F'}` for a sub-family of node indices.
    pub fn restrict(&self, keep: &[usize]) -> SimpleMeasure {
        let forest = self.forest.restricted(keep);
        let weights = forest
            .nodes()
            .iter()
            .map(|n| self.weights[self.forest.index_of(n).expect("kept node")].clone())
            .collect();
        SimpleMeasure { forest, weights }
    }

    /// `Q|_{<A}`.
    pub fn below(&self, region: &Region) -> Result<SimpleMeasure> {
        let i = self
            .forest
            .index_of(region)
            .ok_or_else(|| Error::NodeNotFound(region.to_string()))?;
        let keep: Vec<usize> = (0..self.forest.len())
            .filter(|&j| self.forest.ancestors(j).contains(&i))
            .collect();
        Ok(self.restrict(&keep))
    }

    /// Density of the stratum containing `probe` at that probe.
    fn line_height_at(&self, x: &Rational) -> Scalar {
        let probe = Region::Atom(vec![x.clone()]);
        (0..self.weights.len())
            .filter(|&i| {
                let r = self.forest.node(i);
                r.dim_class() == 1 && r.line_set().is_some() && r.contains(&probe)
            })
            .map(|i| self.base(i).height())
            .sum()
    }

    pub(crate) fn curve_height_at(&self, curve: &Polyline, t: &Rational) -> Scalar {
        (0..self.weights.len())
            .filter(|&i| match self.forest.node(i) {
                Region::Polyline(l) => l.same_curve(curve) && l.params().contains_point(t),
                _ => false,
            })
            .map(|i| self.base(i).height())
            .sum()
    }

    pub(crate) fn atom_mass(&self, p: &[Rational]) -> Rational {
        (0..self.weights.len())
            .filter(|&i| matches!(self.forest.node(i), Region::Atom(q) if q.as_slice() == p))
            .fold(Rational::zero(), |a, i| a + &self.weights[i])
    }

    fn line_breaks(&self) -> BTreeSet<Rational> {
        let mut out = BTreeSet::new();
        for r in self.forest.nodes() {
            if r.dim_class() == 1 {
                if let Some(s) = r.line_set() {
                    for p in s.parts() {
                        out.insert(p.lo().clone());
                        out.insert(p.hi().clone());
                    }
                }
            }
        }
        out
    }

    fn curves(&self) -> Vec<Polyline> {
        let mut out: Vec<Polyline> = Vec::new();
        for r in self.forest.nodes() {
            if let Region::Polyline(l) = r {
                if !out.iter().any(|c| c.same_curve(l)) {
                    out.push(l.clone());
                }
            }
        }
        out
    }

    pub(crate) fn curve_breaks(&self, curve: &Polyline) -> BTreeSet<Rational> {
        let mut out = BTreeSet::new();
        for r in self.forest.nodes() {
            if let Region::Polyline(l) = r {
                if l.same_curve(curve) {
                    for p in l.params().parts() {
                        out.insert(p.lo().clone());
                        out.insert(p.hi().clone());
                    }
                }
            }
        }
        out
    }

    fn cell_nodes(&self) -> Vec<usize> {
        (0..self.weights.len())
            .filter(|&i| matches!(self.forest.node(i), Region::Cells(c) if c.domain().dim() >= 2))
            .collect()
    }

    /// Per-cell flat density of the full-dimensional stratum at `depth`.
    pub fn cell_heights(&self, depth: u32) -> Option<(crate::geometry::Grid, Vec<Rational>)> {
        let nodes = self.cell_nodes();
        let Region::Cells(first) = self.forest.node(*nodes.first()?) else {
            unreachable!()
        };
        let grid = crate::geometry::Grid::new(first.domain().clone(), depth).ok()?;
        let mut heights = vec![Rational::zero(); grid.cell_count() as usize];
        for i in nodes {
            let Region::Cells(c) = self.forest.node(i) else {
                unreachable!()
            };
            let h = &self.weights[i] / c.measure();
            for &cell in c.refined_to(depth).cells() {
                heights[cell as usize] += &h;
            }
        }
        Some((grid, heights))
    }

    fn max_cell_depth(&self) -> u32 {
        self.forest
            .nodes()
            .iter()
            .filter_map(|r| match r {
                Region::Cells(c) if c.domain().dim() >= 2 => Some(c.depth()),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// `self ≤ other` as measures, decided stratum by stratum on the common
    /// refinement of both forests' node boundaries.
    pub fn majorized_by(&self, other: &SimpleMeasure) -> bool {
        for r in self.forest.nodes() {
            if let Region::Atom(p) = r {
                if self.atom_mass(p) > other.atom_mass(p) {
                    return false;
                }
            }
        }
        let mut breaks = self.line_breaks();
        breaks.extend(other.line_breaks());
        let breaks: Vec<Rational> = breaks.into_iter().collect();
        for w in breaks.windows(2) {
            let mid = (&w[0] + &w[1]) / crate::number::int(2);
            if !self.line_height_at(&mid).le(&other.line_height_at(&mid)) {
                return false;
            }
        }
        for curve in self.curves() {
            let mut b = self.curve_breaks(&curve);
            b.extend(other.curve_breaks(&curve));
            let b: Vec<Rational> = b.into_iter().collect();
            for w in b.windows(2) {
                let mid = (&w[0] + &w[1]) / crate::number::int(2);
                if !self
                    .curve_height_at(&curve, &mid)
                    .le(&other.curve_height_at(&curve, &mid))
                {
                    return false;
                }
            }
        }
        if !self.cell_nodes().is_empty() {
            let depth = self.max_cell_depth().max(other.max_cell_depth());
            let (grid, mine) = self.cell_heights(depth).expect("cell stratum");
            let theirs = match other.cell_heights(depth) {
                Some((g, h)) if g.domain == grid.domain => h,
                _ => return false,
            };
            if mine.iter().zip(&theirs).any(|(a, b)| a > b) {
                return false;
            }
        }
        true
    }

    /// `Q1.majorizes(Q2)` in the reading "`Q1 ≤ Q2`".
    pub fn majorizes(q1: &SimpleMeasure, q2: &SimpleMeasure) -> bool {
        q1.majorized_by(q2)
    }

    /// `self ≤ P`.
    pub fn below_density(&self, p: &DensityModel) -> bool {
        match p {
            DensityModel::Line(f) => self.below_line(f),
            DensityModel::Grid(g) => self.below_grid(g),
            DensityModel::Mixture(m) => m.dominates(self),
        }
    }

    /// `self ≤ f·λ` for a line density; atoms, curves and cells must be absent.
    pub fn below_line(&self, f: &DensityModel1D) -> bool {
        if self
            .forest
            .nodes()
            .iter()
            .any(|r| r.dim_class() != 1 || r.line_set().is_none())
        {
            return false;
        }
        let mut breaks = self.line_breaks();
        breaks.extend(f.knots().iter().cloned());
        let breaks: Vec<Rational> = breaks.into_iter().collect();
        breaks.windows(2).all(|w| {
            let mid = (&w[0] + &w[1]) / crate::number::int(2);
            match self.line_height_at(&mid) {
                Scalar::Exact(h) => h.is_zero() || h <= f.ess_inf(&w[0], &w[1]),
                Scalar::Approx(h) => {
                    h <= crate::number::to_f64(&f.ess_inf(&w[0], &w[1])) + crate::number::FLOAT_TOL
                }
            }
        })
    }

    /// `self ≤ g·λ^d` for a grid density.
    pub fn below_grid(&self, g: &GridDensity) -> bool {
        if g.domain().dim() == 1 {
            return match g.to_line_model() {
                Some(f)
                    if self
                        .forest
                        .nodes()
                        .iter()
                        .all(|r| r.line_set().is_some() && r.dim_class() == 1) =>
                {
                    self.below_line(&f)
                }
                _ => false,
            };
        }
        if self.cell_nodes().len() != self.forest.len() {
            return false;
        }
        if self.is_zero() {
            return true;
        }
        let depth = self.max_cell_depth().max(g.depth());
        let (grid, mine) = self.cell_heights(depth).expect("cell stratum");
        if &grid.domain != g.domain() {
            return false;
        }
        let refined = g.refined(depth);
        mine.iter().zip(refined.values()).all(|(a, b)| a <= b)
    }

    /// The sum of flat level densities as a density model. Only pure line or
    /// pure cell measures with exact heights have one.
    pub fn to_density_model(&self) -> Result<DensityModel> {
        if self.is_zero() {
            return Err(Error::InvalidDensity(
                "the zero measure has no positive density".into(),
            ));
        }
        if self
            .forest
            .nodes()
            .iter()
            .all(|r| r.dim_class() == 1 && r.line_set().is_some())
        {
            let knots: Vec<Rational> = self.line_breaks().into_iter().collect();
            let values = knots
                .windows(2)
                .map(
                    |w| match self.line_height_at(&((&w[0] + &w[1]) / crate::number::int(2))) {
                        Scalar::Exact(h) => Ok(h),
                        Scalar::Approx(_) => Err(Error::Unsupported("inexact line heights".into())),
                    },
                )
                .collect::<Result<Vec<_>>>()?;
            return Ok(DensityModel::Line(DensityModel1D::step(knots, values)?));
        }
        if self.cell_nodes().len() == self.forest.len() {
            let (grid, heights) = self
                .cell_heights(self.max_cell_depth())
                .expect("cell stratum");
            return Ok(DensityModel::Grid(GridDensity::new(
                grid.domain.clone(),
                grid.depth,
                heights,
            )?));
        }
        Err(Error::Unsupported(
            "density of a measure mixing strata".into(),
        ))
    }

    pub fn to_wire(&self) -> SimpleMeasureWire {
        SimpleMeasureWire {
            relation: self.rel().to_string(),
            terms: self
                .terms()
                .into_iter()
                .map(|(region, w)| TermWire {
                    region,
                    weight: RationalText(w),
                })
                .collect(),
        }
    }

    pub fn from_wire(wire: SimpleMeasureWire) -> Result<Self> {
        let rel = wire.relation.parse()?;
        Self::validate_representation(
            wire.terms
                .into_iter()
                .map(|t| (t.region, t.weight.0))
                .collect(),
            rel,
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimpleMeasureWire {
    pub relation: String,
    pub terms: Vec<TermWire>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermWire {
    pub region: Region,
    pub weight: RationalText,
}

/// Outcome of a successful finite monotone-convergence check.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub terms: usize,
    /// `P(Ω) − Q_m(Ω)`.
    pub residual: Scalar,
}

/// Verifies `Q_1 ≤ … ≤ Q_m ≤ P` and reports the residual mass.
///
/// A failure `Q_{n-1} ≰ Q_n` is reported with the (0-based) index `n` of the
/// later term; `Q_m ≰ P` is reported as [`Error::NotBelow`].
pub fn monotone_convergence_check(
    seq: &[SimpleMeasure],
    p: &DensityModel,
) -> Result<ConvergenceReport> {
    for n in 1..seq.len() {
        if !seq[n - 1].majorized_by(&seq[n]) {
            return Err(Error::MonotonicityViolation {
                index: n,
                detail: format!("term {} is not below term {n}", n - 1),
            });
        }
    }
    let Some(last) = seq.last() else {
        return Ok(ConvergenceReport {
            terms: 0,
            residual: p.total_mass(),
        });
    };
    if !last.below_density(p) {
        return Err(Error::NotBelow(format!("term {} exceeds P", seq.len() - 1)));
    }
    Ok(ConvergenceReport {
        terms: seq.len(),
        residual: p.total_mass() - Scalar::Exact(last.total_mass()),
    })
}
