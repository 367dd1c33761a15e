//! Mixtures of measures living on strata of different dimension: atoms,
//! densities on the line or along polylines, and grid densities.

use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::clustering::{cluster_density_1d, cluster_density_grid};
use crate::density::{DensityModel1D, GridDensity};
use crate::error::{Error, Result};
use crate::forest::{Forest, NodeMeta};
use crate::geometry::cells::Point;
use crate::geometry::polyline::segment_cells;
use crate::geometry::{Interval1D, IntervalSet, Polyline, Region};
use crate::measure::SimpleMeasure;
use crate::number::{display_rational, int, to_f64, Rational, Scalar, FLOAT_TOL};
use crate::separation::SeparationRelation;

/// A continuous density formula that a grid density was sampled from.
#[derive(Clone)]
pub struct Formula(pub Arc<dyn Fn(&[Rational]) -> Rational + Send + Sync>);

impl Formula {
    pub fn new(f: impl Fn(&[Rational]) -> Rational + Send + Sync + 'static) -> Self {
        Formula(Arc::new(f))
    }

    pub fn eval(&self, p: &[Rational]) -> Rational {
        (self.0)(p)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Formula(..)")
    }
}

/// One stratum of a mixture.
#[derive(Clone, Debug)]
pub enum DimComponent {
    /// Weighted Dirac masses.
    Atoms {
        points: Vec<Point>,
        weights: Vec<Rational>,
    },
    /// A density with respect to Lebesgue measure on the real line.
    Line(DensityModel1D),
    /// A density with respect to arc length along a polyline, given in the
    /// polyline parameter `t ∈ [0,1]`.
    Curve {
        curve: Polyline,
        density: DensityModel1D,
    },
    /// A density with respect to Lebesgue measure on a box, optionally with
    /// the continuous formula it was sampled from.
    Grid {
        density: GridDensity,
        formula: Option<Formula>,
    },
}

impl DimComponent {
    pub fn atoms(points: Vec<Point>, weights: Vec<Rational>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::InvalidWeight(
                "atoms need one weight per point".into(),
            ));
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::InvalidWeight("atom weights must be positive".into()));
        }
        let dim = points[0].len();
        if dim == 0 || points.iter().any(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch(
                "atoms must share an ambient dimension".into(),
            ));
        }
        Ok(DimComponent::Atoms { points, weights })
    }

    pub fn curve(curve: Polyline, density: DensityModel1D) -> Result<Self> {
        let dom = density.domain();
        if dom.lo() < &Rational::zero() || dom.hi() > &int(1) {
            return Err(Error::InvalidDensity(
                "curve densities live on the parameter interval [0,1]".into(),
            ));
        }
        if curve.params().measure() != int(1) {
            return Err(Error::InvalidRegion(
                "a curve component needs the full polyline".into(),
            ));
        }
        Ok(DimComponent::Curve { curve, density })
    }

    pub fn grid(density: GridDensity, formula: Option<Formula>) -> Self {
        DimComponent::Grid { density, formula }
    }

    /// Hausdorff dimension of the reference measure.
    pub fn dim(&self) -> usize {
        match self {
            DimComponent::Atoms { .. } => 0,
            DimComponent::Line(_) | DimComponent::Curve { .. } => 1,
            DimComponent::Grid { density, .. } => density.domain().dim(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            DimComponent::Atoms { points, .. } => points[0].len(),
            DimComponent::Line(_) => 1,
            DimComponent::Curve { curve, .. } => curve.ambient_dim(),
            DimComponent::Grid { density, .. } => density.domain().dim(),
        }
    }

    pub fn total_mass(&self) -> Scalar {
        match self {
            DimComponent::Atoms { weights, .. } => Scalar::Exact(weights.iter().sum()),
            DimComponent::Line(f) => Scalar::Exact(f.mass()),
            DimComponent::Curve { curve, density } => Scalar::Approx(curve_mass(
                curve,
                density,
                &IntervalSet::from_interval(density.domain()),
            )),
            DimComponent::Grid { density, .. } => Scalar::Exact(density.mass()),
        }
    }

    /// Mass of `region` under this component alone.
    pub fn mass(&self, region: &Region) -> Result<Scalar> {
        if region.ambient_dim() != self.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{region} lives in dimension {}, the mixture in {}",
                region.ambient_dim(),
                self.ambient_dim()
            )));
        }
        Ok(match self {
            DimComponent::Atoms { points, weights } => Scalar::Exact(
                points
                    .iter()
                    .zip(weights)
                    .filter(|(p, _)| region.contains(&Region::Atom(p.to_vec())))
                    .map(|(_, w)| w.clone())
                    .sum(),
            ),
            DimComponent::Line(f) => match region {
                Region::Atom(_) => Scalar::zero(),
                _ => Scalar::Exact(f.integrate(&region.line_set().expect("line region"))),
            },
            DimComponent::Curve { curve, density } => match region {
                Region::Polyline(l) if l.same_curve(curve) => {
                    Scalar::Approx(curve_mass(curve, density, l.params()))
                }
                Region::Cells(c) => {
                    let grid = c.grid();
                    let mut inside = Vec::new();
                    let n = curve.segment_count();
                    for (k, (a, b)) in curve.pieces().iter().enumerate() {
                        let (pieces, _) = segment_cells(&grid, a, b);
                        let cuts = segment_cuts(&grid, a, b);
                        for (w, cands) in cuts.windows(2).zip(&pieces) {
                            if cands.iter().any(|&x| c.has(x)) {
                                let lo = (Rational::from_integer(k.into()) + &w[0])
                                    / Rational::from_integer(n.into());
                                let hi = (Rational::from_integer(k.into()) + &w[1])
                                    / Rational::from_integer(n.into());
                                inside.push(Interval1D::closed(lo, hi)?);
                            }
                        }
                    }
                    Scalar::Approx(curve_mass(
                        curve,
                        density,
                        &IntervalSet::from_intervals(inside),
                    ))
                }
                _ => Scalar::Approx(0.0),
            },
            DimComponent::Grid { density, .. } => match region {
                Region::Cells(c) => Scalar::Exact(density.integrate_cells(c)),
                Region::Atom(_) | Region::Polyline(_) => Scalar::zero(),
                _ => match density.to_line_model() {
                    Some(f) => Scalar::Exact(f.integrate(&region.line_set().expect("line region"))),
                    None => {
                        return Err(Error::DimensionMismatch(format!(
                            "cannot measure {region} under a grid density"
                        )))
                    }
                },
            },
        })
    }

    /// `c` of this component alone, as `(region, meta)` pairs.
    fn cluster(&self, rel: &SeparationRelation) -> Result<Vec<(Region, NodeMeta)>> {
        match self {
            DimComponent::Atoms { points, .. } => Ok(points
                .iter()
                .map(|p| (Region::Atom(p.clone()), NodeMeta::default()))
                .collect()),
            DimComponent::Line(f) => {
                let forest = cluster_density_1d(f, rel)?;
                Ok((0..forest.len())
                    .map(|i| (forest.node(i).clone(), forest.meta(i).clone()))
                    .collect())
            }
            DimComponent::Curve { curve, density } => {
                if !matches!(rel, SeparationRelation::Disjointness) {
                    return Err(Error::Unsupported(
                        "curve components cluster only under disjointness".into(),
                    ));
                }
                let forest = cluster_density_1d(density, rel)?;
                (0..forest.len())
                    .map(|i| {
                        let params = forest.node(i).line_set().expect("line node");
                        Ok((
                            Region::Polyline(curve.with_params(params)?),
                            forest.meta(i).clone(),
                        ))
                    })
                    .collect()
            }
            DimComponent::Grid { density, .. } => {
                let forest = cluster_density_grid(density, rel)?.forest;
                Ok((0..forest.len())
                    .map(|i| (forest.node(i).clone(), forest.meta(i).clone()))
                    .collect())
            }
        }
    }
}

/// Segment parameters `s ∈ [0,1]` at which `[a,b]` crosses a grid plane, with both ends.
fn segment_cuts(grid: &crate::geometry::Grid, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut cuts = vec![Rational::zero(), int(1)];
    for k in 0..grid.dim() {
        if a[k] == b[k] {
            continue;
        }
        let side = grid.cell_side(k);
        for j in 0..=grid.n {
            let plane = &grid.domain.lo()[k] + &side * Rational::from_integer(j.into());
            let s = (&plane - &a[k]) / (&b[k] - &a[k]);
            if s.is_positive() && s < int(1) {
                cuts.push(s);
            }
        }
    }
    cuts.sort();
    cuts.dedup();
    cuts
}

/// `∫ f dH¹` over the curve points with parameter in `params`.
fn curve_mass(curve: &Polyline, density: &DensityModel1D, params: &IntervalSet) -> f64 {
    let n = curve.segment_count();
    let nr = Rational::from_integer(n.into());
    curve
        .pieces()
        .iter()
        .enumerate()
        .map(|(k, (a, b))| {
            let kr = Rational::from_integer(k.into());
            let window =
                Interval1D::closed(&kr / &nr, (&kr + int(1)) / &nr).expect("segment window");
            let part = params.intersection(&IntervalSet::from_interval(window));
            crate::geometry::polyline::euclid(a, b) * n as f64 * to_f64(&density.integrate(&part))
        })
        .sum()
}

/// A finite measure combining components of increasing dimension.
#[derive(Clone, Debug)]
pub struct MixtureMeasure {
    components: Vec<DimComponent>,
}

impl MixtureMeasure {
    /// Orders components by dimension; rejects mixed ambient dimensions and null components.
    pub fn new(mut components: Vec<DimComponent>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::InvalidDensity(
                "a mixture needs at least one component".into(),
            ));
        };
        let ambient = first.ambient_dim();
        if components.iter().any(|c| c.ambient_dim() != ambient) {
            return Err(Error::DimensionMismatch(
                "mixture components live in different dimensions".into(),
            ));
        }
        if components.iter().any(|c| !c.total_mass().is_positive()) {
            return Err(Error::InvalidDensity(
                "every mixture component needs positive mass".into(),
            ));
        }
        components.sort_by_key(|c| c.dim());
        Ok(MixtureMeasure { components })
    }

    pub fn components(&self) -> &[DimComponent] {
        &self.components
    }

    pub fn ambient_dim(&self) -> usize {
        self.components[0].ambient_dim()
    }

    pub fn mass(&self, region: &Region) -> Result<Scalar> {
        let mut total = Scalar::zero();
        for c in &self.components {
            total = total + c.mass(region)?;
        }
        Ok(total)
    }

    pub fn total_mass(&self) -> Scalar {
        self.components.iter().map(|c| c.total_mass()).sum()
    }

    /// Curve masses involve arc lengths and are floating point.
    pub fn is_exact(&self) -> bool {
        !self
            .components
            .iter()
            .any(|c| matches!(c, DimComponent::Curve { .. }))
    }

    /// `q ≤ self`, stratum by stratum.
    pub fn dominates(&self, q: &SimpleMeasure) -> bool {
        let forest = q.forest();
        let mut line_nodes = Vec::new();
        let mut cell_nodes = Vec::new();
        let mut checked_curves: Vec<Polyline> = Vec::new();
        for i in 0..forest.len() {
            match forest.node(i) {
                Region::Atom(p) => {
                    let available: Rational = self
                        .components
                        .iter()
                        .filter_map(|c| match c {
                            DimComponent::Atoms { points, weights } => Some(
                                points
                                    .iter()
                                    .zip(weights)
                                    .filter(|(x, _)| *x == p)
                                    .map(|(_, w)| w.clone())
                                    .sum::<Rational>(),
                            ),
                            _ => None,
                        })
                        .sum();
                    if q.atom_mass(p) > available {
                        return false;
                    }
                }
                Region::Polyline(l) => {
                    if checked_curves.iter().any(|c| c.same_curve(l)) {
                        continue;
                    }
                    checked_curves.push(l.clone());
                    let Some(density) = self.components.iter().find_map(|c| match c {
                        DimComponent::Curve { curve, density } if curve.same_curve(l) => {
                            Some(density)
                        }
                        _ => None,
                    }) else {
                        return false;
                    };
                    let mut breaks = q.curve_breaks(l);
                    breaks.extend(density.knots().iter().cloned());
                    let breaks: Vec<Rational> = breaks.into_iter().collect();
                    for w in breaks.windows(2) {
                        let mid = (&w[0] + &w[1]) / int(2);
                        let bound = to_f64(&density.ess_inf(&w[0], &w[1]));
                        if q.curve_height_at(l, &mid).to_f64() > bound + FLOAT_TOL {
                            return false;
                        }
                    }
                }
                Region::Cells(c) if c.domain().dim() >= 2 => cell_nodes.push(i),
                _ => line_nodes.push(i),
            }
        }
        let stratum_ok = |nodes: &[usize], dim: usize| -> bool {
            if nodes.is_empty() {
                return true;
            }
            let part = q.restrict(nodes);
            self.components.iter().any(|c| match c {
                DimComponent::Line(f) if dim == 1 => part.below_line(f),
                DimComponent::Grid { density, .. } if density.domain().dim() == dim => {
                    part.below_grid(density)
                }
                _ => false,
            })
        };
        stratum_ok(&line_nodes, 1) && stratum_ok(&cell_nodes, self.ambient_dim().max(2))
    }
}

/// Outcome of the niveau-line check between a lower- and a higher-dimensional component.
#[derive(Clone, Debug, PartialEq)]
pub struct MixtureCheck {
    pub passed: bool,
    pub diagnostics: Vec<String>,
}

/// Checks that `high`'s density is constant on every connected piece of
/// `low`'s support that meets `high`'s support.
pub fn check_mixture_condition(low: &DimComponent, high: &DimComponent) -> MixtureCheck {
    let mut diagnostics = Vec::new();
    if low.dim() >= high.dim() {
        return MixtureCheck {
            passed: false,
            diagnostics: vec![format!(
                "dimension {} is not below dimension {}",
                low.dim(),
                high.dim()
            )],
        };
    }
    let mut passed = true;
    match low {
        DimComponent::Atoms { points, .. } => {
            for p in points {
                let v = point_value(high, p);
                diagnostics.push(format!(
                    "atom {} sits at density {}",
                    fmt_point(p),
                    v.text()
                ));
            }
        }
        DimComponent::Line(_) => {
            passed = false;
            diagnostics.push(
                "a line density has no lower-dimensional role in its own ambient space".into(),
            );
        }
        DimComponent::Curve { curve, density } => {
            let DimComponent::Grid {
                density: grid,
                formula,
            } = high
            else {
                return MixtureCheck {
                    passed: false,
                    diagnostics: vec!["curves need a grid density above them".into()],
                };
            };
            let support = density.superlevel(&Rational::zero()).without_points();
            let pieces = SeparationRelation::Disjointness.line_components(&support);
            for piece in pieces {
                let verdict = match formula {
                    Some(f) => piece_values_formula(curve, &piece, f),
                    None => piece_values_grid(curve, &piece, grid),
                };
                match verdict {
                    Ok(None) => {
                        diagnostics.push(format!("piece {} misses the support", fmt_set(&piece)))
                    }
                    Ok(Some(v)) => diagnostics.push(format!(
                        "piece {} lies on the niveau line {}",
                        fmt_set(&piece),
                        display_rational(&v)
                    )),
                    Err(msg) => {
                        passed = false;
                        diagnostics.push(format!("piece {}: {msg}", fmt_set(&piece)));
                    }
                }
            }
        }
        DimComponent::Grid { .. } => unreachable!("grid components have the top dimension"),
    }
    MixtureCheck {
        passed,
        diagnostics,
    }
}

fn fmt_point(p: &[Rational]) -> String {
    format!(
        "({})",
        p.iter().map(display_rational).collect::<Vec<_>>().join(",")
    )
}

fn fmt_set(s: &IntervalSet) -> String {
    Region::IntervalUnion(s.clone()).to_string()
}

fn point_value(c: &DimComponent, p: &[Rational]) -> Scalar {
    match c {
        DimComponent::Line(f) => Scalar::Exact(f.value(&p[0])),
        DimComponent::Grid {
            formula: Some(f), ..
        } => Scalar::Exact(f.eval(p)),
        DimComponent::Grid { density, .. } => {
            let cells = density.grid().cells_containing(p);
            Scalar::Exact(
                cells
                    .iter()
                    .map(|&c| density.value(c).clone())
                    .max()
                    .unwrap_or_else(Rational::zero),
            )
        }
        DimComponent::Curve { curve, density } => Scalar::Exact(
            curve
                .params_of_point(p)
                .iter()
                .map(|t| density.value(t))
                .max()
                .unwrap_or_else(Rational::zero),
        ),
        DimComponent::Atoms { .. } => Scalar::zero(),
    }
}

/// Parameters of the vertices inside the closure of `piece`, plus its endpoints.
fn piece_params(curve: &Polyline, piece: &IntervalSet) -> Vec<Rational> {
    let hull = piece.hull().expect("nonempty piece").closure();
    let n = curve.segment_count();
    let mut ts: Vec<Rational> = (0..=n)
        .map(|k| Rational::new(k.into(), n.into()))
        .filter(|t| hull.contains_point(t))
        .collect();
    ts.push(hull.lo().clone());
    ts.push(hull.hi().clone());
    ts.sort();
    ts.dedup();
    ts
}

fn piece_values_formula(
    curve: &Polyline,
    piece: &IntervalSet,
    f: &Formula,
) -> std::result::Result<Option<Rational>, String> {
    let ts = piece_params(curve, piece);
    let values: Vec<(Rational, Rational)> = ts
        .iter()
        .map(|t| (t.clone(), f.eval(&curve.position(t))))
        .collect();
    if values.iter().all(|(_, v)| v.is_zero()) {
        return Ok(None);
    }
    let first = &values[0];
    match values.iter().find(|(_, v)| v != &first.1) {
        None => Ok(Some(first.1.clone())),
        Some((t, v)) => Err(format!(
            "density {} at t = {} differs from {} at t = {}",
            display_rational(v),
            display_rational(t),
            display_rational(&first.1),
            display_rational(&first.0)
        )),
    }
}

fn piece_values_grid(
    curve: &Polyline,
    piece: &IntervalSet,
    g: &GridDensity,
) -> std::result::Result<Option<Rational>, String> {
    let ts = piece_params(curve, piece);
    let grid = g.grid();
    let mut met: Vec<u64> = Vec::new();
    for w in ts.windows(2) {
        let (a, b) = (curve.position(&w[0]), curve.position(&w[1]));
        let (pieces, _) = segment_cells(&grid, &a, &b);
        met.extend(pieces.into_iter().flatten());
    }
    met.sort_unstable();
    met.dedup();
    if met.iter().all(|&c| g.value(c).is_zero()) {
        return Ok(None);
    }
    let first = met[0];
    match met.iter().find(|&&c| g.value(c) != g.value(first)) {
        None => Ok(Some(g.value(first).clone())),
        Some(&c) => Err(format!(
            "cells {first} and {c} carry densities {} and {}",
            display_rational(g.value(first)),
            display_rational(g.value(c))
        )),
    }
}

/// `c(P)` of a mixture: the union of the per-component clusterings after the
/// niveau-line condition holds for every pair of dimensions.
pub fn cluster_mixture(m: &MixtureMeasure, rel: &SeparationRelation) -> Result<Forest> {
    let comps = m.components();
    for (i, low) in comps.iter().enumerate() {
        for high in &comps[i + 1..] {
            if low.dim() < high.dim() {
                let check = check_mixture_condition(low, high);
                if !check.passed {
                    return Err(Error::MixtureCondition(check.diagnostics.join("; ")));
                }
            }
        }
    }
    let mut nodes = Vec::new();
    for c in comps {
        nodes.extend(c.cluster(rel)?);
    }
    Forest::new(rel.clone(), nodes)
}
