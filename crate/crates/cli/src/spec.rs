//! Run specification files (TOML) and the models they describe.

use std::path::PathBuf;
use std::sync::Arc;

use hclust_core::catalog;
use hclust_core::density::{DensityModel, DensityModel1D, GridDensity};
use hclust_core::geometry::{AmbientBox, DyadicCellUnion, Polyline};
use hclust_core::measure::{SimpleMeasure, TermWire};
use hclust_core::mixture::{DimComponent, Formula, MixtureMeasure};
use hclust_core::number::{rat, untexts, RationalText};
use hclust_core::separation::SeparationRelation;
use hclust_core::Rational;
use serde::Deserialize;

use crate::error::CliError;
use crate::expr::Expr;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    /// `disjoint` or `tau:p/q`.
    pub separation: Option<String>,
    #[serde(rename = "box")]
    pub ambient: Option<BoxSpec>,
    pub density: Option<LineSpec>,
    pub grid: Option<GridSpec>,
    pub simple: Option<SimpleSpec>,
    pub mixture: Option<MixtureSpec>,
    pub output: Option<OutputSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lo: Vec<RationalText>,
    pub hi: Vec<RationalText>,
}

/// A piecewise-linear density on an interval: a catalog name, continuous
/// `points`, or `knots` with one value per piece (steps) or per knot.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineSpec {
    pub name: Option<String>,
    pub points: Option<Vec<[RationalText; 2]>>,
    pub knots: Option<Vec<RationalText>>,
    pub values: Option<Vec<RationalText>>,
}

/// A grid density: sampled from `formula`, given by `values`, or the
/// indicator of `cells` with `value`.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub depth: Option<u32>,
    pub offset: Option<RationalText>,
    pub formula: Option<String>,
    pub values: Option<Vec<RationalText>>,
    pub cells: Option<Vec<Vec<u64>>>,
    pub value: Option<RationalText>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimpleSpec {
    pub terms: Vec<TermWire>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureSpec {
    pub component: Vec<ComponentSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub dim: toml::Value,
    pub atoms: Option<Vec<Vec<RationalText>>>,
    pub weights: Option<Vec<RationalText>>,
    pub density: Option<LineSpec>,
    pub curve: Option<Vec<Vec<RationalText>>>,
    pub grid: Option<GridSpec>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub json: Option<PathBuf>,
    pub dot: Option<PathBuf>,
}

/// The measure a spec describes.
#[derive(Clone, Debug)]
pub enum Model {
    Simple(SimpleMeasure),
    Line(DensityModel1D),
    Grid(GridDensity),
    Mixture(MixtureMeasure),
}

impl Model {
    pub fn engine(&self) -> &'static str {
        match self {
            Model::Simple(_) => "simple",
            Model::Line(_) => "line",
            Model::Grid(_) => "grid",
            Model::Mixture(_) => "mixture",
        }
    }

    /// Depth of the grid part, if any.
    pub fn depth(&self) -> Option<u32> {
        match self {
            Model::Grid(density) => Some(density.depth()),
            Model::Mixture(m) => m.components().iter().find_map(|c| match c {
                DimComponent::Grid { density, .. } => Some(density.depth()),
                _ => None,
            }),
            _ => None,
        }
    }

    pub fn density(&self) -> Option<DensityModel> {
        match self {
            Model::Simple(_) => None,
            Model::Line(f) => Some(DensityModel::Line(f.clone())),
            Model::Grid(density) => Some(DensityModel::Grid(density.clone())),
            Model::Mixture(m) => Some(DensityModel::Mixture(m.clone())),
        }
    }
}

impl RunSpec {
    pub fn parse(text: &str) -> Result<RunSpec, CliError> {
        toml::from_str(text).map_err(|e| CliError::Spec(e.to_string()))
    }

    /// The flag wins over the spec; the default is disjointness.
    pub fn relation(&self, flag: Option<&str>) -> Result<SeparationRelation, CliError> {
        match flag.or(self.separation.as_deref()) {
            Some(text) => Ok(text.parse()?),
            None => Ok(SeparationRelation::Disjointness),
        }
    }

    fn ambient(&self) -> Result<Arc<AmbientBox>, CliError> {
        let b = self
            .ambient
            .as_ref()
            .ok_or_else(|| CliError::Spec("a [box] stanza is required".into()))?;
        Ok(Arc::new(AmbientBox::new(
            untexts(b.lo.clone()),
            untexts(b.hi.clone()),
        )?))
    }

    /// Exactly one measure stanza, built into a model.
    pub fn model(&self, rel: &SeparationRelation, depth: Option<u32>) -> Result<Model, CliError> {
        let given = [
            self.simple.is_some(),
            self.density.is_some(),
            self.grid.is_some(),
            self.mixture.is_some(),
        ];
        if given.iter().filter(|&&g| g).count() != 1 {
            return Err(CliError::Spec(
                "exactly one of [simple], [density], [grid], [mixture] is required".into(),
            ));
        }
        if let Some(s) = &self.simple {
            return Ok(Model::Simple(simple_measure(s, rel)?));
        }
        if let Some(d) = &self.density {
            return Ok(Model::Line(line_density(d)?));
        }
        if let Some(g) = &self.grid {
            return Ok(Model::Grid(grid_density(g, self.ambient()?, depth)?.0));
        }
        let m = self.mixture.as_ref().expect("one stanza");
        Ok(Model::Mixture(self.mixture_measure(m, depth)?))
    }

    /// `Q` and `P` for an adaptedness check: a simple measure and one density.
    pub fn adaptedness_pair(
        &self,
        rel: &SeparationRelation,
        depth: Option<u32>,
    ) -> Result<(SimpleMeasure, DensityModel), CliError> {
        let Some(s) = &self.simple else {
            return Err(CliError::Spec(
                "check-adapted needs a [simple] stanza for Q".into(),
            ));
        };
        let q = simple_measure(s, rel)?;
        let p = match (&self.density, &self.grid) {
            (Some(d), None) => DensityModel::Line(line_density(d)?),
            (None, Some(g)) => DensityModel::Grid(grid_density(g, self.ambient()?, depth)?.0),
            _ => {
                return Err(CliError::Spec(
                    "check-adapted needs exactly one of [density], [grid] for P".into(),
                ))
            }
        };
        Ok((q, p))
    }

    /// The box and formula of a `[grid]` stanza, for refinement runs.
    pub fn formula(&self) -> Result<(Arc<AmbientBox>, Expr), CliError> {
        let g = self
            .grid
            .as_ref()
            .ok_or_else(|| CliError::Spec("refine needs a [grid] stanza".into()))?;
        let text = g
            .formula
            .as_ref()
            .ok_or_else(|| CliError::Spec("refine needs grid.formula".into()))?;
        let domain = self.ambient()?;
        Ok((domain.clone(), Expr::parse(text, domain.dim())?))
    }

    fn mixture_measure(
        &self,
        m: &MixtureSpec,
        depth: Option<u32>,
    ) -> Result<MixtureMeasure, CliError> {
        let mut comps = Vec::new();
        for (k, c) in m.component.iter().enumerate() {
            let dim = match &c.dim {
                toml::Value::Integer(d) if *d >= 0 => *d as usize,
                other => {
                    return Err(hclust_core::Error::UnsupportedDimension(format!(
                        "component {k} has dimension {other}; only integer dimensions are supported"
                    ))
                    .into())
                }
            };
            let comp = match dim {
                0 => {
                    let atoms = c.atoms.clone().ok_or_else(|| {
                        CliError::Spec(format!("component {k}: dim 0 needs atoms"))
                    })?;
                    let weights = c.weights.clone().ok_or_else(|| {
                        CliError::Spec(format!("component {k}: dim 0 needs weights"))
                    })?;
                    DimComponent::atoms(atoms.into_iter().map(untexts).collect(), untexts(weights))?
                }
                1 => {
                    let density = line_density(c.density.as_ref().ok_or_else(|| {
                        CliError::Spec(format!("component {k}: dim 1 needs a density"))
                    })?)?;
                    match &c.curve {
                        Some(vertices) => {
                            let curve =
                                Polyline::full(vertices.iter().cloned().map(untexts).collect())?;
                            DimComponent::curve(curve, density)?
                        }
                        None => DimComponent::Line(density),
                    }
                }
                _ => {
                    let g = c.grid.as_ref().ok_or_else(|| {
                        CliError::Spec(format!("component {k}: dim {dim} needs a grid"))
                    })?;
                    let domain = self.ambient()?;
                    if domain.dim() != dim {
                        return Err(CliError::Spec(format!(
                            "component {k}: dim {dim} does not match the {}-dimensional box",
                            domain.dim()
                        )));
                    }
                    let (density, formula) = grid_density(g, domain, depth)?;
                    DimComponent::grid(density, formula)
                }
            };
            comps.push(comp);
        }
        Ok(MixtureMeasure::new(comps)?)
    }
}

fn simple_measure(s: &SimpleSpec, rel: &SeparationRelation) -> Result<SimpleMeasure, CliError> {
    let terms = s
        .terms
        .iter()
        .map(|t| (t.region.clone(), t.weight.0.clone()))
        .collect();
    Ok(SimpleMeasure::validate_representation(terms, rel.clone())?)
}

pub fn line_density(d: &LineSpec) -> Result<DensityModel1D, CliError> {
    match (&d.name, &d.points, &d.knots, &d.values) {
        (Some(name), None, None, None) => Ok(catalog::line_density(name)?),
        (None, Some(points), None, None) => {
            let pts: Vec<(Rational, Rational)> = points
                .iter()
                .map(|[x, y]| (x.0.clone(), y.0.clone()))
                .collect();
            Ok(DensityModel1D::continuous(&pts)?)
        }
        (None, None, Some(knots), Some(values)) => {
            let (knots, values) = (untexts(knots.clone()), untexts(values.clone()));
            if values.len() + 1 == knots.len() {
                Ok(DensityModel1D::step(knots, values)?)
            } else if values.len() == knots.len() {
                let pts: Vec<(Rational, Rational)> = knots.into_iter().zip(values).collect();
                Ok(DensityModel1D::continuous(&pts)?)
            } else {
                Err(CliError::Spec(
                    "density.values needs one entry per piece or per knot".into(),
                ))
            }
        }
        _ => Err(CliError::Spec(
            "density needs exactly one of name, points, or knots with values".into(),
        )),
    }
}

fn grid_density(
    g: &GridSpec,
    domain: Arc<AmbientBox>,
    depth_flag: Option<u32>,
) -> Result<(GridDensity, Option<Formula>), CliError> {
    let depth = depth_flag
        .or(g.depth)
        .ok_or_else(|| CliError::Spec("grid needs a depth (grid.depth or --depth)".into()))?;
    match (&g.formula, &g.values, &g.cells) {
        (Some(text), None, None) => {
            let expr = Arc::new(Expr::parse(text, domain.dim())?);
            let offset = g
                .offset
                .as_ref()
                .map(|o| o.0.clone())
                .unwrap_or_else(|| rat(1, 2));
            let failed = std::cell::RefCell::new(None);
            let density = GridDensity::sample(domain, depth, &offset, &|p| {
                let v = expr.eval(p);
                if v.is_none() {
                    failed.borrow_mut().get_or_insert_with(|| p.to_vec());
                }
                v.unwrap_or_else(|| Rational::from_integer(0.into()))
            });
            if let Some(p) = failed.into_inner() {
                return Err(CliError::Spec(format!(
                    "grid.formula divides by zero at {p:?}"
                )));
            }
            let density = density?;
            let formula_expr = expr.clone();
            let formula = Formula::new(move |p| {
                formula_expr
                    .eval(p)
                    .unwrap_or_else(|| Rational::from_integer(0.into()))
            });
            Ok((density, Some(formula)))
        }
        (None, Some(values), None) => Ok((
            GridDensity::new(domain, depth, untexts(values.clone()))?,
            None,
        )),
        (None, None, Some(cells)) => {
            let value = g
                .value
                .as_ref()
                .map(|v| v.0.clone())
                .unwrap_or_else(|| Rational::from_integer(1.into()));
            let cells = DyadicCellUnion::from_coords(domain, depth, cells)?;
            Ok((GridDensity::indicator(&cells, value)?, None))
        }
        _ => Err(CliError::Spec(
            "grid needs exactly one of formula, values, cells".into(),
        )),
    }
}
