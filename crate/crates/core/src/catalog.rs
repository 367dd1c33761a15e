//! Named example densities and mixtures.

use std::sync::Arc;

use crate::density::{DensityModel1D, GridDensity};
use crate::error::{Error, Result};
use crate::geometry::{AmbientBox, Point, Polyline};
use crate::mixture::{DimComponent, Formula, MixtureMeasure};
use crate::number::{from_f64_dyadic, int, rat, Rational};

/// Segment count of the sampled curves.
pub const CURVE_SEGMENTS: usize = 20;

/// Names accepted by [`line_density`].
pub const LINE_DENSITIES: &[&str] = &[
    "twin-peaks",
    "factory",
    "merlon",
    "camel",
    "m",
    "tent",
    "uniform",
];

/// Two peaks of height 1/3 at 1/3 and 2/3 over a valley of height 1/6.
pub fn twin_peaks() -> DensityModel1D {
    DensityModel1D::continuous(&[
        (int(0), int(0)),
        (rat(1, 3), rat(1, 3)),
        (rat(1, 2), rat(1, 6)),
        (rat(2, 3), rat(1, 3)),
        (int(1), int(0)),
    ])
    .expect("valid density")
}

/// `1 − x` on `[0, 1/2)` and `1` on `[1/2, 1]`.
pub fn factory() -> DensityModel1D {
    DensityModel1D::new(
        vec![int(0), rat(1, 2), int(1)],
        vec![(int(1), rat(1, 2)), (int(1), int(1))],
        None,
    )
    .expect("valid density")
}

/// `1` on the outer thirds, `1/2` in between.
pub fn merlon() -> DensityModel1D {
    DensityModel1D::step(
        vec![int(0), rat(1, 3), rat(2, 3), int(1)],
        vec![int(1), rat(1, 2), int(1)],
    )
    .expect("valid density")
}

/// Two humps of height 1 on a base rising from and falling to 0.
pub fn camel() -> DensityModel1D {
    DensityModel1D::continuous(&[
        (int(0), int(0)),
        (rat(1, 5), rat(1, 2)),
        (rat(7, 20), int(1)),
        (rat(1, 2), rat(1, 2)),
        (rat(13, 20), int(1)),
        (rat(4, 5), rat(1, 2)),
        (int(1), int(0)),
    ])
    .expect("valid density")
}

/// A V shape: `1` at both ends, `1/2` in the middle.
pub fn m_shape() -> DensityModel1D {
    DensityModel1D::continuous(&[(int(0), int(1)), (rat(1, 2), rat(1, 2)), (int(1), int(1))])
        .expect("valid density")
}

/// Two unit tents vanishing exactly at 0, 1/2 and 1.
pub fn tent() -> DensityModel1D {
    DensityModel1D::continuous(&[
        (int(0), int(0)),
        (rat(1, 4), int(1)),
        (rat(1, 2), int(0)),
        (rat(3, 4), int(1)),
        (int(1), int(0)),
    ])
    .expect("valid density")
}

pub fn uniform() -> DensityModel1D {
    DensityModel1D::step(vec![int(0), int(1)], vec![int(1)]).expect("valid density")
}

pub fn line_density(name: &str) -> Result<DensityModel1D> {
    Ok(match name {
        "twin-peaks" => twin_peaks(),
        "factory" => factory(),
        "merlon" => merlon(),
        "camel" => camel(),
        "m" => m_shape(),
        "tent" => tent(),
        "uniform" => uniform(),
        other => {
            return Err(Error::Parse(format!(
                "unknown density {other:?}; known: {}",
                LINE_DENSITIES.join(", ")
            )))
        }
    })
}

/// `xy + 1`.
pub fn saddle(p: &[Rational]) -> Rational {
    &p[0] * &p[1] + int(1)
}

/// `[−1, 1]²`.
pub fn saddle_box() -> Arc<AmbientBox> {
    Arc::new(AmbientBox::cube(2, int(-1), int(1)).expect("valid box"))
}

/// The saddle sampled at cell centers.
pub fn saddle_grid(depth: u32) -> GridDensity {
    GridDensity::sample(saddle_box(), depth, &rat(1, 2), &saddle).expect("positive density")
}

/// Vertices of `t ↦ (s·b^{2t−2}, −s·b^{−2t})` at `t = k/n`, kept exactly on
/// the hyperbola `xy = −b^{−2}` with the ends pinned exactly.
fn hyperbola_vertices(base: i64, sign: i64, n: usize) -> Vec<Point> {
    let c = rat(-1, base * base);
    (0..=n)
        .map(|k| {
            let x = if k == 0 {
                rat(sign, base * base)
            } else if k == n {
                int(sign)
            } else {
                let t = k as f64 / n as f64;
                from_f64_dyadic(sign as f64 * (base as f64).powf(2.0 * t - 2.0), 24)
            };
            let y = &c / &x;
            vec![x, y]
        })
        .collect()
}

/// `t ↦ (−3^{2t−2}, 3^{−2t})`, on the level line `xy = −1/9` of the saddle.
pub fn curve_g1() -> Polyline {
    Polyline::full(hyperbola_vertices(3, -1, CURVE_SEGMENTS)).expect("valid polyline")
}

/// `t ↦ (2^{2t−2}, −2^{−2t})`, on the level line `xy = −1/4` of the saddle.
pub fn curve_g2() -> Polyline {
    Polyline::full(hyperbola_vertices(2, 1, CURVE_SEGMENTS)).expect("valid polyline")
}

/// `[0,1] × {0}`, parameterized by `x`.
pub fn merlon_segment() -> Polyline {
    Polyline::full(vec![vec![int(0), int(0)], vec![int(1), int(0)]]).expect("valid polyline")
}

/// `δ₀ + 2δ₁ + δ₂` plus the tent density on `[0,1]`.
pub fn atoms_mixture() -> MixtureMeasure {
    let atoms = DimComponent::atoms(
        vec![vec![int(0)], vec![int(1)], vec![int(2)]],
        vec![int(1), int(2), int(1)],
    )
    .expect("valid atoms");
    MixtureMeasure::new(vec![atoms, DimComponent::Line(tent())]).expect("valid mixture")
}

/// The three curve densities (Merlon, Camel, M) in the plane.
pub fn curve_components() -> Vec<DimComponent> {
    vec![
        DimComponent::curve(merlon_segment(), merlon()).expect("valid curve"),
        DimComponent::curve(curve_g1(), camel()).expect("valid curve"),
        DimComponent::curve(curve_g2(), m_shape()).expect("valid curve"),
    ]
}

/// The curve densities plus the saddle sampled at `depth`.
pub fn curves_saddle_mixture(depth: u32) -> MixtureMeasure {
    let mut comps = curve_components();
    comps.push(DimComponent::grid(
        saddle_grid(depth),
        Some(Formula::new(saddle)),
    ));
    MixtureMeasure::new(comps).expect("valid mixture")
}

/// A closed convex planar piece of an indicator support.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Square {
        lo: [Rational; 2],
        hi: [Rational; 2],
    },
    Disc {
        center: [Rational; 2],
        radius_sq: Rational,
    },
    Diamond {
        center: [Rational; 2],
        radius: Rational,
    },
}

impl Shape {
    pub fn contains(&self, p: &[Rational]) -> bool {
        match self {
            Shape::Square { lo, hi } => (0..2).all(|k| lo[k] <= p[k] && p[k] <= hi[k]),
            Shape::Disc { center, radius_sq } => {
                let dx = &p[0] - &center[0];
                let dy = &p[1] - &center[1];
                &dx * &dx + &dy * &dy <= *radius_sq
            }
            Shape::Diamond { center, radius } => {
                use num_traits::Signed;
                (&p[0] - &center[0]).abs() + (&p[1] - &center[1]).abs() <= *radius
            }
        }
    }
}

fn square(x0: Rational, y0: Rational, x1: Rational, y1: Rational) -> Shape {
    Shape::Square {
        lo: [x0, y0],
        hi: [x1, y1],
    }
}

fn disc(cx: i64, cy: Rational, r2: i64) -> Shape {
    Shape::Disc {
        center: [int(cx), cy],
        radius_sq: int(r2),
    }
}

/// The indicator supports on `[−2,2]²`, each a union of convex pieces.
pub fn indicator_shapes() -> Vec<(&'static str, Vec<Shape>)> {
    vec![
        (
            "corner-squares",
            vec![
                square(int(-1), int(-1), int(0), int(0)),
                square(int(0), int(0), int(1), int(1)),
            ],
        ),
        (
            "corner-diamonds",
            vec![
                Shape::Diamond {
                    center: [int(-1), int(0)],
                    radius: int(1),
                },
                Shape::Diamond {
                    center: [int(1), int(0)],
                    radius: int(1),
                },
            ],
        ),
        (
            "diagonal-discs",
            vec![
                Shape::Disc {
                    center: [int(-1), int(-1)],
                    radius_sq: int(2),
                },
                Shape::Disc {
                    center: [int(1), int(1)],
                    radius_sq: int(2),
                },
            ],
        ),
        (
            "touching-discs",
            vec![disc(-1, int(0), 1), disc(1, int(0), 1)],
        ),
        (
            "separated-squares",
            vec![
                square(int(-1), int(-1), rat(-1, 4), rat(-1, 4)),
                square(rat(1, 4), rat(1, 4), int(1), int(1)),
            ],
        ),
        (
            "overlapping-discs",
            vec![
                Shape::Disc {
                    center: [int(-1), int(0)],
                    radius_sq: int(1),
                },
                Shape::Disc {
                    center: [rat(7, 10), int(0)],
                    radius_sq: int(1),
                },
            ],
        ),
    ]
}

/// `[−2,2]²`.
pub fn indicator_box() -> Arc<AmbientBox> {
    Arc::new(AmbientBox::cube(2, int(-2), int(2)).expect("valid box"))
}

/// Inner rasterization: the cells whose closure lies in a single piece.
pub fn rasterize(
    domain: Arc<AmbientBox>,
    depth: u32,
    shapes: &[Shape],
) -> Result<crate::geometry::DyadicCellUnion> {
    let grid = crate::geometry::Grid::new(domain.clone(), depth)?;
    let cells: Vec<u64> = (0..grid.cell_count())
        .filter(|&c| {
            let coords = grid.coords(c);
            let lo = grid.cell_lo(&coords);
            let corners: Vec<Point> = (0..4u8)
                .map(|m| {
                    (0..2)
                        .map(|k| {
                            if m >> k & 1 == 1 {
                                &lo[k] + grid.cell_side(k)
                            } else {
                                lo[k].clone()
                            }
                        })
                        .collect()
                })
                .collect();
            shapes.iter().any(|s| corners.iter().all(|p| s.contains(p)))
        })
        .collect();
    crate::geometry::DyadicCellUnion::new(domain, depth, cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curves_lie_on_level_lines() {
        for v in curve_g1().vertices() {
            assert_eq!(saddle(v), rat(8, 9));
        }
        for v in curve_g2().vertices() {
            assert_eq!(saddle(v), rat(3, 4));
        }
    }

    #[test]
    fn indicator_roots_match_the_square_base() {
        let rel = crate::separation::SeparationRelation::Disjointness;
        let roots: Vec<usize> = indicator_shapes()
            .iter()
            .map(|(_, shapes)| {
                let cells = rasterize(indicator_box(), 5, shapes).unwrap();
                let g = GridDensity::indicator(&cells, int(1)).unwrap();
                crate::clustering::cluster_density_grid(&g, &rel)
                    .unwrap()
                    .forest
                    .len()
            })
            .collect();
        assert_eq!(roots, vec![1, 2, 1, 2, 2, 1]);
    }

    #[test]
    fn densities_have_unit_scale() {
        assert_eq!(merlon().sup(), int(1));
        assert_eq!(camel().sup(), int(1));
        assert_eq!(m_shape().sup(), int(1));
        assert_eq!(tent().value(&rat(1, 2)), int(0));
    }
}
