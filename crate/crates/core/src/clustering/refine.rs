//! Clustering a density through a monotone sequence of grid approximations.

use std::sync::Arc;

use crate::density::{DensityModel, GridDensity};
use crate::error::{Error, Result};
use crate::forest::{isomonotone_limit, Forest};
use crate::geometry::AmbientBox;
use crate::number::{to_f64, Rational};
use crate::separation::SeparationRelation;

use super::adapted::{is_adapted_grid, AdaptednessReport};
use super::grid::cluster_density_grid;

/// Grid depths of the approximating sequence and the in-cell sample offset.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub depths: Vec<u32>,
    pub offset: Rational,
}

#[derive(Clone, Debug)]
pub struct RefinementReport {
    pub schedule: Schedule,
    /// The density sampled at the finest depth, standing in for `P`.
    pub reference: GridDensity,
    /// `Q_n`: lower envelopes of `reference` at each scheduled depth.
    pub approximations: Vec<GridDensity>,
    pub forests: Vec<Forest>,
    pub adaptedness: Vec<AdaptednessReport>,
    pub limit: Forest,
    /// `P(X) - Q_last(X)`.
    pub residual: Rational,
}

/// Samples `f` at the finest scheduled depth, takes lower envelopes at every
/// depth, clusters each one and checks monotonicity, adaptedness and the
/// isomonotone limit of the clusterings.
pub fn refine_and_cluster(
    domain: Arc<AmbientBox>,
    f: &dyn Fn(&[Rational]) -> Rational,
    schedule: &Schedule,
    rel: &SeparationRelation,
) -> Result<RefinementReport> {
    let Some(&finest) = schedule.depths.last() else {
        return Err(Error::MonotonicityViolation {
            index: 0,
            detail: "empty schedule".into(),
        });
    };
    if let Some(k) = schedule.depths.windows(2).position(|w| w[0] >= w[1]) {
        return Err(Error::MonotonicityViolation {
            index: k + 1,
            detail: "depths must increase".into(),
        });
    }
    let reference = GridDensity::sample(domain, finest, &schedule.offset, f)?;
    let mut approximations = Vec::new();
    let mut forests = Vec::new();
    let mut adaptedness = Vec::new();
    for (index, &depth) in schedule.depths.iter().enumerate() {
        let q = reference.coarsened_min(depth)?;
        if let Some(prev) = approximations.last() {
            if !GridDensity::le(prev, &q) {
                return Err(Error::MonotonicityViolation {
                    index,
                    detail: format!("Q at depth {depth} drops below its predecessor"),
                });
            }
        }
        let report = is_adapted_grid(&q, &reference, rel)?;
        if let Some(why) = report.failure() {
            return Err(Error::AdaptednessViolation {
                index,
                detail: why.into(),
            });
        }
        forests.push(cluster_density_grid(&q, rel)?.forest);
        adaptedness.push(report);
        approximations.push(q);
    }
    let limit = isomonotone_limit(&forests)?;
    let residual = reference.mass() - approximations.last().expect("nonempty").mass();
    Ok(RefinementReport {
        schedule: schedule.clone(),
        reference,
        approximations,
        forests,
        adaptedness,
        limit,
        residual,
    })
}

/// Matches the limits of two refinement runs node for node, up to `P`-null
/// differences within a tolerance of the coarser run's sampling error.
pub fn uniqueness_check(
    a: &RefinementReport,
    b: &RefinementReport,
    p: &DensityModel,
) -> Option<Vec<usize>> {
    let coarse = a
        .schedule
        .depths
        .last()
        .min(b.schedule.depths.last())
        .copied()
        .unwrap_or(0);
    let domain = a.reference.domain();
    let h = (0..domain.dim())
        .map(|i| to_f64(&domain.side(i)))
        .fold(0.0, f64::max)
        / 2f64.powi(coarse as i32);
    let sup = to_f64(&a.reference.max()).max(to_f64(&b.reference.max()));
    a.limit.equal_mod_p(&b.limit, p, Some(4.0 * h * sup))
}
