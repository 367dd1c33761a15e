//! Randomized algebraic laws shared by the property and acceptance targets.

use std::collections::BTreeSet;
use std::sync::Arc;

use hclust_core::clustering::{
    canonical_simple_measure, cluster_simple, is_adapted, is_adapted_grid, kinship,
};
use hclust_core::density::{DensityModel, DensityModel1D, GridDensity};
use hclust_core::forest::Forest;
use hclust_core::geometry::{AmbientBox, DyadicCellUnion, Region};
use hclust_core::measure::SimpleMeasure;
use hclust_core::number::{int, rat};
use hclust_core::separation::{decompose, SeparationRelation};
use hclust_core::{Rational, Scalar};
use proptest::prelude::*;
use proptest::sample::Index;
use proptest::test_runner::{TestCaseError, TestRunner};

/// Cases per suite.
pub const CASES: u32 = 1000;

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    };
    TestRunner::new(config)
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

/// A nested family: each node occupies part of a slot of its parent.
#[derive(Clone, Debug)]
struct Tree {
    weight: i64,
    span: i64,
    children: Vec<Tree>,
}

fn tree() -> impl Strategy<Value = Tree> {
    let leaf = (1i64..=8, 1i64..=4).prop_map(|(weight, span)| Tree {
        weight,
        span,
        children: vec![],
    });
    leaf.prop_recursive(3, 24, 3, |inner| {
        (1i64..=8, 1i64..=4, prop::collection::vec(inner, 0..=3)).prop_map(
            |(weight, span, children)| Tree {
                weight,
                span,
                children,
            },
        )
    })
}

fn trees() -> impl Strategy<Value = Vec<Tree>> {
    prop::collection::vec(tree(), 1..=3)
}

/// Lays the trees out inside `[a, b]`: the j-th of m trees sits in slot
/// `2j+1` of `2m+1` equal slots, using `span/4` of it.
fn layout(trees: &[Tree], a: &Rational, b: &Rational, out: &mut Vec<(Region, Rational)>) {
    let m = trees.len() as i64;
    let w = (b - a) / int(2 * m + 1);
    for (j, t) in trees.iter().enumerate() {
        let lo = a + &w * int(2 * j as i64 + 1);
        let hi = &lo + &w * rat(t.span, 4);
        out.push((
            Region::closed(lo.clone(), hi.clone()).unwrap(),
            rat(t.weight, 8),
        ));
        layout(&t.children, &lo, &hi, out);
    }
}

fn terms_in(trees: &[Tree], a: Rational, b: Rational) -> Vec<(Region, Rational)> {
    let mut out = Vec::new();
    layout(trees, &a, &b, &mut out);
    out
}

fn measure(terms: Vec<(Region, Rational)>) -> SimpleMeasure {
    SimpleMeasure::validate_representation(terms, SeparationRelation::Disjointness).unwrap()
}

fn node_set(f: &Forest) -> BTreeSet<String> {
    f.nodes().iter().map(|r| r.to_string()).collect()
}

fn exact(s: Scalar) -> Rational {
    s.exact().cloned().expect("exact value")
}

fn relation() -> impl Strategy<Value = SeparationRelation> {
    prop_oneof![
        Just(SeparationRelation::Disjointness),
        (1i64..=8).prop_map(|k| SeparationRelation::tau(rat(k, 16)).unwrap()),
    ]
}

const DEPTH: u32 = 3;
const SIDE: i64 = 8;

fn unit_square() -> Arc<AmbientBox> {
    Arc::new(AmbientBox::cube(2, int(0), int(1)).unwrap())
}

fn cells() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..(SIDE * SIDE) as u64, 1..=6)
}

fn cell_region(cells: &[u64]) -> Region {
    Region::Cells(DyadicCellUnion::new(unit_square(), DEPTH, cells.to_vec()).unwrap())
}

/// Brute force over cell pairs: squared distance in units of the cell side.
fn gap_squared(a: &[u64], b: &[u64]) -> i64 {
    let xy = |c: u64| ((c as i64) % SIDE, (c as i64) / SIDE);
    a.iter()
        .flat_map(|&p| b.iter().map(move |&q| (xy(p), xy(q))))
        .map(|((x1, y1), (x2, y2))| {
            let gx = ((x1 - x2).abs() - 1).max(0);
            let gy = ((y1 - y2).abs() - 1).max(0);
            gx * gx + gy * gy
        })
        .min()
        .unwrap()
}

fn oracle_separated(rel: &SeparationRelation, a: &[u64], b: &[u64]) -> bool {
    let shared_or_touching = a.iter().any(|&p| {
        b.iter().any(|&q| {
            let (p, q) = (p as i64, q as i64);
            (p % SIDE - q % SIDE).abs() <= 1 && (p / SIDE - q / SIDE).abs() <= 1
        })
    });
    match rel {
        SeparationRelation::Disjointness => !shared_or_touching,
        SeparationRelation::Tau(tau) => rat(gap_squared(a, b), SIDE * SIDE) >= tau * tau,
    }
}

fn grouping(groups: Vec<Vec<Region>>) -> BTreeSet<BTreeSet<String>> {
    groups
        .into_iter()
        .map(|g| g.iter().map(|r| r.to_string()).collect())
        .collect()
}

pub const SUITES: &[(&str, fn(u32) -> Result<(), String>)] = &[
    ("structure_is_idempotent", structure_is_idempotent),
    (
        "representation_ignores_term_order",
        representation_ignores_term_order,
    ),
    (
        "simple_measures_are_self_adapted",
        simple_measures_are_self_adapted,
    ),
    ("level_decomposition_holds", level_decomposition_holds),
    (
        "clustering_is_disjoint_additive",
        clustering_is_disjoint_additive,
    ),
    ("clustering_is_base_additive", clustering_is_base_additive),
    (
        "separation_matches_the_cell_oracle",
        separation_matches_the_cell_oracle,
    ),
    ("separation_is_reflexive", separation_is_reflexive),
    ("separation_is_monotone", separation_is_monotone),
    (
        "separation_is_finitely_stable",
        separation_is_finitely_stable,
    ),
    ("decomposition_ignores_order", decomposition_ignores_order),
    (
        "kinship_is_symmetric_and_transitive",
        kinship_is_symmetric_and_transitive,
    ),
    (
        "grid_adaptedness_matches_the_materialized_measure",
        grid_adaptedness_matches_the_materialized_measure,
    ),
];

pub fn structure_is_idempotent(cases: u32) -> Result<(), String> {
    run(cases, trees(), |ts| {
        let regions = terms_in(&ts, int(0), int(1))
            .into_iter()
            .map(|(r, _)| r)
            .collect();
        let f = Forest::from_regions(SeparationRelation::Disjointness, regions).unwrap();
        let s = f.structure();
        prop_assert!(s.is_structured());
        prop_assert_eq!(s.structure(), s);
        Ok(())
    })
}

pub fn representation_ignores_term_order(cases: u32) -> Result<(), String> {
    run(
        cases,
        (
            trees()
                .prop_map(|ts| terms_in(&ts, int(0), int(1)))
                .prop_shuffle()
                .prop_flat_map(|t| (Just(t.clone()), Just(t).prop_shuffle())),
            (0i64..64, 1i64..=64),
        ),
        |(terms, probe)| {
            let (a, b) = terms;
            let (qa, qb) = (measure(a), measure(b));
            prop_assert_eq!(&qa, &qb);
            let lo = rat(probe.0, 64);
            let region = Region::closed(lo.clone(), lo + rat(probe.1, 64)).unwrap();
            prop_assert_eq!(qa.evaluate(&region).unwrap(), qb.evaluate(&region).unwrap());
            Ok(())
        },
    )
}

pub fn simple_measures_are_self_adapted(cases: u32) -> Result<(), String> {
    run(cases, trees(), |ts| {
        let q = measure(terms_in(&ts, int(0), int(1)));
        let p = q.to_density_model().unwrap();
        let report = is_adapted(&q, &p).unwrap();
        prop_assert!(report.is_adapted(), "{:?}", report.failure());
        Ok(())
    })
}

pub fn level_decomposition_holds(cases: u32) -> Result<(), String> {
    run(
        cases,
        (trees(), any::<Index>(), 0i64..64, 1i64..=64),
        |(ts, node, lo, len)| {
            let q = measure(terms_in(&ts, int(0), int(1)));
            let a = q.forest().node(node.index(q.forest().len())).clone();
            let (c, d) = (rat(lo, 64), rat(lo, 64) + rat(len, 64));
            let set = a.line_set().unwrap();
            let part = &set.parts()[0];
            let (ilo, ihi) = (part.lo().max(&c).clone(), part.hi().min(&d).clone());
            let lhs = if ilo < ihi {
                exact(q.evaluate(&Region::closed(ilo, ihi).unwrap()).unwrap())
            } else {
                int(0)
            };
            let b = Region::closed(c, d).unwrap();
            let level = q.level(&a).unwrap().base;
            let rhs = exact(level.evaluate(&b).unwrap())
                + exact(q.below(&a).unwrap().evaluate(&b).unwrap());
            prop_assert_eq!(lhs, rhs);
            Ok(())
        },
    )
}

pub fn clustering_is_disjoint_additive(cases: u32) -> Result<(), String> {
    run(cases, (trees(), trees()), |(left, right)| {
        let t1 = terms_in(&left, int(0), rat(1, 3));
        let t2 = terms_in(&right, rat(2, 3), int(1));
        let c1 = cluster_simple(&measure(t1.clone()));
        let c2 = cluster_simple(&measure(t2.clone()));
        let c = cluster_simple(&measure(t1.into_iter().chain(t2).collect()));
        let expected: BTreeSet<String> = node_set(&c1).union(&node_set(&c2)).cloned().collect();
        prop_assert_eq!(node_set(&c), expected);
        Ok(())
    })
}

pub fn clustering_is_base_additive(cases: u32) -> Result<(), String> {
    run(
        cases,
        (trees(), 1i64..=8, any::<bool>()),
        |(ts, alpha, on_root)| {
            let terms = terms_in(&ts, int(0), int(1));
            let q = measure(terms.clone());
            let roots = q.forest().roots();
            let a = if on_root && roots.len() == 1 {
                q.forest().node(roots[0]).clone()
            } else {
                Region::closed(int(0), int(1)).unwrap()
            };
            let mut with_base = terms;
            with_base.push((a.clone(), rat(alpha, 4)));
            let got = cluster_simple(&measure(with_base));
            let mut regions: Vec<Region> = cluster_simple(&q)
                .nodes()
                .iter()
                .filter(|r| !r.set_eq(&a))
                .cloned()
                .collect();
            regions.push(a);
            let expected = Forest::from_regions(SeparationRelation::Disjointness, regions)
                .unwrap()
                .structure();
            prop_assert_eq!(node_set(&got), node_set(&expected));
            Ok(())
        },
    )
}

pub fn separation_matches_the_cell_oracle(cases: u32) -> Result<(), String> {
    run(cases, (relation(), cells(), cells()), |(rel, a, b)| {
        prop_assert_eq!(
            rel.separated(&cell_region(&a), &cell_region(&b)),
            oracle_separated(&rel, &a, &b)
        );
        prop_assert_eq!(
            rel.separated(&cell_region(&a), &cell_region(&b)),
            rel.separated(&cell_region(&b), &cell_region(&a))
        );
        Ok(())
    })
}

pub fn separation_is_reflexive(cases: u32) -> Result<(), String> {
    run(
        cases,
        (relation(), cells(), 0i64..64, 0i64..=16),
        |(rel, a, lo, len)| {
            prop_assert!(!rel.separated(&cell_region(&a), &cell_region(&a)));
            let i = Region::closed(rat(lo, 64), rat(lo + len, 64)).unwrap();
            prop_assert!(!rel.separated(&i, &i));
            Ok(())
        },
    )
}

pub fn separation_is_monotone(cases: u32) -> Result<(), String> {
    run(
        cases,
        (relation(), cells(), any::<Index>(), cells()),
        |(rel, outer, keep, b)| {
            let inner = &outer[..=keep.index(outer.len())];
            if rel.separated(&cell_region(&outer), &cell_region(&b)) {
                prop_assert!(rel.separated(&cell_region(inner), &cell_region(&b)));
            }
            Ok(())
        },
    )
}

pub fn separation_is_finitely_stable(cases: u32) -> Result<(), String> {
    run(
        cases,
        (relation(), prop::collection::vec(cells(), 1..=4), cells()),
        |(rel, pieces, b)| {
            let mut chain: Vec<u64> = Vec::new();
            let mut all_separated = true;
            for piece in &pieces {
                chain.extend(piece);
                all_separated &= rel.separated(&cell_region(piece), &cell_region(&b));
            }
            if all_separated {
                prop_assert!(rel.separated(&cell_region(&chain), &cell_region(&b)));
            }
            Ok(())
        },
    )
}

pub fn decomposition_ignores_order(cases: u32) -> Result<(), String> {
    run(
        cases,
        (
            relation(),
            prop::collection::vec(cells(), 1..=5)
                .prop_flat_map(|p| (Just(p.clone()), Just(p).prop_shuffle())),
        ),
        |(rel, parts)| {
            let to_regions =
                |ps: &[Vec<u64>]| ps.iter().map(|c| cell_region(c)).collect::<Vec<_>>();
            let (a, b) = parts;
            let groups = decompose(&rel, &to_regions(&a));
            for (i, g) in groups.iter().enumerate() {
                for h in &groups[i + 1..] {
                    prop_assert!(g.iter().all(|x| h.iter().all(|y| rel.separated(x, y))));
                }
            }
            prop_assert_eq!(grouping(groups), grouping(decompose(&rel, &to_regions(&b))));
            Ok(())
        },
    )
}

pub fn kinship_is_symmetric_and_transitive(cases: u32) -> Result<(), String> {
    run(
        cases,
        (
            prop::collection::vec(0i64..=4, 8),
            prop_oneof![
                Just(SeparationRelation::Disjointness),
                (1i64..=3).prop_map(|k| SeparationRelation::tau(rat(k, 8)).unwrap()),
            ],
            prop::collection::vec((0i64..31, 1i64..=4), 3),
        ),
        |(values, rel, boxes)| {
            let knots = (0..=8).map(|k| rat(k, 8)).collect();
            let f = DensityModel1D::step(knots, values.into_iter().map(int).collect()).unwrap();
            let regions: Vec<Region> = boxes
                .iter()
                .map(|&(lo, len)| Region::closed(rat(lo, 32), rat((lo + len).min(32), 32)).unwrap())
                .collect();
            let p = DensityModel::Line(f.clone());
            for r in &regions {
                prop_assume!(exact(p.mass(r).unwrap()) > int(0));
            }
            let kin = |i: usize, j: usize| kinship(&p, &rel, &regions[i], &regions[j]).unwrap();
            let (k01, k10) = (kin(0, 1), kin(1, 0));
            prop_assert_eq!(k01.is_some(), k10.is_some());
            if let (Some(x), Some(y)) = (&k01, &k10) {
                prop_assert_eq!(&x.height, &y.height);
                prop_assert_eq!(x.attained, y.attained);
                prop_assert!(x.support.set_eq(&y.support));
            }
            if k01.is_some() && kin(1, 2).is_some() {
                prop_assert!(kin(0, 2).is_some());
            }
            Ok(())
        },
    )
}

pub fn grid_adaptedness_matches_the_materialized_measure(cases: u32) -> Result<(), String> {
    run(
        cases,
        (
            prop::collection::vec(0i64..=3, 16),
            prop::collection::vec(0i64..=2, 16),
            prop_oneof![
                Just(SeparationRelation::Disjointness),
                Just(SeparationRelation::tau(rat(1, 2)).unwrap())
            ],
        ),
        |(q, extra, rel)| {
            prop_assume!(q.iter().any(|&v| v > 0));
            let domain = unit_square();
            let qg =
                GridDensity::new(domain.clone(), 2, q.iter().map(|&v| int(v)).collect()).unwrap();
            let pg = GridDensity::new(
                domain,
                2,
                q.iter().zip(&extra).map(|(&a, &b)| int(a + b)).collect(),
            )
            .unwrap();
            let fast = is_adapted_grid(&qg, &pg, &rel).unwrap();
            let canonical = canonical_simple_measure(&qg, &rel).unwrap();
            let slow = is_adapted(&canonical, &DensityModel::Grid(pg)).unwrap();
            prop_assert_eq!(fast.failure(), slow.failure());
            Ok(())
        },
    )
}
