//! Acceptance run: one PASS/FAIL line per criterion with its runtime.

#[allow(dead_code)]
mod laws;

use std::collections::BTreeSet;
use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use hclust_core::catalog;
use hclust_core::clustering::{
    cluster_density_1d, cluster_density_grid, is_adapted, refine_and_cluster, uniqueness_check,
    Schedule,
};
use hclust_core::density::{DensityModel, GridDensity};
use hclust_core::forest::Forest;
use hclust_core::geometry::{AmbientBox, Region};
use hclust_core::measure::SimpleMeasure;
use hclust_core::mixture::cluster_mixture;
use hclust_core::number::{int, pow2, rat, to_f64};
use hclust_core::separation::SeparationRelation;
use hclust_core::Rational;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn nodes(f: &Forest) -> BTreeSet<String> {
    f.nodes().iter().map(|r| r.to_string()).collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn tau(p: i64, q: i64) -> SeparationRelation {
    SeparationRelation::tau(rat(p, q)).unwrap()
}

fn golden_1d() -> Outcome {
    let disjoint = SeparationRelation::Disjointness;
    let cases: Vec<(&str, SeparationRelation, BTreeSet<String>)> = vec![
        (
            "twin-peaks",
            disjoint.clone(),
            set(&["(0,1)", "(1/6,1/2)", "(1/2,5/6)"]),
        ),
        (
            "twin-peaks",
            tau(1, 6),
            set(&["(0,1)", "(1/4,5/12)", "(7/12,3/4)"]),
        ),
        ("twin-peaks", tau(1, 2), set(&["(0,1)"])),
        (
            "factory",
            disjoint.clone(),
            set(&["[0,1]", "[0,1/2)", "[1/2,1]"]),
        ),
    ];
    for (name, rel, expected) in cases {
        let got = nodes(
            &cluster_density_1d(&catalog::line_density(name).unwrap(), &rel)
                .map_err(|e| e.to_string())?,
        );
        ensure(got == expected, || format!("{name} under {rel}: {got:?}"))?;
    }
    for name in ["merlon", "camel", "m"] {
        let f = catalog::line_density(name).unwrap();
        let d = cluster_density_1d(&f, &disjoint)
            .map_err(|e| e.to_string())?
            .len();
        let t = cluster_density_1d(&f, &tau(1, 1))
            .map_err(|e| e.to_string())?
            .len();
        ensure(d == 3 && t == 1, || {
            format!("{name}: {d} nodes disjoint, {t} under tau 1")
        })?;
    }
    Ok("twin peaks, factory, merlon/camel/m exact".into())
}

/// Cells of a depth-6 child, as integer coordinates on the 64 x 64 grid.
fn cell_coords(r: &Region) -> Vec<Vec<u64>> {
    match r {
        Region::Cells(c) => c.coords_list(),
        other => panic!("expected cells, got {other}"),
    }
}

fn saddle_grid() -> Outcome {
    let g = catalog::saddle_grid(6);
    let out =
        cluster_density_grid(&g, &SeparationRelation::Disjointness).map_err(|e| e.to_string())?;
    let f = &out.forest;
    let roots = f.roots();
    ensure(roots.len() == 1 && f.len() == 3, || format!("forest {f}"))?;
    let h = pow2(-5);
    let split = &int(1) + &h * &h / int(4);
    ensure(
        out.merges.len() == 1 && out.merges[0].level == split,
        || format!("merges {:?}", out.merges),
    )?;
    let half = 32u64;
    let mut worst = 0.0f64;
    let mut quadrants = BTreeSet::new();
    for child in f.children(roots[0]) {
        let coords = cell_coords(f.node(child));
        let low = coords[0][0] < half;
        quadrants.insert(if low { "(-,-)" } else { "(+,+)" });
        let in_quadrant = |c: &Vec<u64>| (c[0] < half) == low && (c[1] < half) == low;
        let inside = coords.iter().filter(|c| in_quadrant(c)).count() as u64;
        let outside = coords.len() as u64 - inside;
        let missing = half * half - inside;
        let mass = (outside + missing) as f64 * to_f64(&(&h * &h));
        worst = worst.max(mass);
    }
    ensure(quadrants.len() == 2, || {
        format!("children in {quadrants:?}")
    })?;
    ensure(worst <= 4.0 * to_f64(&h), || {
        format!("symmetric difference {worst}")
    })?;
    Ok(format!(
        "split at 1 + 2^-12, symmetric difference {worst:.6} <= 4h = 0.125"
    ))
}

fn indicators() -> Outcome {
    let rel = SeparationRelation::Disjointness;
    let mut roots = Vec::new();
    for (name, shapes) in catalog::indicator_shapes() {
        let cells =
            catalog::rasterize(catalog::indicator_box(), 5, &shapes).map_err(|e| e.to_string())?;
        let g = GridDensity::indicator(&cells, int(1)).map_err(|e| e.to_string())?;
        roots.push((
            name,
            cluster_density_grid(&g, &rel)
                .map_err(|e| e.to_string())?
                .forest
                .len(),
        ));
    }
    let expected = [
        ("corner-squares", 1),
        ("corner-diamonds", 2),
        ("diagonal-discs", 1),
        ("touching-discs", 2),
        ("separated-squares", 2),
        ("overlapping-discs", 1),
    ];
    ensure(roots == expected, || format!("{roots:?}"))?;
    Ok("corner squares 1, separated squares 2, overlapping discs 1".into())
}

fn adaptedness() -> Outcome {
    let p = DensityModel::Line(catalog::uniform());
    let rel = SeparationRelation::Disjointness;
    let indicator = |parts: &[(Rational, Rational)]| {
        let terms = parts
            .iter()
            .filter(|(a, b)| a < b)
            .map(|(a, b)| (Region::closed(a.clone(), b.clone()).unwrap(), b - a))
            .collect();
        SimpleMeasure::validate_representation(terms, rel.clone()).unwrap()
    };
    for n in [2, 4, 8, 16] {
        let q = indicator(&[(rat(1, n), int(1) - rat(1, n))]);
        let report = is_adapted(&q, &p).map_err(|e| e.to_string())?;
        ensure(report.is_adapted(), || {
            format!("n = {n}: {:?}", report.failure())
        })?;
    }
    for n in [3, 4, 8, 16] {
        let q = indicator(&[(int(0), rat(1, 2) - rat(1, n)), (rat(1, 2), int(1))]);
        let report = is_adapted(&q, &p).map_err(|e| e.to_string())?;
        ensure(report.failure() == Some("not grounded"), || {
            format!("split n = {n}: {:?}", report.failure())
        })?;
    }
    Ok("shrinking indicators adapted, split indicators not grounded".into())
}

fn uniqueness() -> Outcome {
    let rel = SeparationRelation::Disjointness;
    let peaks = catalog::twin_peaks();
    let unit = Arc::new(AmbientBox::cube(1, int(0), int(1)).unwrap());
    let eval = |x: &[Rational]| peaks.value(&x[0]);
    let run =
        |domain: Arc<AmbientBox>, f: &dyn Fn(&[Rational]) -> Rational, depths: Vec<u32>, offset| {
            refine_and_cluster(domain, f, &Schedule { depths, offset }, &rel)
                .map_err(|e| e.to_string())
        };
    let a = run(unit.clone(), &eval, vec![4, 6, 8], rat(1, 2))?;
    let b = run(unit, &eval, vec![5, 7, 9], rat(1, 4))?;
    let p = DensityModel::Line(peaks.clone());
    ensure(
        a.limit.len() == 3 && uniqueness_check(&a, &b, &p).is_some(),
        || format!("twin peaks: {} vs {}", a.limit, b.limit),
    )?;
    let a = run(
        catalog::saddle_box(),
        &catalog::saddle,
        vec![4, 5, 6],
        rat(1, 2),
    )?;
    let b = run(
        catalog::saddle_box(),
        &catalog::saddle,
        vec![5, 6, 7],
        rat(1, 4),
    )?;
    let p = DensityModel::Grid(b.reference.clone());
    ensure(
        a.limit.len() == 3 && uniqueness_check(&a, &b, &p).is_some(),
        || format!("saddle: {} vs {}", a.limit, b.limit),
    )?;
    Ok("twin peaks [4,6,8]/[5,7,9], saddle [4,5,6]/[5,6,7] equal mod P".into())
}

fn mixtures() -> Outcome {
    let rel = SeparationRelation::Disjointness;
    let f = cluster_mixture(&catalog::atoms_mixture(), &rel).map_err(|e| e.to_string())?;
    ensure(
        nodes(&f) == set(&["{0}", "{1}", "{2}", "(0,1/2)", "(1/2,1)"]),
        || format!("atoms: {f}"),
    )?;
    let f = cluster_mixture(&catalog::curves_saddle_mixture(6), &rel).map_err(|e| e.to_string())?;
    ensure(f.len() == 12, || format!("{} nodes", f.len()))?;
    let saddle = cluster_density_grid(&catalog::saddle_grid(6), &rel)
        .map_err(|e| e.to_string())?
        .forest;
    let cells: Vec<&Region> = f.nodes().iter().filter(|r| r.dim_class() == 2).collect();
    ensure(
        cells.len() == 3 && cells.iter().all(|r| saddle.index_of(r).is_some()),
        || "2-dimensional part differs".into(),
    )?;
    let mut curves: Vec<BTreeSet<String>> = Vec::new();
    for root in f
        .roots()
        .into_iter()
        .filter(|&i| f.node(i).dim_class() == 1)
    {
        let mut family = vec![root];
        family.extend(f.children(root));
        ensure(family.len() == 3, || {
            format!(
                "curve root {} has {} children",
                f.node(root),
                family.len() - 1
            )
        })?;
        curves.push(
            family
                .iter()
                .map(|&i| match f.node(i) {
                    Region::Polyline(l) => l.params().to_string(),
                    other => other.to_string(),
                })
                .collect(),
        );
    }
    let expected = [
        set(&["[0,1]", "[0,1/3]", "[2/3,1]"]),
        set(&["(0,1)", "(1/5,1/2)", "(1/2,4/5)"]),
        set(&["[0,1]", "[0,1/2)", "(1/2,1]"]),
    ];
    ensure(
        expected.iter().all(|e| curves.contains(e)) && curves.len() == 3,
        || format!("curve parameters {curves:?}"),
    )?;
    Ok("atoms 5 nodes, curves + saddle 12 nodes (3 + 3 + 3 + 3)".into())
}

fn properties() -> Outcome {
    let failed: Vec<String> = laws::SUITES
        .iter()
        .filter_map(|(name, suite)| suite(laws::CASES).err().map(|e| format!("{name}: {e}")))
        .collect();
    ensure(failed.is_empty(), || failed.join("; "))?;
    Ok(format!(
        "{} suites x {} cases",
        laws::SUITES.len(),
        laws::CASES
    ))
}

#[test]
fn acceptance() {
    let criteria: [(&str, Duration, fn() -> Outcome); 7] = [
        ("golden 1D clusterings", Duration::from_secs(1), golden_1d),
        (
            "saddle grid clustering",
            Duration::from_secs(5),
            saddle_grid,
        ),
        ("indicator table", Duration::from_secs(5), indicators),
        (
            "adaptedness discrimination",
            Duration::from_secs(1),
            adaptedness,
        ),
        ("empirical uniqueness", Duration::from_secs(30), uniqueness),
        ("mixture examples", Duration::from_secs(10), mixtures),
        ("property suites", Duration::from_secs(600), properties),
    ];
    let mut failures = 0;
    for (k, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (verdict, detail) = match (&outcome, elapsed <= *budget) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over the {budget:?} budget")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if verdict == "FAIL" {
            failures += 1;
        }
        // Written to the raw stream so the lines survive test output capture.
        let line = format!(
            "criterion {}: {verdict} {name} ({:.3}s): {detail}\n",
            k + 1,
            elapsed.as_secs_f64()
        );
        std::io::stderr().write_all(line.as_bytes()).unwrap();
    }
    assert_eq!(failures, 0, "{failures} criteria failed");
}
