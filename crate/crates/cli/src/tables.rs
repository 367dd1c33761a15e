//! Machine-readable versions of the example tables, checked against goldens.

use std::path::{Path, PathBuf};

use hclust_core::catalog;
use hclust_core::clustering::{cluster_density_1d, cluster_density_grid};
use hclust_core::density::GridDensity;
use hclust_core::number::int;
use hclust_core::separation::SeparationRelation;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DENSITY_FILE: &str = "table-densities.json";
pub const INDICATOR_FILE: &str = "table-indicators.json";
pub const INDICATOR_DEPTH: u32 = 5;

const DENSITY_GOLDEN: &str = include_str!("../golden/table-densities.json");
const INDICATOR_GOLDEN: &str = include_str!("../golden/table-indicators.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub density: String,
    pub separation: String,
    pub nodes: usize,
    pub regions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicatorRow {
    pub shape: String,
    pub base: String,
    pub depth: u32,
    pub roots: usize,
}

pub fn density_table() -> Result<Vec<DensityRow>, CliError> {
    let mut rows = Vec::new();
    for name in ["merlon", "camel", "m", "factory"] {
        let f = catalog::line_density(name)?;
        for sep in ["disjoint", "tau:1/10", "tau:1"] {
            let rel: SeparationRelation = sep.parse()?;
            let forest = cluster_density_1d(&f, &rel)?;
            rows.push(DensityRow {
                density: name.into(),
                separation: sep.into(),
                nodes: forest.len(),
                regions: forest.nodes().iter().map(|r| r.to_string()).collect(),
            });
        }
    }
    Ok(rows)
}

pub fn indicator_table() -> Result<Vec<IndicatorRow>, CliError> {
    let rel = SeparationRelation::Disjointness;
    let mut rows = Vec::new();
    for (name, shapes) in catalog::indicator_shapes() {
        let cells = catalog::rasterize(catalog::indicator_box(), INDICATOR_DEPTH, &shapes)?;
        let g = GridDensity::indicator(&cells, int(1))?;
        rows.push(IndicatorRow {
            shape: name.into(),
            base: "dyadic squares".into(),
            depth: INDICATOR_DEPTH,
            roots: cluster_density_grid(&g, &rel)?.forest.len(),
        });
    }
    Ok(rows)
}

fn diff<T: PartialEq + Serialize>(
    table: &str,
    got: &[T],
    expected: &[T],
    key: impl Fn(&T) -> String,
) -> Vec<String> {
    let mut out = Vec::new();
    if got.len() != expected.len() {
        out.push(format!(
            "{table}: {} rows, golden has {}",
            got.len(),
            expected.len()
        ));
    }
    for (g, e) in got.iter().zip(expected) {
        if g != e {
            out.push(format!(
                "{table} [{}]: got {}, golden {}",
                key(e),
                serde_json::to_string(g).expect("row serializes"),
                serde_json::to_string(e).expect("row serializes")
            ));
        }
    }
    out
}

fn read_golden(dir: Option<&Path>, file: &str, builtin: &str) -> Result<String, CliError> {
    match dir {
        Some(d) => {
            let path = d.join(file);
            std::fs::read_to_string(&path).map_err(|e| CliError::io(path, e))
        }
        None => Ok(builtin.to_string()),
    }
}

fn write(dir: &Path, file: &str, text: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(file);
    std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

/// Writes both tables to `out_dir` and diffs them against the goldens
/// (from `golden_dir`, or the copies built into the binary).
pub fn reproduce(out_dir: &Path, golden_dir: Option<&Path>) -> Result<Vec<PathBuf>, CliError> {
    let densities = density_table()?;
    let indicators = indicator_table()?;
    let dj = serde_json::to_string_pretty(&densities).expect("rows serialize") + "\n";
    let ij = serde_json::to_string_pretty(&indicators).expect("rows serialize") + "\n";
    let written = vec![
        write(out_dir, DENSITY_FILE, &dj)?,
        write(out_dir, INDICATOR_FILE, &ij)?,
    ];

    let parse = |file: &str, text: String| -> Result<serde_json::Value, CliError> {
        serde_json::from_str(&text).map_err(|e| CliError::Golden(format!("{file}: {e}")))
    };
    let golden_d: Vec<DensityRow> = serde_json::from_value(parse(
        DENSITY_FILE,
        read_golden(golden_dir, DENSITY_FILE, DENSITY_GOLDEN)?,
    )?)
    .map_err(|e| CliError::Golden(format!("{DENSITY_FILE}: {e}")))?;
    let golden_i: Vec<IndicatorRow> = serde_json::from_value(parse(
        INDICATOR_FILE,
        read_golden(golden_dir, INDICATOR_FILE, INDICATOR_GOLDEN)?,
    )?)
    .map_err(|e| CliError::Golden(format!("{INDICATOR_FILE}: {e}")))?;
    let mut mismatches = diff("densities", &densities, &golden_d, |r| {
        format!("{} x {}", r.density, r.separation)
    });
    mismatches.extend(diff("indicators", &indicators, &golden_i, |r| {
        r.shape.clone()
    }));
    if mismatches.is_empty() {
        Ok(written)
    } else {
        Err(CliError::Golden(mismatches.join("\n")))
    }
}
