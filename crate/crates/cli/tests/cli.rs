use std::path::Path;
use std::process::{Command, Output};

use hclust_core::forest::Forest;
use serde_json::Value;

const TWIN_PEAKS: &str = "separation = \"disjoint\"\n[density]\nname = \"twin-peaks\"\n";

const SADDLE: &str = r#"
[box]
lo = ["-1", "-1"]
hi = ["1", "1"]
[grid]
depth = 6
formula = "x*y + 1"
"#;

const SPLIT: &str = r#"
[density]
name = "uniform"
[simple]
terms = [
  { region = { kind = "interval", lo = "0", hi = "1/4", lo_closed = true, hi_closed = true }, weight = "1/8" },
  { region = { kind = "interval", lo = "3/4", hi = "1", lo_closed = true, hi_closed = true }, weight = "1/8" },
]
"#;

fn hclust(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hclust"))
        .args(args)
        .env_remove("HCLUST_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn report(dir: &Path, spec: &str, extra: &[&str]) -> (Value, String) {
    let path = write(dir, "spec.toml", spec);
    let mut args = vec!["cluster", path.as_str()];
    args.extend_from_slice(extra);
    let out = hclust(&args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    (serde_json::from_str(&text).unwrap(), text)
}

#[test]
fn twin_peaks_gives_three_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let (v, _) = report(dir.path(), TWIN_PEAKS, &[]);
    let nodes = v["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 3);
    assert_eq!(v["provenance"]["engine"], "line");
    assert_eq!(nodes[0]["mass"], "7/36");
    assert_eq!(nodes[1]["birth"], "1/6");
}

#[test]
fn saddle_splits_at_depth_six() {
    let dir = tempfile::tempdir().unwrap();
    let (v, _) = report(dir.path(), SADDLE, &["--depth", "6"]);
    let nodes = v["forest"]["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 3);
    assert_eq!(nodes[0]["death"], "4097/4096");
    assert_eq!(nodes[1]["birth"], "4097/4096");
    assert_eq!(v["provenance"]["depth"], 6);
}

#[test]
fn zero_denominator_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "bad.toml",
        "[density]\nknots = [\"0\", \"1/0\"]\nvalues = [\"1\"]\n",
    );
    let out = hclust(&["cluster", &spec]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
    assert!(err.contains("zero denominator"), "{err}");
}

#[test]
fn formula_division_by_zero_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "s.toml",
        &SADDLE.replace("x*y + 1", "1/(x - x)"),
    );
    let out = hclust(&["cluster", &spec]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("divides by zero"));
}

#[test]
fn missing_spec_file_exits_one() {
    let out = hclust(&["cluster", "/nonexistent/spec.toml"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (_, a) = report(dir.path(), SADDLE, &[]);
    let (_, b) = report(dir.path(), SADDLE, &[]);
    assert_eq!(a, b);
}

#[test]
fn forest_json_round_trips_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    for spec in [TWIN_PEAKS, SADDLE] {
        let (v, _) = report(dir.path(), spec, &[]);
        let emitted = serde_json::to_string_pretty(&v["forest"]).unwrap();
        let once = Forest::from_json(&emitted).unwrap().to_json();
        let twice = Forest::from_json(&once).unwrap().to_json();
        assert_eq!(once, twice);
        let reparsed: Value = serde_json::from_str(&once).unwrap();
        assert_eq!(reparsed, v["forest"]);
    }
}

#[test]
fn dot_and_json_share_the_node_set() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "tp.toml", TWIN_PEAKS);
    let json = dir.path().join("out/f.json");
    let dot = dir.path().join("out/f.dot");
    let out = hclust(&[
        "cluster",
        &spec,
        "--out-json",
        json.to_str().unwrap(),
        "--out-dot",
        dot.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    let dot = std::fs::read_to_string(dot).unwrap();
    let nodes = v["forest"]["nodes"].as_array().unwrap();
    assert_eq!(dot.matches("[label=").count(), nodes.len());
    for n in nodes {
        if let Some(p) = n["parent"].as_u64() {
            assert!(dot.contains(&format!("n{} -> n{p};", n["id"])));
        }
    }
}

#[test]
fn out_dir_env_names_outputs_after_the_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "peaks.toml", TWIN_PEAKS);
    let out = Command::new(env!("CARGO_BIN_EXE_hclust"))
        .args(["cluster", &spec])
        .env("HCLUST_OUT_DIR", dir.path().join("o"))
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("o/peaks.json").exists());
    assert!(dir.path().join("o/peaks.dot").exists());
}

#[test]
fn separation_flag_overrides_the_spec() {
    let dir = tempfile::tempdir().unwrap();
    let (v, _) = report(dir.path(), TWIN_PEAKS, &["--separation", "tau:1"]);
    assert_eq!(v["nodes"].as_array().unwrap().len(), 1);
    assert_eq!(v["provenance"]["separation"], "tau:1/1");
}

#[test]
fn split_indicator_is_not_grounded() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "split.toml", SPLIT);
    let out = hclust(&["check-adapted", &spec]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not grounded"));
    let v: Value = serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(v["adapted"], false);
    assert_eq!(v["pairs"][0]["kinship"], "1/1");
}

#[test]
fn density_can_come_from_a_second_spec() {
    let dir = tempfile::tempdir().unwrap();
    let q = write(
        dir.path(),
        "q.toml",
        &SPLIT.replace("[density]\nname = \"uniform\"\n", ""),
    );
    let p = write(dir.path(), "p.toml", "[density]\nname = \"uniform\"\n");
    let out = hclust(&["check-adapted", &q]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("spec-error"));
    let out = hclust(&["check-adapted", &q, &p]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not grounded"));
}

#[test]
fn approx_reports_each_depth() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "s.toml", SADDLE);
    let out = hclust(&["approx", &spec, "--depths", "4,5,6"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(v["node_counts"], serde_json::json!([3, 3, 3]));
    assert_eq!(v["residual"], "0/1");
    let out = hclust(&["approx", &spec, "--depths", "5,4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reproduce_tables_matches_the_goldens() {
    let dir = tempfile::tempdir().unwrap();
    let out = hclust(&[
        "reproduce-tables",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("table-densities.json")).unwrap(),
    )
    .unwrap();
    let merlon = &v[0];
    assert_eq!(merlon["separation"], "disjoint");
    assert_eq!(
        merlon["regions"],
        serde_json::json!(["[0,1]", "[0,1/3]", "[2/3,1]"])
    );
    let counts: Vec<u64> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["nodes"].as_u64().unwrap())
        .collect();
    assert_eq!(counts, vec![3, 3, 1, 3, 3, 1, 3, 3, 1, 3, 3, 1]);
}

#[test]
fn reproduce_tables_lists_mismatching_cells() {
    let dir = tempfile::tempdir().unwrap();
    let golden = dir.path().join("golden");
    std::fs::create_dir_all(&golden).unwrap();
    let densities =
        include_str!("../golden/table-densities.json").replacen("\"nodes\": 3", "\"nodes\": 4", 1);
    std::fs::write(golden.join("table-densities.json"), densities).unwrap();
    std::fs::write(
        golden.join("table-indicators.json"),
        include_str!("../golden/table-indicators.json"),
    )
    .unwrap();
    let out = hclust(&[
        "reproduce-tables",
        "--out-dir",
        dir.path().to_str().unwrap(),
        "--golden-dir",
        golden.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("golden-mismatch"), "{err}");
    assert!(err.contains("merlon x disjoint"), "{err}");
}
