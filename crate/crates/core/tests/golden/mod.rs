//! Runs the CLI pipeline on the golden input and compares every output with
//! the files in `tests/golden/`. Set `KNOWSHARE_BLESS=1` to rewrite them.

use std::fs;
use std::path::{Path, PathBuf};

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn cli(args: &[&str]) -> Vec<u8> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = knowshare::cli::run_cli(std::iter::once("knowshare").chain(args.iter().copied()), &mut out, &mut err);
    assert_eq!(code, 0, "{args:?}: {}", String::from_utf8_lossy(&err));
    assert!(err.is_empty());
    out
}

fn compare(name: &str, actual: &[u8]) {
    let path = golden_dir().join(name);
    if std::env::var_os("KNOWSHARE_BLESS").is_some() {
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(
        expected == actual,
        "{name} differs from golden file:\n--- expected\n{}\n--- actual\n{}",
        String::from_utf8_lossy(&expected),
        String::from_utf8_lossy(actual)
    );
}

/// Returns the number of outputs compared.
pub fn run_pipeline_and_compare() -> usize {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();
    let input = golden_dir().join("incidence.csv");

    cli(&["ingest", "--input", input.to_str().unwrap(), "--format", "csv", "--out", &p("kb.json")]);
    cli(&["graph", "--kb", &p("kb.json"), "--mode", "intersection", "--threshold", "0", "--out", &p("graph.json")]);
    let stats = cli(&["stats", "--graph", &p("graph.json")]);
    let csv = cli(&["export", "--graph", &p("graph.json"), "--format", "csv"]);
    assert_eq!(csv, b"source,target,weight\na1,a2,1\n");
    let edge_json = cli(&["export", "--graph", &p("graph.json"), "--format", "edge-json"]);
    let dot = cli(&["export", "--graph", &p("graph.json"), "--format", "dot"]);
    let sim = [
        "simulate", "--graph", &p("graph.json"), "--model", "si", "--seeds", "a1", "--transmission", "unit", "--rounds", "10",
        "--rng-seed", "1",
    ];
    let estimates = cli(&[&sim[..], &["--trials", "4", "--out", &p("trace.json")]].concat());
    cli(&[&sim[..], &["--out", &p("trace.csv"), "--format", "csv"]].concat());

    let outputs: Vec<(&str, Vec<u8>)> = vec![
        ("kb.json", fs::read(p("kb.json")).unwrap()),
        ("graph.json", fs::read(p("graph.json")).unwrap()),
        ("stats.json", stats),
        ("graph.csv", csv),
        ("graph.edge.json", edge_json),
        ("graph.dot", dot),
        ("trace.json", fs::read(p("trace.json")).unwrap()),
        ("trace.csv", fs::read(p("trace.csv")).unwrap()),
        ("estimates.json", estimates),
    ];
    for (name, bytes) in &outputs {
        compare(name, bytes);
    }
    outputs.len()
}
