#![allow(dead_code)]

use std::path::PathBuf;

use cc_lab::bipartite::BipartiteConfig;
use cc_lab::builders::from_bipartite_graph;
use cc_lab::cli::{load, run_with, Loaded, Source};
use cc_lab::relations::CoherentConfig;
use serde_json::{json, Value};

/// Two-fibre inputs used by the axiom, spectral and parameter suites.
pub const BIPARTITE: [&str; 7] = [
    "k23.bgr",
    "k13.bgr",
    "p3.bgr",
    "heawood.bgr",
    "fano.design.json",
    "pair-design.design.json",
    "rook3.design.json",
];

pub const SCHEMES: [&str; 2] = ["c5.ccjson", "petersen.ccjson"];

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn loaded(name: &str) -> Loaded {
    load(&data(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn bipartite(name: &str) -> BipartiteConfig {
    match loaded(name).source {
        Source::Design(d) => d.config,
        Source::Graph(g) => from_bipartite_graph(&g).unwrap(),
        Source::Config(cc) => BipartiteConfig::from_config(&cc).unwrap(),
    }
}

pub fn config(name: &str) -> CoherentConfig {
    match loaded(name).source {
        Source::Config(cc) => cc,
        _ => bipartite(name).assemble(),
    }
}

/// Runs the command line in-process: exit code, stdout, stderr.
pub fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("cc-lab").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

pub fn cli_json(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let (code, out, err) = cli(&full);
    let value = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{args:?}: {e}\n{out}{err}"));
    (code, value)
}

/// `.ccjson` document for a configuration.
pub fn to_ccjson(cc: &CoherentConfig) -> Value {
    let relations: Vec<Value> = cc
        .relations()
        .iter()
        .map(|r| {
            let m = &r.matrix;
            let rows: Vec<Vec<u8>> = (0..m.rows()).map(|i| m.row(i).iter().map(|&x| x as u8).collect()).collect();
            json!({"source": r.id.source, "target": r.id.target, "index": r.id.index, "matrix": rows})
        })
        .collect();
    json!({"fibres": cc.fibres().sizes(), "relations": relations})
}
