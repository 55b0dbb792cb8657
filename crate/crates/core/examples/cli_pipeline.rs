//! Loads an input file the way the command line does and prints its JSON
//! report. Defaults to the bundled Fano design.
//!
//!     cargo run --example cli_pipeline -- data/heawood.bgr

use cc_lab::cli::{load, render, run_pipeline, Settings, Stage};
use cc_lab::structureconsts::DEFAULT_INT_TOL;
use cc_lab::Tolerance;
use std::path::PathBuf;

fn main() -> cc_lab::Result<()> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/fano.design.json"));
    let loaded = load(&path)?;
    let settings = Settings { tol: Tolerance::default(), int_tol: DEFAULT_INT_TOL };
    let report = run_pipeline(&loaded, Stage::Report, settings)?;
    print!("{}", render::json(&report));
    Ok(())
}
