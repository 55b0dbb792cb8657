//! Intersection numbers of the Fano configuration from the eigenmatrices,
//! compared with direct counting.

use cc_lab::builders::{from_design, DesignMode, IncidenceStructure};
use cc_lab::parameters::eigenmatrices;
use cc_lab::spectral::build_spectral_basis;
use cc_lab::structureconsts::{intersection_numbers, intersection_oracle, Side, DEFAULT_INT_TOL};
use cc_lab::Tolerance;

fn main() -> cc_lab::Result<()> {
    let lines = vec![
        vec![0, 1, 2],
        vec![0, 3, 4],
        vec![0, 5, 6],
        vec![1, 3, 5],
        vec![1, 4, 6],
        vec![2, 3, 6],
        vec![2, 4, 5],
    ];
    let bc = from_design(&IncidenceStructure::new(7, lines)?, DesignMode::Auto)?;
    let sb = build_spectral_basis(&bc, Tolerance::default())?;
    let es = eigenmatrices(&bc, &sb, Tolerance::default())?;
    let table = intersection_numbers(&bc, &es, DEFAULT_INT_TOL);
    let oracle = intersection_oracle(&bc)?;

    for (name, side) in [("xi", Side::Beta), ("sigma", Side::Gamma)] {
        let t = table.side(side);
        println!("{name}:");
        for (a, b, c, v) in t.cells().filter(|c| c.3 != 0.0) {
            println!("  {:<16} {v}", t.describe(a, b, c));
        }
    }
    println!("largest distance from an integer before rounding: {:e}", table.residual);
    match table.first_disagreement(&oracle) {
        None => println!("formula agrees with counting"),
        Some(d) => println!("first disagreement {d:?}"),
    }
    Ok(())
}
