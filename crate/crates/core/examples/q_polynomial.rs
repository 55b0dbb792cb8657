//! Searches for a Q-polynomial ordering of the idempotents in each block of
//! the rook 3x3 configuration.

use cc_lab::builders::{from_design, DesignMode, IncidenceStructure};
use cc_lab::parameters::eigenmatrices;
use cc_lab::polynomial::{detect_q_polynomial, QPolyOutcome};
use cc_lab::spectral::build_spectral_basis;
use cc_lab::Tolerance;

fn main() -> cc_lab::Result<()> {
    let tol = Tolerance::default();
    let mut lines: Vec<Vec<usize>> = (0..3).map(|r| (0..3).map(|c| 3 * r + c).collect()).collect();
    lines.extend((0..3).map(|c| (0..3).map(|r| 3 * r + c).collect::<Vec<_>>()));
    let bc = from_design(&IncidenceStructure::new(9, lines)?, DesignMode::Auto)?;
    let sb = build_spectral_basis(&bc, tol)?;
    let es = eigenmatrices(&bc, &sb, tol)?;
    for block in [(0, 0), (0, 1), (1, 1)] {
        match detect_q_polynomial(&es, block, tol)? {
            QPolyOutcome::Certificate(c) => {
                let polys: Vec<String> = c.nubar.iter().map(ToString::to_string).collect();
                println!("block {block:?}: ordering {:?}, nubar [{}]", c.ordering, polys.join("; "));
            }
            QPolyOutcome::Refuted { .. } => println!("block {block:?}: no Q-polynomial ordering"),
        }
    }
    Ok(())
}
