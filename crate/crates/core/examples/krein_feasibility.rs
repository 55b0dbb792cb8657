//! Krein parameters of the Heawood graph and the three feasibility
//! conditions, followed by a hand-made table that violates the minor
//! condition.

use cc_lab::builders::{from_bipartite_graph, BipartiteGraph};
use cc_lab::parameters::eigenmatrices;
use cc_lab::spectral::build_spectral_basis;
use cc_lab::structureconsts::{krein_feasibility, krein_parameters, Cube, KreinTable};
use cc_lab::Tolerance;

fn main() -> cc_lab::Result<()> {
    let tol = Tolerance::default();
    let lines = [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]];
    let edges = lines.iter().enumerate().flat_map(|(b, l)| l.iter().map(move |&p| (p, b))).collect();
    let bc = from_bipartite_graph(&BipartiteGraph::new(7, 7, edges)?)?;
    let sb = build_spectral_basis(&bc, tol)?;
    let es = eigenmatrices(&bc, &sb, tol)?;
    let kt = krein_parameters(&sb, &es, 7, 7, tol);
    println!("formula against Schur projection: {:e}", kt.residuals.max());
    let verdicts = krein_feasibility(&kt, tol);
    let worst = verdicts.iter().min_by(|a, b| a.margin.total_cmp(&b.margin)).expect("nonempty");
    println!(
        "{} verdicts, {} pass, smallest margin {:e} ({:?} at {},{},{})",
        verdicts.len(),
        verdicts.iter().filter(|v| v.passed).count(),
        worst.margin,
        worst.condition,
        worst.i,
        worst.j,
        worst.h
    );

    let one = |x: f64| Cube::from_nested(&[vec![vec![x]]]);
    let bad = KreinTable::new(one(1.0)?, one(2.0)?, one(1.0)?)?;
    for v in krein_feasibility(&bad, tol).iter().filter(|v| !v.passed) {
        println!("synthetic table fails {:?} with margin {}", v.condition, v.margin);
    }
    Ok(())
}
