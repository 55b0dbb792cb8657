//! Decides P-polynomiality and classifies the Petersen graph (one fibre) and
//! the Heawood graph (two fibres), then fits the distance-biregular
//! polynomial sequences of the Heawood graph.

use cc_lab::builders::{from_bipartite_graph, from_graph, BipartiteGraph, Graph};
use cc_lab::polynomial::{classify, dbrg_sequences, detect_p_polynomial, DbrgOutcome, PPolyOutcome, RowSpectrum};
use cc_lab::relations::CoherentConfig;
use cc_lab::Tolerance;

fn run(name: &str, cc: &CoherentConfig, tol: Tolerance) -> cc_lab::Result<()> {
    let rs = RowSpectrum::compute(cc, 0, tol)?;
    match detect_p_polynomial(&rs, tol) {
        PPolyOutcome::Certificate(cert) => {
            let order: Vec<String> = cert.ordering.iter().map(ToString::to_string).collect();
            println!("{name}: ordering {}", order.join(" "));
            for (h, nu) in cert.nu.iter().enumerate() {
                println!("  nu{h}(x) = {nu}");
            }
            let c = classify(cc, &cert)?;
            println!("  {} (rebuild agrees: {})", c.verdict, c.rebuild_agrees);
        }
        PPolyOutcome::Refuted { candidates, .. } => println!("{name}: not P-polynomial ({} candidates)", candidates.len()),
    }
    Ok(())
}

fn main() -> cc_lab::Result<()> {
    let tol = Tolerance::default();
    let mut edges: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
    edges.extend((0..5).map(|i| (5 + i, 5 + (i + 2) % 5)));
    edges.extend((0..5).map(|i| (i, i + 5)));
    run("petersen", &from_graph(&Graph::new(10, edges)?)?, tol)?;

    let lines = [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]];
    let incidences = lines.iter().enumerate().flat_map(|(b, l)| l.iter().map(move |&p| (p, b))).collect();
    let heawood = BipartiteGraph::new(7, 7, incidences)?;
    run("heawood", &from_bipartite_graph(&heawood)?.assemble(), tol)?;
    if let DbrgOutcome::Sequences(s) = dbrg_sequences(&heawood, tol)? {
        for (k, p) in s.i_beta.iter().enumerate() {
            println!("  I^beta_{k}(x) = {p}");
        }
    }
    Ok(())
}
