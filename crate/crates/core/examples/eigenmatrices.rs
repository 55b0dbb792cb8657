//! First and second eigenmatrices of K_{2,3} and of the pentagon.

use cc_lab::builders::{from_bipartite_graph, from_graph, BipartiteGraph, Graph};
use cc_lab::parameters::{check_identities, check_pq_identity, eigenmatrices, scheme_eigenmatrices};
use cc_lab::spectral::build_spectral_basis;
use cc_lab::{Matrix, Tolerance};

fn show(name: &str, m: &Matrix) {
    println!("{name}:");
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(|x| format!("{x:9.5}")).collect();
        println!("  {}", row.join(" "));
    }
}

fn main() -> cc_lab::Result<()> {
    let tol = Tolerance::default();
    let edges = (0..2).flat_map(|u| (0..3).map(move |v| (u, v))).collect();
    let bc = from_bipartite_graph(&BipartiteGraph::new(2, 3, edges)?)?;
    let sb = build_spectral_basis(&bc, tol)?;
    let es = eigenmatrices(&bc, &sb, tol)?;
    show("P^beta", &es.p_beta);
    show("P^gamma", &es.p_gamma);
    show("P^beta-gamma", &es.p_bg);
    show("Q^beta-gamma", &es.q_bg);
    println!("valencies of N: {:?}, multiplicities {:?}", es.k_bg, es.m_beta);
    println!("{}", check_pq_identity(&es, tol));
    println!("{}", check_identities(&es, &bc, &sb, tol));

    let c5 = from_graph(&Graph::new(5, (0..5).map(|i| (i, (i + 1) % 5)).collect())?)?;
    let se = scheme_eigenmatrices(&c5, tol)?;
    show("pentagon P", &se.p);
    show("pentagon Q", &se.q);
    Ok(())
}
