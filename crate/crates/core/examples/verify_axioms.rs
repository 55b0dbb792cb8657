//! Builds the distance partition of K_{2,3}, checks the coherence axioms and
//! the bipartite conditions, then breaks one entry and shows the witness.

use cc_lab::builders::{from_bipartite_graph, BipartiteGraph};
use cc_lab::relations::CoherentConfig;

fn main() -> cc_lab::Result<()> {
    let edges = (0..2).flat_map(|u| (0..3).map(move |v| (u, v))).collect();
    let bc = from_bipartite_graph(&BipartiteGraph::new(2, 3, edges)?)?;
    let cc = bc.assemble();
    println!("type {}", cc.type_of());
    println!("{}", cc.verify_axioms()?);
    println!("{}", bc.verify_bcc()?);

    let mut rels = cc.relations().to_vec();
    let last = rels.len() - 1;
    rels[last].matrix.set(0, 1, 0.0);
    let broken = CoherentConfig::new(cc.fibres().sizes().to_vec(), rels)?;
    println!("after clearing entry (0,1) of {}:", cc.relations()[last].id);
    println!("{}", broken.verify_axioms()?);
    Ok(())
}
