//! Turns incidence structures into two-fibre configurations: the Fano plane,
//! the pairs of a 4-set (quasi-symmetric) and the 3x3 rook lines (strongly
//! regular).

use cc_lab::builders::{from_design_detailed, DesignMode, IncidenceStructure};

fn main() -> cc_lab::Result<()> {
    let fano = vec![
        vec![0, 1, 2],
        vec![0, 3, 4],
        vec![0, 5, 6],
        vec![1, 3, 5],
        vec![1, 4, 6],
        vec![2, 3, 6],
        vec![2, 4, 5],
    ];
    let pairs = (0..4).flat_map(|a| (a + 1..4).map(move |b| vec![a, b])).collect();
    let mut rook: Vec<Vec<usize>> = (0..3).map(|r| (0..3).map(|c| 3 * r + c).collect()).collect();
    rook.extend((0..3).map(|c| (0..3).map(|r| 3 * r + c).collect::<Vec<_>>()));

    for (name, points, blocks) in [("fano", 7, fano), ("pairs of 4", 4, pairs), ("rook 3x3", 9, rook)] {
        let d = IncidenceStructure::new(points, blocks)?;
        let b = from_design_detailed(&d, DesignMode::Auto)?;
        let cc = b.config.assemble();
        println!(
            "{name}: mode {}, type {}, r = {}, k = {}, point values {:?}, block values {:?}, C1-C6 {}",
            b.mode.name(),
            cc.type_of(),
            b.replication,
            b.block_size,
            b.point_values,
            b.block_values,
            if b.config.verify_bcc()?.passed() { "pass" } else { "fail" }
        );
    }
    Ok(())
}
