//! The spectral idempotents L_r, R_r, D_r of the Fano configuration and the
//! checks on them.

use cc_lab::builders::{from_design, DesignMode, IncidenceStructure};
use cc_lab::spectral::{build_spectral_basis, verify_dual_basis, verify_suda_conditions};
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
    let tol = Tolerance::default();
    let sb = build_spectral_basis(&bc, tol)?;
    println!("{} basis elements for {} relations", sb.len(), bc.relation_count());
    println!("eigenvalues of N1 N1^T: {:?}", sb.labels_beta);
    println!("multiplicities beta {:?}, gamma {:?}", sb.multiplicities_beta(), sb.multiplicities_gamma());
    println!("theta {:?}", sb.theta);
    println!("{}", verify_suda_conditions(&sb, &bc, tol)?);
    println!("{}", verify_dual_basis(&sb, &bc, tol));
    Ok(())
}
