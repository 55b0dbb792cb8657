//! All 3-subsets of a 6-set form a 1-design whose blocks meet in 0, 1 or 2
//! points. Split by those sizes, the block side has four relations but the
//! products of the cross relations span fewer, so C6 fails.

use cc_lab::builders::{from_design, DesignMode, IncidenceStructure};

fn main() -> cc_lab::Result<()> {
    let blocks: Vec<Vec<usize>> = (0u32..64)
        .filter(|m| m.count_ones() == 3)
        .map(|m| (0..6).filter(|i| m & (1 << i) != 0).collect())
        .collect();
    let bc = from_design(&IncidenceStructure::new(6, blocks)?, DesignMode::GramLevels)?;
    println!("type {}", bc.assemble().type_of());
    let span = bc.hobart_diagnostic()?;
    for (side, s) in [("beta", span.beta), ("gamma", span.gamma)] {
        println!(
            "{side}: cross products span {} ({} with I), within-fibre relations {}, deficit {}",
            s.without_identity,
            s.with_identity,
            s.required,
            s.deficit()
        );
    }
    println!("{}", bc.verify_bcc()?);
    Ok(())
}
