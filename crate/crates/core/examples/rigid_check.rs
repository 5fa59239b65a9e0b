//! w-independence of Φ for a rigid germ, and its failure for a non-rigid one.

use lis_germ::segre::rigid_phi_test;
use lis_germ::structure::StructureGerm;

fn main() -> lis_germ::Result<()> {
    for lit in [
        "z1*zb1 + z1^2*zb1^2 + t1^2",
        "z1*zb1 + z1^2*zb1*s + z1*zb1^2*s + t1^2",
    ] {
        let g = StructureGerm::from_literal(1, 1, 6, lit)?;
        match rigid_phi_test(&g, None) {
            Ok(v) => println!(
                "{lit}: analytic-consistent {} (offending {:?})",
                v.analytic_consistent, v.offending
            ),
            Err(e) => println!("{lit}: {e}"),
        }
    }
    Ok(())
}
