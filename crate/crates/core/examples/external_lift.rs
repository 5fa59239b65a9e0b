//! External CR lift of a positive germ and the block relation between the
//! two Levi forms.

use lis_germ::marson::{external_levi, external_lift};
use lis_germ::structure::StructureGerm;

fn main() -> lis_germ::Result<()> {
    let g = StructureGerm::from_literal(1, 1, 5, "z1*zb1 + t1^2 + s*t1^2")?;
    let lift = external_lift(&g)?;
    println!("lifted defining function: {}", lift.defining);
    let e = external_levi(&lift);
    println!("source Levi:\n{}", e.source_levi.matrix);
    println!("lift Levi:\n{}", e.levi.matrix);
    println!(
        "relation holds: {}, strictly pseudoconvex: {}",
        e.relation_holds, e.strictly_pseudoconvex
    );
    Ok(())
}
