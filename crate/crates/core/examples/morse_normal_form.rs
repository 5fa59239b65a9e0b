//! Morse normal form with an indefinite t-block that needs a shear pivot.

use lis_germ::central::{morse_normalize, t_block_signature};
use lis_germ::structure::StructureGerm;

fn main() -> lis_germ::Result<()> {
    let g = StructureGerm::from_literal(1, 2, 5, "z1*zb1 + t1*t2 + t1^3 + s*t2^2")?;
    let nf = morse_normalize(&g)?;
    println!("phi0 = {}", nf.base);
    for (l, (c, gl)) in nf.quad.iter().zip(&nf.g).enumerate() {
        println!("c{} = {c}, G{} = {gl}", l + 1, l + 1);
    }
    println!(
        "m = {}, t-Hessian signature {:?}",
        nf.signature_m,
        t_block_signature(&g)
    );
    println!(
        "reconstruction residual: {}",
        nf.reconstruction_residual(&g)
    );
    Ok(())
}
