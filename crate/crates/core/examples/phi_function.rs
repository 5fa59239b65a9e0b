//! Φ-function of a non-quadric central hypersurface, by elimination and by
//! bordered determinants.

use lis_germ::central::CentralHypersurface;
use lis_germ::segre::{complexify_defining, phi_determinant, phi_elimination};

fn main() -> lis_germ::Result<()> {
    let cs =
        CentralHypersurface::from_literal(1, 6, "z1*zb1 + z1^2*zb1^2 + z1^2*zb1*s + z1*zb1^2*s")?;
    let cd = complexify_defining(&cs)?;
    println!("rho = {}", cd.rho);
    let a = phi_elimination(&cd)?;
    let b = phi_determinant(&cd)?;
    println!("Phi = {}", a.entry(0, 0));
    println!(
        "routes agree to order {}: {}",
        a.reliable_order,
        a.agrees_with(&b)
    );
    Ok(())
}
