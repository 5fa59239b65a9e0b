//! Central manifold of a germ whose t-block is coupled to z and s.

use lis_germ::central::central_manifold;
use lis_germ::structure::StructureGerm;

fn main() -> lis_germ::Result<()> {
    let g = StructureGerm::from_literal(1, 1, 5, "z1*zb1 + t1^2 + i*z1*t1 - i*zb1*t1 + s*t1")?;
    let chart = central_manifold(&g)?;
    println!("t = F(z, zb, s) = {}", chart.f[0]);
    println!("phi on the central manifold: {}", chart.sigma_phi);
    println!("straightened phi: {}", chart.straightened.phi());
    Ok(())
}
