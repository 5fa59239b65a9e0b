//! Lift of the quadric scaling z -> c z, w -> 4w with |c|^2 = 4.

use lis_germ::central::CentralHypersurface;
use lis_germ::equivalence::{
    central_map_alphabet, lift_equivalence, verify_lift, CentralEquivalence,
};
use lis_germ::jet::{Gauss, Jet};
use lis_germ::structure::StructureGerm;

fn main() -> lis_germ::Result<()> {
    let k = 5;
    let q = CentralHypersurface::from_literal(1, k, "z1*zb1")?;
    let germ = StructureGerm::from_literal(1, 1, k, "z1*zb1 + t1^2")?;
    let ma = central_map_alphabet(1);
    let c = Gauss::complex((6, 5), (8, 5));
    let f = vec![Jet::var(&ma, k, 0).scale(&c)];
    let g = Jet::parse("4*w", &ma, k)?;
    let ce = CentralEquivalence::new(f, g, q.clone(), q)?;
    let le = lift_equivalence(&ce, &germ, &germ)?;
    println!("lambda = {}", le.lambda);
    println!("Z = {}, S = {}, T = {}", le.z[0], le.s, le.t[0]);
    let rep = verify_lift(&le, &ce, &germ, &germ)?;
    println!("verified: {} to order {}", rep.ok, rep.reliable_order);
    Ok(())
}
