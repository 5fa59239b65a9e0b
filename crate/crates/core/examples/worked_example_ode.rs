//! The rigid example Im w = h(|z|^2): psi from h, and the Segre ODE checked
//! at a Levi-nondegenerate base point.

use lis_germ::jet::{Alphabet, Gauss, Jet};
use lis_germ::segre::{example_psi, ode_residual, psi_residual};

fn main() -> lis_germ::Result<()> {
    let xa = Alphabet::plain(&["xi"])?;
    for lit in ["1/2*xi^2", "1/2*xi^2 + xi^3"] {
        let h = Jet::parse(lit, &xa, 8)?;
        let p = example_psi(&h, 8)?;
        println!("h = {lit}");
        println!("  Psi(r) = {}", p.psi_r);
        match &p.psi_u {
            Some(u) => println!("  psi(u) = {u}"),
            None => println!("  psi is not a power series in u"),
        }
        println!("  residual: {}", psi_residual(&h, &p, 8)?);
    }
    let h = Jet::parse("1/2*xi^2", &xa, 6)?;
    let psi = example_psi(&h, 6)?.psi_u.expect("even Psi");
    let (phi, res) = ode_residual(&h, &psi, &Gauss::from_int(1), 6)?;
    println!("Phi at (1, i/2) = {}", phi.entry(0, 0));
    println!("z^2 Phi - 2i psi(z w'/2i) = {res}");
    Ok(())
}
