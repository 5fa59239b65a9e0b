#![allow(dead_code)]

use std::sync::Arc;

use lis_germ::central::CentralHypersurface;
use lis_germ::jet::{Alphabet, Gauss, Jet, Monomial};
use lis_germ::linalg::GaussMatrix;
use lis_germ::structure::{germ_alphabet, StructureGerm};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rat(rng: &mut ChaCha8Rng) -> (i64, i64) {
    (rng.gen_range(-5..=5), rng.gen_range(1..=4))
}

pub fn nonzero_rat(rng: &mut ChaCha8Rng) -> (i64, i64) {
    loop {
        let r = rat(rng);
        if r.0 != 0 {
            return r;
        }
    }
}

pub fn gauss(rng: &mut ChaCha8Rng) -> Gauss {
    Gauss::complex(rat(rng), rat(rng))
}

fn random_monomial(rng: &mut ChaCha8Rng, nvars: usize, deg: u32) -> Monomial {
    let mut e = vec![0u32; nvars];
    for _ in 0..deg {
        e[rng.gen_range(0..nvars)] += 1;
    }
    Monomial::from_exponents(&e)
}

/// Real polynomial `P + conj(P)` with `terms` random monomials of degree
/// `lo..=hi`.
pub fn random_real(
    rng: &mut ChaCha8Rng,
    a: &Arc<Alphabet>,
    order: u32,
    lo: u32,
    hi: u32,
    terms: usize,
) -> Jet {
    let p = Jet::from_terms(
        a,
        order,
        (0..terms).map(|_| {
            let d = rng.gen_range(lo..=hi);
            (random_monomial(rng, a.len(), d), gauss(rng))
        }),
    );
    &p + &p.conj()
}

/// `phi` over the germ alphabet with degree 2..=4 and a generic quadratic
/// part; `None` when the draw is Levi-degenerate or has a singular t-block.
pub fn random_germ(
    rng: &mut ChaCha8Rng,
    nu: usize,
    np: usize,
    order: u32,
) -> Option<StructureGerm> {
    let a = germ_alphabet(nu, np);
    let phi = random_real(rng, &a, order, 2, 4, 6 + 2 * (nu + np));
    let mut diag = Vec::new();
    for j in 0..nu {
        let mut e = vec![0u32; a.len()];
        e[j] = 1;
        e[nu + j] = 1;
        diag.push((e, Gauss::complex(nonzero_rat(rng), (0, 1))));
    }
    for l in 0..np {
        let mut e = vec![0u32; a.len()];
        e[2 * nu + 1 + l] = 2;
        diag.push((e, Gauss::complex(nonzero_rat(rng), (0, 1))));
    }
    let phi = &phi + &Jet::from_exponents(&a, order, diag);
    let g = StructureGerm::new(nu, np, order, phi).ok()?;
    let v = g.vars();
    let zz = hessian(g.phi(), &v.z, &v.zb);
    let tt = hessian(g.phi(), &v.t, &v.t);
    (zz.determinant() != Gauss::from_int(0) && tt.determinant() != Gauss::from_int(0)).then_some(g)
}

/// Levi-nondegenerate central hypersurface over `(z, zb, s)`.
pub fn random_central(rng: &mut ChaCha8Rng, nu: usize, order: u32) -> CentralHypersurface {
    loop {
        let a = germ_alphabet(nu, 0);
        let mut phi = random_real(rng, &a, order, 2, 4, 4 + 2 * nu);
        let diag: Vec<_> = (0..nu)
            .map(|j| {
                let mut e = vec![0u32; a.len()];
                e[j] = 1;
                e[nu + j] = 1;
                (e, Gauss::complex(nonzero_rat(rng), (0, 1)))
            })
            .collect();
        phi = &phi + &Jet::from_exponents(&a, order, diag);
        let zz = hessian(
            &phi,
            &(0..nu).collect::<Vec<_>>(),
            &(nu..2 * nu).collect::<Vec<_>>(),
        );
        if zz.determinant() != Gauss::from_int(0) {
            return CentralHypersurface::new(nu, phi).expect("real central jet");
        }
    }
}

/// Second derivatives at 0 read straight off the coefficients.
pub fn hessian(phi: &Jet, rows: &[usize], cols: &[usize]) -> GaussMatrix {
    let n = phi.alphabet().len();
    GaussMatrix::from_fn(rows.len(), cols.len(), |i, j| {
        let mut e = vec![0u32; n];
        e[rows[i]] += 1;
        e[cols[j]] += 1;
        let c = phi.coeff_of(&e);
        if rows[i] == cols[j] {
            c.mul_int(2)
        } else {
            c
        }
    })
}

/// Signature of a real symmetric matrix of size at most 2, from its
/// determinant and trace.
pub fn small_signature(m: &GaussMatrix) -> (usize, usize) {
    let sign = |g: &Gauss| {
        let (re, _) = g.to_f64_pair();
        if re > 0.0 {
            1
        } else if re < 0.0 {
            -1
        } else {
            0
        }
    };
    match m.rows() {
        0 => (0, 0),
        1 => match sign(&m.row(0)[0]) {
            1 => (1, 0),
            -1 => (0, 1),
            _ => (0, 0),
        },
        2 => {
            let det = m.determinant();
            let tr = &m.row(0)[0] + &m.row(1)[1];
            match (sign(&det), sign(&tr)) {
                (-1, _) => (1, 1),
                (1, 1) => (2, 0),
                (1, -1) => (0, 2),
                _ => panic!("degenerate"),
            }
        }
        _ => unimplemented!("oracle covers n' <= 2"),
    }
}
