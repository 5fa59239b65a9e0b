//! The central submanifold `{d phi / dt = 0}`, its straightening and the
//! Morse normal form `phi0(z, zb, s) + sum c_l t_l^2`.

use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{Alphabet, Assignment, Gauss, Jet, Monomial, Var};
use crate::linalg::Signature;
use crate::structure::{germ_alphabet, is_straightened, t_hessian, StructureGerm};

/// Graph `t = F(z, zb, s)` of the central manifold and the data derived from it.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralChart {
    /// Components of `F` over the alphabet `(z, zb, s)`, reliable to `K - 1`.
    pub f: Vec<Jet>,
    /// The germ after `t -> t - F`.
    pub straightened: StructureGerm,
    /// `phi(z, zb, s, F(z, zb, s))` over `(z, zb, s)`.
    pub sigma_phi: Jet,
    pub nu: usize,
}

/// Defining jet `Im w = phi(z, zb, Re w)` of the central CR hypersurface.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralHypersurface {
    pub phi: Jet,
    pub nu: usize,
}

impl CentralHypersurface {
    /// Wraps a real jet over `germ_alphabet(nu, 0)`.
    pub fn new(nu: usize, phi: Jet) -> Result<Self> {
        if **phi.alphabet() != *germ_alphabet(nu, 0) {
            return Err(Error::Mismatch(format!(
                "central jet over {:?}",
                phi.alphabet()
            )));
        }
        if !phi.is_real() {
            return Err(Error::NonReal(phi.to_string()));
        }
        Ok(CentralHypersurface { phi, nu })
    }

    pub fn from_literal(nu: usize, order: u32, phi: &str) -> Result<Self> {
        Self::new(nu, Jet::parse(phi, &germ_alphabet(nu, 0), order)?)
    }

    /// With `nu = 0` the central manifold is a curve and carries no CR
    /// structure worth the name.
    pub fn is_curve(&self) -> bool {
        self.nu == 0
    }

    pub fn order(&self) -> u32 {
        self.phi.order()
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        self.phi.alphabet()
    }

    /// `phi_s == 0`.
    pub fn is_rigid(&self) -> bool {
        !self.phi.contains_var(2 * self.nu)
    }
}

fn check_t_block(g: &StructureGerm) -> Result<()> {
    let h = t_hessian(g);
    let rank = h.rank();
    if rank < g.nprime() {
        return Err(Error::DegenerateTBlock {
            rank,
            size: g.nprime(),
        });
    }
    Ok(())
}

/// Solves `d phi / dt_l (z, zb, s, t) = 0` for `t = F(z, zb, s)`.
pub fn central_manifold(g: &StructureGerm) -> Result<CentralChart> {
    check_t_block(g)?;
    let k = g.order();
    let v = g.vars();
    let sigma_alpha = germ_alphabet(g.nu(), 0);
    if g.nprime() == 0 {
        return Ok(CentralChart {
            f: Vec::new(),
            straightened: g.clone(),
            sigma_phi: g.phi().embed(&sigma_alpha)?,
            nu: g.nu(),
        });
    }
    let eqs: Vec<Jet> = v.t.iter().map(|&t| g.phi().derive(t)).collect();
    let f = crate::jet::implicit_solve(&eqs, &v.t)?;

    // phi_t vanishes on the graph, so the unknown degree-K part of F only
    // enters phi(., F) quadratically
    let mut on_graph = Assignment::identity(g.alphabet(), k);
    for (&t, fl) in v.t.iter().zip(&f) {
        on_graph.set(t, fl.clone().assume_order(k));
    }
    let sigma = g.phi().compose(&on_graph)?;
    let sigma_phi = sigma.embed(&sigma_alpha)?;

    let mut on_graph_low = Assignment::identity(g.alphabet(), k - 1);
    for (&t, fl) in v.t.iter().zip(&f) {
        on_graph_low.set(t, fl.clone());
    }
    for e in &eqs {
        let r = e.compose(&on_graph_low)?;
        if !r.is_zero() {
            return Err(Error::Invariant(format!(
                "phi_t does not vanish on the central manifold: {r}"
            )));
        }
    }
    let straightened = straighten_with(g, &f)?;
    let f = f
        .iter()
        .map(|x| x.embed(&sigma_alpha))
        .collect::<std::result::Result<_, _>>()?;
    Ok(CentralChart {
        f,
        straightened,
        sigma_phi,
        nu: g.nu(),
    })
}

fn straighten_with(g: &StructureGerm, f: &[Jet]) -> Result<StructureGerm> {
    let k = g.order();
    let v = g.vars();
    let mut shift = Assignment::identity(g.alphabet(), k);
    for (&t, fl) in v.t.iter().zip(f) {
        let fl = fl.embed(g.alphabet())?.assume_order(k);
        shift.set(t, &Jet::var(g.alphabet(), k, t) + &fl);
    }
    let phi = g.phi().compose(&shift)?;
    let out = g.with_phi(phi)?;
    if !is_straightened(&out) {
        return Err(Error::Invariant(
            "straightened germ still has phi_t(., 0) != 0".into(),
        ));
    }
    Ok(out)
}

/// Applies `t -> t + F` so that the central manifold becomes `{t = 0}`.
pub fn straighten(g: &StructureGerm, chart: &CentralChart) -> Result<StructureGerm> {
    straighten_with(g, &chart.f)
}

/// The central CR hypersurface `Im w = sigma_phi(z, zb, Re w)`.
pub fn central_cr_hypersurface(chart: &CentralChart) -> Result<CentralHypersurface> {
    CentralHypersurface::new(chart.nu, chart.sigma_phi.clone())
}

/// `phi = base + sum_l c_l G_l^2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MorseNormalForm {
    /// `phi(z, zb, s, 0)`.
    #[serde(serialize_with = "crate::report::ser_jet")]
    pub base: Jet,
    /// Diagonal coefficients `c_l` (nonzero rationals).
    #[serde(serialize_with = "crate::report::ser_gausses")]
    pub quad: Vec<Gauss>,
    /// `G_l(z, zb, s, t)`, reliable to order `K - 1`.
    #[serde(serialize_with = "crate::report::ser_jets")]
    pub g: Vec<Jet>,
    /// Number of positive `c_l`.
    pub signature_m: usize,
}

impl MorseNormalForm {
    /// `L(t) = sum c_l t_l^2` over the germ alphabet.
    pub fn quadratic_form(&self, alphabet: &Arc<Alphabet>, order: u32, t: &[Var]) -> Jet {
        crate::structure::diagonal_quadratic(alphabet, order, t, &self.quad)
    }

    /// `base + L(G) - phi`, zero to order `K` for a correct normal form.
    pub fn reconstruction_residual(&self, g: &StructureGerm) -> Jet {
        let k = g.order();
        let l_of_g =
            self.g
                .iter()
                .zip(&self.quad)
                .fold(Jet::zero(g.alphabet(), k), |acc, (gl, c)| {
                    // G has positive valuation, so G^2 is exact one order beyond G
                    let gl = gl.clone().assume_order(k);
                    &acc + &(&gl * &gl).scale(c)
                });
        &(&self.base + &l_of_g) - g.phi()
    }

    /// `c_l` rounded to `+-1` for display: the signature pattern.
    pub fn sign_pattern(&self) -> Vec<i8> {
        self.quad
            .iter()
            .map(|c| if c.re.is_positive() { 1 } else { -1 })
            .collect()
    }
}

/// Splits a jet with all terms of `t`-degree at least 2 as `sum A_lm t_l t_m`
/// with a symmetric jet matrix `A`.
fn quadratic_split(q: &Jet, t: &[Var], order: u32) -> Result<Vec<Vec<Jet>>> {
    let n = t.len();
    let a = q.alphabet();
    let mut buckets: Vec<Vec<Vec<(Monomial, Gauss)>>> = vec![vec![Vec::new(); n]; n];
    for (m, c) in q.terms() {
        let present: Vec<usize> = (0..n).filter(|&l| m.exp(t[l]) > 0).collect();
        let Some(&l) = present.first() else {
            return Err(Error::Invariant(format!(
                "term {} has no t factor",
                q.monomial_string(m)
            )));
        };
        let (lo, hi) = if m.exp(t[l]) >= 2 {
            (l, l)
        } else {
            match present.get(1) {
                Some(&h) => (l, h),
                None => {
                    return Err(Error::NotStraightened(format!(
                        "term linear in t: {}",
                        q.monomial_string(m)
                    )))
                }
            }
        };
        let rest = m
            .div(Monomial::var(t[lo]).mul(Monomial::var(t[hi])))
            .expect("divisible");
        let c = if lo == hi {
            c.clone()
        } else {
            c * &Gauss::ratio(1, 2)
        };
        buckets[lo][hi].push((rest, c.clone()));
        if lo != hi {
            buckets[hi][lo].push((rest, c));
        }
    }
    Ok(buckets
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|b| Jet::from_terms(a, order, b))
                .collect()
        })
        .collect())
}

/// Morse lemma with parameters by iterated completion of squares.
///
/// Requires a straightened germ with nondegenerate `t`-block. Indices are
/// processed in increasing order; a vanishing pivot is first cured by swapping
/// with the smallest later index whose diagonal entry is nonzero at 0, else by
/// the shear `y_m -> y_m - y_l` with the smallest `m` having `A_lm(0) != 0`.
pub fn morse_normalize(g: &StructureGerm) -> Result<MorseNormalForm> {
    if !is_straightened(g) {
        return Err(Error::NotStraightened(
            "phi_t(z, zb, s, 0) is not identically zero".into(),
        ));
    }
    check_t_block(g)?;
    let k = g.order();
    let a = g.alphabet().clone();
    let t = g.vars().t.clone();
    let n = t.len();
    let base = g.phi_at_t_zero();
    let q = g.phi() - &base;
    let inner = k.saturating_sub(2);
    let mut b = quadratic_split(&q, &t, inner)?;
    // current coordinates y_l as jets in t; q = sum b_ij y_i y_j throughout
    let mut ys: Vec<Jet> = t.iter().map(|&v| Jet::var(&a, k, v)).collect();
    let mut quad = Vec::with_capacity(n);
    let mut gs = Vec::with_capacity(n);

    for l in 0..n {
        if b[l][l].constant_term().is_zero() {
            if let Some(m) = (l + 1..n).find(|&m| !b[m][m].constant_term().is_zero()) {
                ys.swap(l, m);
                b.swap(l, m);
                for row in b.iter_mut() {
                    row.swap(l, m);
                }
            } else if let Some(m) = (l + 1..n).find(|&m| !b[l][m].constant_term().is_zero()) {
                // y = P y' with y_m = y'_m + y'_l: y'_m = y_m - y_l, B' = P^T B P
                ys[m] = &ys[m] - &ys[l];
                for i in 0..n {
                    let add = b[i][m].clone();
                    b[i][l] = &b[i][l] + &add;
                }
                for j in 0..n {
                    let add = b[m][j].clone();
                    b[l][j] = &b[l][j] + &add;
                }
            } else {
                return Err(Error::DegenerateTBlock {
                    rank: t_hessian(g).rank(),
                    size: n,
                });
            }
        }
        let piv = b[l][l].clone();
        let c = piv.constant_term();
        let cinv = c.inv().expect("nonzero pivot");
        let piv_inv = piv.unit_inverse()?;
        let mut u = ys[l].clone();
        let mut ratios = vec![Jet::zero(&a, inner); n];
        for m in l + 1..n {
            ratios[m] = &b[l][m] * &piv_inv;
            u = &u + &(&ratios[m].clone().assume_order(inner + 1) * &ys[m]);
        }
        let root = piv.scale(&cinv).sqrt()?;
        // entries of b are reliable to K - 2 but only ever multiply some y of
        // valuation 1, so the products are reliable to K - 1
        let gl = &root.assume_order(inner + 1) * &u;
        gs.push(gl);
        quad.push(c);
        for i in l + 1..n {
            for j in l + 1..n {
                b[i][j] = &b[i][j] - &(&b[i][l] * &ratios[j]);
            }
        }
    }
    let signature_m = quad.iter().filter(|c| c.re.is_positive()).count();
    let nf = MorseNormalForm {
        base,
        quad,
        g: gs,
        signature_m,
    };
    let resid = nf.reconstruction_residual(g);
    if !resid.is_zero() {
        return Err(Error::Invariant(format!(
            "Morse reconstruction residual {resid}"
        )));
    }
    let lin_ok = {
        let m = crate::linalg::GaussMatrix::from_fn(n, n, |i, j| {
            nf.g[i].first_derivative_at_zero(t[j])
        });
        n == 0 || m.inverse().is_some()
    };
    if !lin_ok {
        return Err(Error::Invariant("linear part of G is singular".into()));
    }
    Ok(nf)
}

/// Inertia of the `t`-Hessian block, computed independently of
/// [`morse_normalize`].
pub fn t_block_signature(g: &StructureGerm) -> Signature {
    t_hessian(g).hermitian_signature()
}
