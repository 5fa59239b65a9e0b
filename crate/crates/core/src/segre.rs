//! Complex defining equations, Segre varieties and the Φ-function of a CR
//! hypersurface `Im w = sigma(z, zb, Re w)`.
//!
//! Φ is the right-hand side of the second-order system `w_{z_k z_l} = Φ_kl(z,
//! w, w')` satisfied by all Segre graphs. It is computed two ways: by solving
//! for the conjugate base point and differentiating the graph, and by the
//! bordered determinant of a defining function. Both are jets over
//! `(z, w, wp)` where `wp = w' - w'_0` is measured from the slope `w'_0` of the
//! Segre variety through the origin.
//!
//! Jets passed to [`recenter`] and [`segre_graph`] with a nonzero base point
//! are treated as the polynomials they store.

use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use crate::central::CentralHypersurface;
use crate::error::{Error, Result};
use crate::jet::{implicit_solve, reversion, Alphabet, Assignment, Gauss, Jet, JetError, Var};
use crate::structure::{germ_alphabet, StructureGerm};

/// `z1..zn, zb1..zbn, w, wb` with `z <-> zb`, `w <-> wb`.
pub fn complex_alphabet(nu: usize) -> Arc<Alphabet> {
    let mut names: Vec<String> = (1..=nu).map(|j| format!("z{j}")).collect();
    names.extend((1..=nu).map(|j| format!("zb{j}")));
    names.push("w".into());
    names.push("wb".into());
    let mut pairs: Vec<(String, String)> = (1..=nu)
        .map(|j| (format!("z{j}"), format!("zb{j}")))
        .collect();
    pairs.push(("w".into(), "wb".into()));
    Alphabet::with_conjugation(&names, &pairs).expect("complex alphabet")
}

/// `z1..zn, w, wp1..wpn`, the variables of Φ.
pub fn phi_alphabet(nu: usize) -> Arc<Alphabet> {
    Alphabet::plain(&phi_names(nu)).expect("phi alphabet")
}

fn phi_names(nu: usize) -> Vec<String> {
    let mut names: Vec<String> = (1..=nu).map(|j| format!("z{j}")).collect();
    names.push("w".into());
    names.extend((1..=nu).map(|j| format!("wp{j}")));
    names
}

/// Φ variables followed by the eliminated unknowns `zb1..zbn, wb`.
fn elimination_alphabet(nu: usize) -> Arc<Alphabet> {
    let mut names = phi_names(nu);
    names.extend((1..=nu).map(|j| format!("zb{j}")));
    names.push("wb".into());
    Alphabet::plain(&names).expect("elimination alphabet")
}

struct ElimVars {
    z: Vec<Var>,
    w: Var,
    wp: Vec<Var>,
    zb: Vec<Var>,
    wb: Var,
}

impl ElimVars {
    fn new(nu: usize) -> Self {
        ElimVars {
            z: (0..nu).collect(),
            w: nu,
            wp: (nu + 1..2 * nu + 1).collect(),
            zb: (2 * nu + 1..3 * nu + 1).collect(),
            wb: 3 * nu + 1,
        }
    }

    fn unknowns(&self) -> Vec<Var> {
        self.zb
            .iter()
            .copied()
            .chain(std::iter::once(self.wb))
            .collect()
    }
}

/// `w = rho(z, zb, wb)`, the complexified defining equation.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexDefining {
    /// Jet over [`complex_alphabet`], free of `w`.
    pub rho: Jet,
    pub source: CentralHypersurface,
}

impl ComplexDefining {
    pub fn nu(&self) -> usize {
        self.source.nu
    }

    pub fn order(&self) -> u32 {
        self.rho.order()
    }

    /// `w - rho(z, zb, conj(rho)(z, zb, w))`, zero for a consistent complexification.
    pub fn back_substitution_residual(&self) -> Result<Jet> {
        let a = self.rho.alphabet();
        let wb = a.var("wb")?;
        let reflected = self.rho.conj();
        let inner = self.rho.substitute(wb, &reflected)?;
        let w = Jet::var(a, self.order(), a.var("w")?);
        Ok(&w - &inner)
    }
}

/// Solves `(w - wb)/2i = sigma(z, zb, (w + wb)/2)` for `w`.
///
/// Only `sigma(0) = 0` is required, so recentered hypersurfaces (which may
/// have a linear part) are accepted.
pub fn complexify_defining(cs: &CentralHypersurface) -> Result<ComplexDefining> {
    let sigma = &cs.phi;
    if !sigma.constant_term().is_zero() {
        return Err(Error::NotNormalized(format!(
            "sigma(0) = {}",
            sigma.constant_term()
        )));
    }
    let nu = cs.nu;
    let k = sigma.order();
    let c = complex_alphabet(nu);
    let w = Jet::var(&c, k, c.var("w")?);
    let wb = Jet::var(&c, k, c.var("wb")?);
    let mut asg = Assignment::by_name(sigma.alphabet(), &c, k);
    asg.set(2 * nu, (&w + &wb).scale(&Gauss::ratio(1, 2)));
    let lhs = (&w - &wb).scale(&Gauss::complex((0, 1), (-1, 2)));
    let eq = &lhs - &sigma.compose(&asg)?;
    let rho = implicit_solve(&[eq], &[c.var("w")?])?
        .pop()
        .expect("one unknown");
    let cd = ComplexDefining {
        rho,
        source: cs.clone(),
    };
    let r = cd.back_substitution_residual()?;
    if !r.is_zero() {
        return Err(Error::Invariant(format!(
            "complexification fails back-substitution: {r}"
        )));
    }
    Ok(cd)
}

/// Moves the base point `(a, b)` of the hypersurface to the origin:
/// `sigma'(z, zb, s) = sigma(a + z, conj(a) + zb, Re b + s) - Im b`.
pub fn recenter(cs: &CentralHypersurface, a: &[Gauss], b: &Gauss) -> Result<CentralHypersurface> {
    let nu = cs.nu;
    if a.len() != nu {
        return Err(Error::Mismatch(format!(
            "base point has {} coordinates, expected {nu}",
            a.len()
        )));
    }
    let sigma = &cs.phi;
    let mut point: Vec<Gauss> = a.to_vec();
    point.extend(a.iter().map(Gauss::conj));
    point.push(Gauss::real(b.re.clone()));
    let value = sigma.evaluate(&point);
    if value != Gauss::real(b.im.clone()) {
        return Err(Error::OffHypersurface(format!(
            "sigma(a, conj a, Re b) = {value} but Im b = {}",
            b.im
        )));
    }
    let alpha = sigma.alphabet();
    let k = sigma.order();
    let mut asg = Assignment::identity(alpha, k);
    for (v, p) in point.iter().enumerate() {
        asg.set(
            v,
            &Jet::var(alpha, k, v) + &Jet::constant(alpha, k, p.clone()),
        );
        asg.allow_shift(v);
    }
    let shifted = &sigma.compose(&asg)? - &Jet::constant(alpha, k, Gauss::real(b.im.clone()));
    CentralHypersurface::new(nu, shifted)
}

/// Jet of the Segre graph `w(z) = rho(z, conj a, conj b)` in the local
/// coordinate `z - a`.
#[derive(Clone, Debug, PartialEq)]
pub struct SegreJet {
    pub a: Vec<Gauss>,
    pub b: Gauss,
    /// Jet over `z1..zn` (plain alphabet).
    pub graph: Jet,
}

pub fn segre_graph(cd: &ComplexDefining, a: &[Gauss], b: &Gauss) -> Result<SegreJet> {
    let nu = cd.nu();
    if a.len() != nu {
        return Err(Error::Mismatch(format!(
            "base point has {} coordinates, expected {nu}",
            a.len()
        )));
    }
    let rho = &cd.rho;
    let k = rho.order();
    let c = rho.alphabet();
    let mut point: Vec<Gauss> = a.to_vec();
    point.extend(a.iter().map(Gauss::conj));
    point.push(Gauss::zero());
    point.push(b.conj());
    let at = rho.evaluate(&point);
    if at != *b {
        return Err(Error::OffHypersurface(format!(
            "rho(a, conj a, conj b) = {at} but b = {b}"
        )));
    }
    let target = Alphabet::plain(&(1..=nu).map(|j| format!("z{j}")).collect::<Vec<_>>())?;
    let mut asg = Assignment::new(c, &target);
    for j in 0..nu {
        asg.set(
            j,
            &Jet::var(&target, k, j) + &Jet::constant(&target, k, a[j].clone()),
        );
        asg.set(nu + j, Jet::constant(&target, k, a[j].conj()));
        asg.allow_shift(j).allow_shift(nu + j);
    }
    let wb = c.var("wb")?;
    asg.set(wb, Jet::constant(&target, k, b.conj()))
        .allow_shift(wb);
    let graph = rho.compose(&asg)?;
    Ok(SegreJet {
        a: a.to_vec(),
        b: b.clone(),
        graph,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiRoute {
    Elimination,
    Determinant,
}

/// The symmetric matrix `Φ_kl(z, w, wp)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiJet {
    pub nu: usize,
    #[serde(serialize_with = "ser_entries")]
    pub entries: Vec<Vec<Jet>>,
    /// Order up to which every entry is exact.
    pub reliable_order: u32,
    /// Slope `w'_0` of the Segre variety through the origin.
    #[serde(serialize_with = "crate::report::ser_gausses")]
    pub base_slope: Vec<Gauss>,
    pub route: PhiRoute,
    /// `rho_w(0)` of the defining function used by the determinant route.
    #[serde(serialize_with = "ser_opt_gauss")]
    pub rho_w_at_zero: Option<Gauss>,
}

fn ser_entries<S: serde::Serializer>(e: &[Vec<Jet>], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(e.len()))?;
    for row in e {
        seq.serialize_element(
            &row.iter()
                .map(crate::report::jet_to_json)
                .collect::<Vec<_>>(),
        )?;
    }
    seq.end()
}

fn ser_opt_gauss<S: serde::Serializer>(
    c: &Option<Gauss>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    c.as_ref()
        .map(crate::report::CoeffJson::from_gauss)
        .serialize(s)
}

impl PhiJet {
    pub fn entry(&self, k: usize, l: usize) -> &Jet {
        &self.entries[k][l]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Jet::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.nu).all(|k| (0..k).all(|l| self.entries[k][l] == self.entries[l][k]))
    }

    /// Entries agree exactly up to the smaller reliable order.
    pub fn agrees_with(&self, other: &PhiJet) -> bool {
        let k = self.reliable_order.min(other.reliable_order);
        self.nu == other.nu
            && self.base_slope == other.base_slope
            && self
                .entries
                .iter()
                .flatten()
                .zip(other.entries.iter().flatten())
                .all(|(a, b)| a.agrees_to(b, k))
    }

    /// Terms containing `w`, as `(k, l, term)` with `k <= l`.
    pub fn w_dependent_terms(&self) -> Vec<(usize, usize, String)> {
        let w = self.nu;
        let mut out = Vec::new();
        for k in 0..self.nu {
            for l in k..self.nu {
                let e = &self.entries[k][l];
                for (m, c) in e.terms_with_var(w) {
                    out.push((k, l, format!("{c}*{}", e.monomial_string(m))));
                }
            }
        }
        out
    }
}

fn levi_failure(e: JetError) -> Error {
    match e {
        JetError::SingularJacobian { rank, size } => Error::LeviDegenerate(format!(
            "Segre elimination Jacobian has rank {rank} of {size}"
        )),
        other => other.into(),
    }
}

fn to_phi_alphabet(j: &Jet, nu: usize) -> Result<Jet> {
    Ok(j.embed(&phi_alphabet(nu))?)
}

/// Φ by solving `w = rho(z, zb, wb)`, `w' = rho_z(z, zb, wb)` for `(zb, wb)`
/// and substituting into `rho_{z_k z_l}`.
pub fn phi_elimination(cd: &ComplexDefining) -> Result<PhiJet> {
    let nu = cd.nu();
    if nu == 0 {
        return Err(Error::CurveCase);
    }
    let p = elimination_alphabet(nu);
    let ev = ElimVars::new(nu);
    let rho = cd.rho.embed(&p)?;
    let k = rho.order();
    let slope: Vec<Gauss> =
        ev.z.iter()
            .map(|&z| rho.first_derivative_at_zero(z))
            .collect();
    let mut eqs = vec![&Jet::var(&p, k, ev.w) - &rho];
    for j in 0..nu {
        let lhs = &Jet::var(&p, k, ev.wp[j]) + &Jet::constant(&p, k, slope[j].clone());
        eqs.push(&lhs - &rho.derive(ev.z[j]));
    }
    let sol = implicit_solve(&eqs, &ev.unknowns()).map_err(levi_failure)?;
    let order = sol[0].order();
    let mut asg = Assignment::identity(&p, order);
    for (&u, s) in ev.unknowns().iter().zip(&sol) {
        asg.set(u, s.clone());
    }
    let mut entries = vec![vec![Jet::zero(&phi_alphabet(nu), 0); nu]; nu];
    for a in 0..nu {
        for b in a..nu {
            let e = rho.derive(ev.z[a]).derive(ev.z[b]).compose(&asg)?;
            let e = to_phi_alphabet(&e, nu)?;
            entries[b][a] = e.clone();
            entries[a][b] = e;
        }
    }
    let reliable_order = entries[0][0].order();
    Ok(PhiJet {
        nu,
        entries,
        reliable_order,
        base_slope: slope,
        route: PhiRoute::Elimination,
        rho_w_at_zero: None,
    })
}

/// Φ by the bordered determinant
/// `Φ_ij = det[[r, r_j, r_w], [r_i, r_ij, r_iw], [r_w, r_jw, r_ww]] / r_w^3`
/// of `r = (w - wb)/2i - sigma(z, zb, (w + wb)/2)`, evaluated where
/// `r = 0` and `r_{z_j} + w'_j r_w = 0`.
pub fn phi_determinant(cd: &ComplexDefining) -> Result<PhiJet> {
    let nu = cd.nu();
    if nu == 0 {
        return Err(Error::CurveCase);
    }
    let sigma = &cd.source.phi;
    let k = sigma.order();
    let p = elimination_alphabet(nu);
    let ev = ElimVars::new(nu);
    let w = Jet::var(&p, k, ev.w);
    let wb = Jet::var(&p, k, ev.wb);
    let mut asg = Assignment::new(sigma.alphabet(), &p);
    for j in 0..nu {
        asg.set(j, Jet::var(&p, k, ev.z[j]));
        asg.set(nu + j, Jet::var(&p, k, ev.zb[j]));
    }
    asg.set(2 * nu, (&w + &wb).scale(&Gauss::ratio(1, 2)));
    let r = &(&w - &wb).scale(&Gauss::complex((0, 1), (-1, 2))) - &sigma.compose(&asg)?;
    let r_w = r.derive(ev.w);
    let rw0 = r_w.constant_term();
    let rw0_inv = rw0
        .inv()
        .ok_or_else(|| Error::Precondition("rho_w vanishes at the origin".into()))?;
    let r_z: Vec<Jet> = ev.z.iter().map(|&z| r.derive(z)).collect();
    let slope: Vec<Gauss> = r_z
        .iter()
        .map(|d| -(&d.constant_term() * &rw0_inv))
        .collect();

    let mut eqs = vec![r.clone()];
    for j in 0..nu {
        let wp = &Jet::var(&p, k, ev.wp[j]) + &Jet::constant(&p, k, slope[j].clone());
        eqs.push(&r_z[j] + &(&wp * &r_w));
    }
    let sol = implicit_solve(&eqs, &ev.unknowns()).map_err(levi_failure)?;
    let order = sol[0].order();
    let mut at = Assignment::identity(&p, order);
    for (&u, s) in ev.unknowns().iter().zip(&sol) {
        at.set(u, s.clone());
    }
    let on = |j: &Jet| j.compose(&at);
    let r0 = on(&r)?;
    let rw = on(&r_w)?;
    let rww = on(&r_w.derive(ev.w))?;
    let ri: Vec<Jet> = r_z.iter().map(&on).collect::<std::result::Result<_, _>>()?;
    let riw: Vec<Jet> = r_z
        .iter()
        .map(|d| on(&d.derive(ev.w)))
        .collect::<std::result::Result<_, _>>()?;
    let inv = rw.unit_inverse()?;
    let inv3 = &(&inv * &inv) * &inv;
    let mut entries = vec![vec![Jet::zero(&phi_alphabet(nu), 0); nu]; nu];
    for i in 0..nu {
        for j in i..nu {
            let rij = on(&r_z[i].derive(ev.z[j]))?;
            let det = &(&(&r0 * &(&(&rij * &rww) - &(&riw[i] * &riw[j])))
                - &(&ri[j] * &(&(&ri[i] * &rww) - &(&riw[i] * &rw))))
                + &(&rw * &(&(&ri[i] * &riw[j]) - &(&rij * &rw)));
            let e = to_phi_alphabet(&(&det * &inv3), nu)?;
            entries[j][i] = e.clone();
            entries[i][j] = e;
        }
    }
    let reliable_order = entries[0][0].order();
    Ok(PhiJet {
        nu,
        entries,
        reliable_order,
        base_slope: slope,
        route: PhiRoute::Determinant,
        rho_w_at_zero: Some(rw0),
    })
}

/// Levi matrix `sigma_{z_j zb_k}(0)` of a central hypersurface.
pub fn central_levi_matrix(cs: &CentralHypersurface) -> crate::linalg::GaussMatrix {
    let nu = cs.nu;
    crate::linalg::GaussMatrix::from_fn(nu, nu, |j, k| cs.phi.second_derivative_at_zero(j, nu + k))
}

/// Outcome of the rigid test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RigidVerdict {
    /// Every Φ term is free of `w` to the reliable order.
    pub analytic_consistent: bool,
    /// Offending `(k, l, term)` entries.
    pub offending: Vec<(usize, usize, String)>,
    pub reliable_order: u32,
    pub phi: PhiJet,
}

/// For a rigid germ, Φ of its central manifold must not depend on `w`.
///
/// A positive verdict is evidence at the level of jets only. With a base
/// point, the central hypersurface is recentered there first (useful when the
/// origin is Levi-degenerate).
pub fn rigid_phi_test(g: &StructureGerm, base: Option<(&[Gauss], &Gauss)>) -> Result<RigidVerdict> {
    if !g.is_rigid() {
        let s_terms: Vec<String> = g
            .phi()
            .terms_with_var(g.vars().s)
            .take(3)
            .map(|(m, c)| format!("{c}*{}", g.phi().monomial_string(m)))
            .collect();
        return Err(Error::NotRigid(format!(
            "phi depends on s: {}",
            s_terms.join(", ")
        )));
    }
    if g.nu() == 0 {
        return Err(Error::CurveCase);
    }
    let chart = crate::central::central_manifold(g)?;
    let mut cs = crate::central::central_cr_hypersurface(&chart)?;
    match base {
        Some((a, b)) => cs = recenter(&cs, a, b)?,
        None => {
            let l = central_levi_matrix(&cs);
            if l.inverse().is_none() {
                return Err(Error::LeviDegenerate(format!(
                    "central Levi matrix has rank {} of {}",
                    l.rank(),
                    cs.nu
                )));
            }
        }
    }
    let cd = complexify_defining(&cs)?;
    let phi = phi_elimination(&cd)?;
    let offending = phi.w_dependent_terms();
    Ok(RigidVerdict {
        analytic_consistent: offending.is_empty(),
        offending,
        reliable_order: phi.reliable_order,
        phi,
    })
}

/// Solution of `xi^2 h''(xi) = psi(xi h'(xi))` for a given `h`.
///
/// With `u = xi h'(xi) = 2 h_2 r^2` the substitution `r(xi) = xi + ...` is
/// invertible and `Psi(r) = (xi^2 h'')(xi(r))`; then `psi(u) = Psi(sqrt(u / 2h_2))`.
/// `psi` is a power series in `u` exactly when `Psi` is even; otherwise it is
/// a series in `u^(1/2)` and only `Psi` is returned.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsiSeries {
    /// `h''(0) / 2`.
    #[serde(serialize_with = "crate::report::ser_gauss")]
    pub h2: Gauss,
    /// `Psi(r)` over the variable `r`.
    #[serde(serialize_with = "crate::report::ser_jet")]
    pub psi_r: Jet,
    /// `psi(u)` over the variable `u`, when it is a power series.
    #[serde(serialize_with = "ser_opt_jet")]
    pub psi_u: Option<Jet>,
}

fn ser_opt_jet<S: serde::Serializer>(
    j: &Option<Jet>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    j.as_ref().map(crate::report::jet_to_json).serialize(s)
}

/// `r(xi) = xi sqrt(xi h'(xi) / (2 h_2 xi^2))` and the pieces of the identity,
/// over the one-variable alphabet of `h`, exact to `order`.
struct PsiParts {
    lhs: Jet,
    u: Jet,
    r: Jet,
    h2: Gauss,
}

fn psi_parts(h: &Jet, order: u32) -> Result<PsiParts> {
    let a = h.alphabet();
    if a.len() != 1 {
        return Err(Error::Mismatch(format!(
            "h must be a series in one variable, got {:?}",
            a.names()
        )));
    }
    if !h.constant_term().is_zero() || !h.first_derivative_at_zero(0).is_zero() {
        return Err(Error::NotNormalized("h(0) and h'(0) must vanish".into()));
    }
    let h2 = h.coeff_of(&[2]);
    if h2.is_zero() {
        return Err(Error::Precondition("h''(0) = 0".into()));
    }
    // h is a polynomial; two extra orders absorb the two derivatives
    let big = order + 2;
    let hp = h.clone().assume_order(big);
    let xi = Jet::var(a, big, 0);
    let lhs = (&xi.pow(2) * &hp.derive(0).derive(0).assume_order(big)).truncate(order);
    let u = (&xi * &hp.derive(0).assume_order(big)).truncate(order + 1);
    let unit = u.divide_by_var(0)?.divide_by_var(0)?.assume_order(order);
    let inv2h2 = (&h2 * &Gauss::from_int(2)).inv().expect("nonzero");
    let r = &xi.truncate(order) * &unit.scale(&inv2h2).sqrt()?;
    Ok(PsiParts {
        lhs,
        u: u.truncate(order),
        r,
        h2,
    })
}

pub fn example_psi(h: &Jet, order: u32) -> Result<PsiSeries> {
    let parts = psi_parts(h, order)?;
    let a = h.alphabet();
    let xi_of_r = reversion(std::slice::from_ref(&parts.r), &[0])?;
    let psi_xi = parts.lhs.compose(&{
        let mut asg = Assignment::identity(a, order);
        asg.set(0, xi_of_r[0].clone());
        asg
    })?;
    let ra = Alphabet::plain(&["r"])?;
    let psi_r = psi_xi.embed(&Alphabet::plain(&[a.name(0)])?)?;
    let psi_r = Jet::from_terms(&ra, order, psi_r.terms().map(|(m, c)| (*m, c.clone())));

    let even = psi_r.terms().all(|(m, _)| m.degree() % 2 == 0);
    let psi_u = even.then(|| {
        let ua = Alphabet::plain(&["u"]).expect("alphabet");
        let scale = (&parts.h2 * &Gauss::from_int(2)).inv().expect("nonzero");
        let terms = psi_r.terms().map(|(m, c)| {
            let j = m.degree() / 2;
            let mut c = c.clone();
            for _ in 0..j {
                c = &c * &scale;
            }
            (crate::jet::Monomial::var(0).with_exp(0, j), c)
        });
        Jet::from_terms(&ua, order / 2, terms)
    });
    let out = PsiSeries {
        h2: parts.h2.clone(),
        psi_r,
        psi_u,
    };
    let resid = psi_residual(h, &out, order)?;
    if !resid.is_zero() {
        return Err(Error::Invariant(format!("psi residual {resid}")));
    }
    Ok(out)
}

/// `xi^2 h'' - Psi(r(xi))`, and also `xi^2 h'' - psi(xi h')` when `psi` is a
/// power series; both should vanish to `order`.
pub fn psi_residual(h: &Jet, psi: &PsiSeries, order: u32) -> Result<Jet> {
    let parts = psi_parts(h, order)?;
    let a = h.alphabet();
    let mut asg = Assignment::new(psi.psi_r.alphabet(), a);
    asg.set(0, parts.r.clone());
    let via_r = &parts.lhs - &psi.psi_r.compose(&asg)?;
    if !via_r.is_zero() {
        return Ok(via_r);
    }
    if let Some(pu) = &psi.psi_u {
        let mut asg = Assignment::new(pu.alphabet(), a);
        asg.set(0, parts.u.clone());
        // psi_u is reliable to order/2 in u, i.e. to order in xi
        return Ok(&parts.lhs - &pu.clone().assume_order(order).compose(&asg)?);
    }
    Ok(via_r)
}

/// The rigid hypersurface `Im w = h(z zb)` in `C^2`.
pub fn rigid_from_h(h: &Jet, order: u32) -> Result<CentralHypersurface> {
    let sa = germ_alphabet(1, 0);
    let zzb = Jet::var(&sa, order, 0) * Jet::var(&sa, order, 1);
    let mut asg = Assignment::new(h.alphabet(), &sa);
    asg.set(0, zzb);
    let sigma = h.clone().assume_order(order).compose(&asg)?;
    CentralHypersurface::new(1, sigma)
}

/// Residual of the Segre ODE `z^2 w'' = 2i psi(z w' / 2i)` for `Im w = h(|z|^2)`
/// at the base point `(a, i h(|a|^2))`, in Φ variables with `z = a + z1` and
/// `w' = w'_0 + wp1`. `psi` is used as the polynomial it stores.
///
/// For `h = xi^2/2`, `psi(u) = u` and the relation reads `z^2 w'' = z w'`.
pub fn ode_residual(h: &Jet, psi_u: &Jet, a: &Gauss, order: u32) -> Result<(PhiJet, Jet)> {
    let cs = rigid_from_h(h, order)?;
    let abar = a.conj();
    let hval = h.evaluate(&[a * &abar]);
    let b = &hval * &Gauss::i();
    let local = recenter(&cs, std::slice::from_ref(a), &b)?;
    let cd = complexify_defining(&local)?;
    let phi = phi_elimination(&cd)?;
    let pa = phi_alphabet(1);
    let k = phi.reliable_order;
    let z = &Jet::var(&pa, k, 0) + &Jet::constant(&pa, k, a.clone());
    let wp = &Jet::var(&pa, k, 2) + &Jet::constant(&pa, k, phi.base_slope[0].clone());
    let two_i = Gauss::complex((0, 1), (2, 1));
    let arg = (&z * &wp).scale(&two_i.inv().expect("nonzero"));
    let mut asg = Assignment::new(psi_u.alphabet(), &pa);
    asg.set(0, arg).allow_shift(0);
    let rhs = psi_u.clone().assume_order(k).compose(&asg)?.scale(&two_i);
    let lhs = &z.pow(2) * phi.entry(0, 0);
    Ok((phi.clone(), &lhs - &rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyp(nu: usize, k: u32, s: &str) -> CentralHypersurface {
        CentralHypersurface::from_literal(nu, k, s).unwrap()
    }

    #[test]
    fn complexify_quadric_and_flat() {
        let cd = complexify_defining(&hyp(1, 5, "z1*zb1")).unwrap();
        let c = complex_alphabet(1);
        assert_eq!(cd.rho, Jet::parse("wb + 2i*z1*zb1", &c, 5).unwrap());
        let cd = complexify_defining(&hyp(1, 5, "0")).unwrap();
        assert_eq!(cd.rho, Jet::parse("wb", &c, 5).unwrap());
        let cd = complexify_defining(&hyp(1, 5, "z1*zb1 + s*z1*zb1")).unwrap();
        assert!(cd.back_substitution_residual().unwrap().is_zero());
    }

    #[test]
    fn segre_quadric_lines() {
        let cd = complexify_defining(&hyp(1, 5, "z1*zb1")).unwrap();
        let a = Gauss::complex((1, 1), (1, 2));
        let b = Gauss::new(Gauss::from_int(3).re, (&a * &a.conj()).re);
        let sg = segre_graph(&cd, std::slice::from_ref(&a), &b).unwrap();
        let za = Alphabet::plain(&["z1"]).unwrap();
        // b-bar + 2i (a + z) a-bar
        let expect = &Jet::constant(
            &za,
            5,
            &b.conj() + &(&(&Gauss::complex((0, 1), (2, 1)) * &a) * &a.conj()),
        ) + &Jet::var(&za, 5, 0).scale(&(&Gauss::complex((0, 1), (2, 1)) * &a.conj()));
        assert_eq!(sg.graph, expect);
        assert!(sg.graph.derive(0).derive(0).is_zero());
        let off = Gauss::from_int(1);
        assert!(matches!(
            segre_graph(&cd, std::slice::from_ref(&a), &off),
            Err(Error::OffHypersurface(_))
        ));
        let origin = segre_graph(&cd, &[Gauss::zero()], &Gauss::zero()).unwrap();
        assert!(origin.graph.is_zero());
    }

    #[test]
    fn quadric_phi_vanishes() {
        for (nu, s) in [(1, "z1*zb1"), (2, "z1*zb1 - z2*zb2")] {
            let cd = complexify_defining(&hyp(nu, 6, s)).unwrap();
            let e = phi_elimination(&cd).unwrap();
            let d = phi_determinant(&cd).unwrap();
            assert!(e.is_zero() && d.is_zero());
            assert_eq!(e.reliable_order, 4);
            assert_eq!(d.rho_w_at_zero, Some(Gauss::complex((0, 1), (-1, 2))));
        }
    }

    #[test]
    fn flat_is_rejected() {
        let cd = complexify_defining(&hyp(1, 4, "0")).unwrap();
        assert!(matches!(
            phi_elimination(&cd),
            Err(Error::LeviDegenerate(_))
        ));
        assert!(matches!(
            phi_determinant(&cd),
            Err(Error::LeviDegenerate(_))
        ));
    }

    #[test]
    fn routes_agree() {
        let cs = hyp(
            1,
            5,
            "z1*zb1 + z1^2*zb1 + z1*zb1^2 + s*z1*zb1 + 1/2*z1^2*zb1^2 - 3*s^2*z1*zb1",
        );
        let cd = complexify_defining(&cs).unwrap();
        let e = phi_elimination(&cd).unwrap();
        let d = phi_determinant(&cd).unwrap();
        assert!(!e.is_zero());
        assert!(
            e.agrees_with(&d),
            "{}\n{}",
            e.entries[0][0],
            d.entries[0][0]
        );
        assert!(!e.w_dependent_terms().is_empty());
    }

    #[test]
    fn rigid_tests() {
        let g = StructureGerm::from_literal(1, 0, 5, "z1*zb1").unwrap();
        let v = rigid_phi_test(&g, None).unwrap();
        assert!(v.analytic_consistent && v.phi.is_zero());
        let g = StructureGerm::from_literal(1, 1, 6, "z1*zb1 + 1/2*z1^2*zb1^2 + t1^2").unwrap();
        let v = rigid_phi_test(&g, None).unwrap();
        assert!(v.analytic_consistent && !v.phi.is_zero());
        let g = StructureGerm::from_literal(1, 0, 5, "z1*zb1 + s*z1*zb1").unwrap();
        assert!(matches!(rigid_phi_test(&g, None), Err(Error::NotRigid(_))));
    }

    #[test]
    fn psi_examples() {
        let xa = Alphabet::plain(&["xi"]).unwrap();
        let h = Jet::parse("1/2*xi^2", &xa, 8).unwrap();
        let p = example_psi(&h, 8).unwrap();
        let ua = Alphabet::plain(&["u"]).unwrap();
        assert_eq!(p.psi_u.unwrap(), Jet::var(&ua, 4, 0));

        let h = Jet::parse("1/2*xi^2 + xi^3", &xa, 8).unwrap();
        let p = example_psi(&h, 8).unwrap();
        assert!(p.psi_u.is_none());
        assert!(psi_residual(&h, &p, 8).unwrap().is_zero());

        let h = Jet::parse("xi^2 + 1/3*xi^4 - 2*xi^6", &xa, 8).unwrap();
        let p = example_psi(&h, 8).unwrap();
        assert!(p.psi_u.is_some());

        let h = Jet::parse("xi^3", &xa, 8).unwrap();
        assert!(matches!(example_psi(&h, 8), Err(Error::Precondition(_))));
    }

    #[test]
    fn worked_example_ode() {
        let xa = Alphabet::plain(&["xi"]).unwrap();
        let h = Jet::parse("1/2*xi^2", &xa, 6).unwrap();
        let psi = example_psi(&h, 6).unwrap().psi_u.unwrap();
        let (phi, resid) = ode_residual(&h, &psi, &Gauss::from_int(1), 6).unwrap();
        assert!(!phi.is_zero());
        assert!(resid.is_zero(), "{resid}");
    }
}
