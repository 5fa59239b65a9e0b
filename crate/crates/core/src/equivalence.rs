//! Lifting a CR equivalence between central manifolds to an equivalence of
//! the full structures in Morse normal form `phi(z, zb, s) + sum c_l t_l^2`.

use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::central::CentralHypersurface;
use crate::error::{Error, Result};
use crate::jet::{Alphabet, Assignment, Gauss, Jet};
use crate::linalg::GaussMatrix;
use crate::structure::{germ_alphabet, is_solution, levi_form, SolutionReport, StructureGerm};

/// `z1..zn, w`: variables of holomorphic maps between central hypersurfaces.
pub fn central_map_alphabet(nu: usize) -> Arc<Alphabet> {
    let mut names: Vec<String> = (1..=nu).map(|j| format!("z{j}")).collect();
    names.push("w".into());
    Alphabet::plain(&names).expect("map alphabet")
}

/// `z1..zn, zb1..zbn, s, v` with `eta = s + i v`.
fn eta_alphabet(nu: usize) -> Arc<Alphabet> {
    let mut names: Vec<String> = (1..=nu).map(|j| format!("z{j}")).collect();
    names.extend((1..=nu).map(|j| format!("zb{j}")));
    names.push("s".into());
    names.push("v".into());
    let pairs: Vec<(String, String)> = (1..=nu)
        .map(|j| (format!("z{j}"), format!("zb{j}")))
        .collect();
    Alphabet::with_conjugation(&names, &pairs).expect("eta alphabet")
}

/// A map `(z, w) -> (f(z, w), g(z, w))` between central hypersurfaces.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralEquivalence {
    pub f: Vec<Jet>,
    pub g: Jet,
    pub source: CentralHypersurface,
    pub target: CentralHypersurface,
}

/// Substitutes `(z, w) -> (z, eta)` into a map component, where `eta` is a jet
/// over an alphabet whose first `nu` variables are `z`.
fn along(f: &Jet, nu: usize, eta: &Jet) -> Result<Jet> {
    let target = eta.alphabet();
    let k = eta.order();
    let mut asg = Assignment::new(f.alphabet(), target);
    for j in 0..nu {
        asg.set(j, Jet::var(target, k, j));
    }
    asg.set(nu, eta.clone());
    Ok(f.compose(&asg)?)
}

/// `phi'(F, conj F, S)` for a central jet `phi'` over `(z, zb, s)`.
fn central_at(phi: &Jet, nu: usize, fz: &[Jet], s: &Jet) -> Result<Jet> {
    let mut asg = Assignment::new(phi.alphabet(), s.alphabet());
    for j in 0..nu {
        asg.set(j, fz[j].clone());
        asg.set(nu + j, fz[j].conj());
    }
    asg.set(2 * nu, s.clone());
    Ok(phi.compose(&asg)?)
}

impl CentralEquivalence {
    /// Validates shapes, `f(0) = g(0) = 0`, invertibility of the differential
    /// and the identity `Im g(z, zeta) = phi'(f, conj f, Re g)` on
    /// `zeta = s + i phi(z, zb, s)`.
    pub fn new(
        f: Vec<Jet>,
        g: Jet,
        source: CentralHypersurface,
        target: CentralHypersurface,
    ) -> Result<Self> {
        let nu = source.nu;
        if target.nu != nu || f.len() != nu {
            return Err(Error::Mismatch(format!(
                "central map with {} components for nu = {nu}",
                f.len()
            )));
        }
        let ma = central_map_alphabet(nu);
        for (idx, c) in f.iter().chain(std::iter::once(&g)).enumerate() {
            if **c.alphabet() != *ma {
                return Err(Error::Mismatch(format!(
                    "map component {idx} is not over {:?}",
                    ma.names()
                )));
            }
            if !c.constant_term().is_zero() {
                return Err(Error::Precondition(format!(
                    "map component {idx} does not fix the origin"
                )));
            }
        }
        let comps: Vec<&Jet> = f.iter().chain(std::iter::once(&g)).collect();
        let jac = GaussMatrix::from_fn(nu + 1, nu + 1, |a, b| comps[a].first_derivative_at_zero(b));
        if jac.inverse().is_none() {
            return Err(Error::NotEquivalence(
                "differential at 0 is singular".into(),
            ));
        }
        let ce = CentralEquivalence {
            f,
            g,
            source,
            target,
        };
        let r = ce.basic_identity_residual()?;
        if !r.is_zero() {
            return Err(Error::NotEquivalence(format!(
                "Im g - phi'(f, conj f, Re g) = {r} on the source"
            )));
        }
        Ok(ce)
    }

    pub fn nu(&self) -> usize {
        self.source.nu
    }

    pub fn order(&self) -> u32 {
        self.f
            .iter()
            .map(Jet::order)
            .chain([self.g.order(), self.source.order(), self.target.order()])
            .min()
            .unwrap()
    }

    /// `Im g(z, zeta) - phi'(f, conj f, Re g)` over `(z, zb, s)`.
    pub fn basic_identity_residual(&self) -> Result<Jet> {
        let nu = self.nu();
        let sa = self.source.alphabet();
        let k = self.order();
        let zeta = &Jet::var(sa, k, 2 * nu) + &self.source.phi.scale(&Gauss::i());
        let fz = self
            .f
            .iter()
            .map(|f| along(f, nu, &zeta))
            .collect::<Result<Vec<_>>>()?;
        let gz = along(&self.g, nu, &zeta)?;
        Ok(&gz.im() - &central_at(&self.target.phi, nu, &fz, &gz.re())?)
    }
}

/// `lambda(z, zb, s, v)` with `Im g(z, eta) - phi'(f, conj f, Re g) =
/// lambda (Im eta - phi(z, zb, Re eta))`, `eta = s + i v`; reliable to `K - 1`.
pub fn extract_lambda(ce: &CentralEquivalence) -> Result<Jet> {
    let nu = ce.nu();
    let ea = eta_alphabet(nu);
    let k = ce.order();
    let (s, v) = (2 * nu, 2 * nu + 1);
    let eta = &Jet::var(&ea, k, s) + &Jet::var(&ea, k, v).scale(&Gauss::i());
    let fz =
        ce.f.iter()
            .map(|f| along(f, nu, &eta))
            .collect::<Result<Vec<_>>>()?;
    let gz = along(&ce.g, nu, &eta)?;
    let numerator = &gz.im() - &central_at(&ce.target.phi, nu, &fz, &gz.re())?;
    let phi = ce.source.phi.embed(&ea)?.truncate(k);
    // v = r + phi turns the factor into the coordinate r (kept in slot v)
    let to_r = &Jet::var(&ea, k, v) + &phi;
    let in_r = numerator.substitute(v, &to_r)?;
    let quotient = in_r
        .divide_by_var(v)
        .map_err(|e| Error::NotEquivalence(e.to_string()))?;
    let back = &Jet::var(&ea, k, v) - &phi;
    let lambda = quotient.substitute(v, &back.truncate(quotient.order()))?;
    if !lambda.is_real() {
        return Err(Error::Invariant(format!("lambda is not real: {lambda}")));
    }
    Ok(lambda)
}

/// Components of the lifted map, as real jets in `(x, y, s, t)` written over
/// the polarized germ alphabet.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftedEquivalence {
    /// `lambda(z, zb, s, v)` with `eta = s + i v`.
    #[serde(serialize_with = "crate::report::ser_jet")]
    pub lambda: Jet,
    /// `sqrt(lambda(0))`, a positive rational.
    #[serde(serialize_with = "crate::report::ser_gauss")]
    pub sqrt_lambda0: Gauss,
    /// `X + iY = f(z, w)`.
    #[serde(serialize_with = "crate::report::ser_jets")]
    pub z: Vec<Jet>,
    /// `S = Re g(z, w)`.
    #[serde(serialize_with = "crate::report::ser_jet")]
    pub s: Jet,
    /// `T_l = t_l sqrt(lambda(z, w))`.
    #[serde(serialize_with = "crate::report::ser_jets")]
    pub t: Vec<Jet>,
}

impl LiftedEquivalence {
    pub fn x(&self) -> Vec<Jet> {
        self.z.iter().map(Jet::re).collect()
    }

    pub fn y(&self) -> Vec<Jet> {
        self.z.iter().map(Jet::im).collect()
    }
}

/// Coefficients `c_l` if `phi = phi(z, zb, s, 0) + sum c_l t_l^2` exactly.
pub fn normal_form_coefficients(g: &StructureGerm) -> Option<Vec<Gauss>> {
    let t = &g.vars().t;
    let quad = g.phi() - &g.phi_at_t_zero();
    let c: Vec<Gauss> = t.iter().map(|&v| quad.coeff_of(&exps(g, v))).collect();
    let expect = crate::structure::diagonal_quadratic(g.alphabet(), g.order(), t, &c);
    (expect == quad).then_some(c)
}

fn exps(g: &StructureGerm, v: usize) -> Vec<u32> {
    (0..g.alphabet().len())
        .map(|u| if u == v { 2 } else { 0 })
        .collect()
}

fn check_germ(g: &StructureGerm, central: &CentralHypersurface, which: &str) -> Result<Vec<Gauss>> {
    let c = normal_form_coefficients(g).ok_or_else(|| {
        Error::NotStraightened(format!(
            "{which} germ is not of the form phi(z, zb, s) + sum c t^2"
        ))
    })?;
    if !levi_form(g).is_positive() {
        return Err(Error::NotPositive(format!(
            "{which} Levi form has signature {:?}",
            levi_form(g).signature
        )));
    }
    let base = g.phi_at_t_zero().embed(&germ_alphabet(g.nu(), 0))?;
    let k = base.order().min(central.order());
    if !base.agrees_to(&central.phi, k) {
        return Err(Error::Mismatch(format!(
            "{which} germ restricted to t = 0 differs from the central hypersurface"
        )));
    }
    Ok(c)
}

/// `sqrt(lambda)` with `lambda(0)` a positive rational square.
fn lambda_root(lambda: &Jet) -> Result<(Jet, Gauss)> {
    let l0 = lambda.constant_term();
    if !l0.im.is_zero() || !l0.re.is_positive() {
        return Err(Error::BadLambda(format!(
            "lambda(0) = {l0} is not positive"
        )));
    }
    let r0 = l0.rational_sqrt().ok_or_else(|| {
        Error::BadLambda(format!("lambda(0) = {l0} is not the square of a rational"))
    })?;
    let r0 = Gauss::real(r0);
    let unit = lambda.scale(&l0.inv().expect("positive"));
    Ok((unit.sqrt()?.scale(&r0), r0))
}

/// Builds `X + iY = f(z, w)`, `S = Re g(z, w)`, `T = t sqrt(lambda(z, w))`
/// with `w = s + i(phi(z, zb, s) + sum c_l t_l^2)`.
pub fn lift_equivalence(
    ce: &CentralEquivalence,
    source: &StructureGerm,
    target: &StructureGerm,
) -> Result<LiftedEquivalence> {
    let nu = ce.nu();
    if source.nu() != nu || target.nu() != nu || source.nprime() != target.nprime() {
        return Err(Error::Mismatch(
            "germ dimensions do not match the central map".into(),
        ));
    }
    let cs = check_germ(source, &ce.source, "source")?;
    let ct = check_germ(target, &ce.target, "target")?;
    if cs != ct {
        return Err(Error::Mismatch(
            "source and target quadratic forms differ".into(),
        ));
    }
    let lambda = extract_lambda(ce)?;
    let ga = source.alphabet();
    let k = source.order().min(ce.order());
    let w = source.w().truncate(k);
    let z =
        ce.f.iter()
            .map(|f| along(f, nu, &w))
            .collect::<Result<Vec<_>>>()?;
    let s = along(&ce.g, nu, &w)?.re();

    let v = source.vars();
    let mut at_w = Assignment::new(lambda.alphabet(), ga);
    for j in 0..nu {
        at_w.set(j, Jet::var(ga, k, v.z[j]));
        at_w.set(nu + j, Jet::var(ga, k, v.zb[j]));
    }
    at_w.set(2 * nu, Jet::var(ga, k, v.s));
    at_w.set(2 * nu + 1, source.phi().truncate(k));
    let (root, r0) = lambda_root(&lambda.compose(&at_w)?)?;
    // t has valuation 1, so t * root is exact one order beyond root
    let root = root.assume_order(k);
    let t = v.t.iter().map(|&tl| &Jet::var(ga, k, tl) * &root).collect();
    Ok(LiftedEquivalence {
        lambda,
        sqrt_lambda0: r0,
        z,
        s,
        t,
    })
}

#[derive(Clone, Debug)]
pub struct LiftReport {
    /// Source frame applied to the pullbacks of `z'_j`, then of `w'`.
    pub pullbacks: Vec<SolutionReport>,
    /// `w' o F - g(z, w)`.
    pub w_mismatch: Jet,
    /// The lift restricted to `t = 0` is `(f, Re g, 0)` along the central manifold.
    pub restriction_ok: bool,
    pub ok: bool,
    pub reliable_order: u32,
}

/// Pulls the target first integrals back through the lift and checks them.
pub fn verify_lift(
    le: &LiftedEquivalence,
    ce: &CentralEquivalence,
    source: &StructureGerm,
    target: &StructureGerm,
) -> Result<LiftReport> {
    let nu = source.nu();
    let v = target.vars();
    let ga = source.alphabet();
    let mut asg = Assignment::new(target.alphabet(), ga);
    for j in 0..nu {
        asg.set(v.z[j], le.z[j].clone());
        asg.set(v.zb[j], le.z[j].conj());
    }
    asg.set(v.s, le.s.clone());
    for (l, t) in le.t.iter().enumerate() {
        asg.set(v.t[l], t.clone());
    }
    let w_pull = &le.s + &target.phi().compose(&asg)?.scale(&Gauss::i());
    let mut pullbacks: Vec<SolutionReport> =
        le.z.iter().map(|zj| is_solution(source, zj)).collect();
    pullbacks.push(is_solution(source, &w_pull));

    let k = w_pull.order();
    let g_w = along(&ce.g, nu, &source.w().truncate(k))?;
    let w_mismatch = &w_pull - &g_w;

    let tv = &source.vars().t;
    let sa = germ_alphabet(nu, 0);
    let kc = source.order().min(ce.order());
    let zeta = &Jet::var(&sa, kc, 2 * nu) + &ce.source.phi.truncate(kc).scale(&Gauss::i());
    let restrict = |j: &Jet| -> Result<Jet> { Ok(j.restrict_zero(tv).embed(&sa)?) };
    let mut restriction_ok = true;
    for (j, f) in ce.f.iter().enumerate() {
        let expect = along(f, nu, &zeta)?;
        restriction_ok &=
            restrict(&le.z[j])?.agrees_to(&expect, expect.order().min(le.z[j].order()));
    }
    let g_expect = along(&ce.g, nu, &zeta)?.re();
    restriction_ok &= restrict(&le.s)?.agrees_to(&g_expect, g_expect.order().min(le.s.order()));
    restriction_ok &= le.t.iter().all(|t| t.restrict_zero(tv).is_zero());

    let ok = restriction_ok && w_mismatch.is_zero() && pullbacks.iter().all(|r| r.is_solution);
    let reliable_order = pullbacks
        .iter()
        .map(|r| r.reliable_order)
        .min()
        .unwrap_or(k);
    Ok(LiftReport {
        pullbacks,
        w_mismatch,
        restriction_ok,
        ok,
        reliable_order,
    })
}
