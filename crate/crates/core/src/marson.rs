//! The external CR hypersurface `Im w = phi(z, zb, Im zd, Re w)` obtained by
//! promoting each `t_l` to the imaginary part of a new complex variable `zd_l`,
//! and descent of shift-equivariant CR maps back to structure maps.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{reversion, Alphabet, Assignment, Gauss, Jet, Var};
use crate::linalg::GaussMatrix;
use crate::structure::{
    germ_alphabet, hessian_block, is_solution, levi_form, LeviForm, SolutionReport, StructureGerm,
};

/// Note attached to every lift: the construction depends on the chart.
pub const CHART_NOTE: &str =
    "the external lift depends on the chosen adapted coordinates (z, s, t); it is not an invariant of the structure";

/// `z1..zn, zd1..zdm, zb1..zbn, zdb1..zdbm, s`.
pub fn lift_alphabet(nu: usize, nprime: usize) -> Arc<Alphabet> {
    let mut names: Vec<String> = (1..=nu).map(|j| format!("z{j}")).collect();
    names.extend((1..=nprime).map(|l| format!("zd{l}")));
    names.extend((1..=nu).map(|j| format!("zb{j}")));
    names.extend((1..=nprime).map(|l| format!("zdb{l}")));
    names.push("s".into());
    let mut pairs: Vec<(String, String)> = (1..=nu)
        .map(|j| (format!("z{j}"), format!("zb{j}")))
        .collect();
    pairs.extend((1..=nprime).map(|l| (format!("zd{l}"), format!("zdb{l}"))));
    Alphabet::with_conjugation(&names, &pairs).expect("lift alphabet")
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExternalLift {
    /// `phi(z, zb, (zd - zdb)/2i, s)` over [`lift_alphabet`].
    pub defining: Jet,
    pub source: StructureGerm,
    pub chart_note: &'static str,
}

impl ExternalLift {
    fn holo_vars(&self) -> Vec<Var> {
        (0..self.source.rank()).collect()
    }

    fn antiholo_vars(&self) -> Vec<Var> {
        let n = self.source.rank();
        (n..2 * n).collect()
    }

    /// Sets `zd = i t` (so `Im zd = t`) and returns the resulting jet over the
    /// source germ alphabet; it equals the source `phi`.
    pub fn restrict_to_source(&self) -> Result<Jet> {
        let g = &self.source;
        let (nu, np) = (g.nu(), g.nprime());
        let ga = g.alphabet();
        let k = g.order();
        let v = g.vars();
        let mut asg = Assignment::new(self.defining.alphabet(), ga);
        for j in 0..nu {
            asg.set(j, Jet::var(ga, k, v.z[j]));
            asg.set(nu + np + j, Jet::var(ga, k, v.zb[j]));
        }
        for l in 0..np {
            let t = Jet::var(ga, k, v.t[l]);
            asg.set(nu + l, t.scale(&Gauss::i()));
            asg.set(2 * nu + np + l, t.scale(&Gauss::i().mul_int(-1)));
        }
        asg.set(2 * (nu + np), Jet::var(ga, k, v.s));
        Ok(self.defining.compose(&asg)?)
    }

    /// Complex rank at 0 of the differentials of the first integrals, before
    /// (`z, w`) and after (`z, zd, w`) the lift, in real coordinates
    /// `(x, y, xd, t, s)`.
    pub fn first_integral_ranks(&self) -> (usize, usize) {
        let g = &self.source;
        let (nu, np) = (g.nu(), g.nprime());
        let v = g.vars();
        let phi = g.phi();
        // real coordinates: x_j, y_j, xd_l, t_l, s
        let ncols = 2 * nu + 2 * np + 1;
        let i = Gauss::i();
        let dphi: Vec<Gauss> = {
            let mut row = vec![Gauss::zero(); ncols];
            for j in 0..nu {
                let pz = phi.first_derivative_at_zero(v.z[j]);
                let pzb = phi.first_derivative_at_zero(v.zb[j]);
                row[j] = &pz + &pzb;
                row[nu + j] = &i * &(&pz - &pzb);
            }
            for l in 0..np {
                row[2 * nu + np + l] = phi.first_derivative_at_zero(v.t[l]);
            }
            row[ncols - 1] = phi.first_derivative_at_zero(v.s);
            row
        };
        let mut rows: Vec<Vec<Gauss>> = Vec::new();
        for j in 0..nu {
            let mut r = vec![Gauss::zero(); ncols];
            r[j] = Gauss::one();
            r[nu + j] = i.clone();
            rows.push(r);
        }
        let mut dw: Vec<Gauss> = dphi.iter().map(|c| &i * c).collect();
        dw[ncols - 1] += &Gauss::one();
        rows.push(dw);
        let before = GaussMatrix::from_fn(rows.len(), ncols, |a, b| rows[a][b].clone()).rank();
        for l in 0..np {
            let mut r = vec![Gauss::zero(); ncols];
            r[2 * nu + l] = Gauss::one();
            r[2 * nu + np + l] = i.clone();
            rows.push(r);
        }
        let after = GaussMatrix::from_fn(rows.len(), ncols, |a, b| rows[a][b].clone()).rank();
        (before, after)
    }
}

pub fn external_lift(g: &StructureGerm) -> Result<ExternalLift> {
    let (nu, np) = (g.nu(), g.nprime());
    let la = lift_alphabet(nu, np);
    let k = g.order();
    let v = g.vars();
    let mut asg = Assignment::new(g.alphabet(), &la);
    for j in 0..nu {
        asg.set(v.z[j], Jet::var(&la, k, j));
        asg.set(v.zb[j], Jet::var(&la, k, nu + np + j));
    }
    let half_over_i = Gauss::complex((0, 1), (-1, 2));
    for l in 0..np {
        let im =
            (&Jet::var(&la, k, nu + l) - &Jet::var(&la, k, 2 * nu + np + l)).scale(&half_over_i);
        asg.set(v.t[l], im);
    }
    asg.set(v.s, Jet::var(&la, k, 2 * (nu + np)));
    let defining = g.phi().compose(&asg)?;
    let lift = ExternalLift {
        defining,
        source: g.clone(),
        chart_note: CHART_NOTE,
    };
    if lift.restrict_to_source()? != *g.phi() {
        return Err(Error::Invariant(
            "external lift does not restrict to the source phi".into(),
        ));
    }
    let (before, after) = lift.first_integral_ranks();
    if after != before + np {
        return Err(Error::Invariant(format!(
            "first integral rank {before} -> {after}, expected +{np}"
        )));
    }
    Ok(lift)
}

/// Levi data of the external hypersurface.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExternalLevi {
    /// Assembled from blocks of the source Hessian.
    pub levi: LeviForm,
    pub source_levi: LeviForm,
    /// Block matrix equals `D L D*` with `D = diag(I, (2i)^-1 I)`.
    pub relation_holds: bool,
    /// Block matrix equals the Levi matrix of the lifted jet itself.
    pub direct_matches: bool,
    pub strictly_pseudoconvex: bool,
}

/// Block formula `[[phi_{z zb}, (i/2) phi_{z t}], [-(i/2) phi_{t zb}, (1/4) phi_{t t}]]`.
pub fn external_levi(lift: &ExternalLift) -> ExternalLevi {
    let g = &lift.source;
    let (nu, np) = (g.nu(), g.nprime());
    let v = g.vars();
    let phi = g.phi();
    let half_i = Gauss::complex((0, 1), (1, 2));
    let quarter = Gauss::ratio(1, 4);
    let m = GaussMatrix::from_fn(nu + np, nu + np, |a, b| match (a < nu, b < nu) {
        (true, true) => phi.second_derivative_at_zero(v.z[a], v.zb[b]),
        (true, false) => &half_i * &phi.second_derivative_at_zero(v.z[a], v.t[b - nu]),
        (false, true) => &(-&half_i) * &phi.second_derivative_at_zero(v.t[a - nu], v.zb[b]),
        (false, false) => &quarter * &phi.second_derivative_at_zero(v.t[a - nu], v.t[b - nu]),
    });
    let source_levi = levi_form(g);
    let inv2i = Gauss::complex((0, 1), (-1, 2));
    let d = GaussMatrix::diagonal(
        &(0..nu + np)
            .map(|a| if a < nu { Gauss::one() } else { inv2i.clone() })
            .collect::<Vec<_>>(),
    );
    let related = d.mul(&source_levi.matrix).mul(&d.conj_transpose());
    let direct = hessian_block(&lift.defining, &lift.holo_vars(), &lift.antiholo_vars());
    let levi = LeviForm::from_matrix(m);
    ExternalLevi {
        relation_holds: related == levi.matrix,
        direct_matches: direct == levi.matrix,
        strictly_pseudoconvex: levi.definite,
        levi,
        source_levi,
    }
}

/// Alphabet `zd1..zdm, z1..zn, w` of holomorphic maps of the lift.
pub fn map_alphabet(nu: usize, nprime: usize) -> Arc<Alphabet> {
    let mut names: Vec<String> = (1..=nprime).map(|l| format!("zd{l}")).collect();
    names.extend((1..=nu).map(|j| format!("z{j}")));
    names.push("w".into());
    Alphabet::plain(&names).expect("map alphabet")
}

/// Structure map induced by `f(zd, z, w) = (zd + f1(z, w), f2(z, w))`.
#[derive(Clone, Debug)]
pub struct DescendedMap {
    /// `z' = f2^z(z, W)`, complex jets over the source germ alphabet.
    pub z: Vec<Jet>,
    /// `s' = Re f2^w(z, W)`.
    pub s: Jet,
    /// `t' = t + Im f1(z, W)`.
    pub t: Vec<Jet>,
    /// `w' = f2^w(z, W)`; a target germ is compatible when its `phi` pulls
    /// back to `Im` of this.
    pub w_image: Jet,
}

fn check_map(lift: &ExternalLift, f1: &[Jet], f2: &[Jet]) -> Result<Arc<Alphabet>> {
    let (nu, np) = (lift.source.nu(), lift.source.nprime());
    let ma = map_alphabet(nu, np);
    if f1.len() != np || f2.len() != nu + 1 {
        return Err(Error::Mismatch(format!(
            "expected {np} components in f1 and {} in f2, got {} and {}",
            nu + 1,
            f1.len(),
            f2.len()
        )));
    }
    for (idx, f) in f1.iter().chain(f2).enumerate() {
        if **f.alphabet() != *ma {
            return Err(Error::Mismatch(format!(
                "map component {idx} is not over {:?}",
                ma.names()
            )));
        }
        if !f.constant_term().is_zero() {
            return Err(Error::Precondition(format!(
                "map component {idx} does not fix the origin"
            )));
        }
        if let Some(l) = (0..np).find(|&l| f.contains_var(l)) {
            return Err(Error::NotShiftEquivariant(format!(
                "component {idx} depends on zd{}",
                l + 1
            )));
        }
    }
    Ok(ma)
}

/// Computes `F(x, y, s, t) = (f2^z(Z, W), Re f2^w(Z, W), t + Im f1(Z, W))`
/// with `Z = z`, `W = s + i phi`.
pub fn descend(lift: &ExternalLift, f1: &[Jet], f2: &[Jet]) -> Result<DescendedMap> {
    let ma = check_map(lift, f1, f2)?;
    let g = &lift.source;
    let (nu, np) = (g.nu(), g.nprime());
    let ga = g.alphabet();
    let k = g.order();
    let v = g.vars();
    let mut asg = Assignment::new(&ma, ga);
    for l in 0..np {
        asg.set(l, Jet::zero(ga, k));
    }
    for j in 0..nu {
        asg.set(np + j, Jet::var(ga, k, v.z[j]));
    }
    asg.set(np + nu, g.w());
    let on = |f: &Jet| -> Result<Jet> { Ok(f.compose(&asg)?) };
    let z = f2[..nu].iter().map(on).collect::<Result<Vec<_>>>()?;
    let w_image = on(&f2[nu])?;
    let t = f1
        .iter()
        .enumerate()
        .map(|(l, f)| Ok(&Jet::var(ga, k, v.t[l]) + &on(f)?.im()))
        .collect::<Result<Vec<_>>>()?;
    Ok(DescendedMap {
        z,
        s: w_image.re(),
        t,
        w_image,
    })
}

/// Outcome of checking a descended map against a target germ.
#[derive(Clone, Debug)]
pub struct DescendReport {
    pub map: DescendedMap,
    /// Pullbacks of `z'_j` and then `w'`, each tested with the source frame.
    pub pullbacks: Vec<SolutionReport>,
    pub ok: bool,
    pub note: &'static str,
}

/// Caveat carried by descent reports.
pub const CONDITION_E_NOTE: &str =
    "the CR equivalence of the external hypersurfaces is taken as given; Condition (E) is not verified";

fn pullback_w(target: &StructureGerm, map: &DescendedMap) -> Result<Jet> {
    let ga = target.alphabet();
    let v = target.vars();
    let mut asg = Assignment::new(ga, map.s.alphabet());
    for j in 0..target.nu() {
        asg.set(v.z[j], map.z[j].clone());
        asg.set(v.zb[j], map.z[j].conj());
    }
    asg.set(v.s, map.s.clone());
    for (l, t) in map.t.iter().enumerate() {
        asg.set(v.t[l], t.clone());
    }
    Ok(&map.s + &target.phi().compose(&asg)?.scale(&Gauss::i()))
}

/// Descends `f` and checks that the target's first integrals pull back to
/// solutions of the source structure.
pub fn descend_map(
    lift: &ExternalLift,
    target: &StructureGerm,
    f1: &[Jet],
    f2: &[Jet],
) -> Result<DescendReport> {
    let g = &lift.source;
    if target.nu() != g.nu() || target.nprime() != g.nprime() {
        return Err(Error::Mismatch(
            "source and target dimensions differ".into(),
        ));
    }
    let map = descend(lift, f1, f2)?;
    let mut pullbacks: Vec<SolutionReport> = map.z.iter().map(|zj| is_solution(g, zj)).collect();
    pullbacks.push(is_solution(g, &pullback_w(target, &map)?));
    let ok = pullbacks.iter().all(|r| r.is_solution);
    Ok(DescendReport {
        map,
        pullbacks,
        ok,
        note: CONDITION_E_NOTE,
    })
}

/// The target germ for which `f` is an equivalence: `phi' = Im(w') o F^-1`.
pub fn pushforward_target(lift: &ExternalLift, f1: &[Jet], f2: &[Jet]) -> Result<StructureGerm> {
    let map = descend(lift, f1, f2)?;
    let g = &lift.source;
    let v = g.vars();
    let mut comps: Vec<Jet> = map.z.clone();
    comps.extend(map.z.iter().map(Jet::conj));
    comps.push(map.s.clone());
    comps.extend(map.t.iter().cloned());
    let mut vars: Vec<Var> = v.z.clone();
    vars.extend(&v.zb);
    vars.push(v.s);
    vars.extend(&v.t);
    let inv = reversion(&comps, &vars)?;
    let mut asg = Assignment::identity(g.alphabet(), g.order());
    for (&x, j) in vars.iter().zip(inv) {
        asg.set(x, j);
    }
    let phi_t = map.w_image.im().compose(&asg)?;
    let phi_t = Jet::from_terms(
        &germ_alphabet(g.nu(), g.nprime()),
        phi_t.order(),
        phi_t.terms().map(|(m, c)| (*m, c.clone())),
    );
    StructureGerm::new(g.nu(), g.nprime(), phi_t.order(), phi_t)
}
