//! Germs of locally integrable structures of hypersurface type.
//!
//! In adapted coordinates `(x, y, s, t)` the structure has first integrals
//! `z_j = x_j + i y_j` and `w = s + i phi(z, zb, s, t)` with `phi(0) = 0` and
//! `d phi(0) = 0`. Everything here is computed from the jet of `phi`.

use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{Alphabet, Assignment, Gauss, Jet, Var};
use crate::linalg::{GaussMatrix, Signature};

/// Variable layout of a germ alphabet `z1..zn, zb1..zbn, s, t1..tm`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GermVars {
    pub z: Vec<Var>,
    pub zb: Vec<Var>,
    pub s: Var,
    pub t: Vec<Var>,
}

/// Alphabet for a germ with `nu` complex and `nprime` real `t` variables.
pub fn germ_alphabet(nu: usize, nprime: usize) -> Arc<Alphabet> {
    let mut names: Vec<String> = Vec::new();
    names.extend((1..=nu).map(|j| format!("z{j}")));
    names.extend((1..=nu).map(|j| format!("zb{j}")));
    names.push("s".into());
    names.extend((1..=nprime).map(|l| format!("t{l}")));
    let pairs: Vec<(String, String)> = (1..=nu)
        .map(|j| (format!("z{j}"), format!("zb{j}")))
        .collect();
    Alphabet::with_conjugation(&names, &pairs).expect("germ alphabet")
}

impl GermVars {
    pub fn new(nu: usize, nprime: usize) -> Self {
        GermVars {
            z: (0..nu).collect(),
            zb: (nu..2 * nu).collect(),
            s: 2 * nu,
            t: (2 * nu + 1..2 * nu + 1 + nprime).collect(),
        }
    }
}

/// A nondegenerate-candidate structure germ given by the jet of `phi`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureGerm {
    nu: usize,
    nprime: usize,
    phi: Jet,
    vars: GermVars,
}

impl StructureGerm {
    /// Validates `phi` (real, vanishing to second order) and builds the germ.
    ///
    /// `phi` must live over [`germ_alphabet`]`(nu, nprime)` and be known at
    /// least to `order`; it is truncated to `order`.
    pub fn new(nu: usize, nprime: usize, order: u32, phi: Jet) -> Result<Self> {
        let alphabet = germ_alphabet(nu, nprime);
        if **phi.alphabet() != *alphabet {
            return Err(Error::Mismatch(format!(
                "phi over {:?}, expected {:?}",
                phi.alphabet(),
                alphabet
            )));
        }
        if order == 0 {
            return Err(Error::Mismatch("truncation order must be positive".into()));
        }
        if phi.order() < order {
            return Err(Error::Mismatch(format!(
                "phi known to order {} but order {order} requested",
                phi.order()
            )));
        }
        let phi = phi.truncate(order);
        if !phi.is_real() {
            return Err(Error::NonReal(phi.to_string()));
        }
        if !phi.constant_term().is_zero() {
            return Err(Error::NotNormalized(format!(
                "phi(0) = {}",
                phi.constant_term()
            )));
        }
        if let Some((m, c)) = phi.terms().find(|(m, _)| m.degree() == 1) {
            return Err(Error::NotNormalized(format!(
                "d phi(0) has term {}*{}",
                c,
                phi.monomial_string(m)
            )));
        }
        Ok(StructureGerm {
            nu,
            nprime,
            phi,
            vars: GermVars::new(nu, nprime),
        })
    }

    /// Parses `phi` from a polynomial literal.
    pub fn from_literal(nu: usize, nprime: usize, order: u32, phi: &str) -> Result<Self> {
        let alphabet = germ_alphabet(nu, nprime);
        Self::new(nu, nprime, order, Jet::parse(phi, &alphabet, order)?)
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn nprime(&self) -> usize {
        self.nprime
    }

    /// `n = nu + n'`, the rank of the structure.
    pub fn rank(&self) -> usize {
        self.nu + self.nprime
    }

    /// `N = 2 nu + n' + 1`, the dimension of the underlying manifold.
    pub fn dimension(&self) -> usize {
        2 * self.nu + self.nprime + 1
    }

    pub fn order(&self) -> u32 {
        self.phi.order()
    }

    pub fn phi(&self) -> &Jet {
        &self.phi
    }

    pub fn vars(&self) -> &GermVars {
        &self.vars
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        self.phi.alphabet()
    }

    /// The first integral `w = s + i phi`.
    pub fn w(&self) -> Jet {
        let s = Jet::var(self.alphabet(), self.order(), self.vars.s);
        &s + &self.phi.scale(&Gauss::i())
    }

    /// The first integral `z_j`.
    pub fn z(&self, j: usize) -> Jet {
        Jet::var(self.alphabet(), self.order(), self.vars.z[j])
    }

    /// `phi_s == 0` identically.
    pub fn is_rigid(&self) -> bool {
        !self.phi.contains_var(self.vars.s)
    }

    /// Germ with `phi` replaced, same dimensions.
    pub fn with_phi(&self, phi: Jet) -> Result<Self> {
        Self::new(self.nu, self.nprime, phi.order(), phi)
    }

    /// Restriction of `phi` to `t = 0`.
    pub fn phi_at_t_zero(&self) -> Jet {
        self.phi.restrict_zero(&self.vars.t)
    }
}

/// A vector field `sum_k c_k d/d(var_k)` with jet coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub components: Vec<(Var, Jet)>,
}

impl VectorField {
    /// The jet `X u`.
    pub fn apply(&self, u: &Jet) -> Jet {
        let mut acc: Option<Jet> = None;
        for (v, c) in &self.components {
            let term = c * &u.derive(*v);
            acc = Some(match acc {
                None => term,
                Some(a) => &a + &term,
            });
        }
        acc.unwrap_or_else(|| Jet::zero(u.alphabet(), u.order()))
    }

    /// Coefficient of `d/d(var)`, if present.
    pub fn coefficient(&self, v: Var) -> Option<&Jet> {
        self.components
            .iter()
            .find(|(w, _)| *w == v)
            .map(|(_, c)| c)
    }
}

/// The frame `L_1..L_n` spanning the structure bundle.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub fields: Vec<VectorField>,
}

/// Builds `L_j = d/dzb_j - i phi_{zb_j}/(1 + i phi_s) d/ds` and
/// `L_{nu+l} = d/dt_l - i phi_{t_l}/(1 + i phi_s) d/ds`.
pub fn build_frame(g: &StructureGerm) -> Frame {
    let phi = g.phi();
    let a = g.alphabet();
    let k = g.order();
    let v = g.vars();
    let unit = &Jet::one(a, k) + &phi.derive(v.s).scale(&Gauss::i());
    let inv = unit
        .unit_inverse()
        .expect("1 + i phi_s is a unit since phi_s(0) = 0");
    let minus_i = Gauss::i().mul_int(-1);
    let directions = v.zb.iter().chain(v.t.iter());
    let fields = directions
        .map(|&d| {
            let c = (&phi.derive(d) * &inv).scale(&minus_i);
            let one = Jet::one(a, k.saturating_sub(1));
            VectorField {
                components: vec![(d, one), (v.s, c)],
            }
        })
        .collect();
    Frame { fields }
}

/// `L u`, reliable to order `K - 1`.
pub fn apply_field(field: &VectorField, u: &Jet) -> Jet {
    field.apply(u)
}

/// Outcome of testing whether a jet is annihilated by the whole frame.
#[derive(Clone, Debug)]
pub struct SolutionReport {
    pub is_solution: bool,
    /// `L_j u` for every frame field.
    pub residuals: Vec<Jet>,
    /// Index and value of the first nonzero residual.
    pub first_failure: Option<(usize, Jet)>,
    pub reliable_order: u32,
}

/// Checks `L_j u == 0` to order `K - 1` for every frame field.
pub fn is_solution(g: &StructureGerm, u: &Jet) -> SolutionReport {
    let frame = build_frame(g);
    solution_report(&frame, u)
}

pub(crate) fn solution_report(frame: &Frame, u: &Jet) -> SolutionReport {
    let residuals: Vec<Jet> = frame.fields.iter().map(|f| f.apply(u)).collect();
    let first_failure = residuals
        .iter()
        .enumerate()
        .find(|(_, r)| !r.is_zero())
        .map(|(i, r)| (i, r.clone()));
    let reliable_order = residuals.iter().map(Jet::order).min().unwrap_or(u.order());
    SolutionReport {
        is_solution: first_failure.is_none(),
        residuals,
        first_failure,
        reliable_order,
    }
}

/// Levi form at the characteristic covector `ds|_0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeviForm {
    #[serde(serialize_with = "crate::report::ser_matrix")]
    pub matrix: GaussMatrix,
    pub signature: Signature,
    pub nondegenerate: bool,
    pub definite: bool,
}

impl LeviForm {
    /// Wraps a Hermitian matrix and computes its inertia exactly.
    pub fn from_matrix(matrix: GaussMatrix) -> Self {
        let signature = matrix.hermitian_signature();
        LeviForm {
            nondegenerate: signature.is_nondegenerate(),
            definite: signature.is_definite(),
            signature,
            matrix,
        }
    }

    /// Positive definite at `ds|_0`.
    pub fn is_positive(&self) -> bool {
        self.signature.is_positive_definite()
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// Matrix of second derivatives at the origin, `rows x cols`.
pub fn hessian_block(phi: &Jet, rows: &[Var], cols: &[Var]) -> GaussMatrix {
    GaussMatrix::from_fn(rows.len(), cols.len(), |i, j| {
        phi.second_derivative_at_zero(rows[i], cols[j])
    })
}

/// Levi matrix with row variables `(z, t)` against column variables `(zb, t)`.
pub fn levi_matrix(g: &StructureGerm) -> GaussMatrix {
    let v = g.vars();
    let rows: Vec<Var> = v.z.iter().chain(&v.t).copied().collect();
    let cols: Vec<Var> = v.zb.iter().chain(&v.t).copied().collect();
    hessian_block(g.phi(), &rows, &cols)
}

pub fn levi_form(g: &StructureGerm) -> LeviForm {
    LeviForm::from_matrix(levi_matrix(g))
}

/// `t`-block of the Levi matrix (the real Hessian of `phi` in `t` at 0).
pub fn t_hessian(g: &StructureGerm) -> GaussMatrix {
    hessian_block(g.phi(), &g.vars().t, &g.vars().t)
}

/// A one-form with jet coefficients on the coframe
/// `dz_j, dzb_j, ds, dt_l, dw`.
#[derive(Clone, Debug, PartialEq)]
pub struct Covector {
    pub dz: Vec<Jet>,
    pub dzb: Vec<Jet>,
    pub ds: Jet,
    pub dt: Vec<Jet>,
    pub dw: Jet,
}

impl Covector {
    fn zero_like(g: &StructureGerm, order: u32) -> Self {
        let a = g.alphabet();
        Covector {
            dz: vec![Jet::zero(a, order); g.nu()],
            dzb: vec![Jet::zero(a, order); g.nu()],
            ds: Jet::zero(a, order),
            dt: vec![Jet::zero(a, order); g.nprime()],
            dw: Jet::zero(a, order),
        }
    }

    fn all(&self) -> impl Iterator<Item = &Jet> {
        self.dz
            .iter()
            .chain(&self.dzb)
            .chain(std::iter::once(&self.ds))
            .chain(&self.dt)
            .chain(std::iter::once(&self.dw))
    }

    fn try_map(&self, f: impl Fn(&Jet) -> Result<Jet>) -> Result<Self> {
        let many = |v: &[Jet]| v.iter().map(&f).collect::<Result<Vec<_>>>();
        Ok(Covector {
            dz: many(&self.dz)?,
            dzb: many(&self.dzb)?,
            ds: f(&self.ds)?,
            dt: many(&self.dt)?,
            dw: f(&self.dw)?,
        })
    }

    /// Rewrites `dw = ds + i d phi` in the coordinate coframe; the result has
    /// zero `dw` component.
    pub fn expand_dw(&self, g: &StructureGerm) -> Covector {
        let phi = g.phi();
        let v = g.vars();
        let i = Gauss::i();
        let idw = |var: Var| &self.dw * &phi.derive(var).scale(&i);
        let mut out = self.clone();
        for j in 0..g.nu() {
            out.dz[j] = &self.dz[j] + &idw(v.z[j]);
            out.dzb[j] = &self.dzb[j] + &idw(v.zb[j]);
        }
        out.ds = &(&self.ds + &self.dw) + &idw(v.s);
        for l in 0..g.nprime() {
            out.dt[l] = &self.dt[l] + &idw(v.t[l]);
        }
        out.dw = Jet::zero(g.alphabet(), self.dw.order());
        out
    }

    /// Complex conjugate one-form: `dz <-> dzb` and conjugated coefficients.
    /// Requires a zero `dw` component (call [`Covector::expand_dw`] first).
    pub fn conj(&self) -> Covector {
        debug_assert!(self.dw.is_zero());
        Covector {
            dz: self.dzb.iter().map(Jet::conj).collect(),
            dzb: self.dz.iter().map(Jet::conj).collect(),
            ds: self.ds.conj(),
            dt: self.dt.iter().map(Jet::conj).collect(),
            dw: self.dw.clone(),
        }
    }

    /// `(v - conj v) / 2i` for a covector already in the coordinate coframe.
    pub fn imaginary_part(&self) -> Covector {
        let c = self.conj();
        let half_over_i = Gauss::complex((0, 1), (-1, 2));
        let sub = |a: &[Jet], b: &[Jet]| -> Vec<Jet> {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).scale(&half_over_i))
                .collect()
        };
        Covector {
            dz: sub(&self.dz, &c.dz),
            dzb: sub(&self.dzb, &c.dzb),
            ds: (&self.ds - &c.ds).scale(&half_over_i),
            dt: sub(&self.dt, &c.dt),
            dw: self.dw.clone(),
        }
    }

    /// Applies a substitution to every coefficient.
    pub fn compose(&self, asg: &Assignment) -> Result<Covector> {
        self.try_map(|j| Ok(j.compose(asg)?))
    }

    pub fn is_zero(&self) -> bool {
        self.all().all(Jet::is_zero)
    }
}

/// `v = -2i sum_j phi_{z_j} dz_j + (1 - i phi_s) dw`.
///
/// After expanding `dw`, the imaginary part of `v` is `phi_t`-valued in the
/// `dt` slots only, so it vanishes on the central manifold.
pub fn characteristic_covector(g: &StructureGerm) -> Covector {
    let phi = g.phi();
    let v = g.vars();
    let k = g.order().saturating_sub(1);
    let mut cv = Covector::zero_like(g, k);
    let m2i = Gauss::complex((0, 1), (-2, 1));
    for j in 0..g.nu() {
        cv.dz[j] = phi.derive(v.z[j]).scale(&m2i);
    }
    let mi = Gauss::i().mul_int(-1);
    cv.dw = &Jet::one(g.alphabet(), k) + &phi.derive(v.s).scale(&mi);
    cv
}

/// Whether `phi_{t}` vanishes on `t = 0` to order `K - 1`.
pub fn is_straightened(g: &StructureGerm) -> bool {
    g.vars()
        .t
        .iter()
        .all(|&t| g.phi().derive(t).restrict_zero(&g.vars().t).is_zero())
}

/// Constant-coefficient check used by tests and the CLI: the Levi matrix is
/// Hermitian.
pub fn levi_is_hermitian(l: &LeviForm) -> bool {
    l.matrix.is_hermitian()
}

/// Value `phi_s(0)`-free unit `1 + i phi_s` used by the frame.
pub fn frame_unit(g: &StructureGerm) -> Jet {
    let a = g.alphabet();
    &Jet::one(a, g.order()) + &g.phi().derive(g.vars().s).scale(&Gauss::i())
}

/// Diagonal rational quadratic form `sum c_l t_l^2` as a jet over `alphabet`.
pub fn diagonal_quadratic(
    alphabet: &Arc<Alphabet>,
    order: u32,
    t: &[Var],
    coeffs: &[Gauss],
) -> Jet {
    t.iter()
        .zip(coeffs)
        .fold(Jet::zero(alphabet, order), |acc, (&v, c)| {
            &acc + &Jet::var(alphabet, order, v).pow(2).scale(c)
        })
}
