//! Newton iteration on jets: implicit functions and inverse maps.
//!
//! Each Newton step uses the full Jacobian evaluated along the current
//! approximation, so the number of correct degrees roughly doubles per step
//! (`v -> 2v + 1`).

use std::sync::Arc;

use num_traits::Zero;

use super::alphabet::{Alphabet, Var};
use super::compose::Assignment;
use super::series::Jet;
use super::JetError;
use crate::linalg::GaussMatrix;

/// Square matrix of jets over a common alphabet.
type JetMatrix = Vec<Vec<Jet>>;

fn constant_part(m: &JetMatrix) -> GaussMatrix {
    let n = m.len();
    GaussMatrix::from_fn(n, m.first().map_or(0, Vec::len), |i, j| {
        m[i][j].constant_term()
    })
}

fn const_jet_matrix(c: &GaussMatrix, alphabet: &Arc<Alphabet>, order: u32) -> JetMatrix {
    (0..c.rows())
        .map(|i| {
            (0..c.cols())
                .map(|j| Jet::constant(alphabet, order, c[(i, j)].clone()))
                .collect()
        })
        .collect()
}

fn mat_mul(a: &JetMatrix, b: &JetMatrix, alphabet: &Arc<Alphabet>, order: u32) -> JetMatrix {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = Jet::zero(alphabet, order);
                    for (k, bk) in b.iter().enumerate() {
                        if a[i][k].is_zero() || bk[j].is_zero() {
                            continue;
                        }
                        acc = &acc + &(&a[i][k] * &bk[j]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Inverse of a jet matrix whose constant part is invertible, via the Neumann
/// series `sum_k (-J0^{-1} N)^k J0^{-1}` with `N` of positive valuation.
fn invert_jet_matrix(
    m: &JetMatrix,
    alphabet: &Arc<Alphabet>,
    order: u32,
) -> Result<JetMatrix, JetError> {
    let c = constant_part(m);
    let cinv = c.inverse().ok_or(JetError::SingularJacobian {
        rank: c.rank(),
        size: c.rows(),
    })?;
    let cinv_j = const_jet_matrix(&cinv, alphabet, order);
    let n = m.len();
    let nil: JetMatrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| &m[i][j] - &Jet::constant(alphabet, order, c[(i, j)].clone()))
                .collect()
        })
        .collect();
    let step: JetMatrix = mat_mul(&cinv_j, &nil, alphabet, order)
        .into_iter()
        .map(|row| row.into_iter().map(|x| -x).collect())
        .collect();
    let mut term = cinv_j.clone();
    let mut acc = cinv_j;
    for _ in 0..order {
        term = mat_mul(&step, &term, alphabet, order);
        if term.iter().all(|r| r.iter().all(Jet::is_zero)) {
            break;
        }
        for i in 0..n {
            for j in 0..n {
                acc[i][j] = &acc[i][j] + &term[i][j];
            }
        }
    }
    Ok(acc)
}

fn mat_vec(a: &JetMatrix, x: &[Jet], alphabet: &Arc<Alphabet>, order: u32) -> Vec<Jet> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(Jet::zero(alphabet, order), |acc, (r, v)| {
                    if r.is_zero() || v.is_zero() {
                        acc
                    } else {
                        &acc + &(r * v)
                    }
                })
        })
        .collect()
}

fn check_common(eqs: &[Jet]) -> Result<(Arc<Alphabet>, u32), JetError> {
    let first = eqs
        .first()
        .ok_or_else(|| JetError::Dimension("empty system".into()))?;
    let alphabet = first.alphabet().clone();
    let mut order = first.order();
    for e in eqs {
        if **e.alphabet() != *alphabet {
            return Err(JetError::AlphabetMismatch(
                "equations over different alphabets".into(),
            ));
        }
        order = order.min(e.order());
    }
    Ok((alphabet, order))
}

/// Solves `eqs(params, u) = 0` for `u(params)` near the origin.
///
/// The equations live over one alphabet containing both the parameters and
/// the `unknowns`; the returned jets (one per unknown, in order) use the same
/// alphabet and contain no unknown variables. They are reliable to the
/// smallest order among the equations.
pub fn implicit_solve(eqs: &[Jet], unknowns: &[Var]) -> Result<Vec<Jet>, JetError> {
    let (alphabet, order) = check_common(eqs)?;
    if eqs.len() != unknowns.len() {
        return Err(JetError::Dimension(format!(
            "{} equations for {} unknowns",
            eqs.len(),
            unknowns.len()
        )));
    }
    for (i, e) in eqs.iter().enumerate() {
        if !e.constant_term().is_zero() {
            return Err(JetError::NotVanishing { index: i });
        }
    }
    let n = eqs.len();
    let jac0 = GaussMatrix::from_fn(n, n, |i, j| eqs[i].first_derivative_at_zero(unknowns[j]));
    if jac0.inverse().is_none() {
        return Err(JetError::SingularJacobian {
            rank: jac0.rank(),
            size: n,
        });
    }
    let eqs: Vec<Jet> = eqs.iter().map(|e| e.truncate(order)).collect();
    // dE_i/du_j; the lost top degree only ever meets factors of positive valuation
    let jac: Vec<Vec<Jet>> = eqs
        .iter()
        .map(|e| {
            unknowns
                .iter()
                .map(|&u| e.derive(u).assume_order(order))
                .collect()
        })
        .collect();

    // approximations carry only their `valid` degrees; raising the order before
    // each step lets Newton fill in the rest
    let mut sol: Vec<Jet> = vec![Jet::zero(&alphabet, 0); n];
    let mut valid = 0u32;
    while valid < order {
        let k = (2 * valid + 1).min(order);
        let mut asg = Assignment::identity(&alphabet, k);
        for (&u, s) in unknowns.iter().zip(&sol) {
            asg.set(u, s.clone().assume_order(k));
        }
        let resid: Vec<Jet> = eqs
            .iter()
            .map(|e| e.truncate(k).compose(&asg))
            .collect::<Result<_, _>>()?;
        // the residual vanishes through degree `valid`, so the inverse
        // Jacobian is only needed through degree k - valid - 1
        let need = k - valid - 1;
        let jk: JetMatrix = jac
            .iter()
            .map(|row| {
                row.iter()
                    .map(|d| d.truncate(need).compose(&asg))
                    .collect::<Result<_, _>>()
            })
            .collect::<Result<_, _>>()?;
        let jinv: JetMatrix = invert_jet_matrix(&jk, &alphabet, need)?
            .into_iter()
            .map(|row| row.into_iter().map(|j| j.assume_order(k)).collect())
            .collect();
        let delta = mat_vec(&jinv, &resid, &alphabet, k);
        sol = sol
            .iter()
            .zip(&delta)
            .map(|(s, d)| &s.clone().assume_order(k) - d)
            .collect();
        valid = k;
    }

    let mut asg = Assignment::identity(&alphabet, order);
    for (&u, s) in unknowns.iter().zip(&sol) {
        asg.set(u, s.clone());
    }
    for e in &eqs {
        let r = e.compose(&asg)?;
        if !r.is_zero() {
            return Err(JetError::Invariant(format!("implicit_solve residual {r}")));
        }
    }
    Ok(sol)
}

/// Inverse of a jet diffeomorphism acting on `vars`, with the remaining
/// variables of the alphabet as parameters.
///
/// `map[i]` is the image of `vars[i]`. The result `g` satisfies
/// `map(p, g(p, y)) = y` to the map's order.
pub fn reversion(map: &[Jet], vars: &[Var]) -> Result<Vec<Jet>, JetError> {
    let (alphabet, order) = check_common(map)?;
    if map.len() != vars.len() {
        return Err(JetError::Dimension(format!(
            "{} components for {} variables",
            map.len(),
            vars.len()
        )));
    }
    for (i, f) in map.iter().enumerate() {
        if !f.constant_term().is_zero() {
            return Err(JetError::NotVanishing { index: i });
        }
    }
    let n = map.len();
    let lin = GaussMatrix::from_fn(n, n, |i, j| map[i].first_derivative_at_zero(vars[j]));
    if lin.inverse().is_none() {
        return Err(JetError::SingularJacobian {
            rank: lin.rank(),
            size: n,
        });
    }
    let map: Vec<Jet> = map.iter().map(|f| f.truncate(order)).collect();
    let jac: Vec<Vec<Jet>> = map
        .iter()
        .map(|f| {
            vars.iter()
                .map(|&v| f.derive(v).assume_order(order))
                .collect()
        })
        .collect();
    let ids: Vec<Jet> = vars
        .iter()
        .map(|&v| Jet::var(&alphabet, order, v))
        .collect();

    let mut g: Vec<Jet> = vec![Jet::zero(&alphabet, 0); n];
    let mut valid = 0u32;
    while valid < order {
        let k = (2 * valid + 1).min(order);
        let mut asg = Assignment::identity(&alphabet, k);
        for (&v, gi) in vars.iter().zip(&g) {
            asg.set(v, gi.clone().assume_order(k));
        }
        let resid: Vec<Jet> = map
            .iter()
            .zip(&ids)
            .map(|(f, y)| Ok(&f.truncate(k).compose(&asg)? - &y.truncate(k)))
            .collect::<Result<_, JetError>>()?;
        // the residual vanishes through degree `valid`, so the inverse
        // Jacobian is only needed through degree k - valid - 1
        let need = k - valid - 1;
        let jk: JetMatrix = jac
            .iter()
            .map(|row| {
                row.iter()
                    .map(|d| d.truncate(need).compose(&asg))
                    .collect::<Result<_, _>>()
            })
            .collect::<Result<_, _>>()?;
        let jinv: JetMatrix = invert_jet_matrix(&jk, &alphabet, need)?
            .into_iter()
            .map(|row| row.into_iter().map(|j| j.assume_order(k)).collect())
            .collect();
        let delta = mat_vec(&jinv, &resid, &alphabet, k);
        g = g
            .iter()
            .zip(&delta)
            .map(|(s, d)| &s.clone().assume_order(k) - d)
            .collect();
        valid = k;
    }
    Ok(g)
}

/// Composes the component list `outer` (images of `vars`) with `inner`,
/// leaving the other variables fixed: returns `outer(p, inner(p, y))`.
pub fn compose_maps(outer: &[Jet], inner: &[Jet], vars: &[Var]) -> Result<Vec<Jet>, JetError> {
    let (alphabet, order) = check_common(outer)?;
    let mut asg = Assignment::identity(&alphabet, order);
    for (&v, g) in vars.iter().zip(inner) {
        asg.set(v, g.clone());
    }
    outer.iter().map(|f| f.compose(&asg)).collect()
}

/// True when `maps[i] == vars[i]` for every component.
pub fn is_identity_map(maps: &[Jet], vars: &[Var]) -> bool {
    maps.iter()
        .zip(vars)
        .all(|(f, &v)| *f == Jet::var(f.alphabet(), f.order(), v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Gauss;

    #[test]
    fn catalan_fixed_point() {
        // t - s - t^2 = 0  =>  t = s + s^2 + 2 s^3 + 5 s^4 + 14 s^5
        let a = Alphabet::plain(&["s", "t"]).unwrap();
        let k = 5;
        let eq = Jet::from_exponents(
            &a,
            k,
            [
                (vec![0, 1], Gauss::from_int(1)),
                (vec![1, 0], Gauss::from_int(-1)),
                (vec![0, 2], Gauss::from_int(-1)),
            ],
        );
        let t = implicit_solve(&[eq], &[1]).unwrap().remove(0);
        let expect: Vec<i64> = vec![1, 1, 2, 5, 14];
        for (d, c) in expect.iter().enumerate() {
            assert_eq!(t.coeff_of(&[d as u32 + 1, 0]), Gauss::from_int(*c));
        }
        assert_eq!(t.num_terms(), 5);
    }

    #[test]
    fn linear_and_quadratic() {
        let a = Alphabet::plain(&["s", "t"]).unwrap();
        let eq = Jet::var(&a, 4, 1) - Jet::var(&a, 4, 0);
        assert_eq!(implicit_solve(&[eq], &[1]).unwrap()[0], Jet::var(&a, 4, 0));
        // d/dt (t^2 + s t) = 2t + s = 0  =>  t = -s/2
        let phi = Jet::from_exponents(
            &a,
            4,
            [
                (vec![0, 2], Gauss::from_int(1)),
                (vec![1, 1], Gauss::from_int(1)),
            ],
        );
        let t = implicit_solve(&[phi.derive(1)], &[1]).unwrap().remove(0);
        assert_eq!(t, Jet::var(&a, 3, 0).scale(&Gauss::ratio(-1, 2)));
    }

    #[test]
    fn solve_errors() {
        let a = Alphabet::plain(&["s", "t"]).unwrap();
        let degenerate = Jet::var(&a, 4, 1).pow(2) - Jet::var(&a, 4, 0);
        assert!(matches!(
            implicit_solve(&[degenerate], &[1]),
            Err(JetError::SingularJacobian { rank: 0, size: 1 })
        ));
        let shifted = Jet::var(&a, 4, 1) + Jet::one(&a, 4);
        assert!(matches!(
            implicit_solve(&[shifted], &[1]),
            Err(JetError::NotVanishing { index: 0 })
        ));
    }

    #[test]
    fn lagrange_reversion() {
        // t + t^2 inverts to t - t^2 + 2 t^3
        let a = Alphabet::plain(&["t"]).unwrap();
        let f = Jet::from_exponents(
            &a,
            3,
            [(vec![1], Gauss::from_int(1)), (vec![2], Gauss::from_int(1))],
        );
        let g = reversion(&[f.clone()], &[0]).unwrap().remove(0);
        let expect = Jet::from_exponents(
            &a,
            3,
            [
                (vec![1], Gauss::from_int(1)),
                (vec![2], Gauss::from_int(-1)),
                (vec![3], Gauss::from_int(2)),
            ],
        );
        assert_eq!(g, expect);
        assert!(is_identity_map(
            &compose_maps(&[f], &[g], &[0]).unwrap(),
            &[0]
        ));
        let id = Jet::var(&a, 6, 0);
        assert_eq!(reversion(&[id.clone()], &[0]).unwrap()[0], id);
        assert!(reversion(&[id.pow(2)], &[0]).is_err());
    }

    #[test]
    fn parametric_reversion() {
        // t -> t (1 + s) + s t^2 with parameter s
        let a = Alphabet::plain(&["s", "t"]).unwrap();
        let f = Jet::from_exponents(
            &a,
            5,
            [
                (vec![0, 1], Gauss::from_int(1)),
                (vec![1, 1], Gauss::from_int(1)),
                (vec![1, 2], Gauss::from_int(1)),
                (vec![2, 0], Gauss::ratio(1, 3)),
            ],
        );
        let g = reversion(&[f.clone()], &[1]).unwrap();
        assert!(is_identity_map(
            &compose_maps(&[f.clone()], &g, &[1]).unwrap(),
            &[1]
        ));
        assert!(is_identity_map(
            &compose_maps(&g, &[f], &[1]).unwrap(),
            &[1]
        ));
    }
}
