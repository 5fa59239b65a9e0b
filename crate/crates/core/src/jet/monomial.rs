use std::cmp::Ordering;

use super::alphabet::{Var, MAX_VARS};

/// Exponent vector packed one byte per variable.
///
/// Variable 0 occupies the most significant byte so that comparing the packed
/// words is lexicographic comparison of exponent vectors. Ordering is graded:
/// total degree first, then lexicographic.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    degree: u16,
    packed: u128,
}

#[inline]
fn shift(v: Var) -> u32 {
    debug_assert!(v < MAX_VARS);
    (8 * (MAX_VARS - 1 - v)) as u32
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: Var) -> Self {
        Monomial::one().with_exp(v, 1)
    }

    /// Panics if an exponent exceeds 255.
    pub fn from_exponents(exps: &[u32]) -> Self {
        let mut m = Monomial::one();
        for (v, &e) in exps.iter().enumerate() {
            if e > 0 {
                m = m.with_exp(v, e);
            }
        }
        m
    }

    pub fn degree(&self) -> u32 {
        self.degree as u32
    }

    pub fn exp(&self, v: Var) -> u32 {
        ((self.packed >> shift(v)) & 0xff) as u32
    }

    pub fn with_exp(self, v: Var, e: u32) -> Self {
        assert!(e < 256, "exponent {e} out of range");
        let old = self.exp(v);
        let cleared = self.packed & !(0xffu128 << shift(v));
        Monomial {
            degree: (self.degree as u32 - old + e) as u16,
            packed: cleared | ((e as u128) << shift(v)),
        }
    }

    /// Product of monomials. Caller guarantees each resulting exponent < 256.
    #[inline]
    pub fn mul(self, o: Monomial) -> Self {
        Monomial {
            degree: self.degree + o.degree,
            packed: self.packed + o.packed,
        }
    }

    /// Quotient `self / o`, if `o` divides `self`.
    pub fn div(self, o: Monomial) -> Option<Self> {
        (0..MAX_VARS)
            .all(|v| self.exp(v) >= o.exp(v))
            .then(|| Monomial {
                degree: self.degree - o.degree,
                packed: self.packed - o.packed,
            })
    }

    pub fn exponents(&self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|v| self.exp(v)).collect()
    }

    /// Variables with nonzero exponent, paired with the exponent.
    pub fn support(&self, nvars: usize) -> impl Iterator<Item = (Var, u32)> + '_ {
        (0..nvars).filter_map(move |v| {
            let e = self.exp(v);
            (e > 0).then_some((v, e))
        })
    }

    /// Applies a permutation of variables: exponent of `v` moves to `perm[v]`.
    pub fn permuted(&self, perm: &[Var]) -> Self {
        let mut m = Monomial::one();
        for (v, &p) in perm.iter().enumerate() {
            let e = self.exp(v);
            if e > 0 {
                m = m.with_exp(p, e);
            }
        }
        m
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree
            .cmp(&o.degree)
            .then_with(|| o.packed.cmp(&self.packed))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl std::fmt::Debug for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.exponents(MAX_VARS))
    }
}
