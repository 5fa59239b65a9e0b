use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::alphabet::{same_alphabet, Alphabet, Var};
use super::coeff::Gauss;
use super::monomial::Monomial;
use super::JetError;

/// Truncated multivariate power series with exact Gaussian-rational
/// coefficients.
///
/// `order` is the reliable truncation order `K`: every coefficient of total
/// degree `<= K` is exact and nothing above `K` is stored. Terms are kept in
/// graded-lexicographic order with no zero coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct Jet {
    alphabet: Arc<Alphabet>,
    order: u32,
    terms: BTreeMap<Monomial, Gauss>,
}

impl Jet {
    pub fn zero(alphabet: &Arc<Alphabet>, order: u32) -> Self {
        Jet {
            alphabet: alphabet.clone(),
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(alphabet: &Arc<Alphabet>, order: u32, c: Gauss) -> Self {
        Self::from_terms(alphabet, order, [(Monomial::one(), c)])
    }

    pub fn one(alphabet: &Arc<Alphabet>, order: u32) -> Self {
        Self::constant(alphabet, order, Gauss::one())
    }

    /// The coordinate function `v`.
    pub fn var(alphabet: &Arc<Alphabet>, order: u32, v: Var) -> Self {
        assert!(v < alphabet.len());
        Self::from_terms(alphabet, order, [(Monomial::var(v), Gauss::one())])
    }

    pub fn var_named(alphabet: &Arc<Alphabet>, order: u32, name: &str) -> Result<Self, JetError> {
        Ok(Self::var(alphabet, order, alphabet.var(name)?))
    }

    /// Collects terms, summing repeated monomials and discarding zero
    /// coefficients and anything above `order`.
    pub fn from_terms<I>(alphabet: &Arc<Alphabet>, order: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Gauss)>,
    {
        let mut map: BTreeMap<Monomial, Gauss> = BTreeMap::new();
        for (m, c) in terms {
            if m.degree() > order || c.is_zero() {
                continue;
            }
            *map.entry(m).or_default() += &c;
        }
        map.retain(|_, c| !c.is_zero());
        Jet {
            alphabet: alphabet.clone(),
            order,
            terms: map,
        }
    }

    /// Convenience constructor from `(exponent vector, coefficient)` pairs.
    pub fn from_exponents<I>(alphabet: &Arc<Alphabet>, order: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Gauss)>,
    {
        Self::from_terms(
            alphabet,
            order,
            terms
                .into_iter()
                .map(|(e, c)| (Monomial::from_exponents(&e), c)),
        )
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Gauss)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Gauss {
        self.terms.get(m).cloned().unwrap_or_else(Gauss::zero)
    }

    pub fn coeff_of(&self, exps: &[u32]) -> Gauss {
        self.coeff(&Monomial::from_exponents(exps))
    }

    pub fn constant_term(&self) -> Gauss {
        self.coeff(&Monomial::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().next().map(|m| m.degree())
    }

    /// Highest stored degree.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree())
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exp(v) > 0)
    }

    /// Variables that occur in some term.
    pub fn occurring_vars(&self) -> Vec<Var> {
        (0..self.alphabet.len())
            .filter(|&v| self.contains_var(v))
            .collect()
    }

    /// Drops every term of degree above `k` and lowers the order to `k`.
    pub fn truncate(&self, k: u32) -> Self {
        let k = k.min(self.order);
        Jet {
            alphabet: self.alphabet.clone(),
            order: k,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= k)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Re-labels the reliable order without touching the terms.
    ///
    /// Raising the order is only sound when the caller knows the stored terms
    /// are exact up to `k`, e.g. because the missing information is
    /// multiplied by a factor of positive valuation downstream.
    pub fn assume_order(mut self, k: u32) -> Self {
        self.order = k;
        self.terms.retain(|m, _| m.degree() <= k);
        self
    }

    fn check_compatible(&self, o: &Jet) -> Result<(), JetError> {
        if !same_alphabet(&self.alphabet, &o.alphabet) {
            return Err(JetError::AlphabetMismatch(format!(
                "{:?} vs {:?}",
                self.alphabet, o.alphabet
            )));
        }
        Ok(())
    }

    fn check_strict(&self, o: &Jet) -> Result<(), JetError> {
        self.check_compatible(o)?;
        if self.order != o.order {
            return Err(JetError::OrderMismatch {
                left: self.order,
                right: o.order,
            });
        }
        Ok(())
    }

    /// Sum; both operands must share alphabet and order.
    pub fn try_add(&self, o: &Jet) -> Result<Jet, JetError> {
        self.check_strict(o)?;
        Ok(self.add_unchecked(o, self.order))
    }

    pub fn try_sub(&self, o: &Jet) -> Result<Jet, JetError> {
        self.check_strict(o)?;
        Ok(self.add_unchecked(&o.neg_ref(), self.order))
    }

    pub fn try_mul(&self, o: &Jet) -> Result<Jet, JetError> {
        self.check_strict(o)?;
        Ok(self.mul_unchecked(o, self.order))
    }

    fn add_unchecked(&self, o: &Jet, order: u32) -> Jet {
        let mut terms = self.terms.clone();
        for (m, c) in &o.terms {
            if m.degree() > order {
                continue;
            }
            let e = terms.entry(*m).or_default();
            *e += c;
            if e.is_zero() {
                terms.remove(m);
            }
        }
        if order < self.order {
            terms.retain(|m, _| m.degree() <= order);
        }
        Jet {
            alphabet: self.alphabet.clone(),
            order,
            terms,
        }
    }

    fn mul_unchecked(&self, o: &Jet, order: u32) -> Jet {
        let (a, b) = if self.terms.len() <= o.terms.len() {
            (self, o)
        } else {
            (o, self)
        };
        if a.terms.len() == 1 {
            let (ma, ca) = a.terms.iter().next().unwrap();
            let d = ma.degree();
            let terms = b
                .terms
                .iter()
                .take_while(|(mb, _)| mb.degree() + d <= order)
                .map(|(mb, cb)| (ma.mul(*mb), ca * cb))
                .collect();
            return Jet {
                alphabet: self.alphabet.clone(),
                order,
                terms,
            };
        }
        let mut acc: HashMap<Monomial, Gauss> = HashMap::new();
        for (ma, ca) in &a.terms {
            let room = match order.checked_sub(ma.degree()) {
                Some(r) => r,
                None => break,
            };
            for (mb, cb) in b.terms.iter().take_while(|(mb, _)| mb.degree() <= room) {
                *acc.entry(ma.mul(*mb)).or_default() += &(ca * cb);
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Jet {
            alphabet: self.alphabet.clone(),
            order,
            terms,
        }
    }

    pub fn scale(&self, c: &Gauss) -> Jet {
        if c.is_zero() {
            return Jet::zero(&self.alphabet, self.order);
        }
        Jet {
            alphabet: self.alphabet.clone(),
            order: self.order,
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    pub fn scale_rational(&self, r: &BigRational) -> Jet {
        self.scale(&Gauss::real(r.clone()))
    }

    fn neg_ref(&self) -> Jet {
        Jet {
            alphabet: self.alphabet.clone(),
            order: self.order,
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    /// `self^n`, truncated.
    pub fn pow(&self, n: u32) -> Jet {
        let mut result = Jet::one(&self.alphabet, self.order);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Complex conjugate: conjugates coefficients and applies the alphabet's
    /// variable involution.
    pub fn conj(&self) -> Jet {
        let perm: Vec<Var> = (0..self.alphabet.len())
            .map(|v| self.alphabet.conj_of(v))
            .collect();
        Jet {
            alphabet: self.alphabet.clone(),
            order: self.order,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.permuted(&perm), c.conj()))
                .collect(),
        }
    }

    /// Invariance under [`Jet::conj`].
    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    /// `(f + conj f) / 2`.
    pub fn re(&self) -> Jet {
        (self + &self.conj()).scale(&Gauss::ratio(1, 2))
    }

    /// `(f - conj f) / 2i`.
    pub fn im(&self) -> Jet {
        (self - &self.conj()).scale(&Gauss::complex((0, 1), (-1, 2)))
    }

    /// Formal partial derivative; the result is reliable to order `K - 1`.
    pub fn derive(&self, v: Var) -> Jet {
        assert!(v < self.alphabet.len(), "variable index out of range");
        let order = self.order.saturating_sub(1);
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let e = m.exp(v);
            (e > 0).then(|| (m.with_exp(v, e - 1), c.mul_int(e as i64)))
        });
        Jet::from_terms(&self.alphabet, order, terms)
    }

    pub fn derive_named(&self, name: &str) -> Result<Jet, JetError> {
        Ok(self.derive(self.alphabet.var(name)?))
    }

    /// Value at the origin of `∂^2 f / ∂a ∂b`.
    pub fn second_derivative_at_zero(&self, a: Var, b: Var) -> Gauss {
        if a == b {
            self.coeff(&Monomial::var(a).mul(Monomial::var(a)))
                .mul_int(2)
        } else {
            self.coeff(&Monomial::var(a).mul(Monomial::var(b)))
        }
    }

    /// Value at the origin of `∂f/∂a`.
    pub fn first_derivative_at_zero(&self, a: Var) -> Gauss {
        self.coeff(&Monomial::var(a))
    }

    /// Exact quotient by the coordinate `v`; reliable to order `K - 1`.
    pub fn divide_by_var(&self, v: Var) -> Result<Jet, JetError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e == 0 {
                return Err(JetError::NotDivisible {
                    var: self.alphabet.name(v).to_string(),
                    monomial: monomial_to_string(&self.alphabet, m),
                });
            }
            terms.push((m.with_exp(v, e - 1), c.clone()));
        }
        Ok(Jet::from_terms(
            &self.alphabet,
            self.order.saturating_sub(1),
            terms,
        ))
    }

    /// Sets every variable in `vars` to zero.
    pub fn restrict_zero(&self, vars: &[Var]) -> Jet {
        Jet {
            alphabet: self.alphabet.clone(),
            order: self.order,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| vars.iter().all(|&v| m.exp(v) == 0))
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Value of the stored polynomial at `point` (one entry per variable).
    pub fn evaluate(&self, point: &[Gauss]) -> Gauss {
        assert_eq!(point.len(), self.alphabet.len(), "point dimension");
        let n = self.alphabet.len();
        let mut acc = Gauss::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.support(n) {
                for _ in 0..e {
                    t = &t * &point[v];
                }
            }
            acc += &t;
        }
        acc
    }

    /// Inverse of a jet with nonzero constant term, by geometric series.
    pub fn unit_inverse(&self) -> Result<Jet, JetError> {
        let c = self.constant_term();
        let cinv = c.inv().ok_or(JetError::NotAUnit)?;
        // self = c (1 + x), x without constant term
        let x = &self.scale(&cinv) - &Jet::one(&self.alphabet, self.order);
        let mx = -x;
        let mut acc = Jet::one(&self.alphabet, self.order);
        let mut power = acc.clone();
        for _ in 0..self.order {
            power = &power * &mx;
            if power.is_zero() {
                break;
            }
            acc = &acc + &power;
        }
        Ok(acc.scale(&cinv))
    }

    /// Square root on the branch with constant term `+1`.
    pub fn sqrt(&self) -> Result<Jet, JetError> {
        let c = self.constant_term();
        if !c.is_one() {
            return Err(JetError::NonUnitConstant(c.to_string()));
        }
        let x = self - &Jet::one(&self.alphabet, self.order);
        // binom(1/2, k) = binom(1/2, k-1) * (1/2 - (k-1)) / k
        let half = BigRational::new(1.into(), 2.into());
        let mut binom = BigRational::one();
        let mut acc = Jet::one(&self.alphabet, self.order);
        let mut power = acc.clone();
        for k in 1..=self.order {
            let km1 = BigRational::from_integer((k - 1).into());
            binom = binom * (&half - km1) / BigRational::from_integer(k.into());
            power = &power * &x;
            if power.is_zero() {
                break;
            }
            acc = &acc + &power.scale_rational(&binom);
        }
        Ok(acc)
    }

    /// Re-expresses the jet over another alphabet, matching variables by name.
    pub fn embed(&self, target: &Arc<Alphabet>) -> Result<Jet, JetError> {
        let n = self.alphabet.len();
        let mut map = vec![usize::MAX; n];
        for v in self.occurring_vars() {
            map[v] = target.var(self.alphabet.name(v))?;
        }
        let terms = self.terms.iter().map(|(m, c)| {
            let mut out = Monomial::one();
            for (v, e) in m.support(n) {
                out = out.with_exp(map[v], e);
            }
            (out, c.clone())
        });
        Ok(Jet::from_terms(target, self.order, terms))
    }

    /// Jets of order `K` with the same alphabet compare equal up to `k`.
    pub fn agrees_to(&self, o: &Jet, k: u32) -> bool {
        self.truncate(k).terms == o.truncate(k).terms
    }

    /// Sum of the terms of exactly degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Jet {
        Jet {
            alphabet: self.alphabet.clone(),
            order: self.order,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Iterator over monomials whose exponent of `v` is positive.
    pub fn terms_with_var(&self, v: Var) -> impl Iterator<Item = (&Monomial, &Gauss)> {
        self.terms.iter().filter(move |(m, _)| m.exp(v) > 0)
    }

    pub fn monomial_string(&self, m: &Monomial) -> String {
        monomial_to_string(&self.alphabet, m)
    }
}

/// Renders `z1^2*s` style monomials.
pub fn monomial_to_string(alphabet: &Alphabet, m: &Monomial) -> String {
    let parts: Vec<String> = m
        .support(alphabet.len())
        .map(|(v, e)| {
            if e == 1 {
                alphabet.name(v).to_string()
            } else {
                format!("{}^{}", alphabet.name(v), e)
            }
        })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

impl<'a> Add<&'a Jet> for &'a Jet {
    type Output = Jet;
    /// Panics on alphabet mismatch; the result is reliable to the smaller order.
    fn add(self, o: &Jet) -> Jet {
        self.check_compatible(o).expect("jet addition");
        if o.order < self.order {
            self.truncate(o.order).add_unchecked(o, o.order)
        } else {
            self.add_unchecked(o, self.order)
        }
    }
}

impl<'a> Sub<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        self + &o.neg_ref()
    }
}

impl<'a> Mul<&'a Jet> for &'a Jet {
    type Output = Jet;
    /// Panics on alphabet mismatch; the result is reliable to the smaller order.
    fn mul(self, o: &Jet) -> Jet {
        self.check_compatible(o).expect("jet multiplication");
        self.mul_unchecked(o, self.order.min(o.order))
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        &self + &o
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        &self - &o
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        &self * &o
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.neg_ref()
    }
}

impl<'a> Neg for &'a Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.neg_ref()
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 + O({})", self.order + 1);
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if m.degree() == 0 {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{}", monomial_to_string(&self.alphabet, m))?;
            } else {
                write!(f, "{}*{}", c, monomial_to_string(&self.alphabet, m))?;
            }
        }
        write!(f, " + O({})", self.order + 1)
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet[{}]({})", self.alphabet.names().join(","), self)
    }
}
