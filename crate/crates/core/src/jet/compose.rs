use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::alphabet::{Alphabet, Var};
use super::coeff::Gauss;
use super::monomial::Monomial;
use super::series::Jet;
use super::JetError;

/// Substitution `v -> jet` from the variables of an outer alphabet into jets
/// over a target alphabet.
#[derive(Clone, Debug)]
pub struct Assignment {
    source: Arc<Alphabet>,
    target: Arc<Alphabet>,
    map: BTreeMap<Var, Jet>,
    shift_ok: Vec<bool>,
}

impl Assignment {
    /// Empty assignment; every variable occurring in the outer jet must be set.
    pub fn new(source: &Arc<Alphabet>, target: &Arc<Alphabet>) -> Self {
        Assignment {
            source: source.clone(),
            target: target.clone(),
            map: BTreeMap::new(),
            shift_ok: vec![false; source.len()],
        }
    }

    /// Maps every source variable whose name exists in `target` to that
    /// target coordinate.
    pub fn by_name(source: &Arc<Alphabet>, target: &Arc<Alphabet>, order: u32) -> Self {
        let mut a = Self::new(source, target);
        for v in 0..source.len() {
            if let Ok(w) = target.var(source.name(v)) {
                a.map.insert(v, Jet::var(target, order, w));
            }
        }
        a
    }

    pub fn identity(alphabet: &Arc<Alphabet>, order: u32) -> Self {
        Self::by_name(alphabet, alphabet, order)
    }

    pub fn set(&mut self, v: Var, jet: Jet) -> &mut Self {
        assert!(v < self.source.len());
        self.map.insert(v, jet);
        self
    }

    pub fn set_named(&mut self, name: &str, jet: Jet) -> Result<&mut Self, JetError> {
        let v = self.source.var(name)?;
        Ok(self.set(v, jet))
    }

    /// Permits a nonzero constant term in the jet substituted for `v`. The
    /// composite is then exact only as polynomial evaluation of the outer jet.
    pub fn allow_shift(&mut self, v: Var) -> &mut Self {
        self.shift_ok[v] = true;
        self
    }

    pub fn get(&self, v: Var) -> Option<&Jet> {
        self.map.get(&v)
    }

    pub fn target(&self) -> &Arc<Alphabet> {
        &self.target
    }
}

impl Jet {
    /// Truncated composition `self(assignment)`.
    ///
    /// The result lives over the assignment's target alphabet and is reliable
    /// to the smallest order among the outer jet and the substituted jets.
    pub fn compose(&self, asg: &Assignment) -> Result<Jet, JetError> {
        if **self.alphabet() != *asg.source {
            return Err(JetError::AlphabetMismatch(format!(
                "outer jet over {:?}, assignment from {:?}",
                self.alphabet(),
                asg.source
            )));
        }
        let same = *asg.source == *asg.target;
        let mut vars = Vec::new();
        let mut order = self.order();
        let mut subs: Vec<&Jet> = Vec::new();
        for v in self.occurring_vars() {
            let j = asg
                .map
                .get(&v)
                .ok_or_else(|| JetError::MissingAssignment(self.alphabet().name(v).to_string()))?;
            if **j.alphabet() != *asg.target {
                return Err(JetError::AlphabetMismatch(format!(
                    "substitution for {} lives over {:?}",
                    self.alphabet().name(v),
                    j.alphabet()
                )));
            }
            if !asg.shift_ok[v] && !j.constant_term().is_zero() {
                return Err(JetError::ConstantTerm(self.alphabet().name(v).to_string()));
            }
            order = order.min(j.order());
            // identity substitutions stay in the leaf monomials
            if same && j.num_terms() == 1 && j.coeff(&Monomial::var(v)).is_one() {
                continue;
            }
            vars.push(v);
            subs.push(j);
        }
        let terms: Vec<(Monomial, Gauss)> = self.terms().map(|(m, c)| (*m, c.clone())).collect();
        Ok(horner(&terms, &vars, &subs, 0, &asg.target, order))
    }

    /// Substitutes a single variable, leaving all others in place.
    pub fn substitute(&self, v: Var, jet: &Jet) -> Result<Jet, JetError> {
        let mut asg = Assignment::identity(self.alphabet(), self.order().max(jet.order()));
        asg.set(v, jet.clone());
        if !jet.constant_term().is_zero() {
            asg.allow_shift(v);
        }
        self.compose(&asg)
    }
}

/// Recursive Horner evaluation, one variable per level.
///
/// A partial sum that will still be multiplied by `g^e` only matters through
/// degree `order - e * val(g)`, so each level works at that reduced order.
fn horner(
    terms: &[(Monomial, Gauss)],
    vars: &[Var],
    subs: &[&Jet],
    level: usize,
    target: &Arc<Alphabet>,
    order: u32,
) -> Jet {
    if terms.is_empty() {
        return Jet::zero(target, order);
    }
    if level == vars.len() {
        // what is left of each monomial is its pass-through part
        return Jet::from_terms(target, order, terms.iter().cloned());
    }
    let v = vars[level];
    let mut buckets: BTreeMap<u32, Vec<(Monomial, Gauss)>> = BTreeMap::new();
    for (m, c) in terms {
        buckets
            .entry(m.exp(v))
            .or_default()
            .push((m.with_exp(v, 0), c.clone()));
    }
    let g = subs[level];
    let val = g.valuation();
    let room = |e: u32| match val {
        _ if e == 0 => Some(order),
        Some(d) => order.checked_sub(e * d),
        None => None,
    };
    let top = *buckets.keys().next_back().unwrap();
    let mut acc: Option<Jet> = None;
    for e in (0..=top).rev() {
        let Some(oe) = room(e) else { continue };
        let mut cur = match acc.take() {
            // acc * g is exact through oe since g has valuation val
            Some(a) => &a.assume_order(oe) * g,
            None => Jet::zero(target, oe),
        };
        if let Some(b) = buckets.get(&e) {
            cur = &cur + &horner(b, vars, subs, level + 1, target, oe);
        }
        acc = Some(cur);
    }
    acc.map_or_else(|| Jet::zero(target, order), |a| a.truncate(order))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_of_substitution() {
        let u = Alphabet::plain(&["u"]).unwrap();
        let s = Alphabet::plain(&["s"]).unwrap();
        let outer = Jet::var(&u, 4, 0).pow(2);
        let inner = Jet::from_exponents(
            &s,
            4,
            [(vec![1], Gauss::from_int(1)), (vec![2], Gauss::from_int(1))],
        );
        let mut asg = Assignment::new(&u, &s);
        asg.set(0, inner);
        let got = outer.compose(&asg).unwrap();
        let expect = Jet::from_exponents(
            &s,
            4,
            [
                (vec![2], Gauss::from_int(1)),
                (vec![3], Gauss::from_int(2)),
                (vec![4], Gauss::from_int(1)),
            ],
        );
        assert_eq!(got, expect);
    }

    #[test]
    fn identity_and_involution() {
        let a = Alphabet::plain(&["u", "v"]).unwrap();
        let f = Jet::from_exponents(
            &a,
            5,
            [
                (vec![2, 1], Gauss::ratio(3, 2)),
                (vec![1, 0], Gauss::from_int(-1)),
            ],
        );
        assert_eq!(f.compose(&Assignment::identity(&a, 5)).unwrap(), f);
        let mut swap = Assignment::new(&a, &a);
        swap.set(0, Jet::var(&a, 5, 1)).set(1, Jet::var(&a, 5, 0));
        assert_eq!(f.compose(&swap).unwrap().compose(&swap).unwrap(), f);
    }

    #[test]
    fn errors() {
        let a = Alphabet::plain(&["u", "v"]).unwrap();
        let f = Jet::var(&a, 3, 0) + Jet::var(&a, 3, 1);
        let mut asg = Assignment::new(&a, &a);
        asg.set(0, Jet::var(&a, 3, 0));
        assert!(matches!(f.compose(&asg), Err(JetError::MissingAssignment(n)) if n == "v"));
        asg.set(1, Jet::one(&a, 3));
        assert!(matches!(f.compose(&asg), Err(JetError::ConstantTerm(n)) if n == "v"));
        asg.allow_shift(1);
        assert_eq!(
            f.compose(&asg).unwrap(),
            Jet::var(&a, 3, 0) + Jet::one(&a, 3)
        );
    }
}
