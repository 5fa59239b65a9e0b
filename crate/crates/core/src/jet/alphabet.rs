use std::fmt;
use std::sync::Arc;

use super::JetError;

/// Index of a variable inside an [`Alphabet`].
pub type Var = usize;

/// Largest alphabet a [`super::Monomial`] can pack.
pub const MAX_VARS: usize = 16;

/// Ordered set of formal variable names with an optional conjugation.
///
/// The conjugation is an involution on variable indices; fixed points are the
/// real variables. Holomorphic/antiholomorphic pairs such as `z1 <-> zb1` are
/// modeled as independent formal variables swapped by the involution.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Vec<String>,
    conj: Option<Vec<Var>>,
}

impl Alphabet {
    /// Alphabet without a conjugation (purely holomorphic variables).
    pub fn plain<S: AsRef<str>>(names: &[S]) -> Result<Arc<Self>, JetError> {
        Self::build(names.iter().map(|s| s.as_ref().to_string()).collect(), None)
    }

    /// Alphabet with conjugation. `pairs` lists (holomorphic, antiholomorphic)
    /// name pairs; every other variable is real.
    pub fn with_conjugation<S: AsRef<str>>(
        names: &[S],
        pairs: &[(S, S)],
    ) -> Result<Arc<Self>, JetError> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let mut conj: Vec<Var> = (0..names.len()).collect();
        let find = |n: &str| {
            names
                .iter()
                .position(|x| x == n)
                .ok_or_else(|| JetError::UnknownVariable(n.to_string()))
        };
        for (a, b) in pairs {
            let (i, j) = (find(a.as_ref())?, find(b.as_ref())?);
            if i == j || conj[i] != i || conj[j] != j {
                return Err(JetError::InvalidAlphabet(format!(
                    "bad conjugate pair {} <-> {}",
                    a.as_ref(),
                    b.as_ref()
                )));
            }
            conj[i] = j;
            conj[j] = i;
        }
        Self::build(names, Some(conj))
    }

    fn build(names: Vec<String>, conj: Option<Vec<Var>>) -> Result<Arc<Self>, JetError> {
        if names.len() > MAX_VARS {
            return Err(JetError::InvalidAlphabet(format!(
                "{} variables exceed the limit of {MAX_VARS}",
                names.len()
            )));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || names[..i].contains(n) {
                return Err(JetError::InvalidAlphabet(format!(
                    "duplicate or empty name {n:?}"
                )));
            }
        }
        Ok(Arc::new(Alphabet { names, conj }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: Var) -> &str {
        &self.names[v]
    }

    pub fn var(&self, name: &str) -> Result<Var, JetError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| JetError::UnknownVariable(name.to_string()))
    }

    pub fn has_conjugation(&self) -> bool {
        self.conj.is_some()
    }

    /// Image of `v` under the involution (identity without a conjugation).
    pub fn conj_of(&self, v: Var) -> Var {
        self.conj.as_ref().map_or(v, |c| c[v])
    }

    pub fn is_real_var(&self, v: Var) -> bool {
        self.conj_of(v) == v
    }

    /// Alphabet with `extra` names appended; conjugation pairs are kept and the
    /// new variables are real unless listed in `pairs`.
    pub fn extended<S: AsRef<str>>(
        &self,
        extra: &[S],
        pairs: &[(S, S)],
    ) -> Result<Arc<Self>, JetError> {
        let mut names = self.names.clone();
        names.extend(extra.iter().map(|s| s.as_ref().to_string()));
        let mut all_pairs: Vec<(String, String)> = Vec::new();
        for v in 0..self.len() {
            let c = self.conj_of(v);
            if c > v {
                all_pairs.push((self.names[v].clone(), self.names[c].clone()));
            }
        }
        all_pairs.extend(
            pairs
                .iter()
                .map(|(a, b)| (a.as_ref().to_string(), b.as_ref().to_string())),
        );
        if !self.has_conjugation() && all_pairs.is_empty() {
            return Self::build(names, None);
        }
        Self::with_conjugation(&names, &all_pairs)
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alphabet{:?}", self.names)
    }
}

/// True when both handles denote the same alphabet.
pub fn same_alphabet(a: &Arc<Alphabet>, b: &Arc<Alphabet>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}
