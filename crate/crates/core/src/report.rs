//! JSON encodings of exact values.
//!
//! Rationals are strings `"p/q"`; Gaussian rationals with a nonzero imaginary
//! part are objects `{"re": "p/q", "im": "r/s"}`. Jets are lists of term
//! records in canonical (graded-lex) order, so encodings are deterministic.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::jet::{parse_rational, rational_to_string, Alphabet, Gauss, Jet, Monomial};
use crate::linalg::GaussMatrix;

/// A coefficient as it appears in files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffJson {
    Real(String),
    Complex { re: String, im: String },
}

impl CoeffJson {
    pub fn from_gauss(c: &Gauss) -> Self {
        if c.im.is_zero() {
            CoeffJson::Real(rational_to_string(&c.re))
        } else {
            CoeffJson::Complex {
                re: rational_to_string(&c.re),
                im: rational_to_string(&c.im),
            }
        }
    }

    pub fn to_gauss(&self) -> Result<Gauss> {
        let p = |s: &str| parse_rational(s).map_err(|e| Error::Parse(e.to_string()));
        Ok(match self {
            CoeffJson::Real(r) => Gauss::real(p(r)?),
            CoeffJson::Complex { re, im } => Gauss::new(p(re)?, p(im)?),
        })
    }
}

/// One term `coeff * prod var^exp`; absent variables have exponent 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exponents: BTreeMap<String, u32>,
    pub coeff: CoeffJson,
}

/// A jet together with its variables and order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JetJson {
    pub vars: Vec<String>,
    pub order: u32,
    pub terms: Vec<TermJson>,
}

/// Either a list of term records or a polynomial literal string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TermsOrLiteral {
    Terms(Vec<TermJson>),
    Literal(String),
}

pub fn terms_to_json(j: &Jet) -> Vec<TermJson> {
    let a = j.alphabet();
    j.terms()
        .map(|(m, c)| TermJson {
            exponents: (0..a.len())
                .filter(|&v| m.exp(v) > 0)
                .map(|v| (a.name(v).to_string(), m.exp(v)))
                .collect(),
            coeff: CoeffJson::from_gauss(c),
        })
        .collect()
}

pub fn jet_to_json(j: &Jet) -> JetJson {
    JetJson {
        vars: j.alphabet().names().to_vec(),
        order: j.order(),
        terms: terms_to_json(j),
    }
}

/// Builds a jet from term records, naming the offending term on failure.
pub fn jet_from_terms(terms: &[TermJson], alphabet: &Arc<Alphabet>, order: u32) -> Result<Jet> {
    let mut out = Vec::with_capacity(terms.len());
    for (idx, t) in terms.iter().enumerate() {
        let mut m = Monomial::one();
        for (name, &e) in &t.exponents {
            let v = alphabet
                .var(name)
                .map_err(|_| Error::Parse(format!("term {idx}: unknown variable {name:?}")))?;
            m = m.with_exp(v, e);
        }
        let c = t
            .coeff
            .to_gauss()
            .map_err(|e| Error::Parse(format!("term {idx}: {e}")))?;
        out.push((m, c));
    }
    Ok(Jet::from_terms(alphabet, order, out))
}

pub fn jet_from_input(src: &TermsOrLiteral, alphabet: &Arc<Alphabet>, order: u32) -> Result<Jet> {
    match src {
        TermsOrLiteral::Terms(t) => jet_from_terms(t, alphabet, order),
        TermsOrLiteral::Literal(s) => {
            Jet::parse(s, alphabet, order).map_err(|e| Error::Parse(e.to_string()))
        }
    }
}

/// Rebuilds a jet from its JSON form, over a fresh plain alphabet.
pub fn jet_from_json(j: &JetJson) -> Result<Jet> {
    let a = Alphabet::plain(&j.vars).map_err(|e| Error::Parse(e.to_string()))?;
    jet_from_terms(&j.terms, &a, j.order)
}

pub fn matrix_to_json(m: &GaussMatrix) -> Vec<Vec<CoeffJson>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(CoeffJson::from_gauss).collect())
        .collect()
}

pub fn ser_matrix<S: Serializer>(m: &GaussMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    matrix_to_json(m).serialize(s)
}

pub fn ser_jet<S: Serializer>(j: &Jet, s: S) -> std::result::Result<S::Ok, S::Error> {
    jet_to_json(j).serialize(s)
}

pub fn ser_jets<S: Serializer>(js: &[Jet], s: S) -> std::result::Result<S::Ok, S::Error> {
    js.iter().map(jet_to_json).collect::<Vec<_>>().serialize(s)
}

pub fn ser_gauss<S: Serializer>(c: &Gauss, s: S) -> std::result::Result<S::Ok, S::Error> {
    CoeffJson::from_gauss(c).serialize(s)
}

pub fn ser_gausses<S: Serializer>(cs: &[Gauss], s: S) -> std::result::Result<S::Ok, S::Error> {
    cs.iter()
        .map(CoeffJson::from_gauss)
        .collect::<Vec<_>>()
        .serialize(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_round_trip() {
        let a = Alphabet::with_conjugation(&["z1", "zb1", "s"], &[("z1", "zb1")]).unwrap();
        let j = Jet::parse("z1*zb1 - 1/3*s^2 + 2i*z1^2 + 1/2*zb1^2", &a, 4).unwrap();
        let enc = serde_json::to_string(&jet_to_json(&j)).unwrap();
        let back: JetJson = serde_json::from_str(&enc).unwrap();
        let j2 = jet_from_terms(&back.terms, &a, back.order).unwrap();
        assert_eq!(j, j2);
        assert_eq!(enc, serde_json::to_string(&jet_to_json(&j2)).unwrap());
        assert!(enc.contains(r#"{"re":"0","im":"2"}"#));
        assert!(enc.contains(r#""-1/3""#));
    }

    #[test]
    fn located_errors() {
        let a = Alphabet::plain(&["s"]).unwrap();
        let bad: Vec<TermJson> = serde_json::from_str(
            r#"[{"exponents":{"s":1},"coeff":"1"},{"exponents":{"q":1},"coeff":"1"}]"#,
        )
        .unwrap();
        let e = jet_from_terms(&bad, &a, 3).unwrap_err();
        assert!(e.to_string().contains("term 1"));
        let bad: Vec<TermJson> =
            serde_json::from_str(r#"[{"exponents":{},"coeff":"1/0"}]"#).unwrap();
        assert!(jet_from_terms(&bad, &a, 3).is_err());
    }
}
