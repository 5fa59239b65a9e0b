//! Reader for small polynomial literals such as `z1*zb1 - 1/2*t1^2 + 2i*z1^2*s`.
//!
//! Grammar: a sum of terms; a term is an optional sign, an optional
//! coefficient (`3`, `-2/5`, `0.25`, `i`, `3/4i`) and `*`-separated factors
//! `name` or `name^k`. Complex coefficients with both parts are written as two
//! terms.

use std::sync::Arc;

use num_traits::One;

use super::alphabet::Alphabet;
use super::coeff::{parse_rational, Gauss};
use super::monomial::Monomial;
use super::series::Jet;
use super::JetError;

fn is_coeff_token(tok: &str) -> bool {
    tok == "i"
        || tok
            .trim_end_matches('i')
            .chars()
            .all(|c| c.is_ascii_digit() || c == '/' || c == '.')
            && tok
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_digit() || c == '.')
}

fn parse_coeff(tok: &str) -> Result<Gauss, JetError> {
    if tok == "i" {
        return Ok(Gauss::i());
    }
    if let Some(r) = tok.strip_suffix('i') {
        return Ok(Gauss::new(num_traits::Zero::zero(), parse_rational(r)?));
    }
    Ok(Gauss::real(parse_rational(tok)?))
}

impl Jet {
    /// Parses a polynomial literal over `alphabet`, truncated at `order`.
    pub fn parse(src: &str, alphabet: &Arc<Alphabet>, order: u32) -> Result<Jet, JetError> {
        let cleaned: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() || cleaned == "0" {
            return Ok(Jet::zero(alphabet, order));
        }
        // split at top-level + and - (not inside exponents or after '/')
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (idx, ch) in cleaned.char_indices() {
            if (ch == '+' || ch == '-') && idx > 0 && !cleaned[..idx].ends_with('^') {
                terms.push((neg, std::mem::take(&mut cur)));
                neg = ch == '-';
            } else if (ch == '+' || ch == '-') && idx == 0 {
                neg = ch == '-';
            } else {
                cur.push(ch);
            }
        }
        terms.push((neg, cur));

        let mut out = Vec::new();
        for (neg, body) in terms {
            if body.is_empty() {
                return Err(JetError::Parse(format!("empty term in {src:?}")));
            }
            let mut coeff = Gauss::one();
            let mut mono = Monomial::one();
            for (k, tok) in body.split('*').enumerate() {
                if k == 0 && is_coeff_token(tok) {
                    coeff = parse_coeff(tok)?;
                    continue;
                }
                let (name, exp) = match tok.split_once('^') {
                    Some((n, e)) => (
                        n,
                        e.parse::<u32>()
                            .map_err(|_| JetError::Parse(format!("bad exponent in {tok:?}")))?,
                    ),
                    None => (tok, 1),
                };
                let v = alphabet.var(name)?;
                mono = mono.with_exp(v, mono.exp(v) + exp);
            }
            if neg {
                coeff = -coeff;
            }
            out.push((mono, coeff));
        }
        Ok(Jet::from_terms(alphabet, order, out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        let a = Alphabet::with_conjugation(&["z1", "zb1", "s", "t1"], &[("z1", "zb1")]).unwrap();
        let j = Jet::parse("z1*zb1 - 1/2*t1^2 + 2i*z1^2*s + 3", &a, 4).unwrap();
        assert_eq!(j.coeff_of(&[1, 1, 0, 0]), Gauss::from_int(1));
        assert_eq!(j.coeff_of(&[0, 0, 0, 2]), Gauss::ratio(-1, 2));
        assert_eq!(j.coeff_of(&[2, 0, 1, 0]), Gauss::complex((0, 1), (2, 1)));
        assert_eq!(j.constant_term(), Gauss::from_int(3));
        assert_eq!(Jet::parse("-t1 + t1", &a, 3).unwrap(), Jet::zero(&a, 3));
        assert_eq!(
            Jet::parse("i*z1", &a, 3).unwrap().coeff_of(&[1, 0, 0, 0]),
            Gauss::i()
        );
        assert!(Jet::parse("q^2", &a, 3).is_err());
        assert!(Jet::parse("z1 + ", &a, 3).is_err());
    }
}
