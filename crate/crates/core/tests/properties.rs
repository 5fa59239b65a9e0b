mod common;

use std::sync::Arc;

use common::*;
use lis_germ::central::{central_manifold, morse_normalize};
use lis_germ::jet::{compose_maps, is_identity_map, reversion, Alphabet, Assignment, Gauss, Jet};
use lis_germ::linalg::GaussMatrix;
use lis_germ::marson::{external_levi, external_lift};
use lis_germ::report::{jet_from_json, jet_to_json};
use lis_germ::segre::{complexify_defining, phi_determinant, phi_elimination};
use lis_germ::structure::germ_alphabet;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const K: u32 = 5;

fn abc() -> Arc<Alphabet> {
    Alphabet::plain(&["a", "b", "c"]).unwrap()
}

fn coeff() -> impl Strategy<Value = Gauss> {
    ((-6i64..=6, 1i64..=5), (-6i64..=6, 1i64..=5)).prop_map(|(re, im)| Gauss::complex(re, im))
}

/// Sparse jet over `(a, b, c)` with terms of degree `lo..=K`.
fn jet(lo: u32) -> impl Strategy<Value = Jet> {
    prop::collection::vec(((0u32..=K, 0u32..=K, 0u32..=K), coeff()), 0..8).prop_map(move |terms| {
        let terms = terms
            .into_iter()
            .filter(|((x, y, z), _)| (lo..=K).contains(&(x + y + z)))
            .map(|((x, y, z), c)| (vec![x, y, z], c));
        Jet::from_exponents(&abc(), K, terms)
    })
}

/// Near-identity map of `(a, b, c)`.
fn map() -> impl Strategy<Value = Vec<Jet>> {
    (jet(2), jet(2), jet(2)).prop_map(|(p, q, r)| {
        let a = abc();
        [p, q, r]
            .into_iter()
            .enumerate()
            .map(|(v, h)| &Jet::var(&a, K, v) + &h)
            .collect()
    })
}

fn compose_with(f: &Jet, m: &[Jet]) -> Jet {
    let a = abc();
    let mut asg = Assignment::new(&a, &a);
    for (v, j) in m.iter().enumerate() {
        asg.set(v, j.clone());
    }
    f.compose(&asg).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(f in jet(0), g in jet(0), h in jet(0)) {
        prop_assert_eq!(&f + &g, &g + &f);
        prop_assert_eq!(&f * &g, &g * &f);
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        prop_assert!((&f - &f).is_zero());
    }

    #[test]
    fn leibniz(f in jet(0), g in jet(0), v in 0usize..3) {
        let lhs = (&f * &g).derive(v);
        let rhs = &(&f.derive(v) * &g) + &(&f * &g.derive(v));
        prop_assert!(lhs.agrees_to(&rhs, K - 1));
    }

    #[test]
    fn composition_is_associative(f in jet(0), m in map(), n in map()) {
        let left = compose_with(&compose_with(&f, &m), &n);
        let mn: Vec<Jet> = m.iter().map(|j| compose_with(j, &n)).collect();
        let right = compose_with(&f, &mn);
        prop_assert_eq!(left, right);
    }

    #[test]
    fn reversion_round_trips(m in map()) {
        let inv = reversion(&m, &[0, 1, 2]).unwrap();
        prop_assert!(is_identity_map(&compose_maps(&m, &inv, &[0, 1, 2]).unwrap(), &[0, 1, 2]));
        prop_assert!(is_identity_map(&compose_maps(&inv, &m, &[0, 1, 2]).unwrap(), &[0, 1, 2]));
    }

    #[test]
    fn json_round_trip(f in jet(0)) {
        let j = jet_to_json(&f);
        let text = serde_json::to_string(&j).unwrap();
        let back = jet_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back.terms().collect::<Vec<_>>(), f.terms().collect::<Vec<_>>());
        prop_assert_eq!(back.order(), f.order());
    }

    #[test]
    fn reality_is_preserved(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = germ_alphabet(1, 1);
        let f = random_real(&mut rng, &a, 5, 0, 5, 5);
        let g = random_real(&mut rng, &a, 5, 0, 5, 5);
        prop_assert!(f.is_real() && g.is_real());
        prop_assert!((&f * &g).is_real());
        prop_assert!((&f + &g).is_real());
        prop_assert_eq!(f.conj().conj(), f.clone());
        let zb = a.var("zb1").unwrap();
        let z = a.var("z1").unwrap();
        prop_assert!(f.derive(z).derive(zb).is_real());
    }

    #[test]
    fn signature_is_a_congruence_invariant(entries in prop::collection::vec(coeff(), 9), p in prop::collection::vec(coeff(), 9)) {
        let m = GaussMatrix::from_fn(3, 3, |i, j| entries[3 * i + j].clone());
        let h = GaussMatrix::from_fn(3, 3, |i, j| &m[(i, j)] + &m[(j, i)].conj());
        let p = GaussMatrix::from_fn(3, 3, |i, j| p[3 * i + j].clone());
        prop_assume!(p.inverse().is_some());
        let congruent = p.mul(&h).mul(&p.conj_transpose());
        prop_assert!(congruent.is_hermitian());
        prop_assert_eq!(h.hermitian_signature(), congruent.hermitian_signature());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn levi_relation_for_external_lift(seed in any::<u64>(), nu in 1usize..=2, np in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_germ(&mut rng, nu, np, 4);
        prop_assume!(g.is_some());
        let lift = external_lift(&g.unwrap()).unwrap();
        let e = external_levi(&lift);
        prop_assert!(e.relation_holds);
        prop_assert!(e.direct_matches);
        if e.source_levi.definite {
            prop_assert!(e.levi.definite);
        }
    }

    #[test]
    fn morse_signature_matches_t_block(seed in any::<u64>(), nu in 1usize..=2, np in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_germ(&mut rng, nu, np, 5);
        prop_assume!(g.is_some());
        let g = g.unwrap();
        let sg = central_manifold(&g).unwrap().straightened;
        let nf = morse_normalize(&sg).unwrap();
        prop_assert!(nf.reconstruction_residual(&sg).is_zero());
        let (pos, _) = small_signature(&hessian(g.phi(), &g.vars().t, &g.vars().t));
        prop_assert_eq!(pos, nf.signature_m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn phi_routes_agree_and_are_symmetric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cs = random_central(&mut rng, 2, 5);
        let cd = complexify_defining(&cs).unwrap();
        let p = phi_elimination(&cd).unwrap();
        let q = phi_determinant(&cd).unwrap();
        prop_assert!(p.is_symmetric() && q.is_symmetric());
        for k in 0..2 {
            for l in 0..2 {
                prop_assert_eq!(&p.entries[k][l], &q.entries[k][l]);
            }
        }
    }
}
