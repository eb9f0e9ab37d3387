mod support;

use std::collections::BTreeSet;

use compgen_core::sparql::{ir_decode, ir_encode, parse_sparql, tokenize, IrLevel, SparqlQuery, Triple};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn triple_set(q: &SparqlQuery) -> BTreeSet<(String, String, String)> {
    q.triples().iter().map(|t| (t.subject.clone(), t.relation.clone(), t.object.clone())).collect()
}

/// Whitespace-insensitive comparison of the token streams.
fn same_tokens(a: &str, b: &str) -> bool {
    tokenize(a) == tokenize(b)
}

#[test]
fn worked_example_matches_published_forms() {
    let q = parse_sparql("M0 directed M2 . M1 directed M2 . M0 directed M3 . M1 directed M3").unwrap();
    assert!(same_tokens(
        &ir_encode(&q, IrLevel::F1).to_string(),
        "M0 { directed M2 . directed M3 } M1 { directed M2 . directed M3 }"
    ));
    // Published with the comma glued to the first object.
    assert!(same_tokens(
        &ir_encode(&q, IrLevel::F2).to_string(),
        "M0 { directed { M2, M3 } } M1 { directed { M2, M3 } }"
    ));
    for level in IrLevel::ALL {
        let back = ir_decode(&ir_encode(&q, level).to_string(), level).unwrap();
        assert_eq!(back.triples().len(), 4);
        assert!(back.clause_set_eq(&q));
    }
}

#[test]
fn duplicates_collapse_like_the_brute_force_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let rq = support::random_query(&mut rng, 8, false);
        let mut clauses: Vec<String> = rq.triples.iter().map(|(s, r, o)| format!("{s} {r} {o}")).collect();
        let extra: Vec<String> = clauses.choose_multiple(&mut rng, 3).cloned().collect();
        clauses.extend(extra);
        clauses.shuffle(&mut rng);
        let body = clauses.join(" . ");
        let q = parse_sparql(&body).unwrap();
        let expected = support::brute_clause_set(&body);
        let got: BTreeSet<String> = q.triples().iter().map(Triple::to_string).collect();
        assert_eq!(got, expected);
        assert_eq!(q.triples().len(), expected.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn every_level_round_trips(seed in any::<u64>(), header in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rq = support::random_query(&mut rng, 12, header);
        let q = parse_sparql(&rq.text).unwrap();
        let expected: BTreeSet<_> = rq.triples.iter().cloned().collect();
        prop_assert_eq!(triple_set(&q), expected);
        for level in IrLevel::ALL {
            let text = ir_encode(&q, level).to_string();
            let back = ir_decode(&text, level).unwrap();
            prop_assert!(back.clause_set_eq(&q), "{} -> {}", level, text);
            // re-encoding decoded text is a fixed point
            prop_assert_eq!(ir_encode(&back, level).to_string(), text);
        }
    }

    #[test]
    fn f3_ignores_clause_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rq = support::random_query(&mut rng, 12, false);
        let mut clauses: Vec<String> = rq.triples.iter().map(|(s, r, o)| format!("{s} {r} {o}")).collect();
        let reference = ir_encode(&parse_sparql(&clauses.join(" . ")).unwrap(), IrLevel::F3).to_string();
        clauses.shuffle(&mut rng);
        let shuffled = ir_encode(&parse_sparql(&clauses.join(" . ")).unwrap(), IrLevel::F3).to_string();
        prop_assert_eq!(shuffled, reference);
    }

    #[test]
    fn grouping_never_adds_terms(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rq = support::random_query(&mut rng, 12, false);
        let q = parse_sparql(&rq.text).unwrap();
        let flat = 3 * q.triples().len();
        let f1 = ir_encode(&q, IrLevel::F1).term_count();
        let f2 = ir_encode(&q, IrLevel::F2).term_count();
        let f3 = ir_encode(&q, IrLevel::F3).term_count();
        prop_assert!(f1 <= flat);
        prop_assert!(f2 <= f1);
        prop_assert_eq!(f3, f2);
    }
}
