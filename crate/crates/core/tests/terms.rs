mod common;

use lambdaq::canon::CanonicalSuperposition;
use lambdaq::compile::encode_state;
use lambdaq::{alpha_eq, canonicalize, parse_term, Term};
use num_bigint::BigInt;
use proptest::prelude::*;

fn parse(s: &str) -> Term {
    parse_term(s).unwrap()
}

#[test]
fn literal_multiset_notation_collapses_to_counts() {
    let one = encode_state(1);
    let two = encode_state(2);
    let literal = Term::sup([
        one.clone(),
        one.clone(),
        one.clone(),
        one.clone(),
        one.clone(),
        one.clone(),
        two.clone(),
        two.clone(),
        two.clone(),
    ]);
    let canon = canonicalize(&literal);
    assert_eq!(canon.len(), 2);
    assert_eq!(canon.count_of(&one), BigInt::from(6));
    assert_eq!(canon.count_of(&two), BigInt::from(3));
}

#[test]
fn alpha_variants_group_together() {
    let canon = canonicalize(&parse(r"[\x. x, \y. y, ~(\z. z), \f. \x. f x]"));
    assert_eq!(canon.len(), 2);
    assert_eq!(canon.count_of(&parse(r"\q. q")), BigInt::from(1));
}

#[test]
fn empty_and_weighted_syntax() {
    assert!(canonicalize(&parse("[]")).is_empty());
    let canon = canonicalize(&parse("[a : 3, b : -2, a : -1]"));
    assert_eq!(canon.count_of(&parse("a")), BigInt::from(2));
    assert_eq!(canon.count_of(&parse("b")), BigInt::from(-2));
    assert_eq!(canon.count_of(&parse("~b")), BigInt::from(2));
}

#[test]
fn parse_errors_carry_positions() {
    let e = parse_term("\\x. (x").unwrap_err();
    assert_eq!(e.line, 1);
    let e = parse_term("a\n  )").unwrap_err();
    assert_eq!((e.line, e.column), (2, 3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_then_parse_is_alpha_identity(t in common::term()) {
        let back = parse_term(&t.to_string()).unwrap();
        prop_assert!(alpha_eq(&back, &t), "{} vs {}", t, back);
    }

    #[test]
    fn double_negation_is_invisible(t in common::term()) {
        let doubled = Term::sup([Term::neg(Term::neg(t.clone()))]);
        prop_assert_eq!(canonicalize(&doubled), canonicalize(&Term::sup([t])));
    }

    #[test]
    fn copies_and_negated_copies_annihilate(t in common::term(), k in 0usize..5) {
        let mut items = vec![t.clone(); k];
        items.extend(std::iter::repeat_n(Term::neg(t), k));
        prop_assert!(canonicalize(&Term::sup(items)).is_empty());
    }

    #[test]
    fn order_of_elements_is_irrelevant(
        items in prop::collection::vec(common::term(), 0..6),
        seed in any::<u64>(),
    ) {
        let mut shuffled = items.clone();
        // deterministic shuffle from the seed
        let mut s = seed;
        for i in (1..shuffled.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(canonicalize(&Term::sup(items)), canonicalize(&Term::sup(shuffled)));
    }

    #[test]
    fn expansion_round_trips(items in prop::collection::vec((common::term(), -8i64..=8), 0..5)) {
        let mut canon = CanonicalSuperposition::new();
        for (t, n) in &items {
            canon.add_term(t, &BigInt::from(*n));
        }
        prop_assert_eq!(canonicalize(&canon.expand()), canon.clone());
        prop_assert_eq!(canonicalize(&canon.to_term()), canon);
    }

    #[test]
    fn alpha_eq_is_reflexive_and_respects_renaming(t in common::term()) {
        prop_assert!(alpha_eq(&t, &t));
        let renamed = Term::lam("fresh", Term::app(Term::lam("x", t.clone()), Term::var("fresh")));
        let same = Term::lam("other", Term::app(Term::lam("x", t.clone()), Term::var("other")));
        prop_assert!(alpha_eq(&renamed, &same));
    }
}
