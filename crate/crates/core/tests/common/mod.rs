#![allow(dead_code)]

use lambdaq::Term;
use num_bigint::BigInt;
use proptest::prelude::*;

/// Terms over a few names, so that bound and free occurrences mix.
pub fn term() -> impl Strategy<Value = Term> {
    let leaf = prop::sample::select(vec!["a", "b", "x", "y", "z"]).prop_map(Term::var);
    leaf.prop_recursive(5, 40, 3, |inner| {
        prop_oneof![
            (prop::sample::select(vec!["x", "y", "z"]), inner.clone())
                .prop_map(|(x, body)| Term::lam(x, body)),
            (inner.clone(), inner.clone()).prop_map(|(f, a)| Term::app(f, a)),
            inner.clone().prop_map(Term::neg),
            prop::collection::vec((inner, -3i64..=3), 0..3).prop_map(|es| {
                Term::weighted(
                    es.into_iter()
                        .filter(|(_, n)| *n != 0)
                        .map(|(t, n)| (t, BigInt::from(n))),
                )
            }),
        ]
    })
}

/// Terms built around redexes, including ones that duplicate and negate
/// their argument.
pub fn redex_term() -> impl Strategy<Value = Term> {
    let combinator = prop::sample::select(vec![
        r"\f. \x. f (f x)",
        r"\n. \f. \x. f (n f x)",
        r"\x. \y. x",
        r"\x. \y. \z. x z (y z)",
        r"\x. [x, x]",
        r"\x. [x, ~x, x]",
        r"\x. x",
    ])
    .prop_map(|s| lambdaq::parse_term(s).unwrap());
    (combinator, term(), term()).prop_map(|(c, a, b)| Term::apps(c, [a, b]))
}
