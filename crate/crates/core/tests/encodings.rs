use lambdaq::encode::{
    add_term, church, church_bool, equal_term, if_term, is_zero_term, leq_term, list, list_items,
    lookup_term, mul_term, nil_term, pred_term, sub_term, succ_term, unbool, unchurch,
};
use lambdaq::{parse_term, reduce, Term};
use proptest::prelude::*;

#[test]
fn equality_table_up_to_eight() {
    for m in 0..=8u64 {
        for n in 0..=8u64 {
            let t = Term::apps(equal_term(), [church(m), church(n)]);
            assert_eq!(unbool(&t).unwrap(), m == n, "EQUAL {m} {n}");
        }
    }
}

#[test]
fn conditional_selects_a_branch() {
    let a = parse_term("a").unwrap();
    let b = parse_term("b").unwrap();
    let pick = |flag| reduce(&Term::apps(if_term(), [church_bool(flag), a.clone(), b.clone()]), 100);
    assert_eq!(pick(true).final_term, a);
    assert_eq!(pick(false).final_term, b);
}

#[test]
fn arithmetic_on_numerals() {
    let ap = |f: Term, args: &[u64]| unchurch(&Term::apps(f, args.iter().map(|&n| church(n)))).unwrap();
    assert_eq!(ap(succ_term(), &[4]), 5);
    assert_eq!(ap(add_term(), &[3, 4]), 7);
    assert_eq!(ap(mul_term(), &[3, 4]), 12);
    assert_eq!(ap(pred_term(), &[0]), 0);
    assert_eq!(ap(pred_term(), &[6]), 5);
    assert_eq!(ap(sub_term(), &[3, 5]), 0);
    assert_eq!(ap(sub_term(), &[7, 5]), 2);
    assert!(unbool(&Term::app(is_zero_term(), church(0))).unwrap());
    assert!(!unbool(&Term::apps(leq_term(), [church(4), church(3)])).unwrap());
}

#[test]
fn encoding_terms_are_closed() {
    for t in [
        add_term(),
        mul_term(),
        succ_term(),
        pred_term(),
        sub_term(),
        is_zero_term(),
        leq_term(),
        equal_term(),
        if_term(),
        lookup_term(),
        nil_term(),
        church(5),
        church_bool(true),
    ] {
        assert!(t.is_closed(), "{t}");
    }
}

proptest! {
    #[test]
    fn lists_of_numerals_round_trip(items in prop::collection::vec(0u64..10, 0..=8)) {
        let encoded = list(items.iter().map(|&n| church(n)));
        prop_assert!(encoded.is_closed());
        let decoded: Vec<u64> = list_items(&reduce(&encoded, 10_000).final_term)
            .unwrap()
            .iter()
            .map(|t| unchurch(t).unwrap())
            .collect();
        prop_assert_eq!(decoded, items);
    }

    #[test]
    fn lookup_finds_each_element(items in prop::collection::vec(0u64..10, 1..=6), pick in 0usize..6) {
        let i = pick % items.len();
        let t = Term::apps(lookup_term(), [church(i as u64), list(items.iter().map(|&n| church(n)))]);
        prop_assert_eq!(unchurch(&t).unwrap(), items[i]);
    }
}
