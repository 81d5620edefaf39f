//! Canonical signed-multiset form of superpositions.
//!
//! Every distinct (up to alpha-equivalence) element keeps one
//! representative and a net count: positive occurrences minus negated ones.
//! Entries are ordered by the printed text of their canonical
//! representative, which is also the grouping key.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::term::{canonical_alpha, normalize_spine, Element, Term};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CanonicalSuperposition {
    entries: BTreeMap<String, (Term, BigInt)>,
}

impl CanonicalSuperposition {
    pub fn new() -> Self {
        Self::default()
    }

    /// A single entry `(term, count)`, with the usual sign and flattening
    /// rules applied to `term`.
    pub fn singleton(term: &Term, count: impl Into<BigInt>) -> Self {
        let mut out = Self::new();
        out.add_term(term, &count.into());
        out
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (&Term, &BigInt)> {
        self.entries.values().map(|(t, n)| (t, n))
    }

    pub fn count_of(&self, term: &Term) -> BigInt {
        let key = canonical_alpha(&strip_negations(term).0).to_string();
        let sign = strip_negations(term).1;
        self.entries
            .get(&key)
            .map(|(_, n)| n * sign)
            .unwrap_or_default()
    }

    /// Adds `scale` copies of `term`. The term is spine-normalised first, so
    /// a superposition contributes each of its elements and a negation
    /// contributes with flipped sign.
    pub fn add_term(&mut self, term: &Term, scale: &BigInt) {
        match normalize_spine(term) {
            Term::Superposition(es) => {
                for e in es {
                    self.add_atom(e.term, &e.count * scale);
                }
            }
            Term::Negation(inner) => self.add_atom((*inner).clone(), -scale),
            other => self.add_atom(other, scale.clone()),
        }
    }

    /// Adds `count` copies of a term already free of top-level negation and
    /// superposition.
    fn add_atom(&mut self, term: Term, count: BigInt) {
        if count.is_zero() {
            return;
        }
        let rep = canonical_alpha(&term);
        let key = rep.to_string();
        match self.entries.entry(key) {
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                slot.get_mut().1 += count;
                if slot.get().1.is_zero() {
                    slot.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert((rep, count));
            }
        }
    }

    /// Adds to an entry whose key and canonical representative are known.
    pub(crate) fn add_keyed(&mut self, key: &str, rep: &Term, count: &BigInt) {
        match self.entries.get_mut(key) {
            Some(slot) => {
                slot.1 += count;
                if slot.1.is_zero() {
                    self.entries.remove(key);
                }
            }
            None => {
                if !count.is_zero() {
                    self.entries
                        .insert(key.to_string(), (rep.clone(), count.clone()));
                }
            }
        }
    }

    /// Merges another canonical superposition, scaled by `scale`.
    pub fn absorb(&mut self, other: &CanonicalSuperposition, scale: &BigInt) {
        for (key, (term, count)) in &other.entries {
            self.add_keyed(key, term, &(count * scale));
        }
    }

    /// The compressed superposition term `[M1 : n1, M2 : n2, ...]`.
    pub fn to_term(&self) -> Term {
        Term::Superposition(
            self.entries
                .values()
                .map(|(t, n)| Element {
                    term: t.clone(),
                    count: n.clone(),
                })
                .collect(),
        )
    }

    /// Literal expansion: `|n|` unit copies of each representative, negated
    /// when `n < 0`. Only feasible for small counts.
    pub fn expand(&self) -> Term {
        let mut out = Vec::new();
        for (t, n) in self.entries.values() {
            let copy = if n.is_negative() {
                Term::neg(t.clone())
            } else {
                t.clone()
            };
            let mut k = n.abs();
            while k.is_positive() {
                out.push(Element::single(copy.clone()));
                k -= BigInt::one();
            }
        }
        Term::Superposition(out)
    }

    /// Sum of net counts.
    pub fn total(&self) -> BigInt {
        self.entries.values().map(|(_, n)| n).sum()
    }
}

fn strip_negations(term: &Term) -> (Term, i32) {
    let mut sign = 1;
    let mut t = term;
    while let Term::Negation(inner) = t {
        sign = -sign;
        t = inner;
    }
    (t.clone(), sign)
}

impl fmt::Display for CanonicalSuperposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

/// Groups alpha-equivalent elements of `term` into net counts. A
/// non-superposition term is a singleton with count one.
pub fn canonicalize(term: &Term) -> CanonicalSuperposition {
    CanonicalSuperposition::singleton(term, 1)
}
