//! Parallel leftmost-outermost reduction.
//!
//! One parallel step contracts the leftmost-outermost redex of every
//! superposition element simultaneously. Outside superpositions a step is an
//! ordinary normal-order step. Redexes:
//!
//! * beta: `(\x. M) N -> M[x := N]`
//! * operator distribution: `[Mi] N -> [Mi N]`
//! * sign lifting: `(~M) N -> ~(M N)`
//! * argument distribution: `M [Ni] -> [M Ni]`, only once `M` is normal and
//!   not an abstraction
//! * `~~M -> M`, `~[Mi] -> [~Mi]` and flattening of nested superpositions
//!   below the top-level spine
//!
//! On the top-level spine the negation and flattening rules are applied as
//! free structural normalisation and never count as a step.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::canon::CanonicalSuperposition;
use crate::term::{
    alpha_eq, alpha_hash, normalize_spine, spine_is_normal, substitute, Element, Term,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionTrace {
    /// Parallel steps taken.
    pub steps: u64,
    /// Individual redex contractions.
    pub work: u64,
    pub final_term: Term,
    pub fuel_exhausted: bool,
}

/// One parallel step, or `None` when the term is normal.
pub fn step(term: &Term) -> Option<Term> {
    step_counted(term).map(|(t, _)| t)
}

/// Like [`step`], also returning the number of redexes contracted.
pub fn step_counted(term: &Term) -> Option<(Term, u64)> {
    let start = normalize_spine(term);
    let mut work = 0;
    let next = contract_top(&start, &mut work);
    next.map(|t| (normalize_spine(&t), work))
}

pub fn is_normal(term: &Term) -> bool {
    let mut work = 0;
    contract_top(&normalize_spine(term), &mut work).is_none()
}

/// Contracts one redex in every element of a spine-normal term.
fn contract_top(term: &Term, work: &mut u64) -> Option<Term> {
    match term {
        Term::Superposition(es) => contract_elements(es, work).map(Term::Superposition),
        _ => contract(term, work),
    }
}

fn contract_elements(es: &[Element], work: &mut u64) -> Option<Vec<Element>> {
    let mut changed = false;
    let out = es
        .iter()
        .map(|e| match contract(&e.term, work) {
            Some(t) => {
                changed = true;
                Element {
                    term: t,
                    count: e.count.clone(),
                }
            }
            None => e.clone(),
        })
        .collect();
    changed.then_some(out)
}

fn distribute(es: &[Element], build: impl Fn(&Term) -> Term) -> Term {
    Term::Superposition(
        es.iter()
            .map(|e| Element {
                term: build(&e.term),
                count: e.count.clone(),
            })
            .collect(),
    )
}

/// Leftmost-outermost contraction inside an arbitrary subterm.
fn contract(term: &Term, work: &mut u64) -> Option<Term> {
    match term {
        Term::Variable(_) => None,
        Term::Abstraction(x, body) => {
            contract(body, work).map(|b| Term::Abstraction(x.clone(), Arc::new(b)))
        }
        Term::Application(f, a) => match &**f {
            Term::Abstraction(x, body) => {
                *work += 1;
                Some(substitute(body, x, a))
            }
            Term::Superposition(es) => {
                *work += 1;
                Some(distribute(es, |m| Term::Application(Arc::new(m.clone()), a.clone())))
            }
            Term::Negation(m) => {
                *work += 1;
                Some(Term::Negation(Arc::new(Term::Application(
                    m.clone(),
                    a.clone(),
                ))))
            }
            _ => {
                if let Some(nf) = contract(f, work) {
                    return Some(Term::Application(Arc::new(nf), a.clone()));
                }
                if let Term::Superposition(es) = &**a {
                    *work += 1;
                    return Some(distribute(es, |n| {
                        Term::Application(f.clone(), Arc::new(n.clone()))
                    }));
                }
                contract(a, work).map(|na| Term::Application(f.clone(), Arc::new(na)))
            }
        },
        Term::Negation(m) => match &**m {
            Term::Negation(x) => {
                *work += 1;
                Some((**x).clone())
            }
            Term::Superposition(es) => {
                *work += 1;
                Some(Term::Superposition(
                    es.iter()
                        .map(|e| Element {
                            term: e.term.clone(),
                            count: -&e.count,
                        })
                        .collect(),
                ))
            }
            _ => contract(m, work).map(|t| Term::Negation(Arc::new(t))),
        },
        Term::Superposition(es) => {
            if !spine_is_normal(term) {
                *work += 1;
                return Some(normalize_spine(term));
            }
            contract_elements(es, work).map(Term::Superposition)
        }
    }
}

pub fn reduce(term: &Term, fuel: u64) -> ReductionTrace {
    reduce_with(term, fuel, |_, _| {})
}

/// [`reduce`] with a callback receiving each intermediate term after its
/// step number.
pub fn reduce_with(term: &Term, fuel: u64, mut on_step: impl FnMut(u64, &Term)) -> ReductionTrace {
    let mut current = normalize_spine(term);
    let mut steps = 0;
    let mut work = 0;
    let mut fuel_exhausted = false;
    loop {
        let mut w = 0;
        let Some(next) = contract_top(&current, &mut w) else {
            break;
        };
        if steps == fuel {
            fuel_exhausted = true;
            break;
        }
        current = normalize_spine(&next);
        steps += 1;
        work += w;
        on_step(steps, &current);
    }
    let final_term = if current.is_superposition() {
        crate::canon::canonicalize(&current).to_term()
    } else {
        current
    };
    ReductionTrace {
        steps,
        work,
        final_term,
        fuel_exhausted,
    }
}

/// Reduces a compressed superposition. Each distinct representative is
/// reduced once per parallel step and its net count is carried through;
/// alpha-equivalent results merge (and may cancel) after every step.
pub fn reduce_compressed(
    canon: &CanonicalSuperposition,
    fuel: u64,
) -> (CanonicalSuperposition, ReductionTrace) {
    compressed(initial(canon), fuel, None)
}

/// Reduces the weighted sum `[M1 : n1, M2 : n2, ...]` in compressed form
/// without canonicalising the (possibly large) input terms first.
pub fn reduce_sum(
    terms: impl IntoIterator<Item = (Term, BigInt)>,
    fuel: u64,
) -> (CanonicalSuperposition, ReductionTrace) {
    let mut merged = Merged::default();
    for (t, n) in terms {
        merged.add_term(&t, &n);
    }
    compressed(merged.live(), fuel, None)
}

pub fn reduce_compressed_with(
    canon: &CanonicalSuperposition,
    fuel: u64,
    mut on_step: impl FnMut(u64, &CanonicalSuperposition),
) -> (CanonicalSuperposition, ReductionTrace) {
    compressed(initial(canon), fuel, Some(&mut on_step))
}

/// Working set for compressed reduction: entries in first-seen order,
/// bucketed by an alpha-invariant hash.
#[derive(Default)]
struct Merged {
    entries: Vec<(Term, BigInt, u64)>,
    buckets: HashMap<u64, Vec<usize>>,
}

impl Merged {
    fn add_hashed(&mut self, term: Term, count: BigInt, hash: u64) {
        if count.is_zero() {
            return;
        }
        let bucket = self.buckets.entry(hash).or_default();
        for &i in bucket.iter() {
            if alpha_eq(&self.entries[i].0, &term) {
                self.entries[i].1 += count;
                return;
            }
        }
        bucket.push(self.entries.len());
        self.entries.push((term, count, hash));
    }

    fn add_atom(&mut self, term: Term, count: BigInt) {
        let hash = alpha_hash(&term);
        self.add_hashed(term, count, hash);
    }

    fn add_term(&mut self, term: &Term, scale: &BigInt) {
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

    fn live(self) -> Vec<(Term, BigInt, u64)> {
        self.entries
            .into_iter()
            .filter(|(_, n, _)| !n.is_zero())
            .collect()
    }

    fn canonical(entries: &[(Term, BigInt, u64)]) -> CanonicalSuperposition {
        let mut out = CanonicalSuperposition::new();
        for (t, n, _) in entries {
            out.add_term(t, n);
        }
        out
    }
}

fn initial(canon: &CanonicalSuperposition) -> Vec<(Term, BigInt, u64)> {
    canon
        .entries()
        .map(|(t, n)| (t.clone(), n.clone(), alpha_hash(t)))
        .collect()
}

type StepCallback<'a> = dyn FnMut(u64, &CanonicalSuperposition) + 'a;

fn compressed(
    mut current: Vec<(Term, BigInt, u64)>,
    fuel: u64,
    mut on_step: Option<&mut StepCallback<'_>>,
) -> (CanonicalSuperposition, ReductionTrace) {
    let mut steps = 0;
    let mut work = 0;
    let mut fuel_exhausted = false;
    loop {
        let mut w = 0;
        let contracted: Vec<Option<Term>> =
            current.iter().map(|(t, ..)| contract(t, &mut w)).collect();
        if contracted.iter().all(Option::is_none) {
            break;
        }
        if steps == fuel {
            fuel_exhausted = true;
            break;
        }
        let mut next = Merged::default();
        for (reduced, (t, n, h)) in contracted.into_iter().zip(current) {
            match reduced {
                Some(r) => next.add_term(&r, &n),
                None => next.add_hashed(t, n, h),
            }
        }
        current = next.live();
        steps += 1;
        work += w;
        if let Some(f) = on_step.as_mut() {
            f(steps, &Merged::canonical(&current));
        }
    }
    let result = Merged::canonical(&current);
    let trace = ReductionTrace {
        steps,
        work,
        final_term: result.to_term(),
        fuel_exhausted,
    };
    (result, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonicalize;
    use crate::parse::parse_term;

    fn p(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn beta() {
        assert_eq!(step(&p("(\\x. x) y")), Some(p("y")));
        let t = reduce(&p("(\\x. x) y"), 10);
        assert_eq!((t.final_term, t.steps, t.work), (p("y"), 1, 1));
    }

    #[test]
    fn already_normal() {
        let t = reduce(&p("y"), 10);
        assert_eq!((t.final_term, t.steps, t.fuel_exhausted), (p("y"), 0, false));
        assert_eq!(step(&p("\\x. x y")), None);
    }

    #[test]
    fn superposition_elements_reduce_together() {
        let (t, w) = step_counted(&p("[(\\x. x) a, (\\x. x) b]")).unwrap();
        assert_eq!(t, p("[a, b]"));
        assert_eq!(w, 2);
    }

    #[test]
    fn operator_distribution() {
        assert_eq!(step(&p("[a] b")), Some(p("[a b]")));
        assert_eq!(step(&p("[f : 2, g : -1] b")), Some(p("[f b : 2, g b : -1]")));
    }

    #[test]
    fn sign_lifting() {
        assert_eq!(step(&p("(~f) a")), Some(p("~(f a)")));
    }

    #[test]
    fn argument_distribution_waits_for_normal_operator() {
        assert_eq!(step(&p("f [a, b]")), Some(p("[f a, f b]")));
        // the operator still has a redex, so it goes first
        assert_eq!(step(&p("((\\x. x) f) [a, b]")), Some(p("f [a, b]")));
        // abstractions take the beta route
        assert_eq!(step(&p("(\\x. x x) [a, b]")), Some(p("[a, b] [a, b]")));
    }

    #[test]
    fn inner_negation_rules_count_as_steps() {
        assert_eq!(step(&p("\\x. ~~x")), Some(p("\\x. x")));
        assert_eq!(step(&p("\\x. ~[x, y]")), Some(p("\\x. [x : -1, y : -1]")));
        assert_eq!(step(&p("\\x. [[x]]")), Some(p("\\x. [x]")));
    }

    #[test]
    fn top_level_interference_costs_nothing() {
        let t = reduce(&p("[a, ~a]"), 10);
        assert_eq!(t.steps, 0);
        assert_eq!(t.final_term, Term::Superposition(vec![]));
    }

    #[test]
    fn fuel_exhaustion_is_reported() {
        let omega = p("(\\x. x x) (\\x. x x)");
        let t = reduce(&omega, 5);
        assert!(t.fuel_exhausted);
        assert_eq!(t.steps, 5);
        assert!(!is_normal(&t.final_term));
        let t = reduce(&p("(\\x. x) y"), 0);
        assert!(t.fuel_exhausted);
        assert_eq!(t.steps, 0);
    }

    #[test]
    fn compressed_carries_multiplicity() {
        let c = canonicalize(&p("[(\\x. x) a : 5]"));
        let (out, trace) = reduce_compressed(&c, 10);
        assert_eq!(trace.steps, 1);
        assert_eq!(out.count_of(&p("a")), BigInt::from(5));
    }

    #[test]
    fn compressed_cancellation_after_reduction() {
        let c = canonicalize(&p("[(\\x. x) a : 2, a : -2]"));
        assert_eq!(c.len(), 2);
        let (out, trace) = reduce_compressed(&c, 10);
        assert!(out.is_empty());
        assert_eq!(trace.steps, 1);
        // the literal route agrees
        let literal = reduce(&c.expand(), 10);
        assert!(canonicalize(&literal.final_term).is_empty());
    }

    #[test]
    fn compressed_empty() {
        let (out, trace) = reduce_compressed(&CanonicalSuperposition::new(), 10);
        assert!(out.is_empty());
        assert_eq!(trace.steps, 0);
    }

    #[test]
    fn compressed_flattens_branch_superpositions() {
        let c = canonicalize(&p("[(\\x. [x, ~b, x]) a : 3]"));
        let (out, _) = reduce_compressed(&c, 10);
        assert_eq!(out.count_of(&p("a")), BigInt::from(6));
        assert_eq!(out.count_of(&p("b")), BigInt::from(-3));
    }

    #[test]
    fn capture_is_avoided_during_reduction() {
        let t = reduce(&p("(\\x. \\y. x) y"), 10);
        assert!(alpha_eq(&t.final_term, &p("\\z. y")));
    }
}
