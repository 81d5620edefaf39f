//! Abstract syntax of lambda-q terms.
//!
//! A term is an untyped lambda term extended with superpositions and
//! negations. Superposition elements carry a signed big-integer
//! multiplicity, so `[M : 6, N : 3]` stands for six copies of `M` and three
//! of `N` without materialising them. Elements written without a count have
//! multiplicity one.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub type Name = Arc<str>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Variable(Name),
    Abstraction(Name, Arc<Term>),
    Application(Arc<Term>, Arc<Term>),
    Superposition(Vec<Element>),
    Negation(Arc<Term>),
}

/// One element of a superposition together with its multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Element {
    pub term: Term,
    pub count: BigInt,
}

impl Element {
    pub fn new(term: Term, count: impl Into<BigInt>) -> Self {
        Element {
            term,
            count: count.into(),
        }
    }

    pub fn single(term: Term) -> Self {
        Element {
            term,
            count: BigInt::one(),
        }
    }
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Variable(Arc::from(name))
    }

    pub fn lam(binder: &str, body: Term) -> Term {
        Term::Abstraction(Arc::from(binder), Arc::new(body))
    }

    /// Nested abstraction over several binders, outermost first.
    pub fn lams(binders: &[&str], body: Term) -> Term {
        binders
            .iter()
            .rev()
            .fold(body, |acc, b| Term::lam(b, acc))
    }

    pub fn app(function: Term, argument: Term) -> Term {
        Term::Application(Arc::new(function), Arc::new(argument))
    }

    /// Left-associated application `f a1 a2 ...`.
    pub fn apps(function: Term, arguments: impl IntoIterator<Item = Term>) -> Term {
        arguments.into_iter().fold(function, Term::app)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(inner: Term) -> Term {
        Term::Negation(Arc::new(inner))
    }

    /// Superposition with every element at multiplicity one.
    pub fn sup(elements: impl IntoIterator<Item = Term>) -> Term {
        Term::Superposition(elements.into_iter().map(Element::single).collect())
    }

    pub fn weighted(elements: impl IntoIterator<Item = (Term, BigInt)>) -> Term {
        Term::Superposition(
            elements
                .into_iter()
                .map(|(term, count)| Element { term, count })
                .collect(),
        )
    }

    pub fn is_abstraction(&self) -> bool {
        matches!(self, Term::Abstraction(..))
    }

    pub fn is_superposition(&self) -> bool {
        matches!(self, Term::Superposition(_))
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Variable(_) => 1,
            Term::Abstraction(_, body) => 1 + body.size(),
            Term::Application(f, a) => 1 + f.size() + a.size(),
            Term::Superposition(es) => 1 + es.iter().map(|e| e.term.size()).sum::<usize>(),
            Term::Negation(inner) => 1 + inner.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn occurs_free(&self, name: &str) -> bool {
        match self {
            Term::Variable(x) => &**x == name,
            Term::Abstraction(x, body) => &**x != name && body.occurs_free(name),
            Term::Application(f, a) => f.occurs_free(name) || a.occurs_free(name),
            Term::Superposition(es) => es.iter().any(|e| e.term.occurs_free(name)),
            Term::Negation(inner) => inner.occurs_free(name),
        }
    }
}

fn collect_free(term: &Term, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    match term {
        Term::Variable(x) => {
            if !bound.iter().any(|b| b == x) {
                out.insert(x.clone());
            }
        }
        Term::Abstraction(x, body) => {
            bound.push(x.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
        Term::Application(f, a) => {
            collect_free(f, bound, out);
            collect_free(a, bound, out);
        }
        Term::Superposition(es) => {
            for e in es {
                collect_free(&e.term, bound, out);
            }
        }
        Term::Negation(inner) => collect_free(inner, bound, out),
    }
}

/// Alpha-equivalence. Superposition elements are compared in order and
/// their multiplicities must match exactly.
pub fn alpha_eq(left: &Term, right: &Term) -> bool {
    let mut lenv = Vec::new();
    let mut renv = Vec::new();
    alpha_eq_in(left, right, &mut lenv, &mut renv)
}

fn alpha_eq_in(left: &Term, right: &Term, lenv: &mut Vec<Name>, renv: &mut Vec<Name>) -> bool {
    match (left, right) {
        (Term::Variable(x), Term::Variable(y)) => {
            let li = lenv.iter().rposition(|b| b == x);
            let ri = renv.iter().rposition(|b| b == y);
            match (li, ri) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            }
        }
        (Term::Abstraction(x, lb), Term::Abstraction(y, rb)) => {
            lenv.push(x.clone());
            renv.push(y.clone());
            let eq = alpha_eq_in(lb, rb, lenv, renv);
            lenv.pop();
            renv.pop();
            eq
        }
        (Term::Application(lf, la), Term::Application(rf, ra)) => {
            alpha_eq_in(lf, rf, lenv, renv) && alpha_eq_in(la, ra, lenv, renv)
        }
        (Term::Superposition(les), Term::Superposition(res)) => {
            les.len() == res.len()
                && les
                    .iter()
                    .zip(res)
                    .all(|(l, r)| l.count == r.count && alpha_eq_in(&l.term, &r.term, lenv, renv))
        }
        (Term::Negation(l), Term::Negation(r)) => alpha_eq_in(l, r, lenv, renv),
        _ => false,
    }
}

/// Hash that agrees on alpha-equivalent terms: bound variables hash by
/// their binder distance, free ones by name.
pub fn alpha_hash(term: &Term) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    let mut env = Vec::new();
    alpha_hash_in(term, &mut env, &mut h);
    h.finish()
}

fn alpha_hash_in(term: &Term, env: &mut Vec<Name>, h: &mut impl Hasher) {
    match term {
        Term::Variable(x) => match env.iter().rposition(|b| b == x) {
            Some(i) => {
                0u8.hash(h);
                (env.len() - i).hash(h);
            }
            None => {
                1u8.hash(h);
                x.hash(h);
            }
        },
        Term::Abstraction(x, body) => {
            2u8.hash(h);
            env.push(x.clone());
            alpha_hash_in(body, env, h);
            env.pop();
        }
        Term::Application(f, a) => {
            3u8.hash(h);
            alpha_hash_in(f, env, h);
            alpha_hash_in(a, env, h);
        }
        Term::Superposition(es) => {
            4u8.hash(h);
            es.len().hash(h);
            for e in es {
                e.count.hash(h);
                alpha_hash_in(&e.term, env, h);
            }
        }
        Term::Negation(inner) => {
            5u8.hash(h);
            alpha_hash_in(inner, env, h);
        }
    }
}

/// Capture-avoiding substitution `body[name := value]`.
///
/// Binders of `body` that would capture a free variable of `value` are
/// renamed to the first `<base><n>` not free in either term.
pub fn substitute(body: &Term, name: &str, value: &Term) -> Term {
    let fv = value.free_vars();
    subst(body, name, value, &fv).unwrap_or_else(|| body.clone())
}

/// Returns `None` when `name` does not occur free, so unchanged subtrees
/// keep their shared allocation.
fn subst(term: &Term, name: &str, value: &Term, fv: &BTreeSet<Name>) -> Option<Term> {
    match term {
        Term::Variable(x) => (&**x == name).then(|| value.clone()),
        Term::Abstraction(x, body) => {
            if &**x == name {
                return None;
            }
            if fv.contains(x) && body.occurs_free(name) {
                let mut avoid = body.free_vars();
                avoid.extend(fv.iter().cloned());
                let fresh = fresh_name(x, &avoid);
                let renamed = substitute(body, x, &Term::Variable(fresh.clone()));
                let new_body = subst(&renamed, name, value, fv).unwrap_or(renamed);
                return Some(Term::Abstraction(fresh, Arc::new(new_body)));
            }
            subst(body, name, value, fv).map(|b| Term::Abstraction(x.clone(), Arc::new(b)))
        }
        Term::Application(f, a) => {
            let nf = subst(f, name, value, fv);
            let na = subst(a, name, value, fv);
            if nf.is_none() && na.is_none() {
                return None;
            }
            Some(Term::Application(
                nf.map(Arc::new).unwrap_or_else(|| f.clone()),
                na.map(Arc::new).unwrap_or_else(|| a.clone()),
            ))
        }
        Term::Superposition(es) => {
            let mut changed = false;
            let out: Vec<Element> = es
                .iter()
                .map(|e| match subst(&e.term, name, value, fv) {
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
            changed.then_some(Term::Superposition(out))
        }
        Term::Negation(inner) => {
            subst(inner, name, value, fv).map(|t| Term::Negation(Arc::new(t)))
        }
    }
}

fn fresh_name(base: &str, avoid: &BTreeSet<Name>) -> Name {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "v" } else { stem };
    (1u64..)
        .map(|n| format!("{stem}{n}"))
        .find(|cand| !avoid.contains(cand.as_str()))
        .map(Name::from)
        .expect("unbounded candidate supply")
}

const LEVEL_NAMES: [&str; 7] = ["f", "x", "y", "z", "u", "v", "w"];

/// Renames every binder to a name determined only by its nesting depth,
/// so alpha-equivalent terms map to syntactically identical terms.
pub fn canonical_alpha(term: &Term) -> Term {
    let free = term.free_vars();
    let mut env: Vec<(Name, Name)> = Vec::new();
    let mut names: Vec<Name> = Vec::new();
    rename_levels(term, &free, &mut env, &mut names)
}

fn level_name(level: usize, free: &BTreeSet<Name>, cache: &mut Vec<Name>) -> Name {
    while cache.len() <= level {
        let l = cache.len();
        let mut cand = match LEVEL_NAMES.get(l) {
            Some(n) => (*n).to_string(),
            None => format!("v{l}"),
        };
        while free.contains(cand.as_str()) {
            cand.push('_');
        }
        cache.push(Name::from(cand));
    }
    cache[level].clone()
}

fn rename_levels(
    term: &Term,
    free: &BTreeSet<Name>,
    env: &mut Vec<(Name, Name)>,
    names: &mut Vec<Name>,
) -> Term {
    match term {
        Term::Variable(x) => match env.iter().rev().find(|(old, _)| old == x) {
            Some((_, new)) => Term::Variable(new.clone()),
            None => term.clone(),
        },
        Term::Abstraction(x, body) => {
            let new = level_name(env.len(), free, names);
            env.push((x.clone(), new.clone()));
            let b = rename_levels(body, free, env, names);
            env.pop();
            Term::Abstraction(new, Arc::new(b))
        }
        Term::Application(f, a) => Term::Application(
            Arc::new(rename_levels(f, free, env, names)),
            Arc::new(rename_levels(a, free, env, names)),
        ),
        Term::Superposition(es) => Term::Superposition(
            es.iter()
                .map(|e| Element {
                    term: rename_levels(&e.term, free, env, names),
                    count: e.count.clone(),
                })
                .collect(),
        ),
        Term::Negation(inner) => Term::Negation(Arc::new(rename_levels(inner, free, env, names))),
    }
}

// Printing follows the surface grammar: abstractions extend as far right as
// possible, application is left-associative, `~` binds to an atom.

#[derive(Clone, Copy, PartialEq, Eq)]
enum Position {
    Top,
    Head,
    Argument,
}

fn write_term(term: &Term, pos: Position, out: &mut impl fmt::Write) -> fmt::Result {
    match term {
        Term::Variable(x) => out.write_str(x),
        Term::Abstraction(x, body) => {
            let wrap = pos != Position::Top;
            if wrap {
                out.write_char('(')?;
            }
            write!(out, "\\{x}. ")?;
            write_term(body, Position::Top, out)?;
            if wrap {
                out.write_char(')')?;
            }
            Ok(())
        }
        Term::Application(f, a) => {
            let wrap = pos == Position::Argument;
            if wrap {
                out.write_char('(')?;
            }
            write_term(f, Position::Head, out)?;
            out.write_char(' ')?;
            write_term(a, Position::Argument, out)?;
            if wrap {
                out.write_char(')')?;
            }
            Ok(())
        }
        Term::Superposition(es) => {
            out.write_char('[')?;
            for (i, e) in es.iter().enumerate() {
                if i > 0 {
                    out.write_str(", ")?;
                }
                write_term(&e.term, Position::Top, out)?;
                if !e.count.is_one() {
                    write!(out, " : {}", e.count)?;
                }
            }
            out.write_char(']')
        }
        Term::Negation(inner) => {
            out.write_char('~')?;
            write_term(inner, Position::Argument, out)
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self, Position::Top, f)
    }
}

/// Structural normalisation of the superposition spine: nested
/// superpositions are flattened with multiplied counts, negations are pushed
/// into superpositions, double negations collapse and negated elements become
/// negative counts. Zero-count elements are dropped. Subterms below
/// abstractions and applications are left untouched.
pub fn normalize_spine(term: &Term) -> Term {
    match term {
        Term::Negation(inner) => match normalize_spine(inner) {
            Term::Negation(x) => (*x).clone(),
            Term::Superposition(es) => Term::Superposition(
                es.into_iter()
                    .map(|e| Element {
                        term: e.term,
                        count: -e.count,
                    })
                    .collect(),
            ),
            other => Term::Negation(Arc::new(other)),
        },
        Term::Superposition(es) => {
            let mut out = Vec::with_capacity(es.len());
            flatten_into(es, &BigInt::one(), &mut out);
            Term::Superposition(out)
        }
        _ => term.clone(),
    }
}

fn flatten_into(es: &[Element], scale: &BigInt, out: &mut Vec<Element>) {
    for e in es {
        if e.count.is_zero() {
            continue;
        }
        let count = &e.count * scale;
        match normalize_spine(&e.term) {
            Term::Superposition(inner) => {
                // already flat; only rescale
                for ie in inner {
                    out.push(Element {
                        term: ie.term,
                        count: &ie.count * &count,
                    });
                }
            }
            Term::Negation(x) => out.push(Element {
                term: (*x).clone(),
                count: -count,
            }),
            other => out.push(Element { term: other, count }),
        }
    }
}

/// True when `normalize_spine` would leave the term unchanged.
pub fn spine_is_normal(term: &Term) -> bool {
    match term {
        Term::Negation(inner) => !matches!(**inner, Term::Negation(_) | Term::Superposition(_)),
        Term::Superposition(es) => es.iter().all(|e| {
            !e.count.is_zero() && !matches!(e.term, Term::Negation(_) | Term::Superposition(_))
        }),
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_term;

    fn p(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn alpha_eq_examples() {
        assert!(alpha_eq(&p("\\x. x"), &p("\\y. y")));
        assert!(!alpha_eq(&p("\\x. x"), &p("\\x. x x")));
        assert!(!alpha_eq(&p("x"), &p("y")));
        assert!(alpha_eq(&p("\\x. \\y. x y"), &p("\\a. \\b. a b")));
        assert!(!alpha_eq(&p("\\x. \\y. x"), &p("\\x. \\y. y")));
        // free variable must not be confused with a bound one
        assert!(!alpha_eq(&p("\\x. y"), &p("\\y. y")));
    }

    #[test]
    fn superposition_comparison_is_ordered() {
        assert!(!alpha_eq(&p("[a, b]"), &p("[b, a]")));
        assert!(!alpha_eq(&p("[a : 2]"), &p("[a]")));
    }

    #[test]
    fn substitute_direct_hit() {
        let out = substitute(&p("x"), "x", &p("\\y. y"));
        assert!(alpha_eq(&out, &p("\\y. y")));
    }

    #[test]
    fn substitute_avoids_capture() {
        let out = substitute(&p("\\x. x z"), "z", &p("x"));
        assert!(alpha_eq(&out, &p("\\w. w x")));
        assert!(out.free_vars().contains("x"));
    }

    #[test]
    fn substitute_is_elementwise() {
        let out = substitute(&p("[x, ~x]"), "x", &p("\\n. n"));
        assert!(alpha_eq(&out, &p("[\\n. n, ~(\\n. n)]")));
    }

    #[test]
    fn substitute_respects_shadowing() {
        let t = p("\\x. x");
        assert_eq!(substitute(&t, "x", &p("y")), t);
    }

    #[test]
    fn canonical_alpha_is_stable_under_renaming() {
        let a = canonical_alpha(&p("\\g. \\y. g (g y)"));
        let b = canonical_alpha(&p("\\f. \\x. f (f x)"));
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "\\f. \\x. f (f x)");
    }

    #[test]
    fn canonical_alpha_avoids_free_names() {
        let t = p("\\a. a f");
        let c = canonical_alpha(&t);
        assert!(alpha_eq(&t, &c));
        assert_eq!(c.to_string(), "\\f_. f_ f");
    }

    #[test]
    fn spine_normalisation() {
        let t = normalize_spine(&p("~[a, [b : 2, ~c] : 3, ~~d]"));
        assert_eq!(t.to_string(), "[a : -1, b : -6, c : 3, d : -1]");
        assert!(spine_is_normal(&t));
        assert!(!spine_is_normal(&p("[~a]")));
        assert_eq!(normalize_spine(&p("~~a")), p("a"));
    }

    #[test]
    fn printer_parenthesises_where_needed() {
        for src in [
            "(\\x. x x) y",
            "f (g x) (\\y. y)",
            "~(f x)",
            "[\\x. x : 3, y : -2]",
            "(\\x. x) ~y",
            "[]",
        ] {
            assert_eq!(p(src).to_string(), src);
        }
    }
}
