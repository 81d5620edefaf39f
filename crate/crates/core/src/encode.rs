//! Church encodings used by the compiler: numerals, booleans, pairs, lists
//! built from pairs, and the arithmetic and comparison terms on numerals.
//!
//! Every factory returns a closed term.

use crate::parse::parse_term;
use crate::reduce::reduce;
use crate::term::Term;

/// Fuel used when a decoder has to normalise its input first.
pub const DECODE_FUEL: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("not a Church numeral: {0}")]
    NotANumeral(String),
    #[error("not a Church boolean: {0}")]
    NotABoolean(String),
    #[error("not an encoded pair: {0}")]
    NotAPair(String),
    #[error("not an encoded list: {0}")]
    NotAList(String),
    #[error("no normal form within {0} steps")]
    NoNormalForm(u64),
}

fn builtin(src: &str) -> Term {
    parse_term(src).expect("built-in term must parse")
}

pub fn church(n: u64) -> Term {
    let mut body = Term::var("x");
    for _ in 0..n {
        body = Term::app(Term::var("f"), body);
    }
    Term::lams(&["f", "x"], body)
}

pub fn church_true() -> Term {
    builtin(r"\t. \f. t")
}

pub fn church_false() -> Term {
    builtin(r"\t. \f. f")
}

pub fn church_bool(b: bool) -> Term {
    if b {
        church_true()
    } else {
        church_false()
    }
}

pub fn if_term() -> Term {
    builtin(r"\b. \t. \e. b t e")
}

pub fn and_term() -> Term {
    builtin(r"\p. \q. p q p")
}

pub fn succ_term() -> Term {
    builtin(r"\n. \f. \x. f (n f x)")
}

pub fn add_term() -> Term {
    builtin(r"\m. \n. \f. \x. m f (n f x)")
}

pub fn mul_term() -> Term {
    builtin(r"\m. \n. \f. m (n f)")
}

pub fn pred_term() -> Term {
    builtin(r"\n. \f. \x. n (\g. \h. h (g f)) (\u. x) (\u. u)")
}

/// Truncated subtraction `m - n`.
pub fn sub_term() -> Term {
    Term::lams(
        &["m", "n"],
        Term::apps(Term::var("n"), [pred_term(), Term::var("m")]),
    )
}

pub fn is_zero_term() -> Term {
    Term::lam(
        "n",
        Term::apps(
            Term::var("n"),
            [Term::lam("x", church_false()), church_true()],
        ),
    )
}

/// `m <= n`, as `IS_ZERO (m - n)`.
pub fn leq_term() -> Term {
    Term::lams(
        &["m", "n"],
        Term::app(
            is_zero_term(),
            Term::apps(sub_term(), [Term::var("m"), Term::var("n")]),
        ),
    )
}

/// Numeral equality: both truncated differences are zero.
pub fn equal_term() -> Term {
    let leq = |a: &str, b: &str| Term::apps(leq_term(), [Term::var(a), Term::var(b)]);
    Term::lams(
        &["m", "n"],
        Term::apps(and_term(), [leq("m", "n"), leq("n", "m")]),
    )
}

pub fn pair_term() -> Term {
    builtin(r"\a. \b. \s. s a b")
}

pub fn fst_term() -> Term {
    Term::lam("p", Term::app(Term::var("p"), church_true()))
}

pub fn snd_term() -> Term {
    Term::lam("p", Term::app(Term::var("p"), church_false()))
}

/// End-of-list marker. Its body is an abstraction, which keeps it apart
/// from any cons cell.
pub fn nil_term() -> Term {
    builtin(r"\n. \c. n")
}

/// A cons cell is the pair `(head, tail)`.
pub fn cons(head: Term, tail: Term) -> Term {
    Term::apps(pair_term(), [head, tail])
}

pub fn list(items: impl IntoIterator<Item = Term>) -> Term {
    let items: Vec<Term> = items.into_iter().collect();
    items
        .into_iter()
        .rev()
        .fold(nil_term(), |tail, head| cons(head, tail))
}

/// `LOOKUP i l`: the `i`-th element of a list, by dropping `i` tails.
pub fn lookup_term() -> Term {
    Term::lams(
        &["i", "l"],
        Term::app(
            fst_term(),
            Term::apps(Term::var("i"), [snd_term(), Term::var("l")]),
        ),
    )
}

fn reduce_to_normal(term: &Term) -> Result<Term, DecodeError> {
    let trace = reduce(term, DECODE_FUEL);
    if trace.fuel_exhausted {
        return Err(DecodeError::NoNormalForm(DECODE_FUEL));
    }
    Ok(trace.final_term)
}

/// Reads a numeral off a term already in normal form.
pub fn numeral_value(term: &Term) -> Option<u64> {
    let Term::Abstraction(f, inner) = term else {
        return None;
    };
    let Term::Abstraction(x, body) = &**inner else {
        return None;
    };
    if f == x {
        return None;
    }
    let mut n = 0;
    let mut t: &Term = body;
    loop {
        match t {
            Term::Variable(v) if v == x => return Some(n),
            Term::Application(g, a) if matches!(&**g, Term::Variable(v) if v == f) => {
                n += 1;
                t = a;
            }
            _ => return None,
        }
    }
}

/// Normalises the term and decodes the numeral it denotes.
pub fn unchurch(term: &Term) -> Result<u64, DecodeError> {
    let nf = reduce_to_normal(term)?;
    numeral_value(&nf).ok_or_else(|| DecodeError::NotANumeral(nf.to_string()))
}

pub fn bool_value(term: &Term) -> Option<bool> {
    let Term::Abstraction(t, inner) = term else {
        return None;
    };
    let Term::Abstraction(f, body) = &**inner else {
        return None;
    };
    match &**body {
        Term::Variable(v) if v == f => Some(false),
        Term::Variable(v) if v == t => Some(true),
        _ => None,
    }
}

pub fn unbool(term: &Term) -> Result<bool, DecodeError> {
    let nf = reduce_to_normal(term)?;
    bool_value(&nf).ok_or_else(|| DecodeError::NotABoolean(nf.to_string()))
}

/// Splits a normal-form pair `\s. s a b` into its components.
pub fn pair_parts(term: &Term) -> Option<(&Term, &Term)> {
    let Term::Abstraction(s, body) = term else {
        return None;
    };
    let Term::Application(head, b) = &**body else {
        return None;
    };
    let Term::Application(sel, a) = &**head else {
        return None;
    };
    match &**sel {
        Term::Variable(v) if v == s && !a.occurs_free(s) && !b.occurs_free(s) => Some((a, b)),
        _ => None,
    }
}

fn is_nil(term: &Term) -> bool {
    matches!(term, Term::Abstraction(n, inner)
        if matches!(&**inner, Term::Abstraction(c, body)
            if n != c && matches!(&**body, Term::Variable(v) if v == n)))
}

/// Elements of a normal-form list, without decoding them further.
pub fn list_items(term: &Term) -> Option<Vec<Term>> {
    let mut out = Vec::new();
    let mut t = term;
    loop {
        if is_nil(t) {
            return Some(out);
        }
        let (head, tail) = pair_parts(t)?;
        out.push(head.clone());
        t = tail;
    }
}

/// Shape of an encoded value, needed to decode because several encodings
/// coincide (zero and false are the same term).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Kind {
    Numeral,
    Boolean,
    Pair(Box<Kind>, Box<Kind>),
    List(Box<Kind>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EncodedValue {
    Numeral(u64),
    Boolean(bool),
    Pair(Box<EncodedValue>, Box<EncodedValue>),
    List(Vec<EncodedValue>),
}

impl EncodedValue {
    pub fn encode(&self) -> Term {
        match self {
            EncodedValue::Numeral(n) => church(*n),
            EncodedValue::Boolean(b) => church_bool(*b),
            EncodedValue::Pair(a, b) => Term::apps(pair_term(), [a.encode(), b.encode()]),
            EncodedValue::List(items) => list(items.iter().map(EncodedValue::encode)),
        }
    }

    /// Normalises `term` and reads it back as a value of the given kind.
    pub fn decode(term: &Term, kind: &Kind) -> Result<EncodedValue, DecodeError> {
        decode_normal(&reduce_to_normal(term)?, kind)
    }
}

fn decode_normal(nf: &Term, kind: &Kind) -> Result<EncodedValue, DecodeError> {
    match kind {
        Kind::Numeral => numeral_value(nf)
            .map(EncodedValue::Numeral)
            .ok_or_else(|| DecodeError::NotANumeral(nf.to_string())),
        Kind::Boolean => bool_value(nf)
            .map(EncodedValue::Boolean)
            .ok_or_else(|| DecodeError::NotABoolean(nf.to_string())),
        Kind::Pair(ka, kb) => {
            let (a, b) = pair_parts(nf).ok_or_else(|| DecodeError::NotAPair(nf.to_string()))?;
            Ok(EncodedValue::Pair(
                Box::new(decode_normal(a, ka)?),
                Box::new(decode_normal(b, kb)?),
            ))
        }
        Kind::List(k) => {
            let items = list_items(nf).ok_or_else(|| DecodeError::NotAList(nf.to_string()))?;
            items
                .iter()
                .map(|i| decode_normal(i, k))
                .collect::<Result<Vec<_>, _>>()
                .map(EncodedValue::List)
        }
    }
}
