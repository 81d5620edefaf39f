//! Compiles an automaton into lambda-q terms.
//!
//! * cell states become Church numerals, configurations become lists of
//!   them (`\s. s head tail`, ending in `\n. \c. n`);
//! * every value the step needs is read from a table indexed by a numeral.
//!   A lookup walks `q` cells of the table and `K-1-q` cells of a padding
//!   list, so it costs the same number of reduction steps for every index
//!   and every configuration costs the same to step;
//! * the sub-state permutation indexes each neighbouring state into nested
//!   tables over the sub-state digits;
//! * the local matrix, scaled to integers, becomes a table whose row `j` is
//!   the weighted superposition `[k e : T[j][e], ...]` of continuation calls;
//! * one step applies the permutation and then the transition to each cell
//!   in turn, left to right. A row superposition reaches head position
//!   before its continuation runs, so the per-cell counts multiply by
//!   distribution and nothing is duplicated.
//!
//! Counts are integers, so amplitudes are recovered by dividing by the scale
//! accumulated in a [`ScaleLedger`].

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::canon::CanonicalSuperposition;
use crate::encode::{church, church_bool, lookup_term, numeral_value, DECODE_FUEL};
use crate::pqca::{Configuration, PqcaSpec, SuperposedState};
use crate::reduce::reduce;
use crate::term::{Element, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("malformed configuration: {0}")]
    MalformedConfiguration(String),
    #[error("counts sum to zero, cannot normalise by their total")]
    ZeroTotal,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ScalingMode {
    /// Product of every entry's denominator.
    #[default]
    Product,
    /// Least common multiple of the denominators.
    Lcm,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DecodeMode {
    /// Divide counts by the tracked scale `d * b^(w * steps)`.
    #[default]
    Ledger,
    /// Divide counts by their sum.
    CountTotal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaleLedger {
    pub b: BigInt,
    pub d: BigInt,
    pub steps_applied: u64,
    pub width: usize,
}

impl ScaleLedger {
    /// `d * b^(w * steps_applied)`.
    pub fn total_scale(&self) -> BigInt {
        let exponent = self.width as u64 * self.steps_applied;
        &self.d * Pow::pow(&self.b, exponent)
    }

    pub fn after_steps(&self, steps: u64) -> ScaleLedger {
        ScaleLedger {
            steps_applied: self.steps_applied + steps,
            ..self.clone()
        }
    }
}

/// Integer scale `b` and the integer matrix `b * M`.
pub fn scale_matrix(
    matrix: &crate::pqca::RationalMatrix,
    mode: ScalingMode,
) -> (BigInt, Vec<Vec<BigInt>>) {
    let b = match mode {
        ScalingMode::Product => matrix.entries().map(|v| v.denom().clone()).product(),
        ScalingMode::Lcm => matrix
            .entries()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom())),
    };
    let scale = BigRational::from_integer(b.clone());
    let t = (0..matrix.rows())
        .map(|i| {
            matrix
                .row(i)
                .iter()
                .map(|v| {
                    let x = v * &scale;
                    debug_assert!(x.is_integer());
                    x.to_integer()
                })
                .collect()
        })
        .collect();
    (b, t)
}

/// Integer scale `d` (product of amplitude denominators) and the counts
/// `d * amplitude`.
pub fn scale_superposition(state: &SuperposedState) -> (BigInt, BTreeMap<Configuration, BigInt>) {
    let d: BigInt = state.iter().map(|(_, a)| a.denom().clone()).product();
    let scale = BigRational::from_integer(d.clone());
    let counts = state
        .iter()
        .map(|(c, a)| (c.clone(), (a * &scale).to_integer()))
        .collect();
    (d, counts)
}

pub fn encode_state(q: usize) -> Term {
    church(q as u64)
}

/// Cons cell in normal form.
fn cell(head: Term, tail: Term) -> Term {
    Term::lam("s", Term::apps(Term::var("s"), [head, tail]))
}

fn nil() -> Term {
    Term::lams(&["n", "c"], Term::var("n"))
}

fn term_list(items: Vec<Term>) -> Term {
    items.into_iter().rev().fold(nil(), |t, h| cell(h, t))
}

pub fn encode_config(config: &Configuration) -> Term {
    term_list(config.cells().iter().map(|&q| encode_state(q)).collect())
}

/// Normal-form list of numerals, read syntactically.
fn read_config(term: &Term) -> Option<Vec<usize>> {
    let mut out = Vec::new();
    let mut t = term;
    loop {
        match t {
            Term::Abstraction(n, inner) => match &**inner {
                Term::Abstraction(c, body) if n != c => {
                    return matches!(&**body, Term::Variable(v) if v == n).then_some(out);
                }
                Term::Application(f, tail) => {
                    let Term::Application(s, head) = &**f else {
                        return None;
                    };
                    if !matches!(&**s, Term::Variable(v) if v == n)
                        || head.occurs_free(n)
                        || tail.occurs_free(n)
                    {
                        return None;
                    }
                    out.push(usize::try_from(numeral_value(head)?).ok()?);
                    t = tail;
                }
                _ => return None,
            },
            _ => return None,
        }
    }
}

/// Normalises `term` and reads the configuration it encodes.
pub fn decode_config(term: &Term) -> Result<Configuration, CompileError> {
    let trace = reduce(term, DECODE_FUEL);
    if trace.fuel_exhausted {
        return Err(CompileError::MalformedConfiguration(format!(
            "no normal form within {DECODE_FUEL} steps"
        )));
    }
    read_config(&trace.final_term)
        .map(Configuration)
        .ok_or_else(|| CompileError::MalformedConfiguration(trace.final_term.to_string()))
}

/// Compressed superposition of encoded configurations for an initial state,
/// together with its scale `d`.
pub fn encode_superposition(state: &SuperposedState) -> (CanonicalSuperposition, BigInt) {
    let (d, counts) = scale_superposition(state);
    let mut out = CanonicalSuperposition::new();
    for (c, n) in counts {
        out.add_term(&encode_config(&c), &n);
    }
    (out, d)
}

pub fn decode_superposition(
    canon: &CanonicalSuperposition,
    ledger: &ScaleLedger,
    mode: DecodeMode,
) -> Result<SuperposedState, CompileError> {
    let scale = match mode {
        DecodeMode::Ledger => ledger.total_scale(),
        DecodeMode::CountTotal => {
            let total = canon.total();
            if total.is_zero() {
                return Err(CompileError::ZeroTotal);
            }
            total
        }
    };
    let mut out = SuperposedState::new();
    for (term, n) in canon.entries() {
        let config = decode_config(term)?;
        out.add(config, BigRational::new(n.clone(), scale.clone()));
    }
    Ok(out)
}

fn v(name: &str) -> Term {
    Term::var(name)
}

fn selector(first: bool) -> Term {
    Term::lams(&["a", "b"], v(if first { "a" } else { "b" }))
}

/// `\p. p (\a. \b. b)`: drops the head of a list.
fn drop_head() -> Term {
    Term::lam("p", Term::app(v("p"), selector(false)))
}

/// `HEAD (n DROP list)`, the `n`-th element.
fn walk(index: Term, list: Term) -> Term {
    Term::app(
        Term::lam("p", Term::app(v("p"), selector(true))),
        Term::apps(index, [drop_head(), list]),
    )
}

/// `\k. k value`.
fn deliver(value: Term) -> Term {
    Term::lam("k", Term::app(v("k"), value))
}

/// A table of `K` continuation entries `E_q`. Each cell holds the pair
/// `(E_q, K-1-q)`: a lookup walks `q` cells of the table and then the
/// remaining `K-1-q` cells of a padding list, so its cost does not depend
/// on `q`.
fn table(entries: Vec<Term>) -> Term {
    let k = entries.len();
    term_list(
        entries
            .into_iter()
            .enumerate()
            .map(|(q, e)| cell(e, encode_state(k - 1 - q)))
            .collect(),
    )
}

/// `lookup(index, table) k` reduces to `E_index k`.
fn lookup(index: Term, table: Term, size: usize) -> Term {
    let padding = term_list(vec![Term::lam("z", v("z")); size]);
    let finish = Term::lams(&["v", "p"], Term::app(walk(v("p"), padding), v("v")));
    Term::app(walk(index, table), finish)
}

fn cps(index: Term, table: Term, size: usize, var: &str, body: Term) -> Term {
    Term::app(lookup(index, table, size), Term::lam(var, body))
}

/// Continuation-passing computation of one permuted cell: the cell's new
/// state is delivered to `\var. body`.
///
/// The first non-trivial component indexes the source state into a table
/// of sub-tables over the remaining digits. Each later component extracts
/// its digit (skipped when the digit is the whole state) and indexes the
/// current sub-table with it.
fn permuted_cell(spec: &PqcaSpec, i: usize, var: &str, body: Term) -> Term {
    let s = spec.sublattices;
    let n = spec.states();
    let w = spec.width;
    let comps: Vec<Component> = [
        (s.left, (i + 1) % w, 0),
        (s.middle, i, 1),
        (s.right, (i + w - 1) % w, 2),
    ]
    .into_iter()
    .filter(|(size, ..)| *size > 1)
    .map(|(size, source, kind)| Component { size, source, kind })
    .collect();
    if comps.is_empty() {
        return Term::app(Term::lam(var, body), encode_state(0));
    }
    let ctx = CellContext {
        spec,
        comps: &comps,
        cell: i,
        n,
    };
    ctx.stage(0, var, body)
}

struct Component {
    size: usize,
    source: usize,
    kind: usize,
}

struct CellContext<'a> {
    spec: &'a PqcaSpec,
    comps: &'a [Component],
    cell: usize,
    n: usize,
}

impl CellContext<'_> {
    fn digit(&self, q: usize, kind: usize) -> usize {
        let (l, m, r) = self.spec.sublattices.split(q);
        [l, m, r][kind]
    }

    /// Table over the digits of components `level..`, given the digits
    /// already fixed; leaves are the joined states.
    fn nested(&self, level: usize, fixed: &mut Vec<usize>) -> Term {
        if level == self.comps.len() {
            let mut lmr = [0; 3];
            for (c, d) in self.comps.iter().zip(fixed.iter()) {
                lmr[c.kind] = *d;
            }
            return encode_state(self.spec.sublattices.join(lmr[0], lmr[1], lmr[2]));
        }
        table(
            (0..self.comps[level].size)
                .map(|d| {
                    fixed.push(d);
                    let sub = self.nested(level + 1, fixed);
                    fixed.pop();
                    deliver(sub)
                })
                .collect(),
        )
    }

    fn current(&self, level: usize) -> String {
        format!("j{}_{level}", self.cell)
    }

    fn stage(&self, level: usize, var: &str, body: Term) -> Term {
        let comp = &self.comps[level];
        let source = v(&format!("h{}", comp.source));
        let next = if level + 1 == self.comps.len() {
            Term::lam(var, body)
        } else {
            Term::lam(&self.current(level + 1), self.stage(level + 1, var, body))
        };
        if level == 0 {
            let entries = (0..self.n)
                .map(|q| deliver(self.nested(1, &mut vec![self.digit(q, comp.kind)])))
                .collect();
            return Term::app(lookup(source, table(entries), self.n), next);
        }
        let current = v(&self.current(level));
        if comp.size == self.n {
            return Term::app(lookup(source, current, comp.size), next);
        }
        let digit = format!("d{}_{level}", self.cell);
        let digits = table(
            (0..self.n)
                .map(|q| deliver(encode_state(self.digit(q, comp.kind))))
                .collect(),
        );
        Term::app(
            lookup(source, digits, self.n),
            Term::lam(&digit, Term::app(lookup(v(&digit), current, comp.size), next)),
        )
    }
}

/// Destructures a configuration into `h0 .. h(w-1)` around `body`.
fn destructure(config: Term, width: usize, cell_name: &str, rest_name: &str, body: Term) -> Term {
    let mut body = body;
    for i in (0..width).rev() {
        body = Term::lams(&[&format!("{cell_name}{i}"), &format!("{rest_name}{i}")], body);
        if i > 0 {
            body = Term::app(v(&format!("{rest_name}{}", i - 1)), body);
        }
    }
    Term::app(config, body)
}

/// The permutation term. `\c. c (\h0. \r0. r0 (\h1. \r1. ... CELLS))`,
/// where CELLS computes every new cell by table lookups and lists them.
pub fn emit_sigma_term(spec: &PqcaSpec) -> Term {
    let w = spec.width;
    let mut body = term_list((0..w).map(|i| v(&format!("x{i}"))).collect());
    for i in (0..w).rev() {
        body = permuted_cell(spec, i, &format!("x{i}"), body);
    }
    Term::lam("c", destructure(v("c"), w, "h", "r", body))
}

/// Table of the transition rows: entry `j` is `\k. [k e : T[j][e], ...]`.
fn transition_table(t: &[Vec<BigInt>]) -> Term {
    table(
        t.iter()
            .map(|row| {
                Term::lam(
                    "k",
                    Term::Superposition(
                        row.iter()
                            .enumerate()
                            .filter(|(_, n)| !n.is_zero())
                            .map(|(e, n)| Element::new(Term::app(v("k"), encode_state(e)), n.clone()))
                            .collect(),
                    ),
                )
            })
            .collect(),
    )
}

/// The transition term. `\s. LOOKUP s ROWS (\e. e)`, reducing to the
/// weighted superposition of numerals `e` with counts `T[s][e]`.
pub fn emit_transition_term(spec: &PqcaSpec, mode: ScalingMode) -> Term {
    let (_, t) = scale_matrix(&spec.lambda, mode);
    transition_from_rows(&t)
}

fn transition_from_rows(t: &[Vec<BigInt>]) -> Term {
    Term::lam(
        "s",
        Term::app(
            lookup(v("s"), transition_table(t), t.len()),
            Term::lam("e", v("e")),
        ),
    )
}

/// `P c (\x0. \t0. ... ROW x0 (\e0. ROW x1 (\e1. ... [e0, e1, ...])))`:
/// the permutation first, then each cell's row superposition in turn. A
/// row superposition lands in head position before its continuation runs,
/// so per-cell counts multiply by distribution.
fn step_from_parts(sigma: Term, rows: Term, states: usize, width: usize) -> Term {
    let mut body = term_list((0..width).map(|i| v(&format!("e{i}"))).collect());
    for i in (0..width).rev() {
        body = cps(v(&format!("x{i}")), rows.clone(), states, &format!("e{i}"), body);
    }
    Term::lam("c", destructure(Term::app(sigma, v("c")), width, "x", "t", body))
}

/// One automaton step on a single encoded configuration.
pub fn emit_step_term(spec: &PqcaSpec, mode: ScalingMode) -> Term {
    let (_, t) = scale_matrix(&spec.lambda, mode);
    step_from_parts(
        emit_sigma_term(spec),
        transition_table(&t),
        spec.states(),
        spec.width,
    )
}

/// Church boolean telling whether the acceptance cell holds an accepting
/// state.
pub fn emit_accept_term(spec: &PqcaSpec) -> Term {
    let flags = term_list(
        (0..spec.states())
            .map(|q| church_bool(spec.accept_states.contains(&q)))
            .collect(),
    );
    let cell = Term::apps(lookup_term(), [encode_state(spec.accept_cell), v("c")]);
    Term::lam("c", Term::apps(lookup_term(), [cell, flags]))
}

/// `\c. k STEP c`: `k` steps as a single term.
pub fn emit_iter_term(step: &Term, k: u64) -> Term {
    Term::lam("c", Term::apps(church(k), [step.clone(), v("c")]))
}

#[derive(Clone, Debug)]
pub struct CompiledAutomaton {
    pub spec: PqcaSpec,
    pub scaled_matrix: Vec<Vec<BigInt>>,
    pub sigma_term: Term,
    pub transition_term: Term,
    pub step_term: Term,
    pub accept_term: Term,
    /// Scale with `d = 1` and no steps applied.
    pub ledger: ScaleLedger,
}

impl CompiledAutomaton {
    pub fn new(spec: &PqcaSpec, mode: ScalingMode) -> Self {
        let (b, t) = scale_matrix(&spec.lambda, mode);
        let sigma_term = emit_sigma_term(spec);
        let transition_term = transition_from_rows(&t);
        let step_term = step_from_parts(
            sigma_term.clone(),
            transition_table(&t),
            spec.states(),
            spec.width,
        );
        CompiledAutomaton {
            spec: spec.clone(),
            scaled_matrix: t,
            sigma_term,
            transition_term,
            step_term,
            accept_term: emit_accept_term(spec),
            ledger: ScaleLedger {
                b,
                d: BigInt::one(),
                steps_applied: 0,
                width: spec.width,
            },
        }
    }

    pub fn encode_state(&self, q: usize) -> Term {
        encode_state(q)
    }

    pub fn iter_term(&self, k: u64) -> Term {
        emit_iter_term(&self.step_term, k)
    }
}

/// Whether every count in `t` is nonnegative, the case where dividing by the
/// total count recovers amplitudes.
pub fn counts_nonnegative(t: &[Vec<BigInt>]) -> bool {
    t.iter().flatten().all(|n| !n.is_negative())
}
