//! Line-oriented automaton description files.
//!
//! ```text
//! sublattices 1 2 1
//! width 1
//! row 0 2/3 1/3
//! row 1 0 1
//! accept states 1
//! accept cell 0
//! init 0
//! ```
//!
//! `init amp <p/q> <cells...>` lines build a superposed initial state instead
//! of a single `init` line. `#` starts a comment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Configuration, PqcaSpec, RationalMatrix, Sublattices, SuperposedState};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PqcaFile {
    pub spec: PqcaSpec,
    /// `None` when the file has no `init` lines.
    pub init: Option<SuperposedState>,
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError {
        line,
        message: message.into(),
    }
}

fn parse_usize(tok: &str, line: usize) -> Result<usize, FormatError> {
    tok.parse()
        .map_err(|_| err(line, format!("expected a non-negative integer, found `{tok}`")))
}

pub fn parse_rational(tok: &str) -> Option<BigRational> {
    let (n, d) = match tok.split_once('/') {
        Some((n, d)) => (n, d),
        None => (tok, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() || d.is_negative() {
        return None;
    }
    Some(BigRational::new(n, d))
}

fn rational(tok: &str, line: usize) -> Result<BigRational, FormatError> {
    parse_rational(tok).ok_or_else(|| err(line, format!("expected a rational p/q, found `{tok}`")))
}

pub fn parse_pqca(src: &str) -> Result<PqcaFile, FormatError> {
    let mut sublattices: Option<(Sublattices, usize)> = None;
    let mut width: Option<(usize, usize)> = None;
    let mut rows: BTreeMap<usize, (usize, Vec<BigRational>)> = BTreeMap::new();
    let mut accept_states = BTreeSet::new();
    let mut accept_cell = 0;
    let mut basis: Option<(usize, Vec<usize>)> = None;
    let mut amps: Vec<(usize, BigRational, Vec<usize>)> = Vec::new();

    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let text = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = text.split_whitespace().collect();
        let Some((&head, rest)) = toks.split_first() else {
            continue;
        };
        match head {
            "sublattices" => {
                if sublattices.is_some() {
                    return Err(err(line, "duplicate `sublattices`"));
                }
                let [l, m, r] = rest else {
                    return Err(err(line, "`sublattices` takes three sizes"));
                };
                let s = Sublattices::new(
                    parse_usize(l, line)?,
                    parse_usize(m, line)?,
                    parse_usize(r, line)?,
                );
                if s.left == 0 || s.middle == 0 || s.right == 0 {
                    return Err(err(line, "sublattice sizes must be positive"));
                }
                if s.left.checked_mul(s.middle).and_then(|x| x.checked_mul(s.right)).is_none() {
                    return Err(err(line, "too many states"));
                }
                sublattices = Some((s, line));
            }
            "width" => {
                if width.is_some() {
                    return Err(err(line, "duplicate `width`"));
                }
                let [w] = rest else {
                    return Err(err(line, "`width` takes one value"));
                };
                let w = parse_usize(w, line)?;
                if w == 0 {
                    return Err(err(line, "width must be positive"));
                }
                width = Some((w, line));
            }
            "row" => {
                let Some((i, entries)) = rest.split_first() else {
                    return Err(err(line, "`row` needs an index"));
                };
                let i = parse_usize(i, line)?;
                let entries = entries
                    .iter()
                    .map(|t| rational(t, line))
                    .collect::<Result<Vec<_>, _>>()?;
                if rows.insert(i, (line, entries)).is_some() {
                    return Err(err(line, format!("duplicate row {i}")));
                }
            }
            "accept" => match rest.split_first() {
                Some((&"states", qs)) => {
                    for q in qs {
                        accept_states.insert(parse_usize(q, line)?);
                    }
                }
                Some((&"cell", [c])) => accept_cell = parse_usize(c, line)?,
                _ => return Err(err(line, "expected `accept states ...` or `accept cell <i>`")),
            },
            "init" => match rest.split_first() {
                Some((&"amp", more)) => {
                    let Some((a, cells)) = more.split_first() else {
                        return Err(err(line, "`init amp` needs an amplitude"));
                    };
                    let a = rational(a, line)?;
                    let cells = cells
                        .iter()
                        .map(|t| parse_usize(t, line))
                        .collect::<Result<_, _>>()?;
                    amps.push((line, a, cells));
                }
                _ => {
                    if basis.is_some() {
                        return Err(err(line, "duplicate `init`"));
                    }
                    let cells = rest
                        .iter()
                        .map(|t| parse_usize(t, line))
                        .collect::<Result<_, _>>()?;
                    basis = Some((line, cells));
                }
            },
            other => return Err(err(line, format!("unknown directive `{other}`"))),
        }
    }

    let end = src.lines().count().max(1);
    let (sublattices, _) = sublattices.ok_or_else(|| err(end, "missing `sublattices`"))?;
    let (width, _) = width.ok_or_else(|| err(end, "missing `width`"))?;
    let n = sublattices.states();
    for (i, (line, _)) in &rows {
        if *i >= n {
            return Err(err(*line, format!("row {i} outside [0, {n})")));
        }
    }
    if let Some(missing) = (0..n).find(|i| !rows.contains_key(i)) {
        return Err(err(end, format!("missing row {missing}")));
    }
    let mut matrix = RationalMatrix::zeros(n, n);
    for (i, (line, entries)) in &rows {
        if entries.len() != n {
            return Err(err(
                *line,
                format!("row {i} has {} entries, expected {n}", entries.len()),
            ));
        }
        for (j, v) in entries.iter().enumerate() {
            matrix.set(*i, j, v.clone());
        }
    }

    let init = match (basis, amps.is_empty()) {
        (Some((line, _)), false) => {
            return Err(err(line, "`init` and `init amp` cannot be mixed"));
        }
        (Some((line, cells)), true) => {
            check_cells(&cells, width, line)?;
            Some(SuperposedState::basis(Configuration(cells)))
        }
        (None, false) => {
            let mut state = SuperposedState::new();
            for (line, a, cells) in amps {
                check_cells(&cells, width, line)?;
                state.add(Configuration(cells), a);
            }
            Some(state)
        }
        (None, true) => None,
    };

    Ok(PqcaFile {
        spec: PqcaSpec {
            sublattices,
            lambda: matrix,
            accept_states,
            accept_cell,
            width,
        },
        init,
    })
}

fn check_cells(cells: &[usize], width: usize, line: usize) -> Result<(), FormatError> {
    if cells.len() != width {
        return Err(err(
            line,
            format!("configuration has {} cells, expected {width}", cells.len()),
        ));
    }
    Ok(())
}

fn write_rational(out: &mut String, v: &BigRational) {
    if v.denom().is_one() {
        let _ = write!(out, "{}", v.numer());
    } else {
        let _ = write!(out, "{}/{}", v.numer(), v.denom());
    }
}

/// Prints a file that [`parse_pqca`] reads back to the same value.
pub fn write_pqca(file: &PqcaFile) -> String {
    let spec = &file.spec;
    let s = spec.sublattices;
    let mut out = String::new();
    let _ = writeln!(out, "sublattices {} {} {}", s.left, s.middle, s.right);
    let _ = writeln!(out, "width {}", spec.width);
    for i in 0..spec.lambda.rows() {
        let _ = write!(out, "row {i}");
        for v in spec.lambda.row(i) {
            out.push(' ');
            write_rational(&mut out, v);
        }
        out.push('\n');
    }
    if !spec.accept_states.is_empty() {
        out.push_str("accept states");
        for q in &spec.accept_states {
            let _ = write!(out, " {q}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "accept cell {}", spec.accept_cell);
    if let Some(init) = &file.init {
        if init.is_empty() {
            // zero amplitudes are dropped on read, leaving an empty state
            out.push_str("init amp 0");
            for _ in 0..spec.width {
                out.push_str(" 0");
            }
            out.push('\n');
        }
        for (c, a) in init.iter() {
            out.push_str("init amp ");
            write_rational(&mut out, a);
            for q in c.cells() {
                let _ = write!(out, " {q}");
            }
            out.push('\n');
        }
    }
    out
}
