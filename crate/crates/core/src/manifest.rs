//! Text manifest for a compiled automaton: one `key value` record per line,
//! terms printed on a single line in the surface syntax.
//!
//! ```text
//! format lambdaq-manifest 1
//! sublattices 1 2 1
//! width 1
//! scaling product
//! b 9
//! d 1
//! t 0 6 3
//! t 1 0 9
//! P \c. c (...)
//! Q \s. ...
//! STEP \c. ...
//! ACC \c. ...
//! ```

use std::fmt::Write as _;

use num_bigint::BigInt;

use crate::compile::{CompiledAutomaton, ScalingMode};
use crate::parse::parse_term;
use crate::pqca::Sublattices;
use crate::term::Term;

pub const FORMAT_TAG: &str = "lambdaq-manifest 1";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ManifestError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub sublattices: Sublattices,
    pub width: usize,
    pub scaling: ScalingMode,
    pub b: BigInt,
    pub d: BigInt,
    pub scaled_matrix: Vec<Vec<BigInt>>,
    pub sigma_term: Term,
    pub transition_term: Term,
    pub step_term: Term,
    pub accept_term: Term,
}

impl Manifest {
    pub fn from_compiled(compiled: &CompiledAutomaton, scaling: ScalingMode, d: BigInt) -> Self {
        Manifest {
            sublattices: compiled.spec.sublattices,
            width: compiled.spec.width,
            scaling,
            b: compiled.ledger.b.clone(),
            d,
            scaled_matrix: compiled.scaled_matrix.clone(),
            sigma_term: compiled.sigma_term.clone(),
            transition_term: compiled.transition_term.clone(),
            step_term: compiled.step_term.clone(),
            accept_term: compiled.accept_term.clone(),
        }
    }

    pub fn render(&self) -> String {
        let s = self.sublattices;
        let mut out = String::new();
        let _ = writeln!(out, "format {FORMAT_TAG}");
        let _ = writeln!(out, "sublattices {} {} {}", s.left, s.middle, s.right);
        let _ = writeln!(out, "width {}", self.width);
        let scaling = match self.scaling {
            ScalingMode::Product => "product",
            ScalingMode::Lcm => "lcm",
        };
        let _ = writeln!(out, "scaling {scaling}");
        let _ = writeln!(out, "b {}", self.b);
        let _ = writeln!(out, "d {}", self.d);
        for (i, row) in self.scaled_matrix.iter().enumerate() {
            let _ = write!(out, "t {i}");
            for n in row {
                let _ = write!(out, " {n}");
            }
            out.push('\n');
        }
        let _ = writeln!(out, "P {}", self.sigma_term);
        let _ = writeln!(out, "Q {}", self.transition_term);
        let _ = writeln!(out, "STEP {}", self.step_term);
        let _ = writeln!(out, "ACC {}", self.accept_term);
        out
    }
}

fn err(line: usize, message: impl Into<String>) -> ManifestError {
    ManifestError {
        line,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T, ManifestError> {
    tok.parse()
        .map_err(|_| err(line, format!("expected a number, found `{tok}`")))
}

pub fn parse_manifest(src: &str) -> Result<Manifest, ManifestError> {
    let mut format_seen = false;
    let mut sublattices = None;
    let mut width = None;
    let mut scaling = None;
    let mut b = None;
    let mut d = None;
    let mut rows: Vec<(usize, Vec<BigInt>)> = Vec::new();
    let mut terms: [Option<Term>; 4] = [None, None, None, None];

    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let (key, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
        let rest = rest.trim();
        let toks: Vec<&str> = rest.split_whitespace().collect();
        match key {
            "format" => {
                if rest != FORMAT_TAG {
                    return Err(err(line, format!("unsupported format `{rest}`")));
                }
                format_seen = true;
            }
            "sublattices" => {
                let [l, m, r] = toks[..] else {
                    return Err(err(line, "`sublattices` takes three sizes"));
                };
                let s = Sublattices::new(number(l, line)?, number(m, line)?, number(r, line)?);
                if s.left == 0 || s.middle == 0 || s.right == 0 {
                    return Err(err(line, "sublattice sizes must be positive"));
                }
                if s.left.checked_mul(s.middle).and_then(|x| x.checked_mul(s.right)).is_none() {
                    return Err(err(line, "too many states"));
                }
                sublattices = Some(s);
            }
            "width" => {
                let [w] = toks[..] else {
                    return Err(err(line, "`width` takes one value"));
                };
                width = Some(number::<usize>(w, line)?);
            }
            "scaling" => {
                scaling = Some(match rest {
                    "product" => ScalingMode::Product,
                    "lcm" => ScalingMode::Lcm,
                    other => return Err(err(line, format!("unknown scaling `{other}`"))),
                });
            }
            "b" => b = Some(number::<BigInt>(rest, line)?),
            "d" => d = Some(number::<BigInt>(rest, line)?),
            "t" => {
                let Some((i, entries)) = toks.split_first() else {
                    return Err(err(line, "`t` needs a row index"));
                };
                let i: usize = number(i, line)?;
                if i != rows.len() {
                    return Err(err(line, format!("expected row {}, found {i}", rows.len())));
                }
                let entries = entries
                    .iter()
                    .map(|t| number(t, line))
                    .collect::<Result<_, _>>()?;
                rows.push((line, entries));
            }
            "P" | "Q" | "STEP" | "ACC" => {
                let slot = match key {
                    "P" => 0,
                    "Q" => 1,
                    "STEP" => 2,
                    _ => 3,
                };
                let term = parse_term(rest)
                    .map_err(|e| err(line, format!("{key}: column {}: {}", e.column, e.message)))?;
                terms[slot] = Some(term);
            }
            other => return Err(err(line, format!("unknown record `{other}`"))),
        }
    }

    let end = src.lines().count().max(1);
    let missing = |what: &str| err(end, format!("missing `{what}`"));
    if !format_seen {
        return Err(missing("format"));
    }
    let sublattices = sublattices.ok_or_else(|| missing("sublattices"))?;
    let n = sublattices.states();
    if rows.len() != n {
        return Err(err(end, format!("expected {n} `t` rows, found {}", rows.len())));
    }
    if let Some((line, _)) = rows.iter().find(|(_, r)| r.len() != n) {
        return Err(err(*line, format!("`t` row must have {n} entries")));
    }
    let [p, q, step, acc] = terms;
    Ok(Manifest {
        sublattices,
        width: width.ok_or_else(|| missing("width"))?,
        scaling: scaling.ok_or_else(|| missing("scaling"))?,
        b: b.ok_or_else(|| missing("b"))?,
        d: d.ok_or_else(|| missing("d"))?,
        scaled_matrix: rows.into_iter().map(|(_, r)| r).collect(),
        sigma_term: p.ok_or_else(|| missing("P"))?,
        transition_term: q.ok_or_else(|| missing("Q"))?,
        step_term: step.ok_or_else(|| missing("STEP"))?,
        accept_term: acc.ok_or_else(|| missing("ACC"))?,
    })
}
