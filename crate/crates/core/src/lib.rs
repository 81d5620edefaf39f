//! Lambda-q: an untyped lambda calculus with signed superpositions, an exact
//! simulator for partitioned quantum cellular automata, and a compiler that
//! turns an automaton into lambda-q terms simulating it.

pub mod canon;
pub mod compile;
pub mod encode;
pub mod harness;
pub mod manifest;
pub mod parse;
pub mod pqca;
pub mod reduce;
pub mod term;

pub use canon::{canonicalize, CanonicalSuperposition};
pub use parse::{parse_term, ParseError};
pub use reduce::{reduce, reduce_compressed, step, ReductionTrace};
pub use term::{alpha_eq, Element, Term};
