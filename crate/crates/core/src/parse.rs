//! Recursive-descent parser for the textual term syntax.
//!
//! ```text
//! term    := '\' ident '.' term | app
//! app     := atom+
//! atom    := ident | '(' term ')' | '[' [elem (',' elem)*] ']' | '~' atom
//! elem    := term [':' integer]
//! ```
//!
//! `λ` is accepted in place of `\`. `#` starts a comment running to the end
//! of the line.

use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::term::{Element, Term};

/// Nesting deeper than this is rejected instead of risking stack exhaustion.
pub const MAX_DEPTH: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at {line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Lambda,
    Dot,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Tilde,
    Colon,
    Ident(String),
    Int(String),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Lambda => "'\\'".into(),
            Tok::Dot => "'.'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::Comma => "','".into(),
            Tok::Tilde => "'~'".into(),
            Tok::Colon => "':'".into(),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Int(s) => format!("integer '{s}'"),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexed {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(source: &str) -> Result<Vec<Lexed>, ParseError> {
    let mut out = Vec::new();
    let mut chars = source.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, column);
        let bump = |line: &mut usize, column: &mut usize, c: char| {
            if c == '\n' {
                *line += 1;
                *column = 1;
            } else {
                *column += 1;
            }
        };
        if c.is_whitespace() {
            chars.next();
            bump(&mut line, &mut column, c);
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                column += 1;
            }
            continue;
        }
        let single = match c {
            '\\' | 'λ' => Some(Tok::Lambda),
            '.' => Some(Tok::Dot),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            '~' => Some(Tok::Tilde),
            ':' => Some(Tok::Colon),
            _ => None,
        };
        if let Some(tok) = single {
            chars.next();
            column += 1;
            out.push(Lexed {
                tok,
                line: tl,
                column: tc,
            });
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    s.push(c);
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            out.push(Lexed {
                tok: Tok::Ident(s),
                line: tl,
                column: tc,
            });
            continue;
        }
        if c.is_ascii_digit() || c == '-' || c == '+' {
            let mut s = String::new();
            s.push(c);
            chars.next();
            column += 1;
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() {
                    s.push(c);
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            if s == "-" || s == "+" {
                return Err(ParseError {
                    line: tl,
                    column: tc,
                    message: format!("expected digits after '{s}'"),
                });
            }
            out.push(Lexed {
                tok: Tok::Int(s),
                line: tl,
                column: tc,
            });
            continue;
        }
        return Err(ParseError {
            line: tl,
            column: tc,
            message: format!("unexpected character {c:?}"),
        });
    }
    out.push(Lexed {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.advance();
            Ok(())
        } else {
            Err(self.error(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            )))
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error(format!("nesting deeper than {MAX_DEPTH}")));
        }
        Ok(())
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        self.enter()?;
        let t = if *self.peek() == Tok::Lambda {
            self.advance();
            let binder = match self.peek().clone() {
                Tok::Ident(s) => {
                    self.advance();
                    s
                }
                other => {
                    return Err(self.error(format!(
                        "expected binder name, found {}",
                        other.describe()
                    )));
                }
            };
            self.expect(Tok::Dot)?;
            let body = self.term()?;
            Term::Abstraction(Arc::from(binder.as_str()), Arc::new(body))
        } else {
            self.app()?
        };
        self.depth -= 1;
        Ok(t)
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_) | Tok::LParen | Tok::LBracket | Tok::Tilde
        )
    }

    fn app(&mut self) -> Result<Term, ParseError> {
        if !self.starts_atom() {
            return Err(self.error(format!("expected a term, found {}", self.peek().describe())));
        }
        let mut head = self.atom()?;
        while self.starts_atom() {
            let arg = self.atom()?;
            head = Term::app(head, arg);
        }
        Ok(head)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        self.enter()?;
        let next = self.peek().clone();
        if !matches!(next, Tok::Ident(_) | Tok::LParen | Tok::LBracket | Tok::Tilde) {
            return Err(self.error(format!("expected a term, found {}", next.describe())));
        }
        self.advance();
        let t = match next {
            Tok::Ident(s) => Term::var(&s),
            Tok::LParen => {
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                t
            }
            Tok::LBracket => {
                let mut elements = Vec::new();
                if *self.peek() != Tok::RBracket {
                    loop {
                        elements.push(self.element()?);
                        if *self.peek() == Tok::Comma {
                            self.advance();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RBracket)?;
                Term::Superposition(elements)
            }
            Tok::Tilde => Term::neg(self.atom()?),
            _ => unreachable!("checked above"),
        };
        self.depth -= 1;
        Ok(t)
    }

    fn element(&mut self) -> Result<Element, ParseError> {
        let term = self.term()?;
        if *self.peek() != Tok::Colon {
            return Ok(Element::single(term));
        }
        self.advance();
        match self.peek().clone() {
            Tok::Int(s) => {
                self.advance();
                let count = BigInt::from_str(s.trim_start_matches('+'))
                    .map_err(|e| self.error(format!("bad multiplicity {s}: {e}")))?;
                Ok(Element { term, count })
            }
            other => {
                Err(self.error(format!(
                    "expected multiplicity after ':', found {}",
                    other.describe()
                )))
            }
        }
    }
}

pub fn parse_term(source: &str) -> Result<Term, ParseError> {
    let toks = lex(source)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        depth: 0,
    };
    let t = parser.term()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.error(format!(
            "unexpected {} after complete term",
            parser.peek().describe()
        )));
    }
    Ok(t)
}

impl FromStr for Term {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_term(s)
    }
}
