//! Concrete syntax.
//!
//! Formulas use an ASCII grammar (see `docs/grammar.md`):
//!
//! ```text
//! formula ::= disj [ "->" formula ]
//! disj    ::= conj { "|" conj }
//! conj    ::= unary { "&" unary }
//! unary   ::= "~" unary | "[" ident "]" unary | "<" ident ">" unary
//!           | ("mu" | "nu") ident "." formula
//!           | "ff" | "tt" | ident | "(" formula ")"
//! ```
//!
//! `nu`, `tt`, `&`, `|` and `<a>` are expanded to core constructors while
//! parsing. An identifier is a variable when it is bound by an enclosing
//! binder or declared by the caller, and an atomic proposition otherwise.

mod lexer;
mod model;
mod printer;
mod script;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::syntax::{nu, ActionId, AtomId, Preformula, Var};
use lexer::Tok;

pub use model::{parse_model, ModelError};
pub use printer::print_formula;
pub use script::{parse_script, parse_scripts, print_script, ProofScript, ScriptStep};

/// A region of source text. Offsets are 0-based bytes, line and column 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl Span {
    pub fn locate(src: &str, start: usize, end: usize) -> Self {
        let start = start.min(src.len());
        let end = end.clamp(start, src.len());
        let before = &src[..start];
        let line = before.matches('\n').count() + 1;
        let line_start = before.rfind('\n').map_or(0, |i| i + 1);
        let column = src[line_start..start].chars().count() + 1;
        Span {
            start,
            end,
            line,
            column,
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[error("{span}: expected {}, found {found}", .expected.join(" or "))]
pub struct ParseError {
    pub span: Span,
    pub expected: Vec<String>,
    pub found: String,
}

impl ParseError {
    pub(crate) fn new(src: &str, start: usize, end: usize, expected: &str, found: &str) -> Self {
        ParseError {
            span: Span::locate(src, start, end),
            expected: vec![expected.to_owned()],
            found: found.to_owned(),
        }
    }

    pub(crate) fn expecting(src: &str, start: usize, end: usize, expected: &[&str], found: &str) -> Self {
        ParseError {
            span: Span::locate(src, start, end),
            expected: expected.iter().map(|s| (*s).to_owned()).collect(),
            found: found.to_owned(),
        }
    }
}

/// Parses a closed-over-atoms formula: every unbound identifier is an atom.
pub fn parse_formula(text: &str) -> Result<Preformula, ParseError> {
    parse_formula_with(text, &BTreeSet::new())
}

/// Parses a formula in which the identifiers in `vars` denote variables.
pub fn parse_formula_with(text: &str, vars: &BTreeSet<Var>) -> Result<Preformula, ParseError> {
    parse_formula_in(text, 0, text.len(), vars)
}

/// Parses the formula occupying `src[start..end]`, reporting spans relative to `src`.
pub(crate) fn parse_formula_in(
    src: &str,
    start: usize,
    end: usize,
    vars: &BTreeSet<Var>,
) -> Result<Preformula, ParseError> {
    let toks = lexer::lex(src, start, end)?;
    let mut p = FormulaParser {
        src,
        toks,
        pos: 0,
        declared: vars,
        bound: Vec::new(),
    };
    let phi = p.formula()?;
    p.expect_eof()?;
    Ok(phi)
}

struct FormulaParser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    declared: &'a BTreeSet<Var>,
    bound: Vec<Var>,
}

impl FormulaParser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> (Tok, usize, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let (tok, s, e) = &self.toks[self.pos];
        ParseError::expecting(self.src, *s, *e, expected, &tok.describe())
    }

    fn expect(&mut self, want: Tok, label: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[label]))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            _ => Err(self.error(&["`->`", "`&`", "`|`", "end of input"])),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(name)
            }
            _ => Err(self.error(&[what])),
        }
    }

    fn formula(&mut self) -> Result<Preformula, ParseError> {
        let lhs = self.disj()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Preformula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Preformula, ParseError> {
        let mut acc = self.conj()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conj()?;
            acc = Preformula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn conj(&mut self) -> Result<Preformula, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            acc = Preformula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Preformula, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Preformula::not(self.unary()?))
            }
            Tok::LBrack => {
                self.bump();
                let a = self.ident("an action label")?;
                self.expect(Tok::RBrack, "`]`")?;
                Ok(Preformula::boxed(ActionId::from(a), self.unary()?))
            }
            Tok::LAngle => {
                self.bump();
                let a = self.ident("an action label")?;
                self.expect(Tok::RAngle, "`>`")?;
                Ok(Preformula::diamond(ActionId::from(a), self.unary()?))
            }
            Tok::Mu | Tok::Nu => {
                let (kind, _, _) = self.bump();
                let x = Var::from(self.ident("a bound variable")?);
                self.expect(Tok::Dot, "`.`")?;
                self.bound.push(x.clone());
                let body = self.formula();
                self.bound.pop();
                let body = body?;
                Ok(match kind {
                    Tok::Mu => Preformula::Mu(x, Box::new(body)),
                    _ => nu(&x, &body),
                })
            }
            Tok::Ff => {
                self.bump();
                Ok(Preformula::Ff)
            }
            Tok::Tt => {
                self.bump();
                Ok(Preformula::tt())
            }
            Tok::Ident(name) => {
                self.bump();
                let as_var = Var::from(name.as_str());
                if self.bound.contains(&as_var) || self.declared.contains(&as_var) {
                    Ok(Preformula::Var(as_var))
                } else {
                    Ok(Preformula::Atom(AtomId::from(name)))
                }
            }
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.error(&["a formula"])),
        }
    }
}

impl fmt::Display for Preformula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

/// Splits `Γ |- φ` text into hypotheses and conclusion (spans relative to `src`).
pub(crate) fn parse_sequent_in(
    src: &str,
    start: usize,
    end: usize,
    vars: &BTreeSet<Var>,
) -> Result<(Vec<Preformula>, Preformula), ParseError> {
    let text = &src[start..end];
    let (hyp_part, concl_start) = match find_turnstile(text) {
        Some((i, len)) => (Some((start, start + i)), start + i + len),
        None => (None, start),
    };
    let mut hyps = Vec::new();
    if let Some((hs, he)) = hyp_part {
        if !src[hs..he].trim().is_empty() {
            for (s, e) in split_commas(src, hs, he) {
                hyps.push(parse_formula_in(src, s, e, vars)?);
            }
        }
    }
    let concl = parse_formula_in(src, concl_start, end, vars)?;
    Ok((hyps, concl))
}

/// Parses `Γ |- φ` (or a bare `φ`, meaning `|- φ`).
pub fn parse_sequent(
    text: &str,
    vars: &BTreeSet<Var>,
) -> Result<(Vec<Preformula>, Preformula), ParseError> {
    parse_sequent_in(text, 0, text.len(), vars)
}

/// Comma-separated formula list, e.g. the argument of `weaken`.
pub(crate) fn parse_formula_list_in(
    src: &str,
    start: usize,
    end: usize,
    vars: &BTreeSet<Var>,
) -> Result<Vec<Preformula>, ParseError> {
    if src[start..end].trim().is_empty() {
        return Ok(Vec::new());
    }
    split_commas(src, start, end)
        .into_iter()
        .map(|(s, e)| parse_formula_in(src, s, e, vars))
        .collect()
}

fn find_turnstile(text: &str) -> Option<(usize, usize)> {
    text.find("|-")
        .map(|i| (i, 2))
        .or_else(|| text.find('⊢').map(|i| (i, '⊢'.len_utf8())))
}

fn split_commas(src: &str, start: usize, end: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut from = start;
    for (i, c) in src[start..end].char_indices() {
        if c == ',' {
            out.push((from, start + i));
            from = start + i + 1;
        }
    }
    out.push((from, end));
    out
}
