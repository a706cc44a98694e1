//! Proof scripts.
//!
//! ```text
//! # comment
//! lemma simple : |- (A -> mu x . A -> x) -> mu x . A -> x
//!   intro
//!   mu_I
//!   assumption
//! qed
//! ```
//!
//! A header may declare variables, `lemma name vars x y : x |- x`. One tactic
//! per line; `qed` closes the lemma (and is implied at end of input). A
//! file may hold several lemmas.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{parse_sequent_in, print_formula, ParseError, Span};
use crate::session::{parse_tactic_in, Tactic};
use crate::syntax::{Preformula, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScriptStep {
    pub tactic: Tactic<Preformula>,
    /// Location in the source, absent for generated scripts.
    pub span: Option<Span>,
}

/// A named claim and the tactics proving it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofScript {
    pub name: String,
    pub vars: Vec<Var>,
    pub hyps: Vec<Preformula>,
    pub concl: Preformula,
    pub steps: Vec<ScriptStep>,
}

impl ProofScript {
    pub fn new(
        name: String,
        vars: Vec<Var>,
        hyps: Vec<Preformula>,
        concl: Preformula,
        tactics: Vec<Tactic<Preformula>>,
    ) -> Self {
        ProofScript {
            name,
            vars,
            hyps,
            concl,
            steps: tactics
                .into_iter()
                .map(|tactic| ScriptStep { tactic, span: None })
                .collect(),
        }
    }

    pub fn tactics(&self) -> impl Iterator<Item = &Tactic<Preformula>> {
        self.steps.iter().map(|s| &s.tactic)
    }
}

/// Parses a file holding exactly one lemma.
pub fn parse_script(text: &str) -> Result<ProofScript, ParseError> {
    let mut all = parse_scripts(text)?;
    match all.len() {
        1 => Ok(all.remove(0)),
        0 => Err(ParseError::new(text, text.len(), text.len(), "`lemma`", "end of input")),
        _ => {
            let second = line_offsets(text)
                .into_iter()
                .filter(|&(s, e)| strip_comment(&text[s..e]).trim_start().starts_with("lemma"))
                .nth(1)
                .unwrap_or((0, 0));
            Err(ParseError::new(text, second.0, second.1, "end of input", "a second lemma"))
        }
    }
}

fn line_offsets(text: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for line in text.split_inclusive('\n') {
        let content = line.trim_end_matches(['\n', '\r']);
        out.push((start, start + content.len()));
        start += line.len();
    }
    out
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses every lemma in a file.
pub fn parse_scripts(text: &str) -> Result<Vec<ProofScript>, ParseError> {
    let mut out: Vec<ProofScript> = Vec::new();
    let mut open = false;
    for (start, end) in line_offsets(text) {
        let end = start + strip_comment(&text[start..end]).trim_end().len();
        let line = &text[start..end];
        let lead = line.len() - line.trim_start().len();
        let body_start = start + lead;
        if body_start >= end {
            continue;
        }
        let first_word_len = text[body_start..end]
            .find(char::is_whitespace)
            .unwrap_or(end - body_start);
        let first_word = &text[body_start..body_start + first_word_len];

        if first_word == "lemma" {
            out.push(parse_header(text, body_start + first_word_len, end)?);
            open = true;
            continue;
        }
        if !open {
            return Err(ParseError::new(
                text,
                body_start,
                body_start + first_word_len,
                "`lemma`",
                &format!("`{first_word}`"),
            ));
        }
        let current = out.last_mut().expect("open lemma");
        let vars: BTreeSet<Var> = current.vars.iter().cloned().collect();
        let tactic = parse_tactic_in(text, body_start, end, &vars)?;
        if tactic == Tactic::Qed {
            open = false;
            continue;
        }
        current.steps.push(ScriptStep {
            tactic,
            span: Some(Span::locate(text, body_start, end)),
        });
    }
    Ok(out)
}

fn parse_header(text: &str, start: usize, end: usize) -> Result<ProofScript, ParseError> {
    let Some(colon) = text[start..end].find(':').map(|i| start + i) else {
        return Err(ParseError::new(text, end, end, "`:`", "end of line"));
    };
    let mut words = text[start..colon].split_whitespace();
    let name = match words.next() {
        Some(n) if n.starts_with(super::lexer::is_ident_start) && n.chars().all(super::lexer::is_ident_char) => {
            n.to_owned()
        }
        Some(n) => {
            let at = start + text[start..colon].find(n).unwrap_or(0);
            return Err(ParseError::new(text, at, at + n.len(), "a lemma name", &format!("`{n}`")));
        }
        None => return Err(ParseError::new(text, colon, colon + 1, "a lemma name", "`:`")),
    };
    let mut vars = Vec::new();
    match words.next() {
        None => {}
        Some("vars") => {
            for w in words {
                vars.push(Var::from(w));
            }
        }
        Some(w) => {
            let at = start + text[start..colon].find(w).unwrap_or(0);
            return Err(ParseError::expecting(text, at, at + w.len(), &["`vars`", "`:`"], &format!("`{w}`")));
        }
    }
    let declared: BTreeSet<Var> = vars.iter().cloned().collect();
    let (hyps, concl) = parse_sequent_in(text, colon + 1, end, &declared)?;
    Ok(ProofScript {
        name,
        vars,
        hyps,
        concl,
        steps: Vec::new(),
    })
}

/// Canonical script text; `parse_script` reads it back unchanged.
pub fn print_script(script: &ProofScript) -> String {
    let mut out = String::new();
    let _ = write!(out, "lemma {}", script.name);
    if !script.vars.is_empty() {
        out.push_str(" vars");
        for v in &script.vars {
            let _ = write!(out, " {v}");
        }
    }
    let hyps: Vec<String> = script.hyps.iter().map(print_formula).collect();
    if hyps.is_empty() {
        let _ = writeln!(out, " : |- {}", print_formula(&script.concl));
    } else {
        let _ = writeln!(out, " : {} |- {}", hyps.join(", "), print_formula(&script.concl));
    }
    for t in script.tactics() {
        let _ = writeln!(out, "  {t}");
    }
    out.push_str("qed\n");
    out
}
