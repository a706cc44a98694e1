//! Loading lemmas from proof scripts (`.mu`) and derivation files (`.json`).
//!
//! A derivation file holds one object or a list of objects:
//!
//! ```json
//! { "lemma": "box_taut",
//!   "vars": [],
//!   "derivation": {
//!     "rule": "BoxI", "action": "a", "hyps": [], "concl": "[a] (p -> p)",
//!     "premises": [ { "rule": "ImpI", "concl": "p -> p",
//!                     "premises": [ { "rule": "Hyp", "hyps": ["p"], "concl": "p" } ] } ] } }
//! ```
//!
//! Rules taking a formula parameter (`ImpE`, `FfI`, `K`, `MuE`) read it from
//! `formula`; `BoxI` and `K` read their action from `action`.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use muwb_core::kernel::{Derivation, KernelError, RawDerivation, RawRule, Sequent};
use muwb_core::parser::{parse_formula_with, parse_scripts, ParseError, ProofScript, Span};
use muwb_core::session::{replay, ReplayCause, SessionError};
use muwb_core::syntax::{Preformula, Var};
use serde::Deserialize;

#[derive(Clone, Debug)]
pub struct InputError {
    pub path: PathBuf,
    pub span: Option<Span>,
    pub message: String,
}

impl InputError {
    fn new(path: &Path, message: impl Into<String>) -> Self {
        InputError {
            path: path.to_owned(),
            span: None,
            message: message.into(),
        }
    }

    pub fn parse(path: &Path, e: &ParseError) -> Self {
        InputError {
            path: path.to_owned(),
            span: Some(e.span),
            message: format!("expected {}, found {}", e.expected.join(" or "), e.found),
        }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.span {
            Some(s) => write!(f, "{}:{}:{}: {}", self.path.display(), s.line, s.column, self.message),
            None => write!(f, "{}: {}", self.path.display(), self.message),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Source {
    Script(ProofScript),
    Derivation(RawDerivation),
}

#[derive(Clone, Debug)]
pub struct Lemma {
    pub name: String,
    pub file: PathBuf,
    pub source: Source,
}

/// Reads one file, or every `.mu` and `.json` file of a directory in name order.
pub fn load(path: &Path) -> Result<Vec<Lemma>, InputError> {
    let meta = std::fs::metadata(path).map_err(|e| InputError::new(path, e.to_string()))?;
    if !meta.is_dir() {
        return load_file(path);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(|e| InputError::new(path, e.to_string()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("mu" | "json")))
        .collect();
    files.sort();
    let mut out = Vec::new();
    for f in files {
        out.extend(load_file(&f)?);
    }
    Ok(out)
}

pub fn load_file(path: &Path) -> Result<Vec<Lemma>, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError::new(path, e.to_string()))?;
    if path.extension().and_then(|e| e.to_str()) == Some("json") {
        return parse_derivations(path, &text);
    }
    let scripts = parse_scripts(&text).map_err(|e| InputError::parse(path, &e))?;
    Ok(scripts
        .into_iter()
        .map(|s| Lemma {
            name: s.name.clone(),
            file: path.to_owned(),
            source: Source::Script(s),
        })
        .collect())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DerivationFile {
    One(NamedDerivation),
    Many(Vec<NamedDerivation>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NamedDerivation {
    lemma: String,
    #[serde(default)]
    vars: Vec<String>,
    derivation: TextNode,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TextNode {
    rule: String,
    #[serde(default)]
    action: Option<String>,
    #[serde(default)]
    formula: Option<String>,
    #[serde(default)]
    hyps: Vec<String>,
    concl: String,
    #[serde(default)]
    premises: Vec<TextNode>,
}

pub fn parse_derivations(path: &Path, text: &str) -> Result<Vec<Lemma>, InputError> {
    let file: DerivationFile = serde_json::from_str(text).map_err(|e| InputError {
        path: path.to_owned(),
        span: Some(Span {
            start: 0,
            end: 0,
            line: e.line(),
            column: e.column(),
        }),
        message: format!("not a derivation file: {e}"),
    })?;
    let named = match file {
        DerivationFile::One(n) => vec![n],
        DerivationFile::Many(v) => v,
    };
    named
        .into_iter()
        .map(|n| {
            let vars: BTreeSet<Var> = n.vars.iter().map(|v| Var::from(v.as_str())).collect();
            let raw = to_raw(&n.derivation, &vars, &mut Vec::new())
                .map_err(|m| InputError::new(path, format!("lemma `{}`: {m}", n.lemma)))?;
            Ok(Lemma {
                name: n.lemma,
                file: path.to_owned(),
                source: Source::Derivation(raw),
            })
        })
        .collect()
}

fn fmt_node(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_owned()
    } else {
        let parts: Vec<String> = path.iter().map(ToString::to_string).collect();
        format!("node {}", parts.join("."))
    }
}

fn to_raw(node: &TextNode, vars: &BTreeSet<Var>, path: &mut Vec<usize>) -> Result<RawDerivation, String> {
    let formula = |text: &str| -> Result<Preformula, String> {
        parse_formula_with(text, vars).map_err(|e| format!("{}: formula {text:?}: {e}", fmt_node(path)))
    };
    let param = || -> Result<Preformula, String> {
        let text = node
            .formula
            .as_deref()
            .ok_or_else(|| format!("{}: rule {} needs a `formula`", fmt_node(path), node.rule))?;
        formula(text)
    };
    let action = || -> Result<String, String> {
        node.action
            .clone()
            .ok_or_else(|| format!("{}: rule {} needs an `action`", fmt_node(path), node.rule))
    };
    let rule = match node.rule.as_str() {
        "Hyp" => RawRule::Hyp,
        "Raa" => RawRule::Raa,
        "ImpI" => RawRule::ImpI,
        "ImpE" => RawRule::ImpE(param()?),
        "NotI" => RawRule::NotI,
        "FfI" => RawRule::FfI(param()?),
        "FfE" => RawRule::FfE,
        "BoxI" => RawRule::BoxI(action()?.into()),
        "K" => RawRule::K(action()?.into(), param()?),
        "MuI" => RawRule::MuI,
        "MuE" => RawRule::MuE(param()?),
        "Weaken" => RawRule::Weaken,
        other => return Err(format!("{}: unknown rule `{other}`", fmt_node(path))),
    };
    let hyps = node.hyps.iter().map(|h| formula(h)).collect::<Result<Vec<_>, _>>()?;
    let concl = formula(&node.concl)?;
    let mut premises = Vec::with_capacity(node.premises.len());
    for (i, p) in node.premises.iter().enumerate() {
        path.push(i);
        premises.push(to_raw(p, vars, path)?);
        path.pop();
    }
    Ok(RawDerivation {
        rule,
        premises,
        hyps,
        concl,
    })
}

pub type Checker = fn(&Derivation) -> Result<Sequent, KernelError>;

#[derive(Clone, Debug)]
pub struct Proved {
    pub sequent: Sequent,
    /// Tactic steps for scripts, tree nodes for derivations.
    pub steps: usize,
    pub unit: &'static str,
}

#[derive(Clone, Debug)]
pub struct Failure {
    /// Where the failure happened, e.g. `step 2` or `node 0.1`.
    pub location: String,
    pub kind: &'static str,
    pub message: String,
}

fn session_kind(e: &SessionError) -> &'static str {
    match e {
        SessionError::OpenGoalsRemain(_) => "OpenGoalsRemain",
        SessionError::Consumed => "Consumed",
        SessionError::Kernel(k) => k.reason.kind(),
        SessionError::ClaimMismatch { .. } => "ClaimMismatch",
    }
}

fn kernel_failure(e: &KernelError) -> Failure {
    Failure {
        location: fmt_node(&e.path),
        kind: e.reason.kind(),
        message: format!("{}: {}", e.rule, e.reason),
    }
}

/// Replays a script or checks a derivation with `checker`.
pub fn prove(lemma: &Lemma, checker: Checker) -> Result<Proved, Failure> {
    match &lemma.source {
        Source::Script(script) => {
            let d = replay(script).map_err(|e| Failure {
                location: if e.step == 0 {
                    "claim".to_owned()
                } else if e.step > script.steps.len() {
                    "qed".to_owned()
                } else {
                    format!("step {}", e.step)
                },
                kind: match &e.cause {
                    ReplayCause::Claim(_) => "IllFormed",
                    ReplayCause::Tactic(t) => t.kind(),
                    ReplayCause::Qed(s) => session_kind(s),
                },
                message: e.cause.to_string(),
            })?;
            Ok(Proved {
                sequent: d.concl,
                steps: script.steps.len(),
                unit: "steps",
            })
        }
        Source::Derivation(raw) => {
            let d = raw.to_derivation().map_err(|e| kernel_failure(&e))?;
            let sequent = checker(&d).map_err(|e| kernel_failure(&e))?;
            Ok(Proved {
                sequent,
                steps: d.size(),
                unit: "nodes",
            })
        }
    }
}
