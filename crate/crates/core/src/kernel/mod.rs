//! The trusted checker for N(μK) derivations.
//!
//! Contexts are finite sets of well-formed formulae, compared up to
//! α-equivalence. Two rules constrain the shape of a premise's context:
//! `[·]`-introduction needs a premise with no hypotheses at all, and the
//! induction premise of `μ`-elimination must have exactly the hypothesis
//! `φ[ψ/x]`. Substitution in `μ`-introduction and `μ`-elimination is eager
//! and capture-avoiding.
//!
//! Derivations mention no carrier of worlds. Sequents hold formulas only,
//! and the models live in `semantics`.

mod corpus;
mod raw;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::syntax::{subst, ActionId, Preformula, WellFormednessError, WfFormula};

pub use corpus::{derive_nu_unfold_test_corpus, CorpusEntry};
pub use raw::{check_raw, RawDerivation, RawRule};

/// A finite set of hypotheses, kept in insertion order for display.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Context(Vec<WfFormula>);

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, phi: &Preformula) -> bool {
        self.0.iter().any(|h| h.prp() == phi)
    }

    /// Adds `phi` unless an α-equivalent hypothesis is present.
    pub fn insert(&mut self, phi: WfFormula) -> bool {
        if self.contains(phi.prp()) {
            return false;
        }
        self.0.push(phi);
        true
    }

    pub fn with(&self, phi: WfFormula) -> Context {
        let mut c = self.clone();
        c.insert(phi);
        c
    }

    pub fn is_subset(&self, other: &Context) -> bool {
        self.0.iter().all(|h| other.contains(h.prp()))
    }

    pub fn iter(&self) -> std::slice::Iter<'_, WfFormula> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[WfFormula] {
        &self.0
    }
}

impl PartialEq for Context {
    fn eq(&self, other: &Self) -> bool {
        self.is_subset(other) && other.is_subset(self)
    }
}

impl Eq for Context {}

impl FromIterator<WfFormula> for Context {
    fn from_iter<I: IntoIterator<Item = WfFormula>>(iter: I) -> Self {
        let mut c = Context::new();
        for f in iter {
            c.insert(f);
        }
        c
    }
}

impl<'a> IntoIterator for &'a Context {
    type Item = &'a WfFormula;
    type IntoIter = std::slice::Iter<'a, WfFormula>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// `Γ ⊢ φ`
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sequent {
    pub hyps: Context,
    pub concl: WfFormula,
}

impl Sequent {
    pub fn new(hyps: impl IntoIterator<Item = WfFormula>, concl: WfFormula) -> Self {
        Sequent {
            hyps: hyps.into_iter().collect(),
            concl,
        }
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hyps: Vec<String> = self.hyps.iter().map(ToString::to_string).collect();
        if hyps.is_empty() {
            write!(f, "|- {}", self.concl)
        } else {
            write!(f, "{} |- {}", hyps.join(", "), self.concl)
        }
    }
}

/// A rule instance. Formula parameters fix what the conclusion alone does
/// not determine: the cut formula of `⊃`-E, `ff`-I and K, and the
/// `μ`-formula eliminated by `μ`-E.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Rule {
    Hyp,
    Raa,
    ImpI,
    ImpE(WfFormula),
    NotI,
    FfI(WfFormula),
    FfE,
    BoxI(ActionId),
    K(ActionId, WfFormula),
    MuI,
    MuE(WfFormula),
    Weaken,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Hyp => "Hyp",
            Rule::Raa => "Raa",
            Rule::ImpI => "ImpI",
            Rule::ImpE(_) => "ImpE",
            Rule::NotI => "NotI",
            Rule::FfI(_) => "FfI",
            Rule::FfE => "FfE",
            Rule::BoxI(_) => "BoxI",
            Rule::K(..) => "K",
            Rule::MuI => "MuI",
            Rule::MuE(_) => "MuE",
            Rule::Weaken => "Weaken",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Rule::Hyp => 0,
            Rule::ImpE(_) | Rule::FfI(_) | Rule::K(..) | Rule::MuE(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub rule: Rule,
    pub premises: Vec<Derivation>,
    pub concl: Sequent,
}

impl Derivation {
    pub fn new(rule: Rule, premises: Vec<Derivation>, concl: Sequent) -> Self {
        Derivation {
            rule,
            premises,
            concl,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    /// Rule names in pre-order.
    pub fn rules(&self) -> Vec<&'static str> {
        let mut out = vec![self.rule.name()];
        for p in &self.premises {
            out.extend(p.rules());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
pub enum Reason {
    #[error("expected {expected} premises, found {found}")]
    PremiseCount { expected: usize, found: usize },
    #[error("conclusion is not among the hypotheses")]
    NotInContext,
    #[error("conclusion must be {0}")]
    Shape(&'static str),
    #[error("rule parameter does not match: {0}")]
    Parameter(String),
    #[error("premise {premise} has the wrong hypotheses: {detail}")]
    ContextMismatch { premise: usize, detail: String },
    #[error("premise {premise} has the wrong conclusion: expected {expected}")]
    ConclusionMismatch { premise: usize, expected: String },
    #[error("premise of [.]-introduction must have no hypotheses")]
    NonEmptyContext,
    #[error("induction premise must have exactly the hypothesis {expected}")]
    WrongHypotheses { expected: String },
    #[error("premise is not the unfolding {expected}")]
    WrongUnfolding { expected: String },
    #[error("premise hypotheses are not a subset of the conclusion's")]
    NotSubset,
    #[error("{0}")]
    IllFormed(WellFormednessError),
}

impl Reason {
    /// Stable identifier of the reason, independent of its payload.
    pub fn kind(&self) -> &'static str {
        match self {
            Reason::PremiseCount { .. } => "PremiseCount",
            Reason::NotInContext => "NotInContext",
            Reason::Shape(_) => "Shape",
            Reason::Parameter(_) => "Parameter",
            Reason::ContextMismatch { .. } => "ContextMismatch",
            Reason::ConclusionMismatch { .. } => "ConclusionMismatch",
            Reason::NonEmptyContext => "NonEmptyContext",
            Reason::WrongHypotheses { .. } => "WrongHypotheses",
            Reason::WrongUnfolding { .. } => "WrongUnfolding",
            Reason::NotSubset => "NotSubset",
            Reason::IllFormed(_) => "IllFormed",
        }
    }
}

/// A rejected node: its path of premise indices from the root, its rule, and why.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[error("{rule} at {}: {reason}", fmt_path(.path))]
pub struct KernelError {
    pub path: Vec<usize>,
    pub rule: &'static str,
    pub reason: Reason,
}

fn fmt_path(path: &[usize]) -> String {
    if path.is_empty() {
        "root".into()
    } else {
        let parts: Vec<String> = path.iter().map(ToString::to_string).collect();
        format!("node {}", parts.join("."))
    }
}

#[derive(Clone, Copy, Default)]
struct Config {
    skip_box_i_context: bool,
}

/// Checks every node of `d`; returns its conclusion.
pub fn check(d: &Derivation) -> Result<Sequent, KernelError> {
    check_with(d, Config::default())
}

/// Kernel with the empty-context condition of `[·]`-introduction switched
/// off. Unsound on purpose; exists so the soundness harness can be shown to
/// detect a broken kernel.
#[cfg(feature = "negative-control")]
pub fn check_skipping_box_i_context(d: &Derivation) -> Result<Sequent, KernelError> {
    check_with(
        d,
        Config {
            skip_box_i_context: true,
        },
    )
}

fn check_with(d: &Derivation, cfg: Config) -> Result<Sequent, KernelError> {
    fn go(d: &Derivation, path: &mut Vec<usize>, cfg: Config) -> Result<(), KernelError> {
        check_node(d, cfg).map_err(|reason| KernelError {
            path: path.clone(),
            rule: d.rule.name(),
            reason,
        })?;
        for (i, p) in d.premises.iter().enumerate() {
            path.push(i);
            go(p, path, cfg)?;
            path.pop();
        }
        Ok(())
    }
    go(d, &mut Vec::new(), cfg)?;
    Ok(d.concl.clone())
}

fn same_context(premise: usize, got: &Context, want: &Context) -> Result<(), Reason> {
    if got == want {
        return Ok(());
    }
    let show = |c: &Context| {
        let v: Vec<String> = c.iter().map(ToString::to_string).collect();
        format!("{{{}}}", v.join(", "))
    };
    Err(Reason::ContextMismatch {
        premise,
        detail: format!("expected {}, found {}", show(want), show(got)),
    })
}

fn same_concl(premise: usize, got: &WfFormula, want: &Preformula) -> Result<(), Reason> {
    if got.prp() == want {
        Ok(())
    } else {
        Err(Reason::ConclusionMismatch {
            premise,
            expected: want.to_string(),
        })
    }
}

fn check_node(d: &Derivation, cfg: Config) -> Result<(), Reason> {
    if d.premises.len() != d.rule.arity() {
        return Err(Reason::PremiseCount {
            expected: d.rule.arity(),
            found: d.premises.len(),
        });
    }
    let gamma = &d.concl.hyps;
    let concl = d.concl.concl.prp();
    let prem = |i: usize| &d.premises[i].concl;

    match &d.rule {
        Rule::Hyp => {
            if !gamma.contains(concl) {
                return Err(Reason::NotInContext);
            }
        }
        Rule::Raa => {
            let neg = crate::syntax::mk_wf(Preformula::not(concl.clone())).map_err(Reason::IllFormed)?;
            same_context(0, &prem(0).hyps, &gamma.with(neg))?;
            same_concl(0, &prem(0).concl, &Preformula::Ff)?;
        }
        Rule::ImpI => {
            let Preformula::Imp(a, b) = concl else {
                return Err(Reason::Shape("an implication"));
            };
            let a = crate::syntax::mk_wf((**a).clone()).map_err(Reason::IllFormed)?;
            same_context(0, &prem(0).hyps, &gamma.with(a))?;
            same_concl(0, &prem(0).concl, b)?;
        }
        Rule::ImpE(cut) => {
            same_context(0, &prem(0).hyps, gamma)?;
            same_context(1, &prem(1).hyps, gamma)?;
            same_concl(0, &prem(0).concl, &Preformula::imp(cut.prp().clone(), concl.clone()))?;
            same_concl(1, &prem(1).concl, cut.prp())?;
        }
        Rule::NotI => {
            let Preformula::Not(a) = concl else {
                return Err(Reason::Shape("a negation"));
            };
            let a = crate::syntax::mk_wf((**a).clone()).map_err(Reason::IllFormed)?;
            same_context(0, &prem(0).hyps, &gamma.with(a))?;
            same_concl(0, &prem(0).concl, &Preformula::Ff)?;
        }
        Rule::FfI(cut) => {
            if !matches!(concl, Preformula::Ff) {
                return Err(Reason::Shape("ff"));
            }
            same_context(0, &prem(0).hyps, gamma)?;
            same_context(1, &prem(1).hyps, gamma)?;
            same_concl(0, &prem(0).concl, cut.prp())?;
            same_concl(1, &prem(1).concl, &Preformula::not(cut.prp().clone()))?;
        }
        Rule::FfE => {
            same_context(0, &prem(0).hyps, gamma)?;
            same_concl(0, &prem(0).concl, &Preformula::Ff)?;
        }
        Rule::BoxI(a) => {
            let Preformula::Box(b, body) = concl else {
                return Err(Reason::Shape("a box formula"));
            };
            if a != b {
                return Err(Reason::Parameter(format!("action `{a}` but conclusion boxes `{b}`")));
            }
            if !cfg.skip_box_i_context && !prem(0).hyps.is_empty() {
                return Err(Reason::NonEmptyContext);
            }
            same_concl(0, &prem(0).concl, body)?;
        }
        Rule::K(a, cut) => {
            let Preformula::Box(b, psi) = concl else {
                return Err(Reason::Shape("a box formula"));
            };
            if a != b {
                return Err(Reason::Parameter(format!("action `{a}` but conclusion boxes `{b}`")));
            }
            same_context(0, &prem(0).hyps, gamma)?;
            same_context(1, &prem(1).hyps, gamma)?;
            let major = Preformula::boxed(a.clone(), Preformula::imp(cut.prp().clone(), (**psi).clone()));
            same_concl(0, &prem(0).concl, &major)?;
            same_concl(1, &prem(1).concl, &Preformula::boxed(a.clone(), cut.prp().clone()))?;
        }
        Rule::MuI => {
            let Preformula::Mu(x, body) = concl else {
                return Err(Reason::Shape("a mu formula"));
            };
            same_context(0, &prem(0).hyps, gamma)?;
            let unfolding = subst(body, x, concl);
            if prem(0).concl.prp() != &unfolding {
                return Err(Reason::WrongUnfolding {
                    expected: unfolding.to_string(),
                });
            }
        }
        Rule::MuE(mu) => {
            let Preformula::Mu(x, body) = mu.prp() else {
                return Err(Reason::Parameter(format!("{mu} is not a mu formula")));
            };
            same_context(0, &prem(0).hyps, gamma)?;
            same_concl(0, &prem(0).concl, mu.prp())?;
            let step = subst(body, x, concl);
            let step_hyp = crate::syntax::mk_wf(step.clone()).map_err(Reason::IllFormed)?;
            let want: Context = std::iter::once(step_hyp).collect();
            if prem(1).hyps != want {
                return Err(Reason::WrongHypotheses {
                    expected: step.to_string(),
                });
            }
            same_concl(1, &prem(1).concl, concl)?;
        }
        Rule::Weaken => {
            if !prem(0).hyps.is_subset(gamma) {
                return Err(Reason::NotSubset);
            }
            same_concl(0, &prem(0).concl, concl)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests;
