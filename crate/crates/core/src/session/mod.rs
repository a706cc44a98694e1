//! Goal-directed proof construction on top of the kernel.
//!
//! A session holds a partial derivation whose leaves are either closed by
//! `Hyp` or are open goals. Tactics replace the focused (first) goal by the
//! premises of one rule instance. Every completed proof is re-checked by
//! the kernel in [`GoalState::qed`].

pub mod protocol;
mod tactic;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::kernel::{check, Context, Derivation, KernelError, Rule, Sequent};
use crate::parser::ProofScript;
use crate::syntax::{mk_wf, subst, Preformula, Var, WellFormednessError, WfFormula};

pub use tactic::{parse_tactic, Tactic, TACTIC_NAMES};
pub(crate) use tactic::parse_tactic_in;

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
pub enum TacticError {
    #[error("no open goals")]
    NoGoals,
    #[error("{tactic} does not apply: the goal must be {expected}")]
    Shape {
        tactic: &'static str,
        expected: &'static str,
    },
    #[error("the goal is not among the hypotheses")]
    NotInContext,
    #[error("{0}")]
    Parameter(String),
    #[error("ill-formed formula: {0}")]
    IllFormed(WellFormednessError),
    #[error("nothing to undo")]
    EmptyHistory,
    #[error("use qed to finish the proof")]
    QedAsTactic,
}

impl TacticError {
    pub fn kind(&self) -> &'static str {
        match self {
            TacticError::NoGoals => "NoGoals",
            TacticError::Shape { .. } => "Shape",
            TacticError::NotInContext => "NotInContext",
            TacticError::Parameter(_) => "Parameter",
            TacticError::IllFormed(_) => "IllFormed",
            TacticError::EmptyHistory => "EmptyHistory",
            TacticError::QedAsTactic => "QedAsTactic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
pub enum SessionError {
    #[error("{0} open goal(s) remain")]
    OpenGoalsRemain(usize),
    #[error("the session has already been closed by qed")]
    Consumed,
    #[error("internal error, kernel rejected the extracted proof: {0}")]
    Kernel(KernelError),
    #[error("internal error, the proof concludes {got} instead of the claim")]
    ClaimMismatch { got: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Node {
    sequent: Sequent,
    rule: Option<Rule>,
    children: Vec<usize>,
}

/// The proof tree under construction and its open leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Partial {
    nodes: Vec<Node>,
    /// Open leaves, focused goal first.
    goals: Vec<usize>,
}

impl Partial {
    fn new(claim: Sequent) -> Self {
        Partial {
            nodes: vec![Node {
                sequent: claim,
                rule: None,
                children: vec![],
            }],
            goals: vec![0],
        }
    }

    fn extract(&self, at: usize) -> Option<Derivation> {
        let node = &self.nodes[at];
        let rule = node.rule.clone()?;
        let premises = node
            .children
            .iter()
            .map(|&c| self.extract(c))
            .collect::<Option<Vec<_>>>()?;
        Some(Derivation::new(rule, premises, node.sequent.clone()))
    }
}

/// An interactive proof of one claimed sequent.
#[derive(Clone, Debug)]
pub struct GoalState {
    lemma: String,
    vars: BTreeSet<Var>,
    claim: Sequent,
    partial: Partial,
    history: Vec<(Partial, Tactic)>,
    consumed: bool,
}

impl PartialEq for GoalState {
    /// Equal proof states; the undo history is not compared.
    fn eq(&self, other: &Self) -> bool {
        self.lemma == other.lemma
            && self.claim == other.claim
            && self.partial == other.partial
            && self.consumed == other.consumed
    }
}

/// Opens a session with the single goal `claim`.
pub fn new_session(lemma: impl Into<String>, claim: Sequent) -> GoalState {
    GoalState::new(lemma, claim, BTreeSet::new())
}

impl GoalState {
    /// `vars` lists identifiers that tactic arguments should read as variables.
    pub fn new(lemma: impl Into<String>, claim: Sequent, vars: BTreeSet<Var>) -> Self {
        GoalState {
            lemma: lemma.into(),
            vars,
            partial: Partial::new(claim.clone()),
            claim,
            history: Vec::new(),
            consumed: false,
        }
    }

    /// Builds a session from preformula text pieces, gating them through `mk_wf`.
    pub fn from_preformulas(
        lemma: impl Into<String>,
        hyps: &[Preformula],
        concl: &Preformula,
        vars: BTreeSet<Var>,
    ) -> Result<Self, WellFormednessError> {
        let hyps = hyps
            .iter()
            .map(|h| mk_wf(h.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        let concl = mk_wf(concl.clone())?;
        Ok(Self::new(lemma, Sequent::new(hyps, concl), vars))
    }

    pub fn lemma(&self) -> &str {
        &self.lemma
    }

    pub fn claim(&self) -> &Sequent {
        &self.claim
    }

    pub fn vars(&self) -> &BTreeSet<Var> {
        &self.vars
    }

    /// Open goals, focused first.
    pub fn goals(&self) -> Vec<&Sequent> {
        self.partial
            .goals
            .iter()
            .map(|&i| &self.partial.nodes[i].sequent)
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.partial.goals.is_empty()
    }

    pub fn can_undo(&self) -> bool {
        !self.history.is_empty()
    }

    pub fn is_consumed(&self) -> bool {
        self.consumed
    }

    /// Tactics applied so far and not undone, in order.
    pub fn applied(&self) -> impl Iterator<Item = &Tactic> {
        self.history.iter().map(|(_, t)| t)
    }

    /// Applies `t` to the focused goal. On error the state is unchanged.
    pub fn apply_tactic(&mut self, t: Tactic) -> Result<(), TacticError> {
        match t {
            Tactic::Undo => {
                let (prev, _) = self.history.pop().ok_or(TacticError::EmptyHistory)?;
                self.partial = prev;
                return Ok(());
            }
            Tactic::Qed => return Err(TacticError::QedAsTactic),
            _ => {}
        }
        let &focus = self.partial.goals.first().ok_or(TacticError::NoGoals)?;
        let goal = &self.partial.nodes[focus].sequent;
        let (rule, premises) = expand(goal, &t)?;

        let mut next = self.partial.clone();
        let first_child = next.nodes.len();
        let children: Vec<usize> = (first_child..first_child + premises.len()).collect();
        for sequent in premises {
            next.nodes.push(Node {
                sequent,
                rule: None,
                children: vec![],
            });
        }
        next.nodes[focus].rule = Some(rule);
        next.nodes[focus].children = children.clone();
        next.goals.splice(0..1, children);

        let prev = std::mem::replace(&mut self.partial, next);
        self.history.push((prev, t));
        Ok(())
    }

    /// Extracts the finished derivation and re-checks it with the kernel.
    pub fn qed(&mut self) -> Result<Derivation, SessionError> {
        if self.consumed {
            return Err(SessionError::Consumed);
        }
        if !self.is_complete() {
            return Err(SessionError::OpenGoalsRemain(self.partial.goals.len()));
        }
        let d = self
            .partial
            .extract(0)
            .expect("no open goals means every node has a rule");
        let proved = check(&d).map_err(SessionError::Kernel)?;
        if proved != self.claim {
            return Err(SessionError::ClaimMismatch {
                got: proved.to_string(),
            });
        }
        self.consumed = true;
        Ok(d)
    }

    /// Tactics whose goal-shape precondition holds for the focused goal.
    /// Tactics taking a formula argument are listed when the goal shape
    /// admits some argument.
    pub fn applicable(&self) -> Vec<Tactic<()>> {
        let mut out = Vec::new();
        if let Some(goal) = self.goals().first() {
            let c = goal.concl.prp();
            if goal.hyps.contains(c) {
                out.push(Tactic::Assumption);
            }
            match c {
                Preformula::Imp(..) => out.push(Tactic::Intro),
                Preformula::Not(_) => out.push(Tactic::NotI),
                Preformula::Box(..) => {
                    out.push(Tactic::BoxI);
                    out.push(Tactic::KRule(()));
                }
                Preformula::Mu(..) => out.push(Tactic::MuI),
                Preformula::Ff => out.push(Tactic::FfI(())),
                _ => {}
            }
            out.push(Tactic::Raa);
            out.push(Tactic::FfE);
            out.push(Tactic::ImpE(()));
            out.push(Tactic::MuE(()));
            out.push(Tactic::Weaken(vec![]));
        }
        if self.can_undo() {
            out.push(Tactic::Undo);
        }
        if self.is_complete() && !self.consumed {
            out.push(Tactic::Qed);
        }
        out
    }

    /// Goal display: hypotheses labelled `H, H0, H1, …` above the rule,
    /// the conclusion below.
    pub fn display(&self) -> String {
        let goals = self.goals();
        if goals.is_empty() {
            return "Subtree proved!\n".to_owned();
        }
        let mut out = String::new();
        let n = goals.len();
        let _ = writeln!(out, "{n} subgoal{}", if n == 1 { "" } else { "s" });
        for (label, h) in hypothesis_labels(goals[0]) {
            let _ = writeln!(out, "  {label} : {h}");
        }
        out.push_str("  ============================\n");
        let _ = writeln!(out, "   {}", goals[0].concl);
        for (i, g) in goals.iter().enumerate().skip(1) {
            let _ = writeln!(out, "subgoal {} is:", i + 1);
            let _ = writeln!(out, "   {}", g.concl);
        }
        out
    }

    /// The applied tactics as a script that replays to this state.
    pub fn to_script(&self) -> ProofScript {
        ProofScript::new(
            self.lemma.clone(),
            self.vars.iter().cloned().collect(),
            self.claim.hyps.iter().map(|h| h.prp().clone()).collect(),
            self.claim.concl.prp().clone(),
            self.applied().cloned().map(Tactic::<Preformula>::from).collect(),
        )
    }
}

/// `H, H0, H1, …` in context order.
pub fn hypothesis_labels(goal: &Sequent) -> Vec<(String, &WfFormula)> {
    goal.hyps
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let label = if i == 0 {
                "H".to_owned()
            } else {
                format!("H{}", i - 1)
            };
            (label, h)
        })
        .collect()
}

fn wf(phi: Preformula) -> Result<WfFormula, TacticError> {
    mk_wf(phi).map_err(TacticError::IllFormed)
}

/// The rule instance concluding `goal` that `t` selects, and its premises.
fn expand(goal: &Sequent, t: &Tactic) -> Result<(Rule, Vec<Sequent>), TacticError> {
    let gamma = &goal.hyps;
    let concl = goal.concl.prp();
    let same = |c: WfFormula| Sequent {
        hyps: gamma.clone(),
        concl: c,
    };
    let shape = |tactic: &'static str, expected: &'static str| TacticError::Shape { tactic, expected };

    Ok(match t {
        Tactic::Assumption => {
            if !gamma.contains(concl) {
                return Err(TacticError::NotInContext);
            }
            (Rule::Hyp, vec![])
        }
        Tactic::Intro => {
            let Preformula::Imp(a, b) = concl else {
                return Err(shape("intro", "an implication"));
            };
            let prem = Sequent {
                hyps: gamma.with(wf((**a).clone())?),
                concl: wf((**b).clone())?,
            };
            (Rule::ImpI, vec![prem])
        }
        Tactic::Raa => {
            let prem = Sequent {
                hyps: gamma.with(wf(Preformula::not(concl.clone()))?),
                concl: wf(Preformula::Ff)?,
            };
            (Rule::Raa, vec![prem])
        }
        Tactic::NotI => {
            let Preformula::Not(a) = concl else {
                return Err(shape("not_I", "a negation"));
            };
            let prem = Sequent {
                hyps: gamma.with(wf((**a).clone())?),
                concl: wf(Preformula::Ff)?,
            };
            (Rule::NotI, vec![prem])
        }
        Tactic::FfI(a) => {
            if !matches!(concl, Preformula::Ff) {
                return Err(shape("ff_I", "ff"));
            }
            let neg = wf(Preformula::not(a.prp().clone()))?;
            (Rule::FfI(a.clone()), vec![same(a.clone()), same(neg)])
        }
        Tactic::FfE => (Rule::FfE, vec![same(wf(Preformula::Ff)?)]),
        Tactic::ImpE(a) => {
            let major = wf(Preformula::imp(a.prp().clone(), concl.clone()))?;
            (Rule::ImpE(a.clone()), vec![same(major), same(a.clone())])
        }
        Tactic::BoxI => {
            let Preformula::Box(act, body) = concl else {
                return Err(shape("box_I", "a box formula"));
            };
            let prem = Sequent {
                hyps: Context::new(),
                concl: wf((**body).clone())?,
            };
            (Rule::BoxI(act.clone()), vec![prem])
        }
        Tactic::KRule(a) => {
            let Preformula::Box(act, psi) = concl else {
                return Err(shape("K", "a box formula"));
            };
            let major = wf(Preformula::boxed(
                act.clone(),
                Preformula::imp(a.prp().clone(), (**psi).clone()),
            ))?;
            let minor = wf(Preformula::boxed(act.clone(), a.prp().clone()))?;
            (Rule::K(act.clone(), a.clone()), vec![same(major), same(minor)])
        }
        Tactic::MuI => {
            let Preformula::Mu(x, body) = concl else {
                return Err(shape("mu_I", "a mu formula"));
            };
            let unfolded = wf(subst(body, x, concl))?;
            (Rule::MuI, vec![same(unfolded)])
        }
        Tactic::MuE(m) => {
            let Preformula::Mu(x, body) = m.prp() else {
                return Err(TacticError::Parameter(format!("mu_E needs a mu formula, got {m}")));
            };
            let step = wf(subst(body, x, concl))?;
            let induction = Sequent {
                hyps: std::iter::once(step).collect(),
                concl: goal.concl.clone(),
            };
            (Rule::MuE(m.clone()), vec![same(m.clone()), induction])
        }
        Tactic::Weaken(keep) => {
            let sub: Context = keep.iter().cloned().collect();
            if !sub.is_subset(gamma) {
                return Err(TacticError::Parameter(
                    "weaken may only keep hypotheses of the goal".to_owned(),
                ));
            }
            (
                Rule::Weaken,
                vec![Sequent {
                    hyps: sub,
                    concl: goal.concl.clone(),
                }],
            )
        }
        Tactic::Undo | Tactic::Qed => unreachable!("handled by apply_tactic"),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
pub enum ReplayCause {
    #[error("claim is ill-formed: {0}")]
    Claim(WellFormednessError),
    #[error("{0}")]
    Tactic(TacticError),
    #[error("{0}")]
    Qed(SessionError),
}

/// A failed replay. `step` is 1-based; step 0 is the claim and
/// `tactics + 1` is the final qed.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[error("step {step}: {cause}")]
pub struct ReplayError {
    pub step: usize,
    pub cause: ReplayCause,
}

/// Opens a session on the script's claim, applies every step, then qed.
pub fn replay(script: &ProofScript) -> Result<Derivation, ReplayError> {
    let mut s = start_replay(script)?;
    for (i, step) in script.steps.iter().enumerate() {
        apply_step(&mut s, &step.tactic).map_err(|cause| ReplayError {
            step: i + 1,
            cause: ReplayCause::Tactic(cause),
        })?;
    }
    s.qed().map_err(|e| ReplayError {
        step: script.steps.len() + 1,
        cause: ReplayCause::Qed(e),
    })
}

/// Replays as far as possible, returning the session and the first failure.
pub fn replay_partial(script: &ProofScript) -> Result<(GoalState, Option<ReplayError>), ReplayError> {
    let mut s = start_replay(script)?;
    for (i, step) in script.steps.iter().enumerate() {
        if let Err(cause) = apply_step(&mut s, &step.tactic) {
            let err = ReplayError {
                step: i + 1,
                cause: ReplayCause::Tactic(cause),
            };
            return Ok((s, Some(err)));
        }
    }
    Ok((s, None))
}

fn start_replay(script: &ProofScript) -> Result<GoalState, ReplayError> {
    GoalState::from_preformulas(
        script.name.clone(),
        &script.hyps,
        &script.concl,
        script.vars.iter().cloned().collect(),
    )
    .map_err(|e| ReplayError {
        step: 0,
        cause: ReplayCause::Claim(e),
    })
}

fn apply_step(s: &mut GoalState, t: &Tactic<Preformula>) -> Result<(), TacticError> {
    let t = t.clone().checked().map_err(TacticError::IllFormed)?;
    s.apply_tactic(t)
}
