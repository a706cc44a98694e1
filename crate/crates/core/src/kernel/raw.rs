//! Unchecked derivation trees over preformulae, used for debug dumps and for
//! feeding externally produced trees to the kernel. Conversion runs the
//! well-formedness gate on every formula before any rule is checked.

use serde::{Deserialize, Serialize};

use super::{check, Context, Derivation, KernelError, Reason, Rule, Sequent};
use crate::syntax::{mk_wf, ActionId, Preformula, WfFormula};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RawRule {
    Hyp,
    Raa,
    ImpI,
    ImpE(Preformula),
    NotI,
    FfI(Preformula),
    FfE,
    BoxI(ActionId),
    K(ActionId, Preformula),
    MuI,
    MuE(Preformula),
    Weaken,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDerivation {
    pub rule: RawRule,
    #[serde(default)]
    pub premises: Vec<RawDerivation>,
    #[serde(default)]
    pub hyps: Vec<Preformula>,
    pub concl: Preformula,
}

impl RawRule {
    fn name(&self) -> &'static str {
        match self {
            RawRule::Hyp => "Hyp",
            RawRule::Raa => "Raa",
            RawRule::ImpI => "ImpI",
            RawRule::ImpE(_) => "ImpE",
            RawRule::NotI => "NotI",
            RawRule::FfI(_) => "FfI",
            RawRule::FfE => "FfE",
            RawRule::BoxI(_) => "BoxI",
            RawRule::K(..) => "K",
            RawRule::MuI => "MuI",
            RawRule::MuE(_) => "MuE",
            RawRule::Weaken => "Weaken",
        }
    }
}

impl RawDerivation {
    /// Gates every formula through `mk_wf`, reporting the first ill-formed one.
    pub fn to_derivation(&self) -> Result<Derivation, KernelError> {
        fn go(d: &RawDerivation, path: &mut Vec<usize>) -> Result<Derivation, KernelError> {
            let gate = |f: &Preformula| -> Result<WfFormula, KernelError> {
                mk_wf(f.clone()).map_err(|e| KernelError {
                    path: path.clone(),
                    rule: d.rule.name(),
                    reason: Reason::IllFormed(e),
                })
            };
            let rule = match &d.rule {
                RawRule::Hyp => Rule::Hyp,
                RawRule::Raa => Rule::Raa,
                RawRule::ImpI => Rule::ImpI,
                RawRule::ImpE(f) => Rule::ImpE(gate(f)?),
                RawRule::NotI => Rule::NotI,
                RawRule::FfI(f) => Rule::FfI(gate(f)?),
                RawRule::FfE => Rule::FfE,
                RawRule::BoxI(a) => Rule::BoxI(a.clone()),
                RawRule::K(a, f) => Rule::K(a.clone(), gate(f)?),
                RawRule::MuI => Rule::MuI,
                RawRule::MuE(f) => Rule::MuE(gate(f)?),
                RawRule::Weaken => Rule::Weaken,
            };
            let hyps = d.hyps.iter().map(gate).collect::<Result<Context, _>>()?;
            let concl = gate(&d.concl)?;
            let mut premises = Vec::with_capacity(d.premises.len());
            for (i, p) in d.premises.iter().enumerate() {
                path.push(i);
                premises.push(go(p, path)?);
                path.pop();
            }
            Ok(Derivation::new(rule, premises, Sequent { hyps, concl }))
        }
        go(self, &mut Vec::new())
    }
}

impl From<&Derivation> for RawDerivation {
    fn from(d: &Derivation) -> Self {
        let p = |f: &WfFormula| f.prp().clone();
        let rule = match &d.rule {
            Rule::Hyp => RawRule::Hyp,
            Rule::Raa => RawRule::Raa,
            Rule::ImpI => RawRule::ImpI,
            Rule::ImpE(f) => RawRule::ImpE(p(f)),
            Rule::NotI => RawRule::NotI,
            Rule::FfI(f) => RawRule::FfI(p(f)),
            Rule::FfE => RawRule::FfE,
            Rule::BoxI(a) => RawRule::BoxI(a.clone()),
            Rule::K(a, f) => RawRule::K(a.clone(), p(f)),
            Rule::MuI => RawRule::MuI,
            Rule::MuE(f) => RawRule::MuE(p(f)),
            Rule::Weaken => RawRule::Weaken,
        };
        RawDerivation {
            rule,
            premises: d.premises.iter().map(RawDerivation::from).collect(),
            hyps: d.concl.hyps.iter().map(p).collect(),
            concl: p(&d.concl.concl),
        }
    }
}

/// Gate, then check.
pub fn check_raw(d: &RawDerivation) -> Result<Sequent, KernelError> {
    check(&d.to_derivation()?)
}
