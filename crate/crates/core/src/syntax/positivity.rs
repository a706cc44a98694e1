//! Positivity, negativity and well-formedness.
//!
//! `pos_in(x, φ)` holds iff every free occurrence of `x` in `φ` is under an
//! even number of negations (the antecedent of `⊃` counts as a negation);
//! `neg_in` is the dual. Both are syntax-directed: the `μ` case renames the
//! bound variable to one fresh name and recurses on the body.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{free_vars, subst_with, NamePool, Preformula, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Polarity {
    Pos,
    Neg,
}

impl Polarity {
    fn flip(self) -> Self {
        match self {
            Polarity::Pos => Polarity::Neg,
            Polarity::Neg => Polarity::Pos,
        }
    }
}

fn polar(x: &Var, phi: &Preformula, pol: Polarity, pool: &NamePool) -> bool {
    match phi {
        Preformula::Atom(_) | Preformula::Ff => true,
        Preformula::Not(b) => polar(x, b, pol.flip(), pool),
        Preformula::Imp(l, r) => polar(x, l, pol.flip(), pool) && polar(x, r, pol, pool),
        Preformula::Box(_, b) => polar(x, b, pol, pool),
        Preformula::Var(y) => match pol {
            Polarity::Pos => true,
            Polarity::Neg => y != x,
        },
        Preformula::Mu(y, b) => {
            let mut avoid = free_vars(phi);
            avoid.insert(x.clone());
            let z = pool.fresh(&avoid);
            let body = subst_with(b, y, &Preformula::Var(z), pool);
            polar(x, &body, pol, pool)
        }
    }
}

/// `x` occurs only positively in `phi`.
pub fn pos_in(x: &Var, phi: &Preformula) -> bool {
    pos_in_with(x, phi, &NamePool::default())
}

/// `x` occurs only negatively in `phi`.
pub fn neg_in(x: &Var, phi: &Preformula) -> bool {
    neg_in_with(x, phi, &NamePool::default())
}

pub fn pos_in_with(x: &Var, phi: &Preformula, pool: &NamePool) -> bool {
    polar(x, phi, Polarity::Pos, pool)
}

pub fn neg_in_with(x: &Var, phi: &Preformula, pool: &NamePool) -> bool {
    polar(x, phi, Polarity::Neg, pool)
}

/// Every `μ`-subformula binds a variable occurring only positively in its body.
pub fn is_wf(phi: &Preformula) -> bool {
    is_wf_with(phi, &NamePool::default())
}

pub fn is_wf_with(phi: &Preformula, pool: &NamePool) -> bool {
    match phi {
        Preformula::Atom(_) | Preformula::Ff | Preformula::Var(_) => true,
        Preformula::Not(b) | Preformula::Box(_, b) => is_wf_with(b, pool),
        Preformula::Imp(l, r) => is_wf_with(l, pool) && is_wf_with(r, pool),
        Preformula::Mu(y, b) => {
            let z = pool.fresh(&free_vars(phi));
            let body = subst_with(b, y, &Preformula::Var(z.clone()), pool);
            pos_in_with(&z, &body, pool) && is_wf_with(&body, pool)
        }
    }
}

/// A `μ` binder whose variable occurs negatively in its body.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[error("variable `{variable}` bound at {} occurs negatively at {}", fmt_path(.path), fmt_path(.occurrence))]
pub struct WellFormednessError {
    /// Child indices from the root to the offending `μ` subformula.
    pub path: Vec<usize>,
    /// The bound variable, as written.
    pub variable: Var,
    /// Child indices from the root to a negative occurrence of `variable`.
    pub occurrence: Vec<usize>,
}

fn fmt_path(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_owned()
    } else {
        let parts: Vec<String> = path.iter().map(usize::to_string).collect();
        format!("path [{}]", parts.join("."))
    }
}

/// First free occurrence of `x` in `phi` with polarity `pol`, as a path.
fn find_occurrence(x: &Var, phi: &Preformula, pol: Polarity, path: &mut Vec<usize>) -> bool {
    let descend = |i: usize, child: &Preformula, pol: Polarity, path: &mut Vec<usize>| {
        path.push(i);
        if find_occurrence(x, child, pol, path) {
            return true;
        }
        path.pop();
        false
    };
    match phi {
        Preformula::Atom(_) | Preformula::Ff => false,
        Preformula::Var(y) => y == x && pol == Polarity::Neg,
        Preformula::Not(b) => descend(0, b, pol.flip(), path),
        Preformula::Box(_, b) => descend(0, b, pol, path),
        Preformula::Imp(l, r) => descend(0, l, pol.flip(), path) || descend(1, r, pol, path),
        Preformula::Mu(y, _) if y == x => false,
        Preformula::Mu(_, b) => descend(0, b, pol, path),
    }
}

fn first_violation(phi: &Preformula, path: &mut Vec<usize>) -> Option<WellFormednessError> {
    match phi {
        Preformula::Atom(_) | Preformula::Ff | Preformula::Var(_) => None,
        Preformula::Mu(y, b) => {
            let z = NamePool::default().fresh(&free_vars(phi));
            let renamed = subst_with(b, y, &Preformula::Var(z.clone()), &NamePool::default());
            if !pos_in(&z, &renamed) {
                let mut occurrence = path.clone();
                occurrence.push(0);
                let found = find_occurrence(y, b, Polarity::Pos, &mut occurrence);
                debug_assert!(found, "pos_in failed without a negative occurrence");
                return Some(WellFormednessError {
                    path: path.clone(),
                    variable: y.clone(),
                    occurrence,
                });
            }
            path.push(0);
            let r = first_violation(b, path);
            path.pop();
            r
        }
        _ => {
            for (i, c) in phi.children().into_iter().enumerate() {
                path.push(i);
                let r = first_violation(c, path);
                path.pop();
                if r.is_some() {
                    return r;
                }
            }
            None
        }
    }
}

/// A preformula checked to be well formed. Only [`mk_wf`] builds one.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Preformula", into = "Preformula")]
pub struct WfFormula {
    prp: Preformula,
}

impl WfFormula {
    pub fn prp(&self) -> &Preformula {
        &self.prp
    }

    pub fn into_inner(self) -> Preformula {
        self.prp
    }
}

impl AsRef<Preformula> for WfFormula {
    fn as_ref(&self) -> &Preformula {
        &self.prp
    }
}

impl std::ops::Deref for WfFormula {
    type Target = Preformula;

    fn deref(&self) -> &Preformula {
        &self.prp
    }
}

impl fmt::Debug for WfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Wf({:?})", self.prp)
    }
}

impl fmt::Display for WfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.prp.fmt(f)
    }
}

impl TryFrom<Preformula> for WfFormula {
    type Error = WellFormednessError;

    fn try_from(prp: Preformula) -> Result<Self, Self::Error> {
        mk_wf(prp)
    }
}

impl From<WfFormula> for Preformula {
    fn from(f: WfFormula) -> Self {
        f.prp
    }
}

/// Checks well-formedness and wraps the preformula.
pub fn mk_wf(prp: Preformula) -> Result<WfFormula, WellFormednessError> {
    if is_wf(&prp) {
        return Ok(WfFormula { prp });
    }
    Err(first_violation(&prp, &mut Vec::new())
        .expect("is_wf rejected a preformula without a located violation"))
}
