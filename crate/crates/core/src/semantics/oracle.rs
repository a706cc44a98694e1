//! Brute-force semantics: every `μ` is the literal intersection of all
//! prefixed points, `⋂{T ⊆ S | ⟦φ⟧ρ[x↦T] ⊆ T}`, found by enumerating the
//! `2^|S|` subsets. Shares no evaluation code with the iterative checker and
//! is defined for non-monotone bodies too.

use std::collections::BTreeMap;

use super::{Bounds, Environment, SemanticsError, StateSet, TransitionSystem};
use crate::syntax::{Preformula, Var};

type Members = Vec<bool>;

/// `⟦μx.body⟧ρ` by the defining intersection, for any body.
pub fn eval_mu_oracle(
    m: &TransitionSystem,
    env: &Environment,
    x: &Var,
    body: &Preformula,
    bounds: &Bounds,
) -> Result<StateSet, SemanticsError> {
    let phi = Preformula::Mu(x.clone(), Box::new(body.clone()));
    eval_oracle(m, env, &phi, bounds)
}

/// `⟦φ⟧ρ` evaluating every `μ` by intersection. `φ` may be ill formed.
pub fn eval_oracle(
    m: &TransitionSystem,
    env: &Environment,
    phi: &Preformula,
    bounds: &Bounds,
) -> Result<StateSet, SemanticsError> {
    if m.len() > bounds.max_subset_states {
        return Err(SemanticsError::BoundExceeded {
            what: "prefixed-point enumeration",
            needed: m.len(),
            limit: bounds.max_subset_states,
        });
    }
    let n = m.len();
    let mut rho: BTreeMap<Var, Members> = BTreeMap::new();
    for (x, set) in env.iter() {
        rho.insert(x.clone(), (0..n).map(|s| set.contains(s)).collect());
    }
    let out = go(m, &rho, phi);
    Ok(StateSet::from_indices(
        n,
        out.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i),
    ))
}

fn go(m: &TransitionSystem, rho: &BTreeMap<Var, Members>, phi: &Preformula) -> Members {
    let n = m.len();
    match phi {
        Preformula::Atom(p) => {
            let set = m.prop(p);
            (0..n).map(|s| set.contains(s)).collect()
        }
        Preformula::Ff => vec![false; n],
        Preformula::Var(x) => rho.get(x).cloned().unwrap_or_else(|| vec![false; n]),
        Preformula::Not(b) => go(m, rho, b).into_iter().map(|v| !v).collect(),
        Preformula::Imp(l, r) => {
            let l = go(m, rho, l);
            let r = go(m, rho, r);
            l.iter().zip(&r).map(|(a, b)| !a || *b).collect()
        }
        Preformula::Box(a, b) => {
            let inner = go(m, rho, b);
            (0..n)
                .map(|s| m.successors(a, s).iter().all(|r| inner[r]))
                .collect()
        }
        Preformula::Mu(x, b) => {
            let mut acc = vec![true; n];
            for mask in 0..1u64 << n {
                let t: Members = (0..n).map(|s| mask >> s & 1 == 1).collect();
                let mut inner = rho.clone();
                inner.insert(x.clone(), t.clone());
                let image = go(m, &inner, b);
                let prefixed = image.iter().zip(&t).all(|(i, t)| !i || *t);
                if prefixed {
                    for (a, t) in acc.iter_mut().zip(&t) {
                        *a = *a && *t;
                    }
                }
            }
            acc
        }
    }
}

/// `⋂{T | f(T) ⊆ T}` for an arbitrary `f` over the subsets of `S`.
pub(crate) fn intersection_of_prefixed_points(
    m: &TransitionSystem,
    f: impl Fn(&StateSet) -> StateSet,
) -> StateSet {
    m.subsets()
        .filter(|t| f(t).is_subset(t))
        .fold(m.full_set(), |acc, t| acc.intersection(&t))
}
