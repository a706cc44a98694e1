//! Denotational semantics over finite transition systems.
//!
//! `eval` computes `⟦φ⟧ρ` compositionally; `μ` is the limit of the Kleene
//! chain `∅ ⊆ f(∅) ⊆ f²(∅) ⊆ …`, which for a positive body reaches the
//! least fixpoint in at most `|S|` steps. The literal intersection of
//! prefixed points is kept in [`oracle`] as an independent check.

mod battery;
mod model;
pub mod oracle;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::{free_vars, is_wf, mk_wf, Preformula, Var, WellFormednessError, WfFormula};

pub use battery::{random_model, random_models, BatterySpec};
pub use model::{Environment, ModelError, StateSet, TransitionSystem};
pub use oracle::eval_mu_oracle;

/// Enumeration limits. Exceeding one is an error, never a silent truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Largest `|S|` for which `2^|S|` subsets are enumerated.
    pub max_subset_states: usize,
    /// Largest `|S|·|X|`, i.e. log2 of the number of environments enumerated.
    pub max_env_bits: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_subset_states: 12,
            max_env_bits: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("ill-formed formula: {0}")]
    IllFormed(#[from] WellFormednessError),
    #[error("{what} needs 2^{needed} cases, above the limit of 2^{limit}")]
    BoundExceeded {
        what: &'static str,
        needed: usize,
        limit: usize,
    },
}

/// `⟦φ⟧_M ρ` for a well-formed `φ`.
pub fn eval(m: &TransitionSystem, env: &Environment, phi: &Preformula) -> Result<StateSet, SemanticsError> {
    if !is_wf(phi) {
        return Err(mk_wf(phi.clone()).unwrap_err().into());
    }
    Ok(eval_trusted(m, env, phi))
}

pub fn eval_wf(m: &TransitionSystem, env: &Environment, phi: &WfFormula) -> StateSet {
    eval_trusted(m, env, phi.prp())
}

fn eval_trusted(m: &TransitionSystem, env: &Environment, phi: &Preformula) -> StateSet {
    eval_body(m, env, phi, true)
}

/// `wf` records that `phi` is known to be well formed; otherwise every `μ`
/// is checked and an ill-formed one is evaluated by its defining intersection.
fn eval_body(m: &TransitionSystem, env: &Environment, phi: &Preformula, wf: bool) -> StateSet {
    match phi {
        Preformula::Atom(p) => m.prop(p),
        Preformula::Ff => m.empty_set(),
        Preformula::Var(x) => env.get(x, m),
        Preformula::Not(b) => eval_body(m, env, b, wf).complement(),
        Preformula::Imp(l, r) => eval_body(m, env, l, wf)
            .complement()
            .union(&eval_body(m, env, r, wf)),
        Preformula::Box(a, b) => {
            let target = eval_body(m, env, b, wf);
            StateSet::from_indices(
                m.len(),
                (0..m.len()).filter(|&s| m.successors(a, s).is_subset(&target)),
            )
        }
        Preformula::Mu(x, b) => {
            if wf || is_wf(phi) {
                least_fixpoint(m, env, x, b)
            } else {
                oracle::intersection_of_prefixed_points(m, |t| {
                    eval_body(m, &env.with(x, t.clone()), b, false)
                })
            }
        }
    }
}

fn least_fixpoint(m: &TransitionSystem, env: &Environment, x: &Var, body: &Preformula) -> StateSet {
    let mut current = m.empty_set();
    loop {
        let next = eval_body(m, &env.with(x, current.clone()), body, true);
        if next == current {
            return current;
        }
        current = next;
    }
}

/// The Kleene chain `∅, f(∅), f²(∅), …` up to and including its first
/// repeated element, with `f = semantic_function(m, env, x, body)`.
/// Gives up after `|S| + 2` terms.
pub fn kleene_chain(m: &TransitionSystem, env: &Environment, x: &Var, body: &Preformula) -> Vec<StateSet> {
    let f = semantic_function(m, env, x, body);
    let mut chain = vec![m.empty_set()];
    while chain.len() < m.len() + 2 {
        let next = f(chain.last().expect("nonempty"));
        let done = Some(&next) == chain.last();
        chain.push(next);
        if done {
            break;
        }
    }
    chain
}

/// Greatest fixpoint of `T ↦ ⟦body⟧ρ[x↦T]` by iteration downward from `S`.
pub fn greatest_fixpoint(m: &TransitionSystem, env: &Environment, x: &Var, body: &Preformula) -> StateSet {
    let f = semantic_function(m, env, x, body);
    let mut current = m.full_set();
    loop {
        let next = f(&current);
        if next == current {
            return current;
        }
        current = next;
    }
}

/// `φ_x^ρ : T ↦ ⟦φ⟧ρ[x↦T]`. No well-formedness gate on `body`.
pub fn semantic_function<'a>(
    m: &'a TransitionSystem,
    env: &'a Environment,
    x: &'a Var,
    body: &'a Preformula,
) -> impl Fn(&StateSet) -> StateSet + 'a {
    move |t: &StateSet| eval_body(m, &env.with(x, t.clone()), body, false)
}

fn check_subset_bound(m: &TransitionSystem, bounds: &Bounds, what: &'static str) -> Result<(), SemanticsError> {
    if m.len() > bounds.max_subset_states {
        return Err(SemanticsError::BoundExceeded {
            what,
            needed: m.len(),
            limit: bounds.max_subset_states,
        });
    }
    Ok(())
}

/// `U ⊆ V ⟹ f(U) ⊆ f(V)` for every pair of subsets.
pub fn check_monotone(
    m: &TransitionSystem,
    env: &Environment,
    x: &Var,
    phi: &Preformula,
    bounds: &Bounds,
) -> Result<bool, SemanticsError> {
    check_subset_bound(m, bounds, "monotonicity check")?;
    Ok(ordered_pairs_hold(m, env, x, phi, |fu, fv| fu.is_subset(fv)))
}

/// `U ⊆ V ⟹ f(V) ⊆ f(U)` for every pair of subsets.
pub fn check_antimonotone(
    m: &TransitionSystem,
    env: &Environment,
    x: &Var,
    phi: &Preformula,
    bounds: &Bounds,
) -> Result<bool, SemanticsError> {
    check_subset_bound(m, bounds, "antimonotonicity check")?;
    Ok(ordered_pairs_hold(m, env, x, phi, |fu, fv| fv.is_subset(fu)))
}

fn ordered_pairs_hold(
    m: &TransitionSystem,
    env: &Environment,
    x: &Var,
    phi: &Preformula,
    ok: impl Fn(&StateSet, &StateSet) -> bool,
) -> bool {
    let f = semantic_function(m, env, x, phi);
    let image: Vec<StateSet> = m.subsets().map(|t| f(&t)).collect();
    let full = (1u64 << m.len()) - 1;
    (0..=full).all(|v| {
        // every submask u of v
        let mut u = v;
        loop {
            if !ok(&image[u as usize], &image[v as usize]) {
                return false;
            }
            if u == 0 {
                return true;
            }
            u = (u - 1) & v;
        }
    })
}

/// Every assignment of subsets of `S` to `vars`, in a fixed order.
pub fn environments<'a>(
    m: &'a TransitionSystem,
    vars: &'a BTreeSet<Var>,
    bounds: &Bounds,
) -> Result<impl Iterator<Item = Environment> + 'a, SemanticsError> {
    let bits = m.len() * vars.len();
    if bits > bounds.max_env_bits || bits >= 64 {
        return Err(SemanticsError::BoundExceeded {
            what: "environment enumeration",
            needed: bits,
            limit: bounds.max_env_bits,
        });
    }
    let n = m.len();
    let per_var = (1u64 << n) - 1;
    Ok((0..1u64 << bits).map(move |code| {
        let mut env = Environment::new();
        for (k, x) in vars.iter().enumerate() {
            env.set(x.clone(), StateSet::from_mask(n, code >> (k * n) & per_var));
        }
        env
    }))
}

/// `⟦Γ⟧ρ`, the intersection of the hypotheses (`S` when `Γ` is empty).
pub fn eval_context(m: &TransitionSystem, env: &Environment, hyps: &[WfFormula]) -> StateSet {
    hyps.iter()
        .fold(m.full_set(), |acc, h| acc.intersection(&eval_wf(m, env, h)))
}

fn quantified_vars(hyps: &[WfFormula], phi: &WfFormula, vars: &BTreeSet<Var>) -> BTreeSet<Var> {
    let mut all = vars.clone();
    for h in hyps {
        all.extend(free_vars(h.prp()));
    }
    all.extend(free_vars(phi.prp()));
    all
}

/// `Γ ⊨_M φ`: `⟦Γ⟧ρ ⊆ ⟦φ⟧ρ` for every `ρ` over `vars` (extended with the free
/// variables of `Γ` and `φ`, on which the semantics solely depends).
pub fn consequence(
    m: &TransitionSystem,
    hyps: &[WfFormula],
    phi: &WfFormula,
    vars: &BTreeSet<Var>,
    bounds: &Bounds,
) -> Result<bool, SemanticsError> {
    Ok(counterexample(m, hyps, phi, vars, bounds)?.is_none())
}

/// Some `ρ` and `s ∈ ⟦Γ⟧ρ ∖ ⟦φ⟧ρ`, if the consequence fails.
pub fn counterexample(
    m: &TransitionSystem,
    hyps: &[WfFormula],
    phi: &WfFormula,
    vars: &BTreeSet<Var>,
    bounds: &Bounds,
) -> Result<Option<(Environment, usize)>, SemanticsError> {
    let vars = quantified_vars(hyps, phi, vars);
    for env in environments(m, &vars, bounds)? {
        let gap = eval_context(m, &env, hyps).difference(&eval_wf(m, &env, phi));
        let first = gap.iter().next();
        if let Some(s) = first {
            return Ok(Some((env, s)));
        }
    }
    Ok(None)
}
