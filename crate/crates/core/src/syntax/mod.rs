//! Preformulae of the modal μ-calculus.
//!
//! Binders use named variables. Equality on [`Preformula`] is α-equivalence:
//! two terms compare equal iff they differ only in the names of bound
//! variables. Substitution is capture-avoiding and renames binders with
//! names drawn from a deterministic [`NamePool`].

mod alpha;
mod positivity;

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

pub use alpha::{alpha_eq, Nameless};
pub use positivity::{
    is_wf, is_wf_with, mk_wf, neg_in, neg_in_with, pos_in, pos_in_with, WellFormednessError,
    WfFormula,
};

macro_rules! ident_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(name: impl Into<String>) -> Self {
                Self(name.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }
    };
}

ident_newtype!(
    /// A propositional variable.
    Var
);
ident_newtype!(
    /// An atomic proposition.
    AtomId
);
ident_newtype!(
    /// An action label of the modal box.
    ActionId
);

/// Source of fresh variable names: `{prefix}0`, `{prefix}1`, ...
///
/// `fresh` returns the first name of the enumeration that is not in the
/// avoid set, so the choice is a function of the avoid set alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamePool {
    prefix: String,
}

impl NamePool {
    pub fn new(prefix: impl Into<String>) -> Self {
        Self {
            prefix: prefix.into(),
        }
    }

    pub fn fresh<'a, I>(&self, avoid: I) -> Var
    where
        I: IntoIterator<Item = &'a Var>,
    {
        let taken: BTreeSet<&str> = avoid.into_iter().map(Var::as_str).collect();
        (0usize..)
            .map(|i| format!("{}{}", self.prefix, i))
            .find(|cand| !taken.contains(cand.as_str()))
            .map(Var)
            .expect("name enumeration is unbounded")
    }
}

impl Default for NamePool {
    fn default() -> Self {
        Self::new("v")
    }
}

/// Returns the first variable `v0, v1, ...` not in `avoid`.
pub fn fresh<'a, I>(avoid: I) -> Var
where
    I: IntoIterator<Item = &'a Var>,
{
    NamePool::default().fresh(avoid)
}

/// A term of the unrestricted grammar `p | ff | ¬φ | φ⊃ψ | [a]φ | x | μx.φ`.
///
/// No positivity constraint is imposed here; see [`mk_wf`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum Preformula {
    Atom(AtomId),
    Ff,
    Not(Box<Preformula>),
    Imp(Box<Preformula>, Box<Preformula>),
    Box(ActionId, Box<Preformula>),
    Var(Var),
    Mu(Var, Box<Preformula>),
}

impl PartialEq for Preformula {
    fn eq(&self, other: &Self) -> bool {
        alpha_eq(self, other)
    }
}

impl Eq for Preformula {}

impl Hash for Preformula {
    fn hash<H: Hasher>(&self, state: &mut H) {
        Nameless::from(self).hash(state)
    }
}

impl Preformula {
    pub fn atom(p: impl Into<AtomId>) -> Self {
        Self::Atom(p.into())
    }

    pub fn var(x: impl Into<Var>) -> Self {
        Self::Var(x.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(phi: Preformula) -> Self {
        Self::Not(Box::new(phi))
    }

    pub fn imp(phi: Preformula, psi: Preformula) -> Self {
        Self::Imp(Box::new(phi), Box::new(psi))
    }

    pub fn boxed(a: impl Into<ActionId>, phi: Preformula) -> Self {
        Self::Box(a.into(), Box::new(phi))
    }

    pub fn mu(x: impl Into<Var>, body: Preformula) -> Self {
        Self::Mu(x.into(), Box::new(body))
    }

    /// `tt ≡ ¬ff`
    pub fn tt() -> Self {
        Self::not(Self::Ff)
    }

    /// `φ ∧ ψ ≡ ¬(φ ⊃ ¬ψ)`
    pub fn and(phi: Preformula, psi: Preformula) -> Self {
        Self::not(Self::imp(phi, Self::not(psi)))
    }

    /// `φ ∨ ψ ≡ ¬φ ⊃ ψ`
    pub fn or(phi: Preformula, psi: Preformula) -> Self {
        Self::imp(Self::not(phi), psi)
    }

    /// `⟨a⟩φ ≡ ¬[a]¬φ`
    pub fn diamond(a: impl Into<ActionId>, phi: Preformula) -> Self {
        Self::not(Self::boxed(a, Self::not(phi)))
    }

    /// Greatest fixpoint, `νx.φ ≡ ¬μx.¬φ[¬x/x]`.
    pub fn nu(x: impl Into<Var>, body: Preformula) -> Self {
        nu(&x.into(), &body)
    }

    /// Number of connectives (every constructor except atoms, `ff` and variables).
    pub fn connectives(&self) -> usize {
        match self {
            Self::Atom(_) | Self::Ff | Self::Var(_) => 0,
            Self::Not(b) | Self::Box(_, b) | Self::Mu(_, b) => 1 + b.connectives(),
            Self::Imp(l, r) => 1 + l.connectives() + r.connectives(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Self::Atom(_) | Self::Ff | Self::Var(_) => 0,
            Self::Not(b) | Self::Box(_, b) | Self::Mu(_, b) => 1 + b.depth(),
            Self::Imp(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// Immediate subterms, indexed as in error paths.
    pub fn children(&self) -> Vec<&Preformula> {
        match self {
            Self::Atom(_) | Self::Ff | Self::Var(_) => vec![],
            Self::Not(b) | Self::Box(_, b) | Self::Mu(_, b) => vec![b],
            Self::Imp(l, r) => vec![l, r],
        }
    }

    /// Follows a path of child indices from this node.
    pub fn at_path(&self, path: &[usize]) -> Option<&Preformula> {
        path.iter()
            .try_fold(self, |node, &i| node.children().get(i).copied())
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        free_vars(self)
    }

    /// Atomic propositions occurring anywhere in the term.
    pub fn atoms(&self) -> BTreeSet<AtomId> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Self::Atom(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    pub fn actions(&self) -> BTreeSet<ActionId> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Self::Box(a, _) = f {
                out.insert(a.clone());
            }
        });
        out
    }

    /// Every variable name appearing in the term, free or bound.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Self::Var(x) | Self::Mu(x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&Preformula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }
}

/// Variables with at least one free occurrence.
pub fn free_vars(phi: &Preformula) -> BTreeSet<Var> {
    fn go(phi: &Preformula, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match phi {
            Preformula::Atom(_) | Preformula::Ff => {}
            Preformula::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Preformula::Not(b) | Preformula::Box(_, b) => go(b, bound, out),
            Preformula::Imp(l, r) => {
                go(l, bound, out);
                go(r, bound, out);
            }
            Preformula::Mu(x, b) => {
                bound.push(x.clone());
                go(b, bound, out);
                bound.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    go(phi, &mut Vec::new(), &mut out);
    out
}

/// Occur-check: does `x` occur free in `phi`?
pub fn is_in(x: &Var, phi: &Preformula) -> bool {
    match phi {
        Preformula::Atom(_) | Preformula::Ff => false,
        Preformula::Var(y) => x == y,
        Preformula::Not(b) | Preformula::Box(_, b) => is_in(x, b),
        Preformula::Imp(l, r) => is_in(x, l) || is_in(x, r),
        Preformula::Mu(y, b) => x != y && is_in(x, b),
    }
}

/// Dual occur-check: `x` has no free occurrence in `phi`.
pub fn not_in(x: &Var, phi: &Preformula) -> bool {
    !is_in(x, phi)
}

/// Capture-avoiding substitution `phi[psi/x]`.
pub fn subst(phi: &Preformula, x: &Var, psi: &Preformula) -> Preformula {
    subst_with(phi, x, psi, &NamePool::default())
}

/// [`subst`] drawing renamed binders from `pool`.
pub fn subst_with(phi: &Preformula, x: &Var, psi: &Preformula, pool: &NamePool) -> Preformula {
    let psi_fv = free_vars(psi);
    subst_go(phi, x, psi, &psi_fv, pool)
}

fn subst_go(
    phi: &Preformula,
    x: &Var,
    psi: &Preformula,
    psi_fv: &BTreeSet<Var>,
    pool: &NamePool,
) -> Preformula {
    match phi {
        Preformula::Atom(_) | Preformula::Ff => phi.clone(),
        Preformula::Var(y) if y == x => psi.clone(),
        Preformula::Var(_) => phi.clone(),
        Preformula::Not(b) => Preformula::not(subst_go(b, x, psi, psi_fv, pool)),
        Preformula::Box(a, b) => Preformula::Box(a.clone(), Box::new(subst_go(b, x, psi, psi_fv, pool))),
        Preformula::Imp(l, r) => Preformula::imp(
            subst_go(l, x, psi, psi_fv, pool),
            subst_go(r, x, psi, psi_fv, pool),
        ),
        Preformula::Mu(y, _) if y == x => phi.clone(),
        Preformula::Mu(y, b) => {
            if !is_in(x, b) {
                return phi.clone();
            }
            if psi_fv.contains(y) {
                let mut avoid = free_vars(phi);
                avoid.extend(psi_fv.iter().cloned());
                avoid.insert(x.clone());
                let z = pool.fresh(&avoid);
                let renamed = subst_with(b, y, &Preformula::Var(z.clone()), pool);
                Preformula::mu(z, subst_go(&renamed, x, psi, psi_fv, pool))
            } else {
                Preformula::Mu(y.clone(), Box::new(subst_go(b, x, psi, psi_fv, pool)))
            }
        }
    }
}

/// `νx.φ` as `¬μx.¬φ[¬x/x]`.
pub fn nu(x: &Var, phi: &Preformula) -> Preformula {
    let flipped = subst(phi, x, &Preformula::not(Preformula::Var(x.clone())));
    Preformula::not(Preformula::Mu(x.clone(), Box::new(Preformula::not(flipped))))
}
