use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::parser::ParseError;
use crate::syntax::{ActionId, AtomId, Var};

/// A set of states of one transition system, as a bitset over state indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StateSet(FixedBitSet);

impl StateSet {
    pub fn empty(n: usize) -> Self {
        StateSet(FixedBitSet::with_capacity(n))
    }

    pub fn full(n: usize) -> Self {
        let mut s = FixedBitSet::with_capacity(n);
        s.insert_range(..);
        StateSet(s)
    }

    /// The subset whose members are the set bits of `mask` (n ≤ 64).
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let mut s = Self::empty(n);
        for i in (0..n).filter(|i| mask >> i & 1 == 1) {
            s.0.insert(i);
        }
        s
    }

    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for i in indices {
            s.0.insert(i);
        }
        s
    }

    pub fn universe_len(&self) -> usize {
        self.0.len()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(i)
    }

    pub fn insert(&mut self, i: usize) {
        self.0.insert(i);
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        let mut s = self.0.clone();
        s.union_with(&other.0);
        StateSet(s)
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        let mut s = self.0.clone();
        s.intersect_with(&other.0);
        StateSet(s)
    }

    pub fn complement(&self) -> StateSet {
        let mut s = self.0.clone();
        s.toggle_range(..);
        StateSet(s)
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        let mut s = self.0.clone();
        s.difference_with(&other.0);
        StateSet(s)
    }

    pub fn to_mask(&self) -> u64 {
        self.iter().fold(0, |m, i| m | 1 << i)
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{0}")]
    Syntax(#[from] ParseError),
    #[error("a model needs at least one state")]
    NoStates,
    #[error("state `{0}` is declared twice")]
    DuplicateState(String),
    #[error("state `{state}` referenced by {context} is not declared")]
    UndeclaredState { state: String, context: String },
}

/// A finite labelled transition system `⟨S, ⟦·⟧⟩`.
///
/// Atoms and actions without an entry denote the empty set and the empty
/// successor map respectively.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionSystem {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
    props: BTreeMap<AtomId, StateSet>,
    trans: BTreeMap<ActionId, Vec<StateSet>>,
}

impl TransitionSystem {
    pub fn new<I, S>(states: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = states.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(ModelError::NoStates);
        }
        let mut index = BTreeMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(ModelError::DuplicateState(n.clone()));
            }
        }
        Ok(TransitionSystem {
            names,
            index,
            props: BTreeMap::new(),
            trans: BTreeMap::new(),
        })
    }

    /// States named `s0 .. s{n-1}`. Panics if `n == 0`.
    pub fn with_states(n: usize) -> Self {
        Self::new((0..n).map(|i| format!("s{i}"))).expect("n > 0")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn state_name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    fn lookup(&self, name: &str, context: impl FnOnce() -> String) -> Result<usize, ModelError> {
        self.state_index(name).ok_or_else(|| ModelError::UndeclaredState {
            state: name.to_owned(),
            context: context(),
        })
    }

    pub fn set_prop<I, S>(&mut self, p: impl Into<AtomId>, states: I) -> Result<(), ModelError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let p = p.into();
        let mut set = self.empty_set();
        for s in states {
            set.insert(self.lookup(s.as_ref(), || format!("proposition `{p}`"))?);
        }
        self.props.insert(p, set);
        Ok(())
    }

    pub fn add_transition(
        &mut self,
        a: impl Into<ActionId>,
        from: &str,
        to: &str,
    ) -> Result<(), ModelError> {
        let a = a.into();
        let i = self.lookup(from, || format!("action `{a}`"))?;
        let j = self.lookup(to, || format!("action `{a}`"))?;
        self.add_edge(a, i, j);
        Ok(())
    }

    /// Index-based edge insertion. Panics on out-of-range indices.
    pub fn add_edge(&mut self, a: impl Into<ActionId>, from: usize, to: usize) {
        assert!(from < self.len() && to < self.len(), "state index out of range");
        let n = self.len();
        let succ = self
            .trans
            .entry(a.into())
            .or_insert_with(|| vec![StateSet::empty(n); n]);
        succ[from].insert(to);
    }

    pub fn set_prop_indices(&mut self, p: impl Into<AtomId>, states: impl IntoIterator<Item = usize>) {
        let set = StateSet::from_indices(self.len(), states);
        self.props.insert(p.into(), set);
    }

    pub fn empty_set(&self) -> StateSet {
        StateSet::empty(self.len())
    }

    pub fn full_set(&self) -> StateSet {
        StateSet::full(self.len())
    }

    /// `⟦p⟧`
    pub fn prop(&self, p: &AtomId) -> StateSet {
        self.props.get(p).cloned().unwrap_or_else(|| self.empty_set())
    }

    /// `⟦a⟧(s)`
    pub fn successors(&self, a: &ActionId, s: usize) -> StateSet {
        self.trans
            .get(a)
            .map(|succ| succ[s].clone())
            .unwrap_or_else(|| self.empty_set())
    }

    pub fn props(&self) -> impl Iterator<Item = (&AtomId, &StateSet)> {
        self.props.iter()
    }

    pub fn actions(&self) -> impl Iterator<Item = &ActionId> {
        self.trans.keys()
    }

    /// Renders a state set using state names, e.g. `{s0, s1}`.
    pub fn show(&self, set: &StateSet) -> String {
        let names: Vec<&str> = set.iter().map(|i| self.state_name(i)).collect();
        format!("{{{}}}", names.join(", "))
    }

    /// All subsets of `S`, in mask order. Requires `|S| < 64`.
    pub fn subsets(&self) -> impl Iterator<Item = StateSet> + '_ {
        let n = self.len();
        (0..1u64 << n).map(move |m| StateSet::from_mask(n, m))
    }
}

/// `ρ : Var → P(S)`, total through the `∅` default.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Environment {
    map: BTreeMap<Var, StateSet>,
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, x: &Var, m: &TransitionSystem) -> StateSet {
        self.map.get(x).cloned().unwrap_or_else(|| m.empty_set())
    }

    pub fn set(&mut self, x: Var, value: StateSet) {
        self.map.insert(x, value);
    }

    pub fn with(&self, x: &Var, value: StateSet) -> Self {
        let mut e = self.clone();
        e.set(x.clone(), value);
        e
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &StateSet)> {
        self.map.iter()
    }

    /// Keeps only the bindings of `vars`.
    pub fn restrict(&self, vars: &BTreeSet<Var>) -> Self {
        Environment {
            map: self
                .map
                .iter()
                .filter(|(k, _)| vars.contains(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn show(&self, m: &TransitionSystem) -> String {
        let parts: Vec<String> = self
            .map
            .iter()
            .map(|(x, s)| format!("{x} = {}", m.show(s)))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}
