//! Test oracles, enumerators and generators shared by the test suites.
//!
//! Nothing here is used by the library itself. The positivity oracle is a
//! bottom-up closure over the rules of the positivity proof system and shares
//! no code with `muwb_core::syntax::pos_in`.

use std::collections::{BTreeSet, HashMap};

use muwb_core::parser::parse_formula_with;
use muwb_core::syntax::{is_wf, Preformula, Var};
use rand::seq::SliceRandom;
use rand::Rng;

pub const VARS: [&str; 2] = ["x", "y"];
pub const ATOM: &str = "p";
pub const ACTION: &str = "a";

pub fn var_set(names: &[&str]) -> BTreeSet<Var> {
    names.iter().map(|v| Var::from(*v)).collect()
}

/// Every preformula with at most `max` connectives over the variables
/// `x, y`, the atom `p`, `ff` and the action `a`. Connectives are `~`, `->`,
/// `[a]` and `mu`.
pub fn enumerate_preformulas(max: usize) -> Vec<Preformula> {
    let mut by_size: Vec<Vec<Preformula>> = Vec::with_capacity(max + 1);
    let mut leaves = vec![Preformula::atom(ATOM), Preformula::Ff];
    leaves.extend(VARS.iter().map(|v| Preformula::var(*v)));
    by_size.push(leaves);
    for n in 1..=max {
        let mut level = Vec::new();
        for b in &by_size[n - 1] {
            level.push(Preformula::not(b.clone()));
            level.push(Preformula::boxed(ACTION, b.clone()));
            for v in VARS {
                level.push(Preformula::mu(v, b.clone()));
            }
        }
        for left in 0..n {
            let right = n - 1 - left;
            for l in &by_size[left] {
                for r in &by_size[right] {
                    level.push(Preformula::imp(l.clone(), r.clone()));
                }
            }
        }
        by_size.push(level);
    }
    by_size.into_iter().flatten().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Judgement {
    Pos,
    Neg,
}

/// Derivability in the positivity proof system, decided by saturation.
///
/// The `mu` rules quantify over every variable `z ≠ x`; the oracle ranges `z`
/// over a finite pool made of the enumeration variables and `extra` further
/// names that occur nowhere in the input.
pub struct PositivityOracle {
    pool: Vec<Var>,
}

impl Default for PositivityOracle {
    fn default() -> Self {
        Self::new(&["w0", "w1"])
    }
}

impl PositivityOracle {
    pub fn new(extra: &[&str]) -> Self {
        let mut pool: Vec<Var> = VARS.iter().map(|v| Var::from(*v)).collect();
        pool.extend(extra.iter().map(|v| Var::from(*v)));
        PositivityOracle { pool }
    }

    pub fn derivable(&self, judgement: Judgement, x: &Var, phi: &Preformula) -> bool {
        let mut universe = Universe::default();
        let root = universe.close(phi, x, &self.pool);
        let facts = universe.saturate(x);
        facts.contains(&(judgement, root))
    }

    pub fn pos_in(&self, x: &Var, phi: &Preformula) -> bool {
        self.derivable(Judgement::Pos, x, phi)
    }

    pub fn neg_in(&self, x: &Var, phi: &Preformula) -> bool {
        self.derivable(Judgement::Neg, x, phi)
    }
}

/// Premises of each formula in the closure, by index.
enum Shape {
    Leaf(Preformula),
    Not(usize),
    Imp(usize, usize),
    Box(usize),
    Mu(Vec<usize>),
}

#[derive(Default)]
struct Universe {
    index: HashMap<String, usize>,
    shapes: Vec<Shape>,
}

impl Universe {
    fn close(&mut self, phi: &Preformula, x: &Var, pool: &[Var]) -> usize {
        // structural identity, not alpha
        let key = format!("{phi:?}");
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let shape = match phi {
            Preformula::Atom(_) | Preformula::Ff | Preformula::Var(_) => Shape::Leaf(phi.clone()),
            Preformula::Not(b) => Shape::Not(self.close(b, x, pool)),
            Preformula::Imp(l, r) => {
                let l = self.close(l, x, pool);
                Shape::Imp(l, self.close(r, x, pool))
            }
            Preformula::Box(_, b) => Shape::Box(self.close(b, x, pool)),
            Preformula::Mu(y, b) => {
                let instances = pool
                    .iter()
                    .filter(|z| *z != x)
                    .map(|z| self.close(&rename(b, y, z), x, pool))
                    .collect();
                Shape::Mu(instances)
            }
        };
        let i = self.shapes.len();
        self.shapes.push(shape);
        self.index.insert(key, i);
        i
    }

    fn saturate(&self, x: &Var) -> BTreeSet<(Judgement, usize)> {
        use Judgement::{Neg, Pos};
        let mut facts = BTreeSet::new();
        loop {
            let before = facts.len();
            for (i, shape) in self.shapes.iter().enumerate() {
                for j in [Pos, Neg] {
                    let other = if j == Pos { Neg } else { Pos };
                    let holds = match shape {
                        // PosinP, NeginP; ff treated as an atom
                        Shape::Leaf(Preformula::Atom(_) | Preformula::Ff) => true,
                        // PosinY, NeginY
                        Shape::Leaf(Preformula::Var(y)) => j == Pos || y != x,
                        Shape::Leaf(_) => unreachable!(),
                        Shape::Not(b) => facts.contains(&(other, *b)),
                        Shape::Imp(l, r) => facts.contains(&(other, *l)) && facts.contains(&(j, *r)),
                        Shape::Box(b) => facts.contains(&(j, *b)),
                        Shape::Mu(inst) => inst.iter().all(|k| facts.contains(&(j, *k))),
                    };
                    if holds {
                        facts.insert((j, i));
                    }
                }
            }
            if facts.len() == before {
                return facts;
            }
        }
    }
}

fn names_in(phi: &Preformula, out: &mut BTreeSet<Var>) {
    match phi {
        Preformula::Var(v) => {
            out.insert(v.clone());
        }
        Preformula::Mu(v, b) => {
            out.insert(v.clone());
            names_in(b, out);
        }
        Preformula::Not(b) | Preformula::Box(_, b) => names_in(b, out),
        Preformula::Imp(l, r) => {
            names_in(l, out);
            names_in(r, out);
        }
        Preformula::Atom(_) | Preformula::Ff => {}
    }
}

fn occurs_free(y: &Var, phi: &Preformula) -> bool {
    match phi {
        Preformula::Var(v) => v == y,
        Preformula::Mu(v, b) => v != y && occurs_free(y, b),
        Preformula::Not(b) | Preformula::Box(_, b) => occurs_free(y, b),
        Preformula::Imp(l, r) => occurs_free(y, l) || occurs_free(y, r),
        Preformula::Atom(_) | Preformula::Ff => false,
    }
}

/// `phi[z/y]`, renaming inner binders named `z` out of the way.
pub fn rename(phi: &Preformula, y: &Var, z: &Var) -> Preformula {
    match phi {
        Preformula::Var(v) if v == y => Preformula::Var(z.clone()),
        Preformula::Atom(_) | Preformula::Ff | Preformula::Var(_) => phi.clone(),
        Preformula::Not(b) => Preformula::not(rename(b, y, z)),
        Preformula::Imp(l, r) => Preformula::imp(rename(l, y, z), rename(r, y, z)),
        Preformula::Box(a, b) => Preformula::boxed(a.clone(), rename(b, y, z)),
        Preformula::Mu(v, _) if v == y => phi.clone(),
        Preformula::Mu(v, b) if v == z && occurs_free(y, b) => {
            let mut used = BTreeSet::new();
            names_in(b, &mut used);
            used.insert(y.clone());
            used.insert(z.clone());
            let w = (0..)
                .map(|i| Var::from(format!("u{i}")))
                .find(|w| !used.contains(w))
                .expect("unbounded supply");
            Preformula::mu(w.clone(), rename(&rename(b, v, &w), y, z))
        }
        Preformula::Mu(v, b) => Preformula::mu(v.clone(), rename(b, y, z)),
    }
}

/// Alphabet for random formulas.
#[derive(Clone, Debug)]
pub struct Alphabet {
    pub vars: Vec<&'static str>,
    pub atoms: Vec<&'static str>,
    pub actions: Vec<&'static str>,
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet {
            vars: vec!["x", "y", "z"],
            atoms: vec!["p", "q"],
            actions: vec!["a", "b"],
        }
    }
}

/// A random preformula of depth at most `depth`, using the derived
/// connectives as well as the primitive ones.
pub fn random_preformula<R: Rng>(rng: &mut R, depth: usize, alphabet: &Alphabet) -> Preformula {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..6) {
            0 => Preformula::Ff,
            1 | 2 => Preformula::atom(*alphabet.atoms.choose(rng).expect("atoms")),
            _ => Preformula::var(*alphabet.vars.choose(rng).expect("vars")),
        };
    }
    let d = depth - 1;
    let var = *alphabet.vars.choose(rng).expect("vars");
    let act = *alphabet.actions.choose(rng).expect("actions");
    match rng.gen_range(0..10) {
        0 | 1 => Preformula::not(random_preformula(rng, d, alphabet)),
        2 | 3 => Preformula::imp(random_preformula(rng, d, alphabet), random_preformula(rng, d, alphabet)),
        4 => Preformula::boxed(act, random_preformula(rng, d, alphabet)),
        5 => Preformula::diamond(act, random_preformula(rng, d, alphabet)),
        6 => Preformula::and(random_preformula(rng, d, alphabet), random_preformula(rng, d, alphabet)),
        7 => Preformula::or(random_preformula(rng, d, alphabet), random_preformula(rng, d, alphabet)),
        8 => Preformula::mu(var, random_preformula(rng, d, alphabet)),
        _ => Preformula::nu(var, random_preformula(rng, d, alphabet)),
    }
}

/// A random well-formed formula, by rejection. Falls back to an atom.
pub fn random_wf<R: Rng>(rng: &mut R, depth: usize, alphabet: &Alphabet) -> Preformula {
    for _ in 0..1000 {
        let phi = random_preformula(rng, depth, alphabet);
        if is_wf(&phi) {
            return phi;
        }
    }
    Preformula::atom(alphabet.atoms[0])
}

/// Fifty well-formed formulas over atoms `p, q, A`, actions `a, b` and free
/// variables `x, y`, covering nested fixpoints of both kinds.
pub const FORMULA_CORPUS: [&str; 50] = [
    "p",
    "ff",
    "tt",
    "x",
    "~x",
    "p -> x",
    "x -> y",
    "[a] x",
    "<a> x",
    "[a] ff",
    "mu x . x",
    "mu x . ~~x",
    "mu x . p",
    "mu x . ~x -> x",
    "mu x . A -> x",
    "(A -> mu x . A -> x) -> mu x . A -> x",
    "mu x . ~p -> [a] x",
    "mu x . p | x",
    "mu x . p | <a> x",
    "mu x . p | [a] x",
    "mu x . [a] x",
    "mu x . [a] ff | <b> x",
    "mu x . (x -> ff) -> p",
    "mu x . y -> x",
    "mu x . (y -> x) & [a] y",
    "mu x . ~(~x & ~p)",
    "mu x . p & q | [a] [b] x",
    "nu x . x",
    "nu x . [a] x",
    "nu x . <a> x",
    "nu x . p & [a] x",
    "nu x . p & <a> x",
    "nu x . ~y | [b] x",
    "nu x . (p -> <a> x) & [b] x",
    "~(mu x . ~p & [a] x)",
    "[a] (mu x . p | [b] x)",
    "<a> (nu x . q & [a] x)",
    "mu x . mu y . x | y | p",
    "mu x . mu x . x",
    "mu x . [a] (mu y . x | [b] y)",
    "nu x . mu y . p & [a] x | [a] y",
    "mu x . nu y . (p | [a] x) & [b] y",
    "nu x . (mu y . [a] y) & x",
    "nu x . mu y . (q & <a> x) | <b> y",
    "mu x . ~(nu y . ~x & [a] y)",
    "mu x . y | <a> (nu z . x & [b] z)",
    "nu x . mu y . nu z . (p & [a] x) | (q & [a] y) | [b] z",
    "mu x . (mu y . [a] y) -> x",
    "nu x . (mu y . p | <a> y) & [b] x",
    "mu x . nu y . y & (x | p)",
];

/// The corpus parsed with `x` and `y` read as variables.
pub fn formula_corpus() -> Vec<Preformula> {
    let vars = var_set(&VARS);
    FORMULA_CORPUS
        .iter()
        .map(|s| parse_formula_with(s, &vars).unwrap_or_else(|e| panic!("corpus formula {s:?}: {e}")))
        .collect()
}
