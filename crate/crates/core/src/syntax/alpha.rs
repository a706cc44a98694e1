use super::{ActionId, AtomId, Preformula, Var};

/// Locally nameless form: bound variables become de Bruijn indices, free
/// variables keep their names. Two preformulae are α-equivalent iff their
/// nameless forms are identical.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Nameless {
    Atom(AtomId),
    Ff,
    Not(Box<Nameless>),
    Imp(Box<Nameless>, Box<Nameless>),
    Box(ActionId, Box<Nameless>),
    Bound(usize),
    Free(Var),
    Mu(Box<Nameless>),
}

impl From<&Preformula> for Nameless {
    fn from(phi: &Preformula) -> Self {
        fn go(phi: &Preformula, scope: &mut Vec<Var>) -> Nameless {
            match phi {
                Preformula::Atom(p) => Nameless::Atom(p.clone()),
                Preformula::Ff => Nameless::Ff,
                Preformula::Not(b) => Nameless::Not(Box::new(go(b, scope))),
                Preformula::Imp(l, r) => {
                    Nameless::Imp(Box::new(go(l, scope)), Box::new(go(r, scope)))
                }
                Preformula::Box(a, b) => Nameless::Box(a.clone(), Box::new(go(b, scope))),
                Preformula::Var(x) => match scope.iter().rev().position(|y| y == x) {
                    Some(i) => Nameless::Bound(i),
                    None => Nameless::Free(x.clone()),
                },
                Preformula::Mu(x, b) => {
                    scope.push(x.clone());
                    let body = go(b, scope);
                    scope.pop();
                    Nameless::Mu(Box::new(body))
                }
            }
        }
        go(phi, &mut Vec::new())
    }
}

/// α-equivalence: equal up to renaming of bound variables.
pub fn alpha_eq(phi: &Preformula, psi: &Preformula) -> bool {
    // Walk both terms in lockstep with parallel binder stacks; avoids
    // allocating the nameless forms.
    fn go<'a>(
        phi: &'a Preformula,
        psi: &'a Preformula,
        left: &mut Vec<&'a Var>,
        right: &mut Vec<&'a Var>,
    ) -> bool {
        match (phi, psi) {
            (Preformula::Atom(p), Preformula::Atom(q)) => p == q,
            (Preformula::Ff, Preformula::Ff) => true,
            (Preformula::Not(a), Preformula::Not(b)) => go(a, b, left, right),
            (Preformula::Imp(a1, a2), Preformula::Imp(b1, b2)) => {
                go(a1, b1, left, right) && go(a2, b2, left, right)
            }
            (Preformula::Box(a, f), Preformula::Box(b, g)) => a == b && go(f, g, left, right),
            (Preformula::Var(x), Preformula::Var(y)) => {
                let i = left.iter().rev().position(|v| *v == x);
                let j = right.iter().rev().position(|v| *v == y);
                match (i, j) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Preformula::Mu(x, f), Preformula::Mu(y, g)) => {
                left.push(x);
                right.push(y);
                let eq = go(f, g, left, right);
                left.pop();
                right.pop();
                eq
            }
            _ => false,
        }
    }
    go(phi, psi, &mut Vec::new(), &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renamed_binders_are_equal() {
        let a = Preformula::mu("x", Preformula::var("x"));
        let b = Preformula::mu("y", Preformula::var("y"));
        assert!(alpha_eq(&a, &b));
        assert_eq!(Nameless::from(&a), Nameless::from(&b));
    }

    #[test]
    fn different_bodies_differ() {
        let a = Preformula::mu("x", Preformula::var("x"));
        let b = Preformula::mu("x", Preformula::not(Preformula::var("x")));
        assert!(!alpha_eq(&a, &b));
    }

    #[test]
    fn distinct_free_variables_differ() {
        assert!(!alpha_eq(&Preformula::var("x"), &Preformula::var("y")));
    }

    #[test]
    fn bound_does_not_match_free() {
        // μx.y vs μy.y: the first has y free, the second does not
        let a = Preformula::mu("x", Preformula::var("y"));
        let b = Preformula::mu("y", Preformula::var("y"));
        assert!(!alpha_eq(&a, &b));
        assert_ne!(Nameless::from(&a), Nameless::from(&b));
    }

    #[test]
    fn shadowing_resolves_to_innermost() {
        let a = Preformula::mu("x", Preformula::mu("x", Preformula::var("x")));
        let b = Preformula::mu("y", Preformula::mu("z", Preformula::var("z")));
        let c = Preformula::mu("y", Preformula::mu("z", Preformula::var("y")));
        assert!(alpha_eq(&a, &b));
        assert!(!alpha_eq(&a, &c));
    }
}
