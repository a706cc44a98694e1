use std::collections::BTreeSet;

use crate::syntax::{subst, NamePool, Preformula, Var};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Position {
    /// Right of `->`, body of a binder, or the whole formula.
    Open,
    /// Left of `->`.
    Antecedent,
    /// Operand of `~` or `[a]`.
    Prefix,
}

/// Prints with minimal parentheses; `parse_formula` inverts this up to α.
///
/// A binder whose name clashes with an atomic proposition in its scope is
/// renamed, since the reader would otherwise take the atom for the variable.
pub fn print_formula(phi: &Preformula) -> String {
    let mut out = String::new();
    let atoms: BTreeSet<String> = phi.atoms().into_iter().map(|a| a.as_str().to_owned()).collect();
    write(phi, Position::Open, &atoms, &mut out);
    out
}

fn write(phi: &Preformula, pos: Position, atoms: &BTreeSet<String>, out: &mut String) {
    match phi {
        Preformula::Atom(p) => out.push_str(p.as_str()),
        Preformula::Ff => out.push_str("ff"),
        Preformula::Var(x) => out.push_str(x.as_str()),
        Preformula::Not(b) => {
            out.push('~');
            write(b, Position::Prefix, atoms, out);
        }
        Preformula::Box(a, b) => {
            out.push('[');
            out.push_str(a.as_str());
            out.push_str("] ");
            write(b, Position::Prefix, atoms, out);
        }
        Preformula::Imp(l, r) => {
            let paren = pos != Position::Open;
            if paren {
                out.push('(');
            }
            write(l, Position::Antecedent, atoms, out);
            out.push_str(" -> ");
            write(r, Position::Open, atoms, out);
            if paren {
                out.push(')');
            }
        }
        Preformula::Mu(x, b) => {
            let paren = pos != Position::Open;
            if paren {
                out.push('(');
            }
            let (x, body) = printable_binder(x, b, atoms);
            out.push_str("mu ");
            out.push_str(x.as_str());
            out.push_str(" . ");
            write(&body, Position::Open, atoms, out);
            if paren {
                out.push(')');
            }
        }
    }
}

fn printable_binder(x: &Var, body: &Preformula, atoms: &BTreeSet<String>) -> (Var, Preformula) {
    let clashes = atoms.contains(x.as_str())
        || super::lexer::KEYWORDS.contains(&x.as_str())
        || !x.as_str().starts_with(super::lexer::is_ident_start);
    if !clashes {
        return (x.clone(), body.clone());
    }
    let mut avoid = body.all_vars();
    avoid.extend(atoms.iter().map(|a| Var::from(a.as_str())));
    let pool = NamePool::default();
    let z = pool.fresh(&avoid);
    let renamed = subst(body, x, &Preformula::Var(z.clone()));
    (z, renamed)
}
