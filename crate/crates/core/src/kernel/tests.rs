use super::*;
use crate::kernel::corpus::simple;
use crate::parser::parse_formula;
use crate::syntax::mk_wf;

fn f(s: &str) -> WfFormula {
    mk_wf(parse_formula(s).unwrap()).unwrap()
}

fn seq(hyps: &[&str], c: &str) -> Sequent {
    Sequent::new(hyps.iter().map(|h| f(h)), f(c))
}

fn hyp(hyps: &[&str], c: &str) -> Derivation {
    Derivation::new(Rule::Hyp, vec![], seq(hyps, c))
}

fn reason(d: &Derivation) -> &'static str {
    check(d).unwrap_err().reason.kind()
}

#[test]
fn hyp_accepts_member() {
    assert!(check(&hyp(&["p"], "p")).is_ok());
    assert_eq!(reason(&hyp(&["q"], "p")), "NotInContext");
}

#[test]
fn hyp_matches_up_to_alpha() {
    assert!(check(&hyp(&["mu x . [a] x"], "mu y . [a] y")).is_ok());
}

#[test]
fn simple_lemma() {
    let d = simple();
    let s = check(&d).unwrap();
    assert_eq!(s, seq(&["A -> mu x . A -> x"], "mu x . A -> x"));
}

#[test]
fn box_i_needs_empty_context() {
    let d = Derivation::new(
        Rule::BoxI("a".into()),
        vec![hyp(&["p"], "p")],
        seq(&["p"], "[a] p"),
    );
    let err = check(&d).unwrap_err();
    assert_eq!(err.reason, Reason::NonEmptyContext);
    assert_eq!(err.path, Vec::<usize>::new());
    assert_eq!(err.rule, "BoxI");
}

#[test]
fn box_i_concludes_in_any_context() {
    let inner = Derivation::new(
        Rule::ImpI,
        vec![hyp(&["p"], "p")],
        seq(&[], "p -> p"),
    );
    let d = Derivation::new(Rule::BoxI("a".into()), vec![inner], seq(&["q", "r"], "[a] (p -> p)"));
    assert!(check(&d).is_ok());
}

#[test]
fn box_i_action_must_match() {
    let inner = Derivation::new(Rule::ImpI, vec![hyp(&["p"], "p")], seq(&[], "p -> p"));
    let d = Derivation::new(Rule::BoxI("b".into()), vec![inner], seq(&[], "[a] (p -> p)"));
    assert_eq!(reason(&d), "Parameter");
}

#[test]
fn mu_e_rejects_extra_hypothesis() {
    let d = Derivation::new(
        Rule::MuE(f("mu x . x")),
        vec![hyp(&["mu x . x"], "mu x . x"), hyp(&["ff", "p"], "ff")],
        seq(&["mu x . x"], "ff"),
    );
    let err = check(&d).unwrap_err();
    assert!(matches!(err.reason, Reason::WrongHypotheses { .. }));
}

#[test]
fn mu_e_accepts_exact_hypothesis() {
    let d = Derivation::new(
        Rule::MuE(f("mu x . x")),
        vec![hyp(&["mu x . x"], "mu x . x"), hyp(&["ff"], "ff")],
        seq(&["mu x . x"], "ff"),
    );
    assert!(check(&d).is_ok());
}

#[test]
fn mu_e_parameter_must_be_mu() {
    let d = Derivation::new(
        Rule::MuE(f("p")),
        vec![hyp(&["p"], "p"), hyp(&["ff"], "ff")],
        seq(&["p"], "ff"),
    );
    assert_eq!(reason(&d), "Parameter");
}

#[test]
fn mu_i_rejects_wrong_unfolding() {
    // premise should be A -> mu x . A -> x; give A -> A instead
    let d = Derivation::new(
        Rule::MuI,
        vec![hyp(&["A -> A"], "A -> A")],
        seq(&["A -> A"], "mu x . A -> x"),
    );
    assert_eq!(reason(&d), "WrongUnfolding");
}

#[test]
fn premise_count_is_checked() {
    let d = Derivation::new(Rule::ImpE(f("p")), vec![hyp(&["p"], "p")], seq(&["p"], "p"));
    assert_eq!(reason(&d), "PremiseCount");
}

#[test]
fn error_path_points_into_tree() {
    let bad_leaf = hyp(&["A -> mu x . A -> x"], "A");
    let d = Derivation::new(
        Rule::MuI,
        vec![bad_leaf],
        seq(&["A -> mu x . A -> x"], "mu x . A -> x"),
    );
    // root fails first: premise conclusion is not the unfolding
    assert_eq!(check(&d).unwrap_err().path, Vec::<usize>::new());

    let imp = Derivation::new(
        Rule::ImpI,
        vec![hyp(&["p"], "q")],
        seq(&[], "p -> q"),
    );
    let err = check(&imp).unwrap_err();
    assert_eq!(err.path, vec![0]);
    assert_eq!(err.rule, "Hyp");
}

#[test]
fn weaken_requires_subset() {
    let d = Derivation::new(Rule::Weaken, vec![hyp(&["p"], "p")], seq(&["p", "q"], "p"));
    assert!(check(&d).is_ok());
    let d = Derivation::new(Rule::Weaken, vec![hyp(&["p", "r"], "p")], seq(&["p", "q"], "p"));
    assert_eq!(reason(&d), "NotSubset");
}

#[test]
fn raw_gate_rejects_ill_formed() {
    let mut raw = RawDerivation::from(&simple());
    raw.premises[0].hyps.push(parse_formula("mu x . ~x").unwrap());
    let err = raw::check_raw(&raw).unwrap_err();
    assert_eq!(err.path, vec![0]);
    assert!(matches!(err.reason, Reason::IllFormed(_)));
}

#[test]
fn raw_round_trip_checks() {
    let raw = RawDerivation::from(&simple());
    let json = serde_json::to_string(&raw).unwrap();
    let back: RawDerivation = serde_json::from_str(&json).unwrap();
    assert!(raw::check_raw(&back).is_ok());
}

#[test]
fn contexts_are_sets_up_to_alpha() {
    let c: Context = [f("mu x . x"), f("mu y . y"), f("p")].into_iter().collect();
    assert_eq!(c.len(), 2);
    let d: Context = [f("p"), f("mu z . z")].into_iter().collect();
    assert_eq!(c, d);
}
