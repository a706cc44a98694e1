//! Hand-built golden derivations, together covering every rule.

use super::{Derivation, Rule, Sequent};
use crate::parser::parse_formula;
use crate::syntax::{mk_wf, WfFormula};

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub derivation: Derivation,
    pub expected: Sequent,
}

fn f(text: &str) -> WfFormula {
    mk_wf(parse_formula(text).expect("corpus formula parses")).expect("corpus formula is wf")
}

fn seq(hyps: &[&str], concl: &str) -> Sequent {
    Sequent::new(hyps.iter().map(|h| f(h)), f(concl))
}

fn node(rule: Rule, premises: Vec<Derivation>, hyps: &[&str], concl: &str) -> Derivation {
    Derivation::new(rule, premises, seq(hyps, concl))
}

fn hyp(hyps: &[&str], concl: &str) -> Derivation {
    node(Rule::Hyp, vec![], hyps, concl)
}

fn entry(name: &'static str, derivation: Derivation) -> CorpusEntry {
    let expected = derivation.concl.clone();
    CorpusEntry {
        name,
        derivation,
        expected,
    }
}

const FIX: &str = "mu x . A -> x";
const UNFOLDED: &str = "A -> mu x . A -> x";

/// `A ⊃ μx(A⊃x) ⊢ μx(A⊃x)`: one `μ`-introduction, after which the goal is
/// literally the hypothesis.
pub fn simple() -> Derivation {
    node(Rule::MuI, vec![hyp(&[UNFOLDED], UNFOLDED)], &[UNFOLDED], FIX)
}

fn box_taut() -> Derivation {
    node(
        Rule::BoxI("a".into()),
        vec![node(Rule::ImpI, vec![hyp(&["p"], "p")], &[], "p -> p")],
        &[],
        "[a] (p -> p)",
    )
}

/// At least one derivation per rule. Every entry checks.
pub fn derive_nu_unfold_test_corpus() -> Vec<CorpusEntry> {
    let mut out = vec![
        entry("simple", simple()),
        entry(
            "simple_closed",
            node(Rule::ImpI, vec![simple()], &[], &format!("({UNFOLDED}) -> {FIX}")),
        ),
        entry("box_taut", box_taut()),
        entry(
            "ff_elim",
            node(Rule::FfE, vec![hyp(&["ff"], "ff")], &["ff"], "[a] q"),
        ),
        entry(
            "modus_ponens",
            node(
                Rule::ImpE(f("p")),
                vec![hyp(&["p -> q", "p"], "p -> q"), hyp(&["p -> q", "p"], "p")],
                &["p -> q", "p"],
                "q",
            ),
        ),
    ];

    let g = ["~~p", "~p"];
    out.push(entry(
        "double_negation",
        node(
            Rule::Raa,
            vec![node(
                Rule::FfI(f("~p")),
                vec![hyp(&g, "~p"), hyp(&g, "~~p")],
                &g,
                "ff",
            )],
            &["~~p"],
            "p",
        ),
    ));

    let g = ["p", "~p"];
    out.push(entry(
        "double_negation_intro",
        node(
            Rule::NotI,
            vec![node(Rule::FfI(f("p")), vec![hyp(&g, "p"), hyp(&g, "~p")], &g, "ff")],
            &["p"],
            "~~p",
        ),
    ));

    let g = ["[a] (p -> q)", "[a] p"];
    out.push(entry(
        "k_axiom",
        node(
            Rule::K("a".into(), f("p")),
            vec![hyp(&g, "[a] (p -> q)"), hyp(&g, "[a] p")],
            &g,
            "[a] q",
        ),
    ));

    // {[a]p} ⊢ [a](q ⊃ p): necessitation of p ⊃ q ⊃ p, then K
    out.push(entry(
        "box_monotone",
        node(
            Rule::K("a".into(), f("p")),
            vec![
                node(
                    Rule::BoxI("a".into()),
                    vec![node(
                        Rule::ImpI,
                        vec![node(Rule::ImpI, vec![hyp(&["p", "q"], "p")], &["p"], "q -> p")],
                        &[],
                        "p -> q -> p",
                    )],
                    &["[a] p"],
                    "[a] (p -> q -> p)",
                ),
                hyp(&["[a] p"], "[a] p"),
            ],
            &["[a] p"],
            "[a] (q -> p)",
        ),
    ));

    out.push(entry(
        "weaken_box",
        node(Rule::Weaken, vec![box_taut()], &["p", "q"], "[a] (p -> p)"),
    ));

    // μx.x is the empty set: it proves anything by induction with ψ = ff
    out.push(entry(
        "mu_bottom",
        node(
            Rule::MuE(f("mu x . x")),
            vec![hyp(&["mu x . x"], "mu x . x"), hyp(&["ff"], "ff")],
            &["mu x . x"],
            "ff",
        ),
    ));

    // μx(A⊃x) ⊢ ¬A by induction with ψ = ¬A
    let step = ["A -> ~A", "A"];
    out.push(entry(
        "mu_induction",
        node(
            Rule::MuE(f(FIX)),
            vec![
                hyp(&[FIX], FIX),
                node(
                    Rule::NotI,
                    vec![node(
                        Rule::FfI(f("A")),
                        vec![
                            hyp(&step, "A"),
                            node(
                                Rule::ImpE(f("A")),
                                vec![hyp(&step, "A -> ~A"), hyp(&step, "A")],
                                &step,
                                "~A",
                            ),
                        ],
                        &step,
                        "ff",
                    )],
                    &["A -> ~A"],
                    "~A",
                ),
            ],
            &[FIX],
            "~A",
        ),
    ));

    // νx.[a]x ⊢ [a]νx.[a]x, with νx.[a]x = ¬μx.¬[a]¬x
    let m = "mu x . ~[a] ~x";
    let nu = "~(mu x . ~[a] ~x)";
    let boxed_nu = "[a] ~(mu x . ~[a] ~x)";
    let g = [nu, "~[a] ~(mu x . ~[a] ~x)"];
    out.push(entry(
        "nu_unfold",
        node(
            Rule::Raa,
            vec![node(
                Rule::FfI(f(m)),
                vec![
                    node(Rule::MuI, vec![hyp(&g, "~[a] ~(mu x . ~[a] ~x)")], &g, m),
                    hyp(&g, nu),
                ],
                &g,
                "ff",
            )],
            &[nu],
            boxed_nu,
        ),
    ));

    out
}
