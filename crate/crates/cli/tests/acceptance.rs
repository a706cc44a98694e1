//! Acceptance suite: one PASS/FAIL line per criterion, with its time limit.
//!
//! Run with `cargo test -p muwb-cli --test acceptance`.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use muwb_cli::soundness::{violations, Battery};
use muwb_core::kernel::{
    check, check_raw, derive_nu_unfold_test_corpus, Derivation, RawDerivation, Rule, Sequent,
};
use muwb_core::parser::{parse_formula, parse_formula_with, parse_script, print_formula};
use muwb_core::semantics::oracle::eval_oracle;
use muwb_core::semantics::{
    check_antimonotone, check_monotone, environments, eval, eval_mu_oracle, random_model, random_models, BatterySpec,
    Bounds, Environment, StateSet,
};
use muwb_core::session::replay;
use muwb_core::syntax::{free_vars, is_in, mk_wf, neg_in, not_in, pos_in, Preformula, Var, WfFormula};
use muwb_testkit::{
    enumerate_preformulas, formula_corpus, random_preformula, random_wf, Alphabet, PositivityOracle, VARS,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x6d75_7762;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn vars() -> Vec<Var> {
    VARS.iter().map(|v| Var::from(*v)).collect()
}

fn positivity_oracle() -> Outcome {
    let oracle = PositivityOracle::default();
    let corpus = enumerate_preformulas(3);
    let mut mismatches = Vec::new();
    for phi in &corpus {
        for x in vars() {
            if pos_in(&x, phi) != oracle.pos_in(&x, phi) {
                mismatches.push(format!("pos_in({x}, {})", print_formula(phi)));
            }
            if neg_in(&x, phi) != oracle.neg_in(&x, phi) {
                mismatches.push(format!("neg_in({x}, {})", print_formula(phi)));
            }
        }
    }
    let first = mismatches.first().map(|m| format!(", first {m}")).unwrap_or_default();
    outcome(
        mismatches.is_empty(),
        format!("{} preformulas x 2 variables, {} mismatches{first}", corpus.len(), mismatches.len()),
    )
}

fn fixpoint_oracle() -> Outcome {
    let corpus = formula_corpus();
    let spec = BatterySpec::new(
        3,
        vec!["p".into(), "q".into(), "A".into(), "P".into()],
        vec!["a".into(), "b".into()],
    );
    let models = random_models(SEED, 25, &spec);
    let bounds = Bounds::default();
    let mut cases = 0usize;
    let mut mismatches = Vec::new();
    for phi in &corpus {
        let fv = free_vars(phi);
        for m in &models {
            for env in environments(m, &fv, &bounds).expect("small") {
                let iterated = eval(m, &env, phi).expect("corpus is wf");
                let oracle = match phi {
                    Preformula::Mu(x, body) => eval_mu_oracle(m, &env, x, body, &bounds),
                    _ => eval_oracle(m, &env, phi, &bounds),
                }
                .expect("small");
                cases += 1;
                if iterated != oracle {
                    mismatches.push(print_formula(phi));
                }
            }
        }
    }
    outcome(
        mismatches.is_empty() && corpus.len() == 50,
        format!(
            "{} formulas x 25 models x all environments = {cases} cases, {} mismatches",
            corpus.len(),
            mismatches.len()
        ),
    )
}

fn random_env<R: Rng>(rng: &mut R, n: usize, vars: &[&str]) -> Environment {
    let mut env = Environment::new();
    for v in vars {
        env.set(Var::from(*v), StateSet::from_mask(n, rng.gen_range(0..1u64 << n)));
    }
    env
}

fn monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let alphabet = Alphabet::default();
    let spec = BatterySpec::new(3, vec!["p".into(), "q".into()], vec!["a".into(), "b".into()]);
    let bounds = Bounds::default();
    let mut mono_violations = 0;
    let mut anti_violations = 0;
    let mut vacuous = 0;
    for positive in [true, false] {
        let mut trials = 0;
        while trials < 1000 {
            let phi = random_wf(&mut rng, 4, &alphabet);
            let x = Var::from(alphabet.vars[rng.gen_range(0..alphabet.vars.len())]);
            let judged = if positive { pos_in(&x, &phi) } else { neg_in(&x, &phi) };
            if !judged {
                continue;
            }
            if not_in(&x, &phi) {
                vacuous += 1;
            }
            trials += 1;
            let m = random_model(&mut rng, &spec);
            let env = random_env(&mut rng, m.len(), &alphabet.vars);
            let ok = if positive {
                check_monotone(&m, &env, &x, &phi, &bounds)
            } else {
                check_antimonotone(&m, &env, &x, &phi, &bounds)
            }
            .expect("small");
            if !ok {
                if positive {
                    mono_violations += 1;
                } else {
                    anti_violations += 1;
                }
            }
        }
    }
    outcome(
        mono_violations == 0 && anti_violations == 0,
        format!(
            "1000 pos_in trials, {mono_violations} monotonicity violations; 1000 neg_in trials, \
             {anti_violations} antimonotonicity violations ({vacuous} trials without an occurrence)"
        ),
    )
}

fn occurrence_laws() -> Outcome {
    let corpus = enumerate_preformulas(3);
    let mut law = 0;
    let mut separation = 0;
    for phi in &corpus {
        for x in vars() {
            if (pos_in(&x, phi) && neg_in(&x, phi)) != not_in(&x, phi) {
                law += 1;
            }
            for y in vars() {
                if not_in(&x, phi) && is_in(&y, phi) && x == y {
                    separation += 1;
                }
            }
        }
    }
    outcome(
        law == 0 && separation == 0,
        format!(
            "{} preformulas, {law} failures of pos_in & neg_in <=> not_in, {separation} separation failures",
            corpus.len()
        ),
    )
}

fn wf(s: &str) -> WfFormula {
    mk_wf(parse_formula(s).unwrap()).unwrap()
}

fn seq(hyps: &[&str], c: &str) -> Sequent {
    Sequent::new(hyps.iter().map(|h| wf(h)), wf(c))
}

fn node(rule: Rule, premises: Vec<Derivation>, hyps: &[&str], c: &str) -> Derivation {
    Derivation::new(rule, premises, seq(hyps, c))
}

fn hyp(hyps: &[&str], c: &str) -> Derivation {
    node(Rule::Hyp, vec![], hyps, c)
}

const FIX: &str = "mu x . A -> x";
const UNFOLDED: &str = "A -> mu x . A -> x";

fn golden_simple() -> Derivation {
    node(Rule::MuI, vec![hyp(&[UNFOLDED], UNFOLDED)], &[UNFOLDED], FIX)
}

/// Each mutation breaks exactly one side condition of one rule.
fn mutations() -> Vec<(&'static str, &'static str, Result<Sequent, muwb_core::kernel::KernelError>)> {
    let tt = node(Rule::ImpI, vec![hyp(&["p"], "p")], &[], "p -> p");
    let mut out = Vec::new();
    let mut push = |name, expected, d: Derivation| out.push((name, expected, check(&d)));

    push(
        "BoxI premise with a hypothesis",
        "NonEmptyContext",
        node(Rule::BoxI("a".into()), vec![hyp(&["p"], "p")], &["p"], "[a] p"),
    );
    push(
        "MuE induction premise with an extra hypothesis",
        "WrongHypotheses",
        node(
            Rule::MuE(wf("mu x . x")),
            vec![hyp(&["mu x . x"], "mu x . x"), hyp(&["ff", "p"], "ff")],
            &["mu x . x"],
            "ff",
        ),
    );
    push(
        "MuE induction premise without its hypothesis",
        "WrongHypotheses",
        node(
            Rule::MuE(wf("mu x . x")),
            vec![hyp(&["mu x . x"], "mu x . x"), tt.clone()],
            &["mu x . x"],
            "p -> p",
        ),
    );
    push(
        "MuI with the wrong unfolding",
        "WrongUnfolding",
        node(Rule::MuI, vec![hyp(&["A -> A"], "A -> A")], &["A -> A"], FIX),
    );
    push(
        "Hyp whose conclusion is not a hypothesis",
        "NotInContext",
        hyp(&[UNFOLDED], "A"),
    );
    push(
        "BoxI with a mismatched action",
        "Parameter",
        node(Rule::BoxI("b".into()), vec![tt.clone()], &[], "[a] (p -> p)"),
    );
    push(
        "MuE with a parameter that is not a mu formula",
        "Parameter",
        node(Rule::MuE(wf("p")), vec![hyp(&["p"], "p"), hyp(&["ff"], "ff")], &["p"], "ff"),
    );
    push(
        "ImpI premise missing the discharged hypothesis",
        "ContextMismatch",
        node(Rule::ImpI, vec![hyp(&["q"], "p")], &["q"], "p -> p"),
    );
    push(
        "ImpE with one premise",
        "PremiseCount",
        node(Rule::ImpE(wf("p")), vec![hyp(&["p"], "p")], &["p"], "p"),
    );
    push(
        "Weaken premise with a hypothesis not in the conclusion",
        "NotSubset",
        node(Rule::Weaken, vec![hyp(&["p", "r"], "p")], &["p", "q"], "p"),
    );
    push(
        "K minor premise boxing the wrong formula",
        "ConclusionMismatch",
        node(
            Rule::K("a".into(), wf("p")),
            vec![hyp(&["[a] (p -> q)", "[a] q"], "[a] (p -> q)"), hyp(&["[a] (p -> q)", "[a] q"], "[a] q")],
            &["[a] (p -> q)", "[a] q"],
            "[a] q",
        ),
    );
    push(
        "MuI on a conclusion that is not a mu formula",
        "Shape",
        node(Rule::MuI, vec![hyp(&[UNFOLDED], UNFOLDED)], &[UNFOLDED], "A"),
    );
    out
}

fn kernel_suite() -> Outcome {
    let golden = check(&golden_simple());
    let golden_ok = golden.as_ref().map(|s| *s == seq(&[UNFOLDED], FIX)).unwrap_or(false);
    let corpus_ok = derive_nu_unfold_test_corpus()
        .iter()
        .all(|e| check(&e.derivation).as_ref() == Ok(&e.expected));

    let mut results: Vec<(String, &'static str, String)> = mutations()
        .into_iter()
        .map(|(name, expected, r)| {
            let got = match r {
                Ok(_) => "accepted".to_owned(),
                Err(e) => e.reason.kind().to_owned(),
            };
            (name.to_owned(), expected, got)
        })
        .collect();

    // μx.¬x smuggled into a hypothesis of the golden derivation
    let mut raw = RawDerivation::from(&golden_simple());
    raw.premises[0].hyps.push(parse_formula("mu x . ~x").unwrap());
    let got = match check_raw(&raw) {
        Ok(_) => "accepted".to_owned(),
        Err(e) if e.path == vec![0] => e.reason.kind().to_owned(),
        Err(e) => format!("{} at {:?}", e.reason.kind(), e.path),
    };
    results.push(("ill-formed mu x . ~x smuggled into a premise".to_owned(), "IllFormed", got));

    let wrong: Vec<String> = results
        .iter()
        .filter(|(_, want, got)| want != got)
        .map(|(name, want, got)| format!("{name}: wanted {want}, got {got}"))
        .collect();
    outcome(
        golden_ok && corpus_ok && wrong.is_empty() && results.len() >= 10,
        format!(
            "golden {}, corpus {}, {}/{} mutations rejected as designated{}",
            if golden_ok { "accepted" } else { "REJECTED" },
            if corpus_ok { "accepted" } else { "REJECTED" },
            results.len() - wrong.len(),
            results.len(),
            wrong.first().map(|w| format!("; {w}")).unwrap_or_default()
        ),
    )
}

fn soundness() -> Outcome {
    let corpus = derive_nu_unfold_test_corpus();
    let battery = Battery::new(200, SEED);
    let bounds = Bounds::default();
    let mut total = 0;
    let mut failing = Vec::new();
    for e in &corpus {
        let proved = match check(&e.derivation) {
            Ok(s) => s,
            Err(err) => return outcome(false, format!("{} does not check: {err}", e.name)),
        };
        let v = violations(&proved, &battery, &bounds).expect("within bounds");
        if !v.is_empty() {
            failing.push(e.name);
        }
        total += v.len();
    }
    outcome(
        total == 0 && corpus.len() >= 12,
        format!(
            "{} derivations x 200 models (at most 4 states, seed {SEED}), {total} violations{}",
            corpus.len(),
            if failing.is_empty() { String::new() } else { format!(" in {}", failing.join(", ")) }
        ),
    )
}

fn corpus_formulas() -> Vec<Preformula> {
    let mut out = formula_corpus();
    for e in derive_nu_unfold_test_corpus() {
        let s = &e.expected;
        out.extend(s.hyps.iter().map(|h| h.prp().clone()));
        out.push(s.concl.prp().clone());
    }
    out
}

fn round_trip() -> Outcome {
    let mut formulas = corpus_formulas();
    let from_corpus = formulas.len();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let alphabet = Alphabet::default();
    formulas.extend((0..1000).map(|_| random_preformula(&mut rng, 6, &alphabet)));
    let mut failures = Vec::new();
    for phi in &formulas {
        let text = print_formula(phi);
        match parse_formula_with(&text, &free_vars(phi)) {
            Ok(back) if &back == phi && print_formula(&back) == text => {}
            Ok(back) => failures.push(format!("{text} came back as {}", print_formula(&back))),
            Err(e) => failures.push(format!("{text}: {e}")),
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{from_corpus} corpus formulas + 1000 random (depth <= 6), {} failures{}",
            failures.len(),
            failures.first().map(|f| format!("; {f}")).unwrap_or_default()
        ),
    )
}

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn session_replay() -> Outcome {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/simple.mu");
    let text = std::fs::read_to_string(&path).expect("shipped script");
    let script = parse_script(&text).expect("parses");
    let steps = script.steps.len();
    let replayed = replay(&script).is_ok();

    let out = Command::new(env!("CARGO_BIN_EXE_muwb"))
        .arg("check")
        .arg(&path)
        .output()
        .expect("runs");
    let report = String::from_utf8_lossy(&out.stdout).into_owned();
    let exit = out.status.code();

    let doc = std::fs::read_to_string(workspace().join("docs/protocol.md")).unwrap_or_default();
    let documented = ["Intros.", "Apply mu_I; Intros.", "Rewrite H1.", "Apply H.", "`intro`", "`mu_I`", "`assumption`"]
        .iter()
        .all(|needle| doc.contains(needle));

    outcome(
        steps == 3 && replayed && exit == Some(0) && report == "simple: OK (3 steps)\n" && documented,
        format!(
            "{steps} tactic steps, replay {}, check exit {:?} \"{}\", mapping {}",
            if replayed { "reaches qed" } else { "FAILS" },
            exit,
            report.trim_end(),
            if documented { "documented" } else { "MISSING from docs/protocol.md" }
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(usize, &str, u64, fn() -> Outcome); 8] = [
        (1, "positivity oracle equivalence", 10, positivity_oracle),
        (2, "fixpoint oracle equivalence", 60, fixpoint_oracle),
        (3, "positivity implies monotonicity", 30, monotonicity),
        (4, "occurrence laws", 10, occurrence_laws),
        (5, "kernel golden and mutation suite", 5, kernel_suite),
        (6, "empirical soundness", 60, soundness),
        (7, "parser round trip", 10, round_trip),
        (8, "session replay", 60, session_replay),
    ];
    let mut failed = 0;
    for (n, name, limit, run) in criteria {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(limit);
        let pass = o.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {n}: {name}: {} [{:.2}s, limit {limit}s{}]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", TOO SLOW" }
        );
    }
    if failed == 0 {
        println!("acceptance: 8/8 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 8 criteria FAIL");
        ExitCode::FAILURE
    }
}
