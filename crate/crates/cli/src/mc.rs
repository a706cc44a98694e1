use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use muwb_core::parser::{parse_formula_with, parse_model, ModelError};
use muwb_core::semantics::{counterexample, environments, eval_wf, Bounds, Environment, StateSet, TransitionSystem};
use muwb_core::syntax::{free_vars, mk_wf, Var, WfFormula};
use serde_json::{json, Value};

use crate::input::InputError;
use crate::{Report, Status};

/// Environments listed in the text report before eliding the rest.
const SHOWN_ENVIRONMENTS: usize = 64;

#[derive(Clone, Debug, Default)]
pub struct Query {
    pub formula: String,
    pub hyps: Vec<String>,
    /// Identifiers read as variables rather than atoms.
    pub vars: Vec<String>,
    /// Fixed assignments `x=s0,s1`; unassigned variables are `∅`.
    pub env: Vec<String>,
    /// Fail when the consequence does not hold.
    pub assert: bool,
}

fn model_error(path: &Path, e: ModelError) -> Report {
    match e {
        ModelError::Syntax(p) => Report::usage(InputError::parse(path, &p).to_string()),
        other => Report::usage(format!("{}: {other}", path.display())),
    }
}

fn formula(label: &str, text: &str, vars: &BTreeSet<Var>) -> Result<WfFormula, Report> {
    let pre = parse_formula_with(text, vars)
        .map_err(|e| Report::usage(InputError::parse(&PathBuf::from(label), &e).to_string()))?;
    mk_wf(pre).map_err(|e| {
        let mut r = Report::usage(format!("{label}: IllFormed: {e}"));
        r.json = json!({
            "ok": false,
            "error": "IllFormed",
            "formula": text,
            "path": e.path,
            "variable": e.variable,
            "occurrence": e.occurrence,
        });
        r
    })
}

fn parse_env(m: &TransitionSystem, specs: &[String]) -> Result<Environment, Report> {
    let mut env = Environment::new();
    for spec in specs {
        let (x, states) = spec
            .split_once('=')
            .ok_or_else(|| Report::usage(format!("--env {spec:?}: expected VAR=STATE,STATE")))?;
        let mut set = m.empty_set();
        for s in states.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let i = m
                .state_index(s)
                .ok_or_else(|| Report::usage(format!("--env {spec:?}: no state named `{s}`")))?;
            set.insert(i);
        }
        env.set(Var::from(x.trim()), set);
    }
    Ok(env)
}

fn names<'m>(m: &'m TransitionSystem, set: &StateSet) -> Vec<&'m str> {
    set.iter().map(|i| m.state_name(i)).collect()
}

fn env_json(m: &TransitionSystem, env: &Environment) -> Value {
    let map: serde_json::Map<String, Value> = env
        .iter()
        .map(|(x, s)| (x.to_string(), json!(names(m, s))))
        .collect();
    Value::Object(map)
}

/// Evaluates a formula on a model and checks `hyps ⊨ formula` over all environments.
pub fn run(model_path: &Path, q: &Query) -> Report {
    run_with(model_path, q, &Bounds::default())
}

pub fn run_with(model_path: &Path, q: &Query, bounds: &Bounds) -> Report {
    let text = match std::fs::read_to_string(model_path) {
        Ok(t) => t,
        Err(e) => return Report::usage(format!("{}: {e}", model_path.display())),
    };
    let m = match parse_model(&text) {
        Ok(m) => m,
        Err(e) => return model_error(model_path, e),
    };
    match evaluate(&m, q, bounds) {
        Ok(r) | Err(r) => r,
    }
}

fn evaluate(m: &TransitionSystem, q: &Query, bounds: &Bounds) -> Result<Report, Report> {
    let mut vars: BTreeSet<Var> = q.vars.iter().map(|v| Var::from(v.as_str())).collect();
    for spec in &q.env {
        if let Some((x, _)) = spec.split_once('=') {
            vars.insert(Var::from(x.trim()));
        }
    }
    let phi = formula("formula", &q.formula, &vars)?;
    let hyps = q
        .hyps
        .iter()
        .enumerate()
        .map(|(i, h)| formula(&format!("hypothesis {}", i + 1), h, &vars))
        .collect::<Result<Vec<_>, _>>()?;

    let mut text = String::new();
    let _ = writeln!(text, "formula: {phi}");
    let fv = free_vars(phi.prp());

    let mut rows = Vec::new();
    if !q.env.is_empty() || fv.is_empty() {
        let env = parse_env(m, &q.env)?;
        let value = eval_wf(m, &env, &phi);
        if fv.is_empty() {
            let _ = writeln!(text, "denotation: {}", m.show(&value));
        } else {
            let _ = writeln!(text, "denotation under {}: {}", env.show(m), m.show(&value));
        }
        rows.push(json!({ "env": env_json(m, &env), "states": names(m, &value) }));
    } else {
        let envs = environments(m, &fv, bounds).map_err(|e| Report::usage(format!("BoundExceeded: {e}")))?;
        let _ = writeln!(text, "denotation per environment over {}:", show_vars(&fv));
        let mut total = 0;
        for env in envs {
            let value = eval_wf(m, &env, &phi);
            if total < SHOWN_ENVIRONMENTS {
                let _ = writeln!(text, "  {} : {}", env.show(m), m.show(&value));
            }
            rows.push(json!({ "env": env_json(m, &env), "states": names(m, &value) }));
            total += 1;
        }
        if total > SHOWN_ENVIRONMENTS {
            let _ = writeln!(text, "  ... {} more", total - SHOWN_ENVIRONMENTS);
        }
    }

    let hyp_text: Vec<String> = hyps.iter().map(ToString::to_string).collect();
    let claim = if hyps.is_empty() {
        format!("|= {phi}")
    } else {
        format!("{} |= {phi}", hyp_text.join(", "))
    };
    let cex = counterexample(m, &hyps, &phi, &BTreeSet::new(), bounds)
        .map_err(|e| Report::usage(format!("BoundExceeded: {e}")))?;
    let consequence = match &cex {
        None => {
            let _ = writeln!(text, "consequence {claim}: holds");
            json!({ "claim": claim, "holds": true })
        }
        Some((env, s)) => {
            let _ = writeln!(
                text,
                "consequence {claim}: fails at state {} under {}",
                m.state_name(*s),
                env.show(m)
            );
            json!({
                "claim": claim,
                "holds": false,
                "counterexample": { "state": m.state_name(*s), "env": env_json(m, env) },
            })
        }
    };
    let status = if q.assert && cex.is_some() {
        Status::Failure
    } else {
        Status::Success
    };
    Ok(Report {
        status,
        text,
        json: json!({
            "ok": status == Status::Success,
            "formula": phi.to_string(),
            "hyps": hyp_text,
            "denotation": rows,
            "consequence": consequence,
        }),
    })
}

fn show_vars(vars: &BTreeSet<Var>) -> String {
    let v: Vec<&str> = vars.iter().map(Var::as_str).collect();
    v.join(", ")
}
