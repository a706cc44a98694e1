//! Empirical soundness: every proved sequent must be a consequence on every
//! model of a seeded random battery.

use std::fmt::Write as _;

use muwb_core::kernel::Sequent;
use muwb_core::semantics::{counterexample, random_models, BatterySpec, Bounds, TransitionSystem};
use muwb_core::syntax::{ActionId, AtomId};
use serde_json::{json, Value};

use crate::input::{prove, Checker, Lemma};
use crate::{Report, Status};

pub const DEFAULT_SEED: u64 = 20_240_501;
pub const MAX_STATES: usize = 4;

#[derive(Clone, Copy, Debug)]
pub struct Battery {
    pub size: usize,
    pub seed: u64,
    pub max_states: usize,
}

impl Battery {
    pub fn new(size: usize, seed: u64) -> Self {
        Battery {
            size,
            seed,
            max_states: MAX_STATES,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Violation {
    pub model: usize,
    pub state: String,
    pub env: String,
    pub description: String,
}

/// The battery for one sequent: atoms and actions are those of the sequent,
/// with `a` standing in when it mentions no action.
pub fn battery_for(sequent: &Sequent, battery: &Battery) -> Vec<TransitionSystem> {
    let mut atoms: Vec<AtomId> = Vec::new();
    let mut actions: Vec<ActionId> = Vec::new();
    for f in sequent.hyps.iter().chain(std::iter::once(&sequent.concl)) {
        atoms.extend(f.prp().atoms());
        actions.extend(f.prp().actions());
    }
    atoms.sort();
    atoms.dedup();
    actions.sort();
    actions.dedup();
    if actions.is_empty() {
        actions.push(ActionId::from("a"));
    }
    let spec = BatterySpec::new(battery.max_states, atoms, actions);
    random_models(battery.seed, battery.size, &spec)
}

/// Every model of the battery on which `sequent` fails, with a witness.
pub fn violations(sequent: &Sequent, battery: &Battery, bounds: &Bounds) -> Result<Vec<Violation>, String> {
    let hyps: Vec<_> = sequent.hyps.iter().cloned().collect();
    let mut out = Vec::new();
    for (k, m) in battery_for(sequent, battery).iter().enumerate() {
        let cex = counterexample(m, &hyps, &sequent.concl, &Default::default(), bounds).map_err(|e| e.to_string())?;
        if let Some((env, s)) = cex {
            out.push(Violation {
                model: k,
                state: m.state_name(s).to_owned(),
                env: env.show(m),
                description: describe(m),
            });
        }
    }
    Ok(out)
}

fn describe(m: &TransitionSystem) -> String {
    let states: Vec<&str> = (0..m.len()).map(|i| m.state_name(i)).collect();
    let mut parts = vec![format!("states {{{}}}", states.join(", "))];
    for (p, set) in m.props() {
        parts.push(format!("{p} = {}", m.show(set)));
    }
    for a in m.actions() {
        let edges: Vec<String> = (0..m.len())
            .flat_map(|s| m.successors(a, s).iter().map(move |t| (s, t)).collect::<Vec<_>>())
            .map(|(s, t)| format!("{}->{}", m.state_name(s), m.state_name(t)))
            .collect();
        parts.push(format!("{a}: {}", edges.join(" ")));
    }
    parts.join("; ")
}

pub fn run(lemmas: &[Lemma], battery: &Battery, checker: Checker) -> Report {
    let bounds = Bounds::default();
    let mut text = String::new();
    let _ = writeln!(
        text,
        "seed {}, {} models per sequent, at most {} states",
        battery.seed, battery.size, battery.max_states
    );
    if battery.size == 0 {
        let _ = writeln!(text, "warning: battery size is 0, no model was checked");
    }
    let mut rows: Vec<Value> = Vec::new();
    let mut total_violations = 0;
    let mut unproved = 0;
    for lemma in lemmas {
        let proved = match prove(lemma, checker) {
            Ok(p) => p,
            Err(f) => {
                unproved += 1;
                let _ = writeln!(text, "{}: not proved, {} at {} [{}]", lemma.name, f.message, f.location, f.kind);
                rows.push(json!({ "name": lemma.name, "proved": false, "reason": f.kind }));
                continue;
            }
        };
        let found = match violations(&proved.sequent, battery, &bounds) {
            Ok(v) => v,
            Err(e) => return Report::usage(format!("{}: BoundExceeded: {e}", lemma.name)),
        };
        total_violations += found.len();
        if found.is_empty() {
            let _ = writeln!(text, "{}: {} ok on {} models", lemma.name, proved.sequent, battery.size);
        } else {
            let _ = writeln!(text, "{}: {} VIOLATED on {} models", lemma.name, proved.sequent, found.len());
            for v in &found {
                let _ = writeln!(text, "  model {}: state {} under {}; {}", v.model, v.state, v.env, v.description);
            }
        }
        let detail: Vec<Value> = found
            .iter()
            .map(|v| json!({ "model": v.model, "state": v.state, "env": v.env, "description": v.description }))
            .collect();
        rows.push(json!({
            "name": lemma.name,
            "proved": true,
            "sequent": proved.sequent.to_string(),
            "violations": detail,
        }));
    }
    let _ = writeln!(
        text,
        "{total_violations} violations in {} sequents",
        lemmas.len() - unproved
    );
    let status = if total_violations > 0 || unproved > 0 {
        Status::Failure
    } else {
        Status::Success
    };
    Report {
        status,
        text,
        json: json!({
            "ok": status == Status::Success,
            "seed": battery.seed,
            "battery": battery.size,
            "max_states": battery.max_states,
            "violations": total_violations,
            "unproved": unproved,
            "lemmas": rows,
        }),
    }
}
