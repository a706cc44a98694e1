//! The session protocol: one JSON request in, one JSON reply out.
//!
//! Message shapes are documented in `docs/protocol.md`. [`Server`] holds
//! any number of independent sessions; each session is behind its own lock,
//! so commands for one session are serialized while other sessions proceed.

use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{hypothesis_labels, parse_tactic, replay_partial, GoalState, ReplayError, Tactic};
use crate::kernel::Sequent;
use crate::parser::{parse_formula_with, parse_script, parse_sequent, print_formula, print_script, ParseError};
use crate::syntax::{mk_wf, Var};

pub const DEFAULT_MAX_SESSIONS: usize = 64;

#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Request {
    New {
        lemma: String,
        sequent: String,
        #[serde(default)]
        vars: Vec<String>,
    },
    Tactic {
        id: u64,
        tactic: String,
    },
    State {
        id: u64,
    },
    Undo {
        id: u64,
    },
    Qed {
        id: u64,
    },
    Applicable {
        id: u64,
    },
    Export {
        id: u64,
    },
    Import {
        script: String,
    },
    Close {
        id: u64,
    },
    CheckFormula {
        text: String,
        #[serde(default)]
        vars: Vec<String>,
    },
}

#[derive(Debug, Serialize)]
pub struct ErrorReply {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl ErrorReply {
    fn new(kind: &'static str, message: impl Into<String>) -> Self {
        ErrorReply {
            kind,
            message: message.into(),
            detail: None,
        }
    }

    fn with(mut self, detail: Value) -> Self {
        self.detail = Some(detail);
        self
    }

    fn parse(e: &ParseError) -> Self {
        ErrorReply::new("ParseError", e.to_string()).with(json!({ "span": e.span, "expected": e.expected }))
    }
}

type Reply = Result<Value, ErrorReply>;

/// Multi-session protocol handler.
pub struct Server {
    sessions: Mutex<HashMap<u64, Arc<Mutex<GoalState>>>>,
    next_id: AtomicU64,
    max_sessions: usize,
}

impl Default for Server {
    fn default() -> Self {
        Self::new(DEFAULT_MAX_SESSIONS)
    }
}

impl Server {
    pub fn new(max_sessions: usize) -> Self {
        Server {
            sessions: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(1),
            max_sessions,
        }
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().expect("session table poisoned").len()
    }

    /// Handles one request line; never panics on malformed input.
    pub fn handle_line(&self, line: &str) -> String {
        let raw: Value = match serde_json::from_str(line) {
            Ok(v) => v,
            Err(e) => return render(None, Err(ErrorReply::new("Malformed", e.to_string()))),
        };
        let tag = raw.get("req").cloned();
        let reply = match serde_json::from_value::<Request>(strip_req(raw)) {
            Ok(req) => self.handle(req),
            Err(e) => Err(ErrorReply::new("Malformed", e.to_string())),
        };
        render(tag, reply)
    }

    pub fn handle(&self, req: Request) -> Reply {
        match req {
            Request::New { lemma, sequent, vars } => {
                let vars = to_vars(vars);
                let (hyps, concl) = parse_sequent(&sequent, &vars).map_err(|e| ErrorReply::parse(&e))?;
                let state = GoalState::from_preformulas(lemma, &hyps, &concl, vars).map_err(ill_formed)?;
                self.open(state, None)
            }
            Request::Import { script } => {
                let script = parse_script(&script).map_err(|e| ErrorReply::parse(&e))?;
                let (state, failure) = replay_partial(&script).map_err(replay_error)?;
                self.open(state, failure)
            }
            Request::Tactic { id, tactic } => self.with_session(id, |s| {
                let t = parse_tactic(&tactic, s.vars()).map_err(|e| ErrorReply::parse(&e))?;
                let t = t.checked().map_err(ill_formed)?;
                s.apply_tactic(t).map_err(|e| {
                    ErrorReply::new("TacticError", e.to_string()).with(json!({ "reason": e.kind() }))
                })?;
                Ok(json!({ "id": id, "state": state_json(s) }))
            }),
            Request::State { id } => self.with_session(id, |s| Ok(json!({ "id": id, "state": state_json(s) }))),
            Request::Undo { id } => self.with_session(id, |s| {
                s.apply_tactic(Tactic::Undo)
                    .map_err(|e| ErrorReply::new("TacticError", e.to_string()).with(json!({ "reason": e.kind() })))?;
                Ok(json!({ "id": id, "state": state_json(s) }))
            }),
            Request::Applicable { id } => self.with_session(id, |s| {
                let tactics: Vec<Value> = s
                    .applicable()
                    .into_iter()
                    .map(|t| json!({ "name": t.keyword(), "needs_formula": t.needs_formula() }))
                    .collect();
                Ok(json!({ "id": id, "tactics": tactics }))
            }),
            Request::Export { id } => self.with_session(id, |s| {
                Ok(json!({ "id": id, "script": print_script(&s.to_script()) }))
            }),
            Request::Qed { id } => {
                let reply = self.with_session(id, |s| {
                    let steps = s.applied().count();
                    let d = s.qed().map_err(|e| ErrorReply::new("SessionError", e.to_string()))?;
                    Ok(json!({
                        "id": id,
                        "summary": {
                            "lemma": s.lemma(),
                            "sequent": d.concl.to_string(),
                            "steps": steps,
                            "nodes": d.size(),
                            "rules": d.rules(),
                        }
                    }))
                });
                if reply.is_ok() {
                    self.sessions.lock().expect("session table poisoned").remove(&id);
                }
                reply
            }
            Request::Close { id } => {
                let removed = self.sessions.lock().expect("session table poisoned").remove(&id);
                match removed {
                    Some(_) => Ok(json!({ "id": id, "closed": true })),
                    None => Err(unknown(id)),
                }
            }
            Request::CheckFormula { text, vars } => {
                let phi = parse_formula_with(&text, &to_vars(vars)).map_err(|e| ErrorReply::parse(&e))?;
                let printed = print_formula(&phi);
                mk_wf(phi).map_err(ill_formed)?;
                Ok(json!({ "formula": printed, "wf": true }))
            }
        }
    }

    fn open(&self, state: GoalState, failure: Option<ReplayError>) -> Reply {
        let mut table = self.sessions.lock().expect("session table poisoned");
        if table.len() >= self.max_sessions {
            return Err(ErrorReply::new(
                "TooManySessions",
                format!("the server holds its maximum of {} sessions", self.max_sessions),
            ));
        }
        let id = self.next_id.fetch_add(1, Ordering::Relaxed);
        let state_value = state_json(&state);
        table.insert(id, Arc::new(Mutex::new(state)));
        let mut reply = json!({ "id": id, "state": state_value });
        if let Some(f) = failure {
            reply["failed"] = json!({ "step": f.step, "message": f.cause.to_string() });
        }
        Ok(reply)
    }

    fn with_session(&self, id: u64, f: impl FnOnce(&mut GoalState) -> Reply) -> Reply {
        let session = self
            .sessions
            .lock()
            .expect("session table poisoned")
            .get(&id)
            .cloned()
            .ok_or_else(|| unknown(id))?;
        let mut guard = session.lock().unwrap_or_else(|p| p.into_inner());
        f(&mut guard)
    }
}

fn strip_req(mut v: Value) -> Value {
    if let Some(obj) = v.as_object_mut() {
        obj.remove("req");
    }
    v
}

fn render(tag: Option<Value>, reply: Reply) -> String {
    let mut out = match reply {
        Ok(mut v) => {
            v["ok"] = json!(true);
            v
        }
        Err(e) => json!({ "ok": false, "error": e }),
    };
    if let Some(tag) = tag {
        out["req"] = tag;
    }
    out.to_string()
}

fn to_vars(vars: Vec<String>) -> BTreeSet<Var> {
    vars.into_iter().map(Var::from).collect()
}

fn unknown(id: u64) -> ErrorReply {
    ErrorReply::new("UnknownSession", format!("no session with id {id}"))
}

fn ill_formed(e: crate::syntax::WellFormednessError) -> ErrorReply {
    ErrorReply::new("IllFormed", e.to_string())
        .with(json!({ "path": e.path, "variable": e.variable, "occurrence": e.occurrence }))
}

fn replay_error(e: ReplayError) -> ErrorReply {
    ErrorReply::new("ReplayError", e.to_string()).with(json!({ "step": e.step }))
}

fn goal_json(g: &Sequent) -> Value {
    let hyps: Vec<Value> = hypothesis_labels(g)
        .into_iter()
        .map(|(label, f)| json!({ "label": label, "formula": f.to_string() }))
        .collect();
    json!({ "hyps": hyps, "concl": g.concl.to_string() })
}

/// The full goal display of a session as sent to clients.
pub fn state_json(s: &GoalState) -> Value {
    let goals: Vec<Value> = s.goals().into_iter().map(goal_json).collect();
    json!({
        "lemma": s.lemma(),
        "claim": s.claim().to_string(),
        "goals": goals,
        "display": s.display(),
        "steps": s.applied().count(),
        "can_undo": s.can_undo(),
        "proved": s.is_complete(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(server: &Server, msg: Value) -> Value {
        serde_json::from_str(&server.handle_line(&msg.to_string())).unwrap()
    }

    const CLAIM: &str = "|- (A -> mu x . A -> x) -> mu x . A -> x";

    #[test]
    fn simple_lemma_over_the_protocol() {
        let srv = Server::default();
        let r = call(&srv, json!({"op": "new", "lemma": "simple", "sequent": CLAIM}));
        assert_eq!(r["ok"], true);
        let id = r["id"].as_u64().unwrap();
        assert!(r["state"]["display"].as_str().unwrap().starts_with("1 subgoal\n"));
        assert_eq!(r["state"]["goals"][0]["hyps"].as_array().unwrap().len(), 0);

        let r = call(&srv, json!({"op": "tactic", "id": id, "tactic": "intro"}));
        assert_eq!(r["state"]["goals"][0]["hyps"][0]["label"], "H");

        call(&srv, json!({"op": "tactic", "id": id, "tactic": "mu_I"}));
        let r = call(&srv, json!({"op": "state", "id": id}));
        assert_eq!(r["state"]["goals"][0]["concl"], "A -> mu x . A -> x");

        let r = call(&srv, json!({"op": "applicable", "id": id}));
        let names: Vec<&str> = r["tactics"].as_array().unwrap().iter().map(|t| t["name"].as_str().unwrap()).collect();
        assert!(names.contains(&"assumption"));
        assert!(names.contains(&"intro"));

        call(&srv, json!({"op": "tactic", "id": id, "tactic": "assumption"}));
        let r = call(&srv, json!({"op": "export", "id": id}));
        let script = r["script"].as_str().unwrap().to_owned();
        assert_eq!(
            script,
            "lemma simple : |- (A -> mu x . A -> x) -> mu x . A -> x\n  intro\n  mu_I\n  assumption\nqed\n"
        );

        let r = call(&srv, json!({"op": "qed", "id": id}));
        assert_eq!(r["ok"], true);
        assert_eq!(r["summary"]["steps"], 3);
        let r = call(&srv, json!({"op": "qed", "id": id}));
        assert_eq!(r["error"]["kind"], "UnknownSession");
    }

    #[test]
    fn errors_are_replies() {
        let srv = Server::default();
        let r = call(&srv, json!({"op": "tactic", "id": 99, "tactic": "intro"}));
        assert_eq!(r["ok"], false);
        assert_eq!(r["error"]["kind"], "UnknownSession");

        for bad in ["not json", "{}", "{\"op\": \"warp\"}", "[1,2]", "{\"op\":\"state\"}"] {
            let r: Value = serde_json::from_str(&srv.handle_line(bad)).unwrap();
            assert_eq!(r["ok"], false, "{bad}");
            assert_eq!(r["error"]["kind"], "Malformed");
        }

        let r = call(&srv, json!({"op": "new", "lemma": "bad", "sequent": "|- mu x . ~x"}));
        assert_eq!(r["error"]["kind"], "IllFormed");
        assert_eq!(r["error"]["detail"]["variable"], "x");
    }

    #[test]
    fn failing_tactic_keeps_state() {
        let srv = Server::default();
        let r = call(&srv, json!({"op": "new", "lemma": "t", "sequent": "p |- p"}));
        let id = r["id"].as_u64().unwrap();
        let before = call(&srv, json!({"op": "state", "id": id}));
        let r = call(&srv, json!({"op": "tactic", "id": id, "tactic": "mu_I", "req": 7}));
        assert_eq!(r["error"]["kind"], "TacticError");
        assert_eq!(r["req"], 7);
        let after = call(&srv, json!({"op": "state", "id": id}));
        assert_eq!(before["state"], after["state"]);
        let r = call(&srv, json!({"op": "undo", "id": id}));
        assert_eq!(r["error"]["detail"]["reason"], "EmptyHistory");
    }

    #[test]
    fn session_limit() {
        let srv = Server::new(1);
        let r = call(&srv, json!({"op": "new", "lemma": "a", "sequent": "p |- p"}));
        assert_eq!(r["ok"], true);
        let r = call(&srv, json!({"op": "new", "lemma": "b", "sequent": "p |- p"}));
        assert_eq!(r["error"]["kind"], "TooManySessions");
        let id = 1;
        let r = call(&srv, json!({"op": "close", "id": id}));
        assert_eq!(r["closed"], true);
        let r = call(&srv, json!({"op": "new", "lemma": "b", "sequent": "p |- p"}));
        assert_eq!(r["ok"], true);
    }

    #[test]
    fn import_stops_at_first_failure() {
        let srv = Server::default();
        let script = "lemma s : |- (A -> mu x . A -> x) -> mu x . A -> x\n  intro\n  box_I\n  assumption\nqed\n";
        let r = call(&srv, json!({"op": "import", "script": script}));
        assert_eq!(r["ok"], true);
        assert_eq!(r["failed"]["step"], 2);
        assert_eq!(r["state"]["steps"], 1);

        let truncated = "lemma s : |- (A -> mu x . A -> x) -> mu x . A -> x\n  intro\n";
        let r = call(&srv, json!({"op": "import", "script": truncated}));
        assert!(r.get("failed").is_none());
        assert_eq!(r["state"]["proved"], false);
    }

    #[test]
    fn check_formula() {
        let srv = Server::default();
        let r = call(&srv, json!({"op": "check_formula", "text": "nu x . [a] x"}));
        assert_eq!(r["wf"], true);
        let r = call(&srv, json!({"op": "check_formula", "text": "mu x . x -> P"}));
        assert_eq!(r["error"]["kind"], "IllFormed");
        let r = call(&srv, json!({"op": "check_formula", "text": "P ->"}));
        assert_eq!(r["error"]["kind"], "ParseError");
        assert_eq!(r["error"]["detail"]["span"]["start"], 4);
    }
}
