use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::time::Duration;

use muwb_cli::input::{load, parse_derivations};
use muwb_cli::soundness::{run as soundness, Battery};
use muwb_cli::Status;
use muwb_core::kernel::{check, check_skipping_box_i_context};
use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_muwb"))
}

fn examples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("MUWB_SEED").output().expect("runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const BROKEN_MU_E: &str = r#"{
  "lemma": "mu_bottom_extra",
  "derivation": {
    "rule": "MuE", "formula": "mu x . x", "hyps": ["mu x . x"], "concl": "ff",
    "premises": [
      { "rule": "Hyp", "hyps": ["mu x . x"], "concl": "mu x . x" },
      { "rule": "Hyp", "hyps": ["ff", "p"], "concl": "ff" }
    ]
  }
}"#;

const BOX_I_IN_CONTEXT: &str = r#"{
  "lemma": "box_everything",
  "derivation": {
    "rule": "BoxI", "action": "a", "hyps": ["p"], "concl": "[a] p",
    "premises": [ { "rule": "Hyp", "hyps": ["p"], "concl": "p" } ]
  }
}"#;

#[test]
fn check_simple() {
    let o = run(&["check", examples().join("simple.mu").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "simple: OK (3 steps)\n");
}

#[test]
fn check_corpus_directory() {
    let o = run(&["check", examples().join("corpus").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("15 of 15 lemmas OK\n"));
}

#[test]
fn check_json_format() {
    let o = run(&["check", examples().join("simple.mu").to_str().unwrap(), "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ok"], true);
    assert_eq!(v["lemmas"][0]["name"], "simple");
    assert_eq!(v["lemmas"][0]["steps"], 3);
    assert_eq!(v["lemmas"][0]["sequent"], "|- (A -> mu x . A -> x) -> mu x . A -> x");
}

#[test]
fn check_broken_mu_e() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "broken.json", BROKEN_MU_E);
    let o = run(&["check", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("mu_bottom_extra: FAIL at root:"), "{out}");
    assert!(out.contains("[WrongHypotheses]"), "{out}");
}

#[test]
fn check_failing_script() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        &dir,
        "permuted.mu",
        "lemma simple : |- (A -> mu x . A -> x) -> mu x . A -> x\n  mu_I\n  intro\n  assumption\nqed\n",
    );
    let o = run(&["check", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("simple: FAIL at step 1:"));

    let p = write(&dir, "open.mu", "lemma open : |- p -> p\n  intro\nqed\n");
    let o = run(&["check", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL at qed"));
}

#[test]
fn check_errors_exit_2() {
    let o = run(&["check", "/no/such/file.mu"]);
    assert_eq!(o.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "bad.mu", "lemma bad : |- p\n  frobnicate\n");
    let o = run(&["check", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.mu:2:3:"), "{err}");

    let o = run(&["frob"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mc_examples() {
    let model = examples().join("two_state.json");
    let m = model.to_str().unwrap();
    let o = run(&["mc", m, "mu x . ~P -> [a] x"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("denotation: {s0, s1}\n"));

    let o = run(&["mc", m, "mu x . ~x"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("IllFormed"));
    let o = run(&["mc", m, "mu x . ~x", "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["error"], "IllFormed");
    assert_eq!(v["path"], json!([]));
    assert_eq!(v["occurrence"], json!([0, 0]));

    let phi = "nu y . P | <a> y";
    let o = run(&["mc", m, phi, "--hyp", phi, "--assert"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(": holds\n"));
}

#[test]
fn mc_assert_and_counterexample() {
    let m = examples().join("two_state.json");
    let m = m.to_str().unwrap();
    let o = run(&["mc", m, "x -> P", "--vars", "x", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["consequence"]["holds"], false);
    assert_eq!(v["denotation"].as_array().unwrap().len(), 4);
    assert_eq!(v["consequence"]["counterexample"]["state"], "s0");

    let o = run(&["mc", m, "x -> P", "--vars", "x", "--assert"]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(&["mc", m, "x", "--env", "x=s1"]);
    assert!(stdout(&o).contains("denotation under {x = {s1}}: {s1}"));
}

#[test]
fn mc_bad_model() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "m.json", "{\"states\": [\"s0\"], \"props\": {\"p\": [\"s3\"]}}");
    let o = run(&["mc", p.to_str().unwrap(), "p"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn soundness_on_shipped_corpus() {
    let o = run(&["soundness", examples().join("corpus").to_str().unwrap(), "--battery", "50", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("seed 7, 50 models per sequent"), "{out}");
    assert!(out.ends_with("0 violations in 15 sequents\n"));
}

#[test]
fn soundness_seed_from_environment() {
    let o = bin()
        .args(["soundness", examples().join("simple.mu").to_str().unwrap(), "--battery", "3"])
        .env("MUWB_SEED", "99")
        .output()
        .unwrap();
    assert!(stdout(&o).starts_with("seed 99,"));
}

#[test]
fn soundness_empty_battery_warns() {
    let o = run(&["soundness", examples().join("simple.mu").to_str().unwrap(), "--battery", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("warning: battery size is 0"));
}

#[test]
fn soundness_detects_weakened_kernel() {
    let lemmas = parse_derivations(Path::new("box.json"), BOX_I_IN_CONTEXT).unwrap();
    let battery = Battery::new(50, 1);

    let honest = soundness(&lemmas, &battery, check);
    assert_eq!(honest.status, Status::Failure);
    assert_eq!(honest.json["unproved"], 1);
    assert_eq!(honest.json["violations"], 0);

    let broken = soundness(&lemmas, &battery, check_skipping_box_i_context);
    assert_eq!(broken.status, Status::Failure);
    assert_eq!(broken.json["unproved"], 0);
    assert!(broken.json["violations"].as_u64().unwrap() > 0, "{}", broken.text);
}

#[test]
fn derivation_files_load_from_directories() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir, "a.json", BROKEN_MU_E);
    std::fs::copy(examples().join("simple.mu"), dir.path().join("b.mu")).unwrap();
    write(&dir, "notes.txt", "ignored");
    let lemmas = load(dir.path()).unwrap();
    let names: Vec<&str> = lemmas.iter().map(|l| l.name.as_str()).collect();
    assert_eq!(names, ["mu_bottom_extra", "simple"]);
}

fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port()
}

struct Served(std::process::Child);

impl Drop for Served {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

fn post(port: u16, body: &Value) -> Value {
    let body = body.to_string();
    let mut s = TcpStream::connect(("127.0.0.1", port)).unwrap();
    write!(
        s,
        "POST /rpc HTTP/1.1\r\nHost: localhost\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
        body.len(),
        body
    )
    .unwrap();
    let mut raw = String::new();
    s.read_to_string(&mut raw).unwrap();
    let (_, payload) = raw.split_once("\r\n\r\n").expect("http response");
    serde_json::from_str(payload).unwrap()
}

fn start_server(port: u16, max_sessions: usize) -> Served {
    let child = bin()
        .args(["serve", "--bind", &format!("127.0.0.1:{port}"), "--max-sessions", &max_sessions.to_string()])
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    for _ in 0..100 {
        if TcpStream::connect(("127.0.0.1", port)).is_ok() {
            return Served(child);
        }
        std::thread::sleep(Duration::from_millis(50));
    }
    panic!("server did not start");
}

#[test]
fn serve_http_session_and_limits() {
    let port = free_port();
    let _server = start_server(port, 1);
    let claim = "|- (A -> mu x . A -> x) -> mu x . A -> x";
    let r = post(port, &json!({"op": "new", "lemma": "simple", "sequent": claim}));
    let id = r["id"].as_u64().unwrap();
    let r = post(port, &json!({"op": "new", "lemma": "other", "sequent": "p |- p"}));
    assert_eq!(r["error"]["kind"], "TooManySessions");

    for t in ["intro", "mu_I", "assumption"] {
        let r = post(port, &json!({"op": "tactic", "id": id, "tactic": t}));
        assert_eq!(r["ok"], true, "{r}");
    }
    let r = post(port, &json!({"op": "state", "id": id}));
    assert_eq!(r["state"]["display"], "Subtree proved!\n");
    let exported = post(port, &json!({"op": "export", "id": id}))["script"].as_str().unwrap().to_owned();
    let r = post(port, &json!({"op": "qed", "id": id}));
    assert_eq!(r["summary"]["steps"], 3);

    // the server is still alive and has room again
    let r = post(port, &json!({"op": "new", "lemma": "other", "sequent": "p |- p"}));
    assert_eq!(r["ok"], true);

    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "exported.mu", &exported);
    let o = run(&["check", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "simple: OK (3 steps)\n");
}

#[test]
fn serve_port_in_use() {
    let taken = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = taken.local_addr().unwrap();
    let o = run(&["serve", "--bind", &addr.to_string()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn serve_stdio() {
    let mut child = bin()
        .args(["serve", "--stdio"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stdin = child.stdin.take().unwrap();
    let mut lines = BufReader::new(child.stdout.take().unwrap()).lines();
    let mut ask = |v: Value| -> Value {
        writeln!(stdin, "{v}").unwrap();
        serde_json::from_str(&lines.next().unwrap().unwrap()).unwrap()
    };
    let script = std::fs::read_to_string(examples().join("simple.mu")).unwrap();
    let r = ask(json!({"op": "import", "script": script, "req": "a"}));
    assert_eq!(r["req"], "a");
    assert_eq!(r["state"]["proved"], true);
    let r = ask(json!({"op": "qed", "id": r["id"]}));
    assert_eq!(r["ok"], true);
    let r: Value = {
        writeln!(stdin, "not json").unwrap();
        serde_json::from_str(&lines.next().unwrap().unwrap()).unwrap()
    };
    assert_eq!(r["error"]["kind"], "Malformed");
    drop(stdin);
    assert!(child.wait().unwrap().success());
}
