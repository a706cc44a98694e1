use std::fmt::Write as _;
use std::path::Path;

use muwb_core::kernel::check as kernel_check;
use serde_json::json;

use crate::input::{load, prove};
use crate::{Report, Status};

/// Replays every lemma under `path` and reports each one.
pub fn run(path: &Path) -> Report {
    let lemmas = match load(path) {
        Ok(l) => l,
        Err(e) => return Report::usage(e.to_string()),
    };
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut failed = 0;
    for lemma in &lemmas {
        match prove(lemma, kernel_check) {
            Ok(p) => {
                let _ = writeln!(text, "{}: OK ({} {})", lemma.name, p.steps, p.unit);
                rows.push(json!({
                    "name": lemma.name,
                    "ok": true,
                    "sequent": p.sequent.to_string(),
                    "steps": p.steps,
                    "unit": p.unit,
                }));
            }
            Err(f) => {
                failed += 1;
                let _ = writeln!(text, "{}: FAIL at {}: {} [{}]", lemma.name, f.location, f.message, f.kind);
                rows.push(json!({
                    "name": lemma.name,
                    "ok": false,
                    "failure": { "at": f.location, "reason": f.kind, "message": f.message },
                }));
            }
        }
    }
    if lemmas.is_empty() {
        let _ = writeln!(text, "no lemmas found");
    } else if lemmas.len() > 1 {
        let _ = writeln!(text, "{} of {} lemmas OK", lemmas.len() - failed, lemmas.len());
    }
    Report {
        status: if failed == 0 { Status::Success } else { Status::Failure },
        text,
        json: json!({ "ok": failed == 0, "path": path.display().to_string(), "lemmas": rows }),
    }
}
