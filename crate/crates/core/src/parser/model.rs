use std::collections::BTreeMap;

use serde::Deserialize;

use super::{ParseError, Span};
pub use crate::semantics::ModelError;
use crate::semantics::TransitionSystem;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    states: Vec<String>,
    #[serde(default)]
    props: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    trans: BTreeMap<String, BTreeMap<String, Vec<String>>>,
}

/// Reads a model document:
///
/// ```json
/// { "states": ["s0", "s1"],
///   "props":  { "p": ["s0"] },
///   "trans":  { "a": { "s0": ["s1"] } } }
/// ```
pub fn parse_model(text: &str) -> Result<TransitionSystem, ModelError> {
    let doc: ModelDoc = serde_json::from_str(text).map_err(|e| json_error(text, &e))?;
    if doc.states.is_empty() {
        let at = text.find("\"states\"").unwrap_or(0);
        return Err(ParseError::new(text, at, at + "\"states\"".len(), "a nonempty list of states", "`[]`").into());
    }
    let mut m = TransitionSystem::new(doc.states)?;
    for (p, states) in &doc.props {
        m.set_prop(p.as_str(), states)?;
    }
    for (a, edges) in &doc.trans {
        for (from, targets) in edges {
            if targets.is_empty() {
                // still validate the source state
                m.state_index(from).ok_or_else(|| ModelError::UndeclaredState {
                    state: from.clone(),
                    context: format!("action `{a}`"),
                })?;
            }
            for to in targets {
                m.add_transition(a.as_str(), from, to)?;
            }
        }
    }
    Ok(m)
}

fn json_error(text: &str, e: &serde_json::Error) -> ParseError {
    let offset = offset_of(text, e.line(), e.column());
    let end = (offset + 1).min(text.len());
    ParseError {
        span: Span::locate(text, offset, end),
        expected: vec!["a model document with `states`, `props`, `trans`".to_owned()],
        found: e.to_string(),
    }
}

fn offset_of(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = text
        .split_inclusive('\n')
        .take(line - 1)
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{ActionId, AtomId};

    #[test]
    fn two_state_model() {
        let m = parse_model(r#"{"states":["s0","s1"], "props":{"p":["s0"]}, "trans":{"a":{"s0":["s1"]}}}"#).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.show(&m.prop(&AtomId::from("p"))), "{s0}");
        assert_eq!(m.show(&m.successors(&ActionId::from("a"), 0)), "{s1}");
        assert!(m.successors(&ActionId::from("a"), 1).is_empty());
        assert!(m.prop(&AtomId::from("q")).is_empty());
    }

    #[test]
    fn undeclared_state() {
        let err = parse_model(r#"{"states":["s0"], "props":{"p":["s9"]}}"#).unwrap_err();
        assert!(matches!(err, ModelError::UndeclaredState { ref state, .. } if state == "s9"));
        let err = parse_model(r#"{"states":["s0"], "trans":{"a":{"s0":["s9"]}}}"#).unwrap_err();
        assert!(matches!(err, ModelError::UndeclaredState { .. }));
        let err = parse_model(r#"{"states":["s0"], "trans":{"a":{"s7":[]}}}"#).unwrap_err();
        assert!(matches!(err, ModelError::UndeclaredState { .. }));
    }

    #[test]
    fn empty_states_is_a_parse_error() {
        let text = r#"{"states": []}"#;
        let err = parse_model(text).unwrap_err();
        let ModelError::Syntax(pe) = err else {
            panic!("expected syntax error, got {err:?}")
        };
        assert!(pe.span.end <= text.len());
    }

    #[test]
    fn malformed_json_has_span() {
        let text = "{\"states\": [\"s0\",\n  }";
        let ModelError::Syntax(pe) = parse_model(text).unwrap_err() else {
            panic!("expected syntax error")
        };
        assert_eq!(pe.span.line, 2);
        assert!(pe.span.start <= text.len());
    }

    #[test]
    fn duplicate_state() {
        let err = parse_model(r#"{"states":["s0","s0"]}"#).unwrap_err();
        assert_eq!(err, ModelError::DuplicateState("s0".into()));
    }
}
